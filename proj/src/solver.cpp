#include "semrb/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include "semrb/condense.hpp"

namespace semrb {

void IterationConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) {
    throw std::invalid_argument("relaxation must lie in (0, 1]");
  }
  if (!(continuation_step > 0.0)) throw std::invalid_argument("continuation step must be positive");
}

OseenSolver::OseenSolver(const Discretization& disc, Eigen::VectorXd dirichlet_velocity,
                         VelocityFunction forcing, Exec exec)
    : disc_(&disc), forcing_(std::move(forcing)), exec_(exec) {
  set_dirichlet(std::move(dirichlet_velocity));
}

void OseenSolver::set_dirichlet(Eigen::VectorXd values) {
  if (values.size() != disc_->maps.velocity_global) {
    throw std::invalid_argument("Dirichlet vector must cover all global boundary velocity dofs");
  }
  dirichlet_ = std::move(values);
}

FlowField OseenSolver::lift_field() const {
  return make_field(*disc_, dirichlet_, Eigen::VectorXd::Zero(disc_->maps.total_pressure()),
                    Eigen::VectorXd::Zero(disc_->elements() * disc_->local_interior()));
}

FlowField OseenSolver::step(const FlowField& u_k, double nu, double relaxation) const {
  const LocalBlockSystem local = assemble_oseen(*disc_, nu, &u_k, forcing_, {}, exec_);
  FlowField next = solve_oseen_system(*disc_, local, dirichlet_, exec_).field;
  if (relaxation != 1.0) {
    next *= relaxation;
    FlowField old = u_k;
    old *= 1.0 - relaxation;
    next += old;
  }
  next.nu = nu;
  return next;
}

SteadyResult OseenSolver::solve_steady(double nu, const FlowField& initial,
                                       const IterationConfig& cfg) const {
  cfg.validate();
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  check_layout(*disc_, initial);
  SteadyResult out;
  out.field = initial;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    FlowField next = step(out.field, nu, cfg.relaxation);
    const double change = h1_relative_change(*disc_, next, out.field);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.field = std::move(next);
    out.iterations = it;
    out.history.push_back(change);
    out.iteration_seconds.push_back(secs);
    if (logger_) logger_({nu, it, change, secs});
    if (change < cfg.tol) {
      out.converged = true;
      break;
    }
    if (!std::isfinite(change)) break;
  }
  out.field.nu = nu;
  out.field.iterations = out.iterations;
  return out;
}

double OseenSolver::steady_residual(const FlowField& u, double nu) const {
  check_layout(*disc_, u);
  const Discretization& d = *disc_;
  const LocalBlockSystem local = assemble_oseen(d, nu, &u, forcing_, {}, exec_);
  const FlowField lift = lift_field();
  auto residual_norm = [&](const FlowField& f) {
    const int nbl = d.local_boundary();
    const int np = d.pressure_modes();
    const int ni = d.local_interior();
    Eigen::VectorXd bnd_local(d.maps.local_boundary_total());
    double other = 0.0;
    for (int e = 0; e < d.elements(); ++e) {
      Eigen::VectorXd x(nbl + np + ni);
      x << local_boundary(d, f, e), f.pressure[e], local_interior(d, f, e);
      const Eigen::VectorXd r = local.element_matrix(e) * x - local.element_rhs(e);
      bnd_local.segment(e * nbl, nbl) = r.head(nbl);
      for (int k = 0; k < np; ++k) {
        if (d.maps.pin_pressure && e == 0 && k == 0) continue;
        other += r(nbl + k) * r(nbl + k);
      }
      other += r.tail(ni).squaredNorm();
    }
    const Eigen::VectorXd bnd = d.maps.gather_sum(bnd_local);
    double sum = other;
    for (int i = 0; i < bnd.size(); ++i) {
      if (!d.maps.dirichlet_mask[i]) sum += bnd(i) * bnd(i);
    }
    return std::sqrt(sum);
  };
  const double base = residual_norm(lift);
  const double r = residual_norm(u);
  return base > 0.0 ? r / base : r;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ContinuationOutput continuation_sweep(const OseenSolver& solver, const std::vector<double>& nus,
                                      const IterationConfig& cfg,
                                      const std::optional<Eigen::VectorXd>& perturbed_dirichlet) {
  cfg.validate();
  for (std::size_t i = 1; i < nus.size(); ++i) {
    if (!(nus[i] < nus[i - 1])) {
      throw std::invalid_argument("continuation parameters must be strictly descending in nu");
    }
  }
  const Discretization& disc = solver.discretization();
  ContinuationOutput out;
  FlowField current = FlowField::zero(disc);
  double previous_nu = 0.0;

  for (std::size_t i = 0; i < nus.size(); ++i) {
    const double nu = nus[i];
    SteadyResult res;
    std::vector<double> iter_times;
    if (i == 0 && perturbed_dirichlet) {
      OseenSolver biased = solver;
      biased.set_dirichlet(*perturbed_dirichlet);
      const SteadyResult seeded = biased.solve_steady(nu, current, cfg);
      iter_times = seeded.iteration_seconds;
      if (!seeded.converged) {
        res = seeded;
      } else {
        res = solver.solve_steady(nu, seeded.field, cfg);
      }
    } else {
      if (i > 0) {
        // Intermediate moves keep |delta nu| within the continuation step.
        const int moves = static_cast<int>(std::ceil((previous_nu - nu) / cfg.continuation_step - 1e-12));
        for (int k = 1; k < moves; ++k) {
          const double mid = previous_nu + (nu - previous_nu) * k / moves;
          const SteadyResult step = solver.solve_steady(mid, current, cfg);
          if (!step.converged) {
            res = step;
            break;
          }
          current = step.field;
        }
      }
      if (res.iterations == 0) res = solver.solve_steady(nu, current, cfg);
    }
    iter_times.insert(iter_times.end(), res.iteration_seconds.begin(), res.iteration_seconds.end());

    SweepResult row;
    row.nu = nu;
    row.reynolds = reynolds_number(nu);
    row.iterations = res.iterations;
    row.final_rel_change = res.history.empty() ? 0.0 : res.history.back();
    row.converged = res.converged;
    row.fom_time_s = median(iter_times);
    if (res.converged) row.asymmetry = asymmetry_indicator(disc, res.field);

    // Picard converges linearly; flag histories that do not settle into
    // monotone decrease over their second half.
    const auto& h = res.history;
    for (std::size_t k = h.size() / 2 + 1; k < h.size(); ++k) {
      if (h[k] > h[k - 1]) {
        std::clog << "note: nu=" << nu << " convergence history not monotone at iteration "
                  << k + 1 << "\n";
        break;
      }
    }

    out.results.push_back(row);
    out.histories.push_back(res.history);
    out.iteration_seconds.push_back(iter_times);
    if (!res.converged) return out;
    current = res.field;
    out.solutions.push_back(current);
    previous_nu = nu;
  }
  out.complete = true;
  return out;
}

double asymmetry_indicator(const Discretization& disc, const FlowField& field) {
  check_layout(disc, field);
  const int nm = disc.velocity_modes();
  const int q = disc.tables.rule.size();
  const QuadMesh& mesh = disc.mesh;
  double diff = 0.0;
  double norm = 0.0;
  for (int e = 0; e < disc.elements(); ++e) {
    const Element& el = mesh.elements[e];
    const int mirror = mesh.element_id(el.ex, mesh.ny - 1 - el.ey);
    const Eigen::VectorXd u = disc.velocity.values * field.velocity[e].head(nm);
    const Eigen::VectorXd um = disc.velocity.values * field.velocity[mirror].head(nm);
    for (int l = 0; l < q; ++l) {
      for (int k = 0; k < q; ++k) {
        const int pt = k + q * l;
        const int mpt = k + q * (q - 1 - l);
        const double w = disc.velocity.weights(pt) * el.jacobian();
        const double d = u(pt) - um(mpt);
        diff += w * d * d;
        norm += w * u(pt) * u(pt);
      }
    }
  }
  return norm > 0.0 ? std::sqrt(diff / norm) : 0.0;
}

}  // namespace semrb
