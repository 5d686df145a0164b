#include "semrb/rom.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "semrb/assembly.hpp"
#include "semrb/errors.hpp"

namespace semrb {

namespace {

constexpr double kMinReducedRcond = 1e-15;
constexpr double kOfflineCheckTol = 1e-9;

int nonmean_offset(const Discretization& disc, int e) {
  return disc.maps.free_count + e * (disc.pressure_modes() - 1);
}

Eigen::VectorXd lift_local(const Discretization& disc, const Eigen::VectorXd& lift, int e) {
  const DofMaps& maps = disc.maps;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(disc.local_total());
  for (int k = 0; k < maps.local_boundary; ++k) {
    const int g = maps.global_of(e, k);
    if (maps.free_index[g] < 0) x(k) = maps.sign_of(e, k) * lift(g);
  }
  return x;
}

// Phi_e^T G Phi_e and -Phi_e^T G x_lift summed over elements.
struct Projected {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd lift_rhs;
};

Projected project(const Discretization& disc, const LocalBlockSystem& sys,
                  const std::vector<Eigen::MatrixXd>& psi, const Eigen::VectorXd& lift) {
  const int n = psi.empty() ? 0 : static_cast<int>(psi.front().cols());
  Projected out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  for (int e = 0; e < disc.elements(); ++e) {
    const Eigen::MatrixXd g = sys.element_matrix(e);
    const Eigen::MatrixXd gpsi = g * psi[e];
    out.matrix.noalias() += psi[e].transpose() * gpsi;
    out.lift_rhs.noalias() -= psi[e].transpose() * (g * lift_local(disc, lift, e));
  }
  return out;
}

FlowField mode_field(const Discretization& disc, const RomOperators& ops, int m) {
  const Eigen::VectorXd zero_lift = Eigen::VectorXd::Zero(disc.maps.velocity_global);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(disc.state_size());
  Eigen::VectorXd interior = Eigen::VectorXd::Zero(disc.elements() * disc.local_interior());
  if (m < ops.na()) {
    state = ops.state_pod.modes.col(m);
  } else {
    interior = ops.interior_pod.modes.col(m - ops.na());
  }
  return join_state(disc, state, interior, zero_lift);
}

void check_fingerprint(const Discretization& disc, std::uint64_t fingerprint, const char* what) {
  if (fingerprint != disc.fingerprint()) {
    throw std::invalid_argument(std::string(what) + " was built for a different discretization");
  }
}

}  // namespace

void SnapshotSet::validate() const {
  const auto k = static_cast<Eigen::Index>(nus.size());
  if (states.cols() != k || interiors.cols() != k) {
    throw std::invalid_argument("snapshot set: column count does not match parameter count");
  }
  for (std::size_t i = 0; i < nus.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (nus[i] == nus[j]) throw std::invalid_argument("snapshot set: repeated parameter");
    }
  }
  if (lift.size() == 0) throw std::invalid_argument("snapshot set: missing Dirichlet data");
}

SplitState split_state(const Discretization& disc, const FlowField& field) {
  check_layout(disc, field);
  const DofMaps& maps = disc.maps;
  const int nbl = maps.local_boundary;
  const int np = disc.pressure_modes();
  const int ni = disc.local_interior();
  Eigen::VectorXd bnd(maps.local_boundary_total());
  SplitState out;
  out.interior.resize(disc.elements() * ni);
  for (int e = 0; e < disc.elements(); ++e) {
    bnd.segment(e * nbl, nbl) = local_boundary(disc, field, e);
    out.interior.segment(e * ni, ni) = local_interior(disc, field, e);
  }
  Eigen::VectorXd b_all(maps.b_all());
  b_all.head(maps.velocity_global) = maps.gather_average(bnd);
  for (int e = 0; e < disc.elements(); ++e) b_all(maps.velocity_global + e) = field.pressure[e](0);

  out.state = Eigen::VectorXd::Zero(disc.state_size());
  for (int i = 0; i < maps.b_all(); ++i) {
    if (maps.free_index[i] >= 0) out.state(maps.free_index[i]) = b_all(i);
  }
  for (int e = 0; e < disc.elements(); ++e) {
    out.state.segment(nonmean_offset(disc, e), np - 1) = field.pressure[e].tail(np - 1);
  }
  return out;
}

FlowField join_state(const Discretization& disc, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& interior, const Eigen::VectorXd& lift) {
  const DofMaps& maps = disc.maps;
  if (state.size() != disc.state_size()) {
    throw std::invalid_argument("join_state: state vector has wrong size");
  }
  const int np = disc.pressure_modes();
  Eigen::VectorXd b_all = dirichlet_b_values(disc, lift);
  for (int i = 0; i < maps.b_all(); ++i) {
    if (maps.free_index[i] >= 0) b_all(i) = state(maps.free_index[i]);
  }
  Eigen::VectorXd pressure(maps.total_pressure());
  for (int e = 0; e < disc.elements(); ++e) {
    pressure(e * np) = b_all(maps.velocity_global + e);
    pressure.segment(e * np + 1, np - 1) = state.segment(nonmean_offset(disc, e), np - 1);
  }
  return make_field(disc, b_all.head(maps.velocity_global), pressure, interior);
}

SnapshotSet collect_snapshots(const Discretization& disc, const Eigen::VectorXd& lift,
                              const std::vector<double>& nus,
                              const std::vector<FlowField>& fields) {
  if (nus.size() != fields.size()) {
    throw std::invalid_argument("collect_snapshots: parameter and field counts differ");
  }
  SnapshotSet set;
  set.fingerprint = disc.fingerprint();
  set.nus = nus;
  set.lift = lift;
  const int k = static_cast<int>(fields.size());
  set.states.resize(disc.state_size(), k);
  set.interiors.resize(disc.elements() * disc.local_interior(), k);
  for (int i = 0; i < k; ++i) {
    SplitState s = split_state(disc, fields[i]);
    set.states.col(i) = s.state;
    set.interiors.col(i) = s.interior;
  }
  set.validate();
  return set;
}

// ---------------------------------------------------------------------------
// Projection

Projection::Projection(const Discretization& disc, Eigen::MatrixXd modes)
    : disc_(&disc), modes_(std::move(modes)), block_(disc.local_boundary() + disc.pressure_modes()) {
  if (modes_.rows() != disc.state_size()) {
    throw std::invalid_argument("Projection: mode length does not match the discretization");
  }
}

Eigen::MatrixXd Projection::element_block(int e) const {
  const DofMaps& maps = disc_->maps;
  const int nbl = maps.local_boundary;
  const int np = disc_->pressure_modes();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(block_, size());
  for (int k = 0; k < nbl; ++k) {
    const int fi = maps.free_index[maps.global_of(e, k)];
    if (fi >= 0) out.row(k) = maps.sign_of(e, k) * modes_.row(fi);
  }
  const int fm = maps.free_index[maps.velocity_global + e];
  if (fm >= 0) out.row(nbl) = modes_.row(fm);
  out.bottomRows(np - 1) = modes_.middleRows(nonmean_offset(*disc_, e), np - 1);
  return out;
}

Eigen::VectorXd Projection::apply(const Eigen::VectorXd& a) const {
  if (a.size() != size()) throw std::invalid_argument("Projection::apply: wrong coordinate count");
  const Eigen::VectorXd y = modes_ * a;
  const DofMaps& maps = disc_->maps;
  const int nbl = maps.local_boundary;
  const int np = disc_->pressure_modes();
  Eigen::VectorXd local = Eigen::VectorXd::Zero(local_size());
  for (int e = 0; e < disc_->elements(); ++e) {
    auto seg = local.segment(e * block_, block_);
    for (int k = 0; k < nbl; ++k) {
      const int fi = maps.free_index[maps.global_of(e, k)];
      if (fi >= 0) seg(k) = maps.sign_of(e, k) * y(fi);
    }
    const int fm = maps.free_index[maps.velocity_global + e];
    if (fm >= 0) seg(nbl) = y(fm);
    seg.tail(np - 1) = y.segment(nonmean_offset(*disc_, e), np - 1);
  }
  return local;
}

Eigen::VectorXd Projection::hat_from_local(const Eigen::VectorXd& local, bool average) const {
  if (local.size() != local_size()) {
    throw std::invalid_argument("Projection: local vector has wrong size");
  }
  const DofMaps& maps = disc_->maps;
  const int nbl = maps.local_boundary;
  const int np = disc_->pressure_modes();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(disc_->state_size());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(disc_->state_size());
  for (int e = 0; e < disc_->elements(); ++e) {
    const auto seg = local.segment(e * block_, block_);
    for (int k = 0; k < nbl; ++k) {
      const int fi = maps.free_index[maps.global_of(e, k)];
      if (fi < 0) continue;
      y(fi) += maps.sign_of(e, k) * seg(k);
      count(fi) += 1.0;
    }
    const int fm = maps.free_index[maps.velocity_global + e];
    if (fm >= 0) {
      y(fm) += seg(nbl);
      count(fm) += 1.0;
    }
    const int off = nonmean_offset(*disc_, e);
    y.segment(off, np - 1) += seg.tail(np - 1);
    count.segment(off, np - 1).array() += 1.0;
  }
  if (average) {
    for (int i = 0; i < y.size(); ++i) {
      if (count(i) > 0.0) y(i) /= count(i);
    }
  }
  return y;
}

Eigen::VectorXd Projection::transpose_apply(const Eigen::VectorXd& local) const {
  return modes_.transpose() * hat_from_local(local, false);
}

Eigen::VectorXd Projection::restrict(const Eigen::VectorXd& local) const {
  return modes_.transpose() * hat_from_local(local, true);
}

// ---------------------------------------------------------------------------
// Reduced operators

Eigen::MatrixXd RomOperators::assemble(double nu, const Eigen::VectorXd& c) const {
  const int n = size();
  if (c.size() != n) throw std::invalid_argument("RomOperators::assemble: wrong coordinate count");
  Eigen::MatrixXd a = nu * K_visc + K_fixed;
  if (n > 0) {
    const Eigen::VectorXd t = T * c;
    a += Eigen::Map<const Eigen::MatrixXd>(t.data(), n, n);
  }
  return a;
}

Eigen::VectorXd RomOperators::rhs(double nu, const Eigen::VectorXd& c) const {
  if (c.size() != size()) throw std::invalid_argument("RomOperators::rhs: wrong coordinate count");
  return nu * r_visc + r_fixed + R_conv * c;
}

std::vector<Eigen::MatrixXd> element_bases(const Discretization& disc, const Eigen::MatrixXd& U,
                                           const Eigen::MatrixXd& W) {
  const int nbl = disc.local_boundary();
  const int np = disc.pressure_modes();
  const int ni = disc.local_interior();
  const int na = static_cast<int>(U.cols());
  const int nd = static_cast<int>(W.cols());
  const Projection proj(disc, U);
  std::vector<Eigen::MatrixXd> out(disc.elements());
  for (int e = 0; e < disc.elements(); ++e) {
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(disc.local_total(), na + nd);
    psi.topLeftCorner(nbl + np, na) = proj.element_block(e);
    psi.bottomRightCorner(ni, nd) = W.middleRows(e * ni, ni);
    out[e] = std::move(psi);
  }
  return out;
}

RomOperators offline_build(const Discretization& disc, const SnapshotSet& snapshots, double energy,
                           Exec exec, Truncation rule) {
  snapshots.validate();
  check_fingerprint(disc, snapshots.fingerprint, "snapshot set");
  if (snapshots.size() == 0) throw std::invalid_argument("offline_build: no snapshots");

  RomOperators ops;
  ops.fingerprint = snapshots.fingerprint;
  ops.lift = snapshots.lift;
  ops.training_nus = snapshots.nus;
  ops.state_pod = pod(snapshots.states, energy, rule);
  ops.interior_pod = pod(snapshots.interiors, energy, rule);
  const int n = ops.size();

  const auto psi = element_bases(disc, ops.state_pod.modes, ops.interior_pod.modes);
  const FlowField lift_field =
      join_state(disc, Eigen::VectorXd::Zero(disc.state_size()),
                 Eigen::VectorXd::Zero(disc.elements() * disc.local_interior()), ops.lift);

  const Projected visc =
      project(disc, assemble_oseen(disc, 1.0, nullptr, {}, AssemblyTerms::viscous_only(), exec),
              psi, ops.lift);
  const Projected press =
      project(disc, assemble_oseen(disc, 1.0, nullptr, {}, AssemblyTerms::pressure_only(), exec),
              psi, ops.lift);
  const Projected conv_lift = project(
      disc, assemble_oseen(disc, 1.0, &lift_field, {}, AssemblyTerms::convective_only(), exec), psi,
      ops.lift);
  ops.K_visc = visc.matrix;
  ops.r_visc = visc.lift_rhs;
  ops.K_fixed = press.matrix + conv_lift.matrix;
  ops.r_fixed = press.lift_rhs + conv_lift.lift_rhs;

  ops.T.resize(static_cast<Eigen::Index>(n) * n, n);
  ops.R_conv.resize(n, n);
  for_each_index(n, exec, [&](int m) {
    const FlowField phi = mode_field(disc, ops, m);
    const Projected slice = project(
        disc, assemble_oseen(disc, 1.0, &phi, {}, AssemblyTerms::convective_only(), Exec::serial),
        psi, ops.lift);
    ops.T.col(m) = Eigen::Map<const Eigen::VectorXd>(slice.matrix.data(), slice.matrix.size());
    ops.R_conv.col(m) = slice.lift_rhs;
  });

  ops.training_coords.resize(n, snapshots.size());
  for (int k = 0; k < snapshots.size(); ++k) {
    ops.training_coords.col(k).head(ops.na()) =
        ops.state_pod.modes.transpose() * snapshots.states.col(k);
    ops.training_coords.col(k).tail(ops.nd()) =
        ops.interior_pod.modes.transpose() * snapshots.interiors.col(k);
  }

  if (n > 0) {
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd c = ops.training_coords.col(0);
    for (int i = 0; i < n; ++i) c(i) += 0.1 * normal(rng) * (std::abs(c(i)) + 1.0);
    double nu = 0.0;
    for (double v : ops.training_nus) nu += v;
    nu /= static_cast<double>(ops.training_nus.size());
    const double mismatch = reduced_operator_mismatch(disc, ops, nu, c, exec);
    if (!(mismatch <= kOfflineCheckTol)) {
      throw std::runtime_error("offline_build: reduced operator is not consistent with a direct "
                               "projection (relative mismatch " + std::to_string(mismatch) + ")");
    }
  }
  return ops;
}

Eigen::MatrixXd direct_reduced_operator(const Discretization& disc, const RomOperators& ops,
                                        double nu, const Eigen::VectorXd& c, Exec exec) {
  check_fingerprint(disc, ops.fingerprint, "ROM");
  const FlowField u = recover_full(disc, ops, c);
  const auto psi = element_bases(disc, ops.state_pod.modes, ops.interior_pod.modes);
  const LocalBlockSystem sys = assemble_oseen(disc, nu, &u, {}, {}, exec);
  const int n = ops.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < disc.elements(); ++e) {
    out.noalias() += psi[e].transpose() * (sys.element_matrix(e) * psi[e]);
  }
  return out;
}

double reduced_operator_mismatch(const Discretization& disc, const RomOperators& ops, double nu,
                                 const Eigen::VectorXd& c, Exec exec) {
  const Eigen::MatrixXd direct = direct_reduced_operator(disc, ops, nu, c, exec);
  const double dn = direct.norm();
  const double diff = (ops.assemble(nu, c) - direct).norm();
  return dn > 0.0 ? diff / dn : diff;
}

double reduced_residual(const RomOperators& ops, double nu, const Eigen::VectorXd& c) {
  return (ops.assemble(nu, c) * c - ops.rhs(nu, c)).norm();
}

Eigen::MatrixXd reduced_jacobian(const RomOperators& ops, double nu, const Eigen::VectorXd& c) {
  const int n = ops.size();
  Eigen::MatrixXd j = ops.assemble(nu, c) - ops.R_conv;
  for (int m = 0; m < n; ++m) {
    j.col(m) += Eigen::Map<const Eigen::MatrixXd>(ops.T.col(m).data(), n, n) * c;
  }
  return j;
}

namespace {

// Solves M x = b with the trailing nd x nd block eliminated first.
Eigen::VectorXd solve_eliminated(const Eigen::MatrixXd& m, const Eigen::VectorXd& b, int na, int nd) {
  if (nd == 0) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    if (!(lu.rcond() > kMinReducedRcond)) throw SingularSystemError("reduced system is singular");
    return lu.solve(b);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> dd(m.bottomRightCorner(nd, nd));
  if (!(dd.rcond() > kMinReducedRcond)) throw SingularSystemError("reduced interior block is singular");
  const Eigen::MatrixXd dinv_da = dd.solve(m.bottomLeftCorner(nd, na));
  const Eigen::VectorXd dinv_bd = dd.solve(b.tail(nd));
  Eigen::VectorXd x(na + nd);
  if (na > 0) {
    const Eigen::MatrixXd s = m.topLeftCorner(na, na) - m.topRightCorner(na, nd) * dinv_da;
    const Eigen::VectorXd rs = b.head(na) - m.topRightCorner(na, nd) * dinv_bd;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
    if (!(lu.rcond() > kMinReducedRcond)) throw SingularSystemError("reduced Schur system is singular");
    x.head(na) = lu.solve(rs);
  }
  x.tail(nd) = dinv_bd - dinv_da * x.head(na);
  return x;
}

constexpr int kMaxBacktracks = 10;

RomResult rom_iterate(const RomOperators& ops, double nu, const IterationConfig& cfg,
                      Eigen::VectorXd start, bool newton) {
  const int na = ops.na();
  const int nd = ops.nd();
  RomResult out;
  out.method = newton ? RomMethod::newton : RomMethod::oseen;
  out.coords = std::move(start);
  if (ops.size() == 0) {
    out.converged = true;
    return out;
  }
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::MatrixXd a = ops.assemble(nu, out.coords);
    const Eigen::VectorXd r = ops.rhs(nu, out.coords);
    Eigen::VectorXd next;
    try {
      if (newton) {
        const Eigen::VectorXd f = a * out.coords - r;
        const Eigen::VectorXd dx = solve_eliminated(reduced_jacobian(ops, nu, out.coords), f, na, nd);
        // Backtrack until the residual drops; the last trial is kept anyway.
        const double f0 = f.norm();
        double t = 1.0;
        for (int k = 0; k <= kMaxBacktracks; ++k, t *= 0.5) {
          next = out.coords - t * dx;
          if (reduced_residual(ops, nu, next) <= (1.0 - 1e-4 * t) * f0) break;
        }
      } else {
        next = solve_eliminated(a, r, na, nd);
      }
    } catch (const SingularSystemError&) {
      // A singular Newton step ends this attempt; a singular Oseen operator is fatal.
      if (!newton) throw;
      break;
    }
    if (cfg.relaxation != 1.0) next = cfg.relaxation * next + (1.0 - cfg.relaxation) * out.coords;
    const double nn = next.norm();
    const double change = nn > 0.0 ? (next - out.coords).norm() / nn : (next - out.coords).norm();
    out.coords = std::move(next);
    out.iterations = it;
    out.history.push_back(change);
    out.iteration_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (change < cfg.tol) {
      out.converged = true;
      break;
    }
    if (!std::isfinite(change)) break;
  }
  return out;
}

}  // namespace

RomResult rom_solve(const RomOperators& ops, double nu, const IterationConfig& cfg,
                    const std::optional<Eigen::VectorXd>& initial, RomMethod method) {
  cfg.validate();
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  const Eigen::VectorXd start = initial ? *initial : Eigen::VectorXd::Zero(ops.size());
  if (start.size() != ops.size()) throw std::invalid_argument("rom_solve: initial guess has wrong size");
  if (method != RomMethod::automatic) return rom_iterate(ops, nu, cfg, start, method == RomMethod::newton);

  // Newton from the seed stays with the reduced root nearest the training
  // state; the Oseen iteration can drift to spurious reduced roots at low nu
  // and is only the fallback.
  RomResult first = rom_iterate(ops, nu, cfg, start, true);
  if (first.converged) return first;
  RomResult second = rom_iterate(ops, nu, cfg, start, false);
  second.iterations += first.iterations;
  second.history.insert(second.history.begin(), first.history.begin(), first.history.end());
  second.iteration_seconds.insert(second.iteration_seconds.begin(), first.iteration_seconds.begin(),
                                  first.iteration_seconds.end());
  return second;
}

FlowField recover_full(const Discretization& disc, const RomOperators& ops,
                       const Eigen::VectorXd& coords) {
  check_fingerprint(disc, ops.fingerprint, "ROM");
  if (coords.size() != ops.size()) {
    throw std::invalid_argument("recover_full: wrong coordinate count");
  }
  const Eigen::VectorXd state = ops.state_pod.modes * coords.head(ops.na());
  const Eigen::VectorXd interior = ops.interior_pod.modes * coords.tail(ops.nd());
  return join_state(disc, state, interior, ops.lift);
}

Eigen::VectorXd nearest_training_coords(const RomOperators& ops, double nu) {
  if (ops.training_nus.empty()) return Eigen::VectorXd::Zero(ops.size());
  std::size_t best = 0;
  for (std::size_t i = 1; i < ops.training_nus.size(); ++i) {
    if (std::abs(ops.training_nus[i] - nu) < std::abs(ops.training_nus[best] - nu)) best = i;
  }
  return ops.training_coords.col(static_cast<Eigen::Index>(best));
}

}  // namespace semrb
