#include "support.hpp"

#include <vector>

namespace semrb::testing {

FlowField monolithic_solve(const Discretization& disc, const LocalBlockSystem& local,
                           const Eigen::VectorXd& dirichlet_velocity) {
  const DofMaps& maps = disc.maps;
  const int nb = maps.velocity_global;
  const int np = disc.pressure_modes();
  const int ni = disc.local_interior();
  const int nlb = disc.local_boundary();
  const int ne = disc.elements();
  const int total = nb + ne * (np + ni);

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(total);
  std::vector<int> index(disc.local_total());
  std::vector<double> sign(disc.local_total());
  for (int e = 0; e < ne; ++e) {
    for (int k = 0; k < nlb; ++k) {
      index[k] = maps.global_of(e, k);
      sign[k] = maps.sign_of(e, k);
    }
    for (int k = 0; k < np; ++k) {
      index[nlb + k] = nb + e * np + k;
      sign[nlb + k] = 1.0;
    }
    for (int k = 0; k < ni; ++k) {
      index[nlb + np + k] = nb + ne * np + e * ni + k;
      sign[nlb + np + k] = 1.0;
    }
    const Eigen::MatrixXd Ke = local.element_matrix(e);
    const Eigen::VectorXd fe = local.element_rhs(e);
    for (int i = 0; i < Ke.rows(); ++i) {
      f(index[i]) += sign[i] * fe(i);
      for (int j = 0; j < Ke.cols(); ++j) K(index[i], index[j]) += sign[i] * sign[j] * Ke(i, j);
    }
  }

  Eigen::VectorXd fixed = Eigen::VectorXd::Zero(total);
  std::vector<char> constrained(total, 0);
  for (int g = 0; g < nb; ++g) {
    if (maps.dirichlet_mask[g]) {
      constrained[g] = 1;
      fixed(g) = dirichlet_velocity(g);
    }
  }
  if (maps.pin_pressure) constrained[nb] = 1;  // mean mode of element 0

  std::vector<int> free;
  for (int i = 0; i < total; ++i) {
    if (!constrained[i]) free.push_back(i);
  }
  const Eigen::VectorXd rhs_all = f - K * fixed;
  const int nf = static_cast<int>(free.size());
  Eigen::MatrixXd Kf(nf, nf);
  Eigen::VectorXd rf(nf);
  for (int i = 0; i < nf; ++i) {
    rf(i) = rhs_all(free[i]);
    for (int j = 0; j < nf; ++j) Kf(i, j) = K(free[i], free[j]);
  }
  const Eigen::VectorXd xf = Kf.fullPivLu().solve(rf);
  Eigen::VectorXd x = fixed;
  for (int i = 0; i < nf; ++i) x(free[i]) = xf(i);

  return make_field(disc, x.head(nb), x.segment(nb, ne * np), x.tail(ne * ni));
}

FlowField random_field(const Discretization& disc, std::mt19937_64& rng, double scale,
                       const Eigen::VectorXd& dirichlet_velocity) {
  std::uniform_real_distribution<double> u(-scale, scale);
  const DofMaps& maps = disc.maps;
  Eigen::VectorXd bnd(maps.velocity_global);
  for (int g = 0; g < bnd.size(); ++g) bnd(g) = maps.dirichlet_mask[g] ? dirichlet_velocity(g) : u(rng);
  Eigen::VectorXd p(maps.total_pressure());
  for (auto& v : p) v = u(rng);
  Eigen::VectorXd in(disc.elements() * disc.local_interior());
  for (auto& v : in) v = u(rng);
  return make_field(disc, bnd, p, in);
}

Eigen::VectorXd flatten(const FlowField& field) {
  Eigen::Index n = 0;
  for (const auto& v : field.velocity) n += v.size();
  for (const auto& p : field.pressure) n += p.size();
  Eigen::VectorXd out(n);
  Eigen::Index at = 0;
  for (const auto& v : field.velocity) {
    out.segment(at, v.size()) = v;
    at += v.size();
  }
  for (const auto& p : field.pressure) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

double relative_difference(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ref = a.norm();
  return ref > 0.0 ? (a - b).norm() / ref : (a - b).norm();
}

}  // namespace semrb::testing
