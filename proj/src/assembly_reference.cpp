#include "semrb/assembly.hpp"

#include <stdexcept>

namespace semrb {

namespace {

struct LocalDof {
  int comp;  // 0, 1 velocity; 2 pressure
  int i;
  int j;
};

}  // namespace

LocalBlockSystem assemble_oseen_reference(const Discretization& disc, double nu,
                                          const FlowField* u_k, const VelocityFunction& forcing,
                                          AssemblyTerms terms) {
  if (u_k != nullptr) check_layout(disc, *u_k);
  const int p = disc.spec.order_velocity;
  const int m = p + 1;
  const int mp = disc.spec.order_pressure + 1;
  const QuadratureRule& rule = disc.tables.rule;
  const int q = rule.size();
  const Eigen::MatrixXd& V = disc.tables.velocity.values;
  const Eigen::MatrixXd& DV = disc.tables.velocity.derivatives;
  const Eigen::MatrixXd& P = disc.tables.pressure.values;

  // Local ordering [v_bnd (x, y); p; v_int (x, y)].
  std::vector<LocalDof> dofs;
  for (int c = 0; c < 2; ++c) {
    for (int mode : boundary_mode_order(m)) dofs.push_back({c, mode % m, mode / m});
  }
  const int nb = static_cast<int>(dofs.size());
  for (int b = 0; b < mp; ++b) {
    for (int a = 0; a < mp; ++a) dofs.push_back({2, a, b});
  }
  const int np = static_cast<int>(dofs.size()) - nb;
  for (int c = 0; c < 2; ++c) {
    for (int mode : interior_mode_order(m)) dofs.push_back({c, mode % m, mode / m});
  }
  const int n = static_cast<int>(dofs.size());
  const int ni = n - nb - np;

  LocalBlockSystem sys;
  sys.nu = nu;
  sys.linearized = u_k != nullptr;
  sys.elements.resize(disc.elements());

  for (int e = 0; e < disc.elements(); ++e) {
    const Element& el = disc.mesh.elements[e];
    const double sx = 2.0 / el.hx;
    const double sy = 2.0 / el.hy;
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

    for (int l = 0; l < q; ++l) {
      for (int k = 0; k < q; ++k) {
        const double w = rule.weights[k] * rule.weights[l] * el.jacobian();
        double ux = 0.0, uy = 0.0;
        if (u_k != nullptr) {
          for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
              const double phi = V(k, i) * V(l, j);
              ux += u_k->velocity[e](i + m * j) * phi;
              uy += u_k->velocity[e](m * m + i + m * j) * phi;
            }
          }
        }
        std::array<double, 2> f{0.0, 0.0};
        if (forcing && terms.forcing) f = forcing(el.x(rule.nodes[k]), el.y(rule.nodes[l]));

        for (int r = 0; r < n; ++r) {
          const LocalDof& dr = dofs[r];
          if (dr.comp == 2) {
            const double psi = P(k, dr.i) * P(l, dr.j);
            if (!terms.pressure) continue;
            for (int s = 0; s < n; ++s) {
              const LocalDof& ds = dofs[s];
              if (ds.comp == 2) continue;
              const double grad = ds.comp == 0 ? DV(k, ds.i) * V(l, ds.j) * sx
                                               : V(k, ds.i) * DV(l, ds.j) * sy;
              mat(r, s) -= w * psi * grad;
            }
            continue;
          }
          const double br = V(k, dr.i) * V(l, dr.j);
          const double bxr = DV(k, dr.i) * V(l, dr.j) * sx;
          const double byr = V(k, dr.i) * DV(l, dr.j) * sy;
          rhs(r) += w * f[dr.comp] * br;
          for (int s = 0; s < n; ++s) {
            const LocalDof& ds = dofs[s];
            if (ds.comp == 2) {
              if (!terms.pressure) continue;
              const double psi = P(k, ds.i) * P(l, ds.j);
              mat(r, s) -= w * psi * (dr.comp == 0 ? bxr : byr);
              continue;
            }
            if (ds.comp != dr.comp) continue;
            const double bxs = DV(k, ds.i) * V(l, ds.j) * sx;
            const double bys = V(k, ds.i) * DV(l, ds.j) * sy;
            double value = 0.0;
            if (terms.viscous) value += nu * (bxr * bxs + byr * bys);
            if (terms.convective) value += br * (ux * bxs + uy * bys);
            mat(r, s) += w * value;
          }
        }
      }
    }

    ElementBlocks& blk = sys.elements[e];
    blk.A = mat.block(0, 0, nb, nb);
    blk.B = mat.block(0, nb + np, nb, ni);
    blk.Bt = mat.block(nb + np, 0, ni, nb);
    blk.C = mat.block(nb + np, nb + np, ni, ni);
    blk.D_bnd = -mat.block(nb, 0, np, nb);
    blk.D_int = -mat.block(nb, nb + np, np, ni);
    blk.f_bnd = rhs.head(nb);
    blk.f_int = rhs.tail(ni);
  }
  return sys;
}

}  // namespace semrb
