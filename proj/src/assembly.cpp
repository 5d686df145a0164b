#include "semrb/assembly.hpp"

#include <stdexcept>
#include <string>

namespace semrb {

namespace {

Eigen::MatrixXd block_diag2(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * m.rows(), 2 * m.cols());
  out.topLeftCorner(m.rows(), m.cols()) = m;
  out.bottomRightCorner(m.rows(), m.cols()) = m;
  return out;
}

ElementBlocks assemble_element(const Discretization& disc, int e, double nu, const FlowField* u_k,
                               const VelocityFunction& forcing, AssemblyTerms terms) {
  const Element& el = disc.mesh.elements[e];
  const TensorTables& vt = disc.velocity;
  const int nm = vt.modes();
  const auto& bm = vt.boundary_modes;
  const auto& im = vt.interior_modes;

  const Eigen::VectorXd w = vt.weights * el.jacobian();
  const Eigen::MatrixXd dx = vt.d_xi * (2.0 / el.hx);
  const Eigen::MatrixXd dy = vt.d_eta * (2.0 / el.hy);

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nm, nm);
  if (terms.viscous) {
    k.noalias() += nu * (dx.transpose() * w.asDiagonal() * dx);
    k.noalias() += nu * (dy.transpose() * w.asDiagonal() * dy);
  }
  if (terms.convective && u_k != nullptr) {
    const Eigen::VectorXd ux = vt.values * u_k->velocity[e].head(nm);
    const Eigen::VectorXd uy = vt.values * u_k->velocity[e].tail(nm);
    const Eigen::VectorXd wx = w.cwiseProduct(ux);
    const Eigen::VectorXd wy = w.cwiseProduct(uy);
    k.noalias() += vt.values.transpose() * wx.asDiagonal() * dx;
    k.noalias() += vt.values.transpose() * wy.asDiagonal() * dy;
  }

  ElementBlocks blk;
  blk.A = block_diag2(k(bm, bm));
  blk.B = block_diag2(k(bm, im));
  blk.Bt = block_diag2(k(im, bm));
  blk.C = block_diag2(k(im, im));

  const int np = disc.pressure.modes();
  blk.D_bnd = Eigen::MatrixXd::Zero(np, 2 * static_cast<int>(bm.size()));
  blk.D_int = Eigen::MatrixXd::Zero(np, 2 * static_cast<int>(im.size()));
  if (terms.pressure) {
    const Eigen::MatrixXd pw = disc.pressure.values.transpose() * w.asDiagonal();
    const Eigen::MatrixXd px = pw * dx;
    const Eigen::MatrixXd py = pw * dy;
    blk.D_bnd << px(Eigen::all, bm), py(Eigen::all, bm);
    blk.D_int << px(Eigen::all, im), py(Eigen::all, im);
  }

  blk.f_bnd = Eigen::VectorXd::Zero(2 * static_cast<int>(bm.size()));
  blk.f_int = Eigen::VectorXd::Zero(2 * static_cast<int>(im.size()));
  if (terms.forcing && forcing) {
    const int q = disc.tables.rule.size();
    Eigen::VectorXd fx(vt.points()), fy(vt.points());
    for (int l = 0; l < q; ++l) {
      for (int kq = 0; kq < q; ++kq) {
        const auto f = forcing(el.x(disc.tables.rule.nodes[kq]), el.y(disc.tables.rule.nodes[l]));
        fx(kq + q * l) = f[0];
        fy(kq + q * l) = f[1];
      }
    }
    const Eigen::VectorXd rx = vt.values.transpose() * w.cwiseProduct(fx);
    const Eigen::VectorXd ry = vt.values.transpose() * w.cwiseProduct(fy);
    blk.f_bnd << rx(bm), ry(bm);
    blk.f_int << rx(im), ry(im);
  }
  return blk;
}

}  // namespace

Eigen::MatrixXd LocalBlockSystem::element_matrix(int e) const {
  const ElementBlocks& b = elements[e];
  const auto nb = b.A.rows();
  const auto np = b.D_bnd.rows();
  const auto ni = b.C.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nb + np + ni, nb + np + ni);
  m.block(0, 0, nb, nb) = b.A;
  m.block(0, nb, nb, np) = -b.D_bnd.transpose();
  m.block(0, nb + np, nb, ni) = b.B;
  m.block(nb, 0, np, nb) = -b.D_bnd;
  m.block(nb, nb + np, np, ni) = -b.D_int;
  m.block(nb + np, 0, ni, nb) = b.Bt;
  m.block(nb + np, nb, ni, np) = -b.D_int.transpose();
  m.block(nb + np, nb + np, ni, ni) = b.C;
  return m;
}

Eigen::VectorXd LocalBlockSystem::element_rhs(int e) const {
  const ElementBlocks& b = elements[e];
  Eigen::VectorXd r = Eigen::VectorXd::Zero(b.f_bnd.size() + b.D_bnd.rows() + b.f_int.size());
  r.head(b.f_bnd.size()) = b.f_bnd;
  r.tail(b.f_int.size()) = b.f_int;
  return r;
}

LocalBlockSystem assemble_oseen(const Discretization& disc, double nu, const FlowField* u_k,
                                const VelocityFunction& forcing, AssemblyTerms terms, Exec exec) {
  if (!(nu > 0.0) && terms.viscous) {
    throw std::invalid_argument("assemble_oseen: viscosity must be positive, got " +
                                std::to_string(nu));
  }
  if (u_k != nullptr) check_layout(disc, *u_k);
  LocalBlockSystem sys;
  sys.nu = nu;
  sys.linearized = u_k != nullptr;
  sys.elements.resize(disc.elements());
  for_each_index(disc.elements(), exec, [&](int e) {
    sys.elements[e] = assemble_element(disc, e, nu, u_k, forcing, terms);
  });
  return sys;
}

DirichletReduced apply_dirichlet(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs,
                                 const std::vector<int>& free_index, int free_count,
                                 const Eigen::VectorXd& values) {
  const auto n = static_cast<int>(free_index.size());
  if (matrix.rows() != n || matrix.cols() != n || rhs.size() != n || values.size() != n) {
    throw std::invalid_argument("apply_dirichlet: size mismatch");
  }
  std::vector<int> free_rows, fixed_rows;
  for (int i = 0; i < n; ++i) (free_index[i] >= 0 ? free_rows : fixed_rows).push_back(i);
  if (static_cast<int>(free_rows.size()) != free_count) {
    throw std::invalid_argument("apply_dirichlet: free_count does not match free_index");
  }
  DirichletReduced out;
  out.matrix = matrix(free_rows, free_rows);
  out.lift = matrix(free_rows, fixed_rows) * values(fixed_rows);
  out.rhs = rhs(free_rows) - out.lift;
  return out;
}

}  // namespace semrb
