#include "semrb/condense.hpp"

#include <cmath>
#include <string>

#include "semrb/errors.hpp"

namespace semrb {

Level1System condense_level1(const LocalBlockSystem& local, Exec exec) {
  Level1System l1;
  l1.elements.resize(local.elements.size());
  for_each_index(static_cast<int>(local.elements.size()), exec, [&](int e) {
    const ElementBlocks& blk = local.elements[e];
    ElementLevel1& out = l1.elements[e];
    out.C_lu.compute(blk.C);
    const double rcond = out.C_lu.rcond();
    if (!(rcond >= kMinBlockRcond)) {
      throw CondensationError(e, "interior velocity block C is singular or ill-conditioned (rcond " +
                                     std::to_string(rcond) + ")");
    }
    out.Cinv_Bt = out.C_lu.solve(blk.Bt);
    out.Cinv_DintT = out.C_lu.solve(blk.D_int.transpose());
    out.Cinv_fint = out.C_lu.solve(blk.f_int);

    out.S_vv = blk.A - blk.B * out.Cinv_Bt;
    out.S_vp = blk.B * out.Cinv_DintT - blk.D_bnd.transpose();
    out.S_pv = blk.D_int * out.Cinv_Bt - blk.D_bnd;
    out.S_pp = -blk.D_int * out.Cinv_DintT;
    out.g_v = blk.f_bnd - blk.B * out.Cinv_fint;
    out.g_p = blk.D_int * out.Cinv_fint;
  });
  return l1;
}

HatSystem gather_and_reorder(const Level1System& l1, const DofMaps& maps,
                             const Eigen::VectorXd& b_values) {
  if (b_values.size() != maps.b_all()) {
    throw std::invalid_argument("gather_and_reorder: b_values must have size " +
                                std::to_string(maps.b_all()));
  }
  const int nbl = maps.local_boundary;
  const int np = maps.pressure_per_element;
  HatSystem hat;
  hat.elements.resize(l1.elements.size());
  hat.b_values = b_values;
  hat.free_index = maps.free_index;
  hat.free_count = maps.free_count;

  Eigen::MatrixXd a_all = Eigen::MatrixXd::Zero(maps.b_all(), maps.b_all());
  Eigen::VectorXd f_all = Eigen::VectorXd::Zero(maps.b_all());

  for (std::size_t e = 0; e < l1.elements.size(); ++e) {
    const ElementLevel1& src = l1.elements[e];
    ElementHat& h = hat.elements[e];
    h.b_index.resize(nbl + 1);
    h.b_sign.resize(nbl + 1);
    for (int k = 0; k < nbl; ++k) {
      h.b_index[k] = maps.global_of(static_cast<int>(e), k);
      h.b_sign[k] = maps.sign_of(static_cast<int>(e), k);
    }
    h.b_index[nbl] = maps.velocity_global + static_cast<int>(e);
    h.b_sign[nbl] = 1;

    // The mean pressure mode is index 0 of the element pressure block.
    h.A_hat.resize(nbl + 1, nbl + 1);
    h.A_hat.topLeftCorner(nbl, nbl) = src.S_vv;
    h.A_hat.topRightCorner(nbl, 1) = src.S_vp.col(0);
    h.A_hat.bottomLeftCorner(1, nbl) = src.S_pv.row(0);
    h.A_hat(nbl, nbl) = src.S_pp(0, 0);

    h.B_hat.resize(nbl + 1, np - 1);
    h.B_hat.topRows(nbl) = src.S_vp.rightCols(np - 1);
    h.B_hat.bottomRows(1) = src.S_pp.row(0).tail(np - 1);

    h.C_hat.resize(np - 1, nbl + 1);
    h.C_hat.leftCols(nbl) = src.S_pv.bottomRows(np - 1);
    h.C_hat.rightCols(1) = src.S_pp.col(0).tail(np - 1);

    h.D_hat = src.S_pp.bottomRightCorner(np - 1, np - 1);

    h.f_b.resize(nbl + 1);
    h.f_b.head(nbl) = src.g_v;
    h.f_b(nbl) = src.g_p(0);
    h.f_p = src.g_p.tail(np - 1);

    for (int i = 0; i <= nbl; ++i) {
      const int gi = h.b_index[i];
      f_all(gi) += h.b_sign[i] * h.f_b(i);
      for (int j = 0; j <= nbl; ++j) {
        a_all(gi, h.b_index[j]) += h.b_sign[i] * h.b_sign[j] * h.A_hat(i, j);
      }
    }
  }

  DirichletReduced reduced = apply_dirichlet(a_all, f_all, maps.free_index, maps.free_count, b_values);
  hat.A = std::move(reduced.matrix);
  hat.f_b = std::move(reduced.rhs);
  return hat;
}

SchurSystem condense_level2(const HatSystem& hat, Exec exec) {
  const int ne = static_cast<int>(hat.elements.size());
  SchurSystem schur;
  schur.elements.resize(ne);
  std::vector<Eigen::MatrixXd> corrections(ne);
  std::vector<Eigen::VectorXd> rhs_corrections(ne);

  for_each_index(ne, exec, [&](int e) {
    const ElementHat& h = hat.elements[e];
    ElementSchur& s = schur.elements[e];
    s.D_lu.compute(h.D_hat);
    const double rcond = s.D_lu.rcond();
    if (!(rcond >= kMinBlockRcond)) {
      throw CondensationError(e, "pressure block D-hat is singular or ill-conditioned (rcond " +
                                     std::to_string(rcond) + ")");
    }
    s.Dinv_C = s.D_lu.solve(h.C_hat);
    s.Dinv_f = s.D_lu.solve(h.f_p);
    corrections[e] = h.B_hat * s.Dinv_C;
    rhs_corrections[e] = h.B_hat * s.Dinv_f;
  });

  schur.matrix = hat.A;
  schur.rhs = hat.f_b;
  for (int e = 0; e < ne; ++e) {
    const ElementHat& h = hat.elements[e];
    const int nb = static_cast<int>(h.b_index.size());
    for (int i = 0; i < nb; ++i) {
      const int fi = hat.free_index[h.b_index[i]];
      if (fi < 0) continue;
      schur.rhs(fi) -= h.b_sign[i] * rhs_corrections[e](i);
      for (int j = 0; j < nb; ++j) {
        const double v = h.b_sign[i] * h.b_sign[j] * corrections[e](i, j);
        const int fj = hat.free_index[h.b_index[j]];
        if (fj >= 0) {
          schur.matrix(fi, fj) -= v;
        } else {
          schur.rhs(fi) += v * hat.b_values(h.b_index[j]);
        }
      }
    }
  }
  return schur;
}

CondensedSolution solve_condensed(const SchurSystem& schur) {
  CondensedSolution out;
  if (schur.matrix.rows() == 0) return out;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(schur.matrix);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15)) {
    throw SingularSystemError("Schur system is singular (rcond " + std::to_string(rcond) + ")");
  }
  out.b = lu.solve(schur.rhs);
  if (!out.b.allFinite()) throw SingularSystemError("Schur solve produced non-finite values");
  const double rn = schur.rhs.norm();
  const double res = (schur.matrix * out.b - schur.rhs).norm();
  out.residual = rn > 0.0 ? res / rn : res;
  return out;
}

FlowField back_substitute(const Discretization& disc, const Eigen::VectorXd& b,
                          const SchurSystem& schur, const HatSystem& hat, const Level1System& l1,
                          Exec exec) {
  const DofMaps& maps = disc.maps;
  Eigen::VectorXd b_all = hat.b_values;
  for (int i = 0; i < maps.b_all(); ++i) {
    if (hat.free_index[i] >= 0) b_all(i) = b(hat.free_index[i]);
  }
  const int nbl = maps.local_boundary;
  const int np = maps.pressure_per_element;
  const int ni = disc.local_interior();
  Eigen::VectorXd pressure(disc.elements() * np);
  Eigen::VectorXd interior(disc.elements() * ni);

  for_each_index(disc.elements(), exec, [&](int e) {
    const ElementHat& h = hat.elements[e];
    Eigen::VectorXd be(nbl + 1);
    for (int i = 0; i <= nbl; ++i) be(i) = h.b_sign[i] * b_all(h.b_index[i]);
    const Eigen::VectorXd phat = schur.elements[e].Dinv_f - schur.elements[e].Dinv_C * be;
    Eigen::VectorXd pe(np);
    pe(0) = be(nbl);
    pe.tail(np - 1) = phat;
    const ElementLevel1& s = l1.elements[e];
    interior.segment(e * ni, ni) = s.Cinv_fint - s.Cinv_Bt * be.head(nbl) + s.Cinv_DintT * pe;
    pressure.segment(e * np, np) = pe;
  });
  return make_field(disc, b_all.head(maps.velocity_global), pressure, interior);
}

CondensedSolve solve_oseen_system(const Discretization& disc, const LocalBlockSystem& local,
                                  const Eigen::VectorXd& dirichlet_velocity, Exec exec) {
  const Level1System l1 = condense_level1(local, exec);
  const HatSystem hat = gather_and_reorder(l1, disc.maps, dirichlet_b_values(disc, dirichlet_velocity));
  const SchurSystem schur = condense_level2(hat, exec);
  const CondensedSolution sol = solve_condensed(schur);
  CondensedSolve out;
  out.field = back_substitute(disc, sol.b, schur, hat, l1, exec);
  out.field.nu = local.nu;
  out.residual = sol.residual;
  out.schur_size = static_cast<int>(schur.matrix.rows());
  return out;
}

}  // namespace semrb
