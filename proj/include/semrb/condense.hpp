#pragma once

#include <vector>

#include <Eigen/Dense>

#include "semrb/assembly.hpp"
#include "semrb/discretization.hpp"
#include "semrb/flow_field.hpp"
#include "semrb/parallel.hpp"

namespace semrb {

/// Reciprocal condition estimates below this abort condensation.
inline constexpr double kMinBlockRcond = 1e-12;

/// One element after eliminating interior velocity:
///   S_vv = A - B C^-1 Bt          S_vp = B C^-1 D_int^T - D_bnd^T
///   S_pv = D_int C^-1 Bt - D_bnd  S_pp = -D_int C^-1 D_int^T
///   g_v  = f_bnd - B C^-1 f_int   g_p  = D_int C^-1 f_int
struct ElementLevel1 {
  Eigen::MatrixXd S_vv;
  Eigen::MatrixXd S_vp;
  Eigen::MatrixXd S_pv;
  Eigen::MatrixXd S_pp;
  Eigen::VectorXd g_v;
  Eigen::VectorXd g_p;

  Eigen::PartialPivLU<Eigen::MatrixXd> C_lu;
  // Kept for v_int = C^-1 f_int - C^-1 Bt v_bnd + C^-1 D_int^T p.
  Eigen::MatrixXd Cinv_Bt;
  Eigen::MatrixXd Cinv_DintT;
  Eigen::VectorXd Cinv_fint;
};

struct Level1System {
  std::vector<ElementLevel1> elements;
};

Level1System condense_level1(const LocalBlockSystem& local, Exec exec = Exec::parallel);

/// Element contribution in hat ordering. The element's b unknowns are its
/// local boundary velocity followed by its mean pressure; b_index/b_sign
/// place them in the b_all() layout.
struct ElementHat {
  std::vector<int> b_index;
  std::vector<int> b_sign;
  Eigen::MatrixXd A_hat;  // b x b
  Eigen::MatrixXd B_hat;  // b x p-hat
  Eigen::MatrixXd C_hat;  // p-hat x b
  Eigen::MatrixXd D_hat;  // p-hat x p-hat
  Eigen::VectorXd f_b;
  Eigen::VectorXd f_p;
};

/// Level-1 system gathered to global boundary velocity and reordered so
/// each mean pressure joins b. Dirichlet entries of b are eliminated from the
/// gathered A-hat block; the element blocks keep the full element b.
struct HatSystem {
  std::vector<ElementHat> elements;
  Eigen::MatrixXd A;         // free x free
  Eigen::VectorXd f_b;       // free, Dirichlet lift subtracted
  Eigen::VectorXd b_values;  // prescribed values over b_all (zero where free)
  std::vector<int> free_index;
  int free_count = 0;
};

HatSystem gather_and_reorder(const Level1System& l1, const DofMaps& maps,
                             const Eigen::VectorXd& b_values);

struct ElementSchur {
  Eigen::PartialPivLU<Eigen::MatrixXd> D_lu;
  Eigen::MatrixXd Dinv_C;  // D-hat^-1 C-hat
  Eigen::VectorXd Dinv_f;  // D-hat^-1 f_p
};

/// (A-hat - B-hat D-hat^-1 C-hat) b = f-hat_b - B-hat D-hat^-1 f-hat_p over free b.
struct SchurSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<ElementSchur> elements;
};

SchurSystem condense_level2(const HatSystem& hat, Exec exec = Exec::parallel);

struct CondensedSolution {
  Eigen::VectorXd b;        // free b
  double residual = 0.0;    // ||S b - rhs|| / ||rhs||
};

/// Dense LU solve of the final Schur system.
CondensedSolution solve_condensed(const SchurSystem& schur);

/// Recover p-hat, scatter b to elements, and recover interior velocity.
FlowField back_substitute(const Discretization& disc, const Eigen::VectorXd& b,
                          const SchurSystem& schur, const HatSystem& hat, const Level1System& l1,
                          Exec exec = Exec::parallel);

/// Whole pipeline: level 1, reorder, level 2, solve, back-substitute.
struct CondensedSolve {
  FlowField field;
  double residual = 0.0;
  int schur_size = 0;
};

CondensedSolve solve_oseen_system(const Discretization& disc, const LocalBlockSystem& local,
                                  const Eigen::VectorXd& dirichlet_velocity,
                                  Exec exec = Exec::parallel);

}  // namespace semrb
