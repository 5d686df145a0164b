#pragma once

#include <vector>

#include <Eigen/Dense>

#include "semrb/discretization.hpp"
#include "semrb/flow_field.hpp"
#include "semrb/parallel.hpp"

namespace semrb {

/// Which weak-form terms to assemble. The ROM offline phase assembles the
/// viscous, pressure and convective parts separately.
struct AssemblyTerms {
  bool viscous = true;
  bool convective = true;
  bool pressure = true;
  bool forcing = true;

  static AssemblyTerms viscous_only() { return {true, false, false, false}; }
  static AssemblyTerms convective_only() { return {false, true, false, false}; }
  static AssemblyTerms pressure_only() { return {false, false, true, false}; }
};

/// Per-element blocks of the discrete Oseen system
///
///   [ A       -D_bnd^T  B   ] [v_bnd]   [f_bnd]
///   [-D_bnd    0       -D_int] [p    ] = [0    ]
///   [ Bt      -D_int^T  C   ] [v_int]   [f_int]
///
/// Velocity unknowns are blocked by component (x modes, then y modes).
/// D holds the integrals of q div(beta). Bt is the interior-boundary block;
/// without convection B == Bt^T.
struct ElementBlocks {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Bt;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D_bnd;
  Eigen::MatrixXd D_int;
  Eigen::VectorXd f_bnd;
  Eigen::VectorXd f_int;
};

struct LocalBlockSystem {
  double nu = 0.0;
  bool linearized = false;  // false when assembled with u_k = 0
  std::vector<ElementBlocks> elements;

  /// Dense local matrix over [v_bnd; p; v_int] in the block form above.
  Eigen::MatrixXd element_matrix(int e) const;
  Eigen::VectorXd element_rhs(int e) const;
};

/// Assemble all element blocks for viscosity nu, linearized about u_k
/// (nullptr for the Stokes operator). Elements run in parallel under
/// Exec::parallel. Body force f defaults to zero.
LocalBlockSystem assemble_oseen(const Discretization& disc, double nu, const FlowField* u_k,
                                const VelocityFunction& forcing = {}, AssemblyTerms terms = {},
                                Exec exec = Exec::parallel);

/// Serial reference: every entry is an explicit sum over quadrature points
/// of products of 1D table values, written into the dense local matrix
/// and then split into blocks. Slow; used by tests and the benchmark.
LocalBlockSystem assemble_oseen_reference(const Discretization& disc, double nu,
                                          const FlowField* u_k,
                                          const VelocityFunction& forcing = {},
                                          AssemblyTerms terms = {});

/// Dirichlet elimination on a gathered system. free_index maps each row to
/// its position in the reduced system or -1 when prescribed.
struct DirichletReduced {
  Eigen::MatrixXd matrix;  // free x free
  Eigen::VectorXd rhs;     // f_free - K_fd g
  Eigen::VectorXd lift;    // K_fd g
};

DirichletReduced apply_dirichlet(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs,
                                 const std::vector<int>& free_index, int free_count,
                                 const Eigen::VectorXd& values);

}  // namespace semrb
