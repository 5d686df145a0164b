#pragma once

#include <vector>

#include <Eigen/Dense>

namespace semrb {

/// One-dimensional quadrature on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// q-point Gauss-Lobatto-Legendre rule. Exact for degree <= 2q-3.
QuadratureRule gauss_lobatto_rule(int q);

/// q-point Gauss-Legendre rule. Exact for degree <= 2q-1.
QuadratureRule gauss_legendre_rule(int q);

double legendre(int n, double x);
double legendre_derivative(int n, double x);

/// Jacobi polynomial P_n^{(alpha,beta)}(x) by three-term recurrence.
double jacobi(int n, double alpha, double beta, double x);
double jacobi_derivative(int n, double alpha, double beta, double x);

/// Boundary-adapted modal basis of order p on [-1, 1]:
///   phi_0 = (1-x)/2, phi_p = (1+x)/2,
///   phi_i = (1-x)/2 (1+x)/2 P_{i-1}^{(1,1)}(x),  0 < i < p.
double modified_mode(int i, int p, double x);
double modified_mode_derivative(int i, int p, double x);

/// Polynomial orders and quadrature size of the element space.
struct BasisSpec {
  int order_velocity = 12;
  int order_pressure = 10;
  int quad_points = 14;

  /// Velocity order p, pressure order p-2; q defaults to p+2.
  static BasisSpec make(int p, int q = 0);

  void validate() const;

  int velocity_modes_1d() const { return order_velocity + 1; }
  int pressure_modes_1d() const { return order_pressure + 1; }
  int velocity_modes() const { return velocity_modes_1d() * velocity_modes_1d(); }
  int pressure_modes() const { return pressure_modes_1d() * pressure_modes_1d(); }
  /// Vertex + edge modes of one scalar field on one element (4p).
  int boundary_modes() const { return 4 * order_velocity; }
  int interior_modes() const { return (order_velocity - 1) * (order_velocity - 1); }
};

/// 1D modes tabulated at quadrature nodes: values(k, i) = phi_i(xi_k).
struct ModeTable {
  Eigen::MatrixXd values;
  Eigen::MatrixXd derivatives;
  std::vector<int> boundary_mode_ids;
  std::vector<int> interior_mode_ids;

  int modes() const { return static_cast<int>(values.cols()); }
  int points() const { return static_cast<int>(values.rows()); }
};

ModeTable velocity_mode_table(const BasisSpec& spec, const QuadratureRule& rule);
/// Orthogonal Legendre P_0..P_{p-2}; pressure has no boundary split.
ModeTable pressure_mode_table(const BasisSpec& spec, const QuadratureRule& rule);

struct ModalTables {
  QuadratureRule rule;
  ModeTable velocity;
  ModeTable pressure;
};

/// Velocity and pressure tables on the spec's Gauss-Lobatto rule.
ModalTables modal_basis_tables(const BasisSpec& spec);

/// Tensor-product tables on the reference square. Point index is k + q*l for
/// (xi_k, eta_l); mode index is i + m*j for beta_ij = phi_i(xi) phi_j(eta).
struct TensorTables {
  Eigen::MatrixXd values;  // points x modes
  Eigen::MatrixXd d_xi;
  Eigen::MatrixXd d_eta;
  Eigen::VectorXd weights;  // tensor quadrature weights on the reference square
  std::vector<int> boundary_modes;
  std::vector<int> interior_modes;

  int modes() const { return static_cast<int>(values.cols()); }
  int points() const { return static_cast<int>(values.rows()); }
};

TensorTables reference_gradients(const ModeTable& table, const QuadratureRule& rule);

/// Canonical ordering of the 4p boundary modes of a tensor element with
/// modes_1d = p+1: four vertices counter-clockwise from (-1,-1), then the
/// interiors of the bottom, right, top and left edges, each running in the
/// direction of increasing xi or eta.
std::vector<int> boundary_mode_order(int modes_1d);
std::vector<int> interior_mode_order(int modes_1d);

}  // namespace semrb
