#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "semrb/discretization.hpp"

namespace semrb {

/// Full-order state. Per element, velocity holds the x-component tensor
/// modes followed by the y-component modes; pressure holds the Legendre
/// tensor modes with the mean mode first.
struct FlowField {
  std::vector<Eigen::VectorXd> velocity;
  std::vector<Eigen::VectorXd> pressure;
  double nu = 0.0;
  int iterations = 0;

  static FlowField zero(const Discretization& disc);

  FlowField& operator+=(const FlowField& other);
  FlowField& operator*=(double s);
};

FlowField operator-(const FlowField& a, const FlowField& b);

/// Throws std::invalid_argument if the field does not fit the discretization.
void check_layout(const Discretization& disc, const FlowField& field);

/// Assemble a field from gathered pieces: global boundary velocity, pressure
/// in element-major level-1 order, and per-element interior velocity
/// (x interior modes then y interior modes, concatenated over elements).
FlowField make_field(const Discretization& disc, const Eigen::VectorXd& boundary_global,
                     const Eigen::VectorXd& pressure, const Eigen::VectorXd& interior);

/// Local boundary velocity of element e (x then y, canonical mode order).
Eigen::VectorXd local_boundary(const Discretization& disc, const FlowField& f, int e);
Eigen::VectorXd local_interior(const Discretization& disc, const FlowField& f, int e);

/// Velocity-only H1 norm: sum over elements of the integral of |v|^2 + |grad v|^2.
double h1_norm(const Discretization& disc, const FlowField& field);

/// ||a - b||_H1 / ||a||_H1, or ||b||_H1 when ||a|| = 0.
double h1_relative_change(const Discretization& disc, const FlowField& a, const FlowField& b);

/// ||full - rom||_H1 / ||full||_H1 over velocity; throws when ||full|| = 0.
double relative_h1_error(const Discretization& disc, const FlowField& full, const FlowField& rom);

/// Point values (u_x, u_y, p) at a physical location inside the domain.
std::array<double, 3> evaluate(const Discretization& disc, const FlowField& field, double x,
                               double y);

struct ExactVelocity {
  VelocityFunction value;
  // (du/dx, du/dy, dv/dx, dv/dy)
  std::function<std::array<double, 4>(double, double)> gradient;
};

/// H1 error against a closed-form velocity, integrated with `points`
/// Gauss-Lobatto points per direction; relative to the exact H1 norm.
double h1_error_against(const Discretization& disc, const FlowField& field,
                        const ExactVelocity& exact, int points);

/// Integral of (div u) q for each pressure mode q, concatenated over elements.
Eigen::VectorXd divergence_moments(const Discretization& disc, const FlowField& field);

}  // namespace semrb
