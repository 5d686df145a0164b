#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "semrb/assembly.hpp"
#include "semrb/discretization.hpp"
#include "semrb/flow_field.hpp"

namespace semrb::testing {

/// Gathers the full element systems [v_bnd; p; v_int] into one dense matrix
/// over [global boundary velocity; all pressures; all interior velocity],
/// eliminates Dirichlet rows and (when pinned) the mean pressure of element
/// 0, and solves with full-pivot LU. Independent of the condensation code.
FlowField monolithic_solve(const Discretization& disc, const LocalBlockSystem& local,
                           const Eigen::VectorXd& dirichlet_velocity);

/// Conforming field with uniform(-scale, scale) coefficients; boundary
/// entries flagged Dirichlet take the given values.
FlowField random_field(const Discretization& disc, std::mt19937_64& rng, double scale,
                       const Eigen::VectorXd& dirichlet_velocity);

/// Stacked (velocity, pressure) coefficients of every element.
Eigen::VectorXd flatten(const FlowField& field);

double relative_difference(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace semrb::testing
