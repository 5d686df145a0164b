#pragma once

#include <Eigen/Dense>

namespace semrb {

/// Left singular vectors of a snapshot matrix (one snapshot per column).
struct PodBasis {
  Eigen::MatrixXd modes;            // rows x n, orthonormal columns
  Eigen::VectorXd singular_values;  // all of them, nonincreasing
  int n = 0;
  double energy_fraction = 0.0;     // sum_{i<n} s_i^2 / sum s_i^2

  /// sqrt(1 - energy_fraction): relative Frobenius size of the discarded part.
  double truncation_tail() const;
};

/// How the retained fraction is read. `energy` counts squared singular
/// values; `count` keeps ceil(fraction * r) of the r numerically nonzero modes.
enum class Truncation { energy, count };

/// Smallest n with cumulative squared singular value fraction >= energy.
/// For energy >= 1 every numerically nonzero mode is kept
/// (s_i > max(rows, cols) * eps * s_0). Throws std::invalid_argument for an
/// empty matrix or energy outside (0, 1].
PodBasis pod(const Eigen::MatrixXd& snapshots, double energy = 0.999,
             Truncation rule = Truncation::energy);

/// Retained count for a given spectrum; exposed for tests.
int pod_truncation(const Eigen::VectorXd& singular_values, double energy, int rows, int cols,
                   Truncation rule = Truncation::energy);

}  // namespace semrb
