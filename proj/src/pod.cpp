#include "semrb/pod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace semrb {

double PodBasis::truncation_tail() const {
  return std::sqrt(std::max(0.0, 1.0 - energy_fraction));
}

int pod_truncation(const Eigen::VectorXd& s, double energy, int rows, int cols, Truncation rule) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double cut = std::max(rows, cols) * std::numeric_limits<double>::epsilon() * s(0);
  int rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  if (energy >= 1.0) return rank;
  if (rule == Truncation::count) {
    return std::max(1, static_cast<int>(std::ceil(energy * rank - 1e-12)));
  }
  const double total = s.squaredNorm();
  double acc = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    acc += s(i) * s(i);
    if (acc >= energy * total) return i + 1;
  }
  return static_cast<int>(s.size());
}

PodBasis pod(const Eigen::MatrixXd& snapshots, double energy, Truncation rule) {
  if (snapshots.cols() == 0 || snapshots.rows() == 0) {
    throw std::invalid_argument("pod: snapshot matrix is empty");
  }
  if (!(energy > 0.0 && energy <= 1.0)) {
    throw std::invalid_argument("pod: energy must lie in (0, 1]");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(snapshots, Eigen::ComputeThinU);
  PodBasis out;
  out.singular_values = svd.singularValues();
  out.n = pod_truncation(out.singular_values, energy, static_cast<int>(snapshots.rows()),
                         static_cast<int>(snapshots.cols()), rule);
  out.modes = svd.matrixU().leftCols(out.n);
  const double total = out.singular_values.squaredNorm();
  out.energy_fraction = total > 0.0 ? out.singular_values.head(out.n).squaredNorm() / total : 1.0;
  return out;
}

}  // namespace semrb
