#pragma once

#include <vector>

#include <Eigen/Dense>

#include "semrb/discretization.hpp"
#include "semrb/rom.hpp"
#include "semrb/solver.hpp"

namespace semrb {

/// Channel discretization with its Dirichlet data, unperturbed and with the
/// symmetry-breaking inflow bias.
struct ChannelProblem {
  Discretization disc;
  Eigen::VectorXd lift;
  Eigen::VectorXd perturbed;
};

ChannelProblem make_channel_problem(const ChannelConfig& cfg, double perturbation = 1e-3);

/// `count` uniform values between a and b, returned in descending order.
/// count 1 yields max(a, b); count 0 yields an empty list.
std::vector<double> nu_range(double a, double b, int count);

struct OnlineRun {
  std::vector<SweepResult> results;
  std::vector<FlowField> fields;
  std::vector<RomResult> solves;
  bool complete = true;
};

/// One reduced solve per parameter, in the given order, seeded with the
/// nearest training coordinates. A failed solve is retried from the previous
/// converged reduced state; results then count both attempts.
OnlineRun online_sweep(const Discretization& disc, const RomOperators& ops,
                       const std::vector<double>& nus, const IterationConfig& cfg,
                       RomMethod method = RomMethod::automatic);

struct TimingSummary {
  double fom_mean = 0.0;
  double rom_mean = 0.0;
  double fom_median = 0.0;
  double rom_median = 0.0;

  /// fom_median / rom_median (0 when rom_median is 0).
  double ratio() const { return rom_median > 0.0 ? fom_median / rom_median : 0.0; }
};

TimingSummary summarize_timing(const std::vector<std::vector<double>>& fom_iterations,
                               const std::vector<RomResult>& rom_solves);

}  // namespace semrb
