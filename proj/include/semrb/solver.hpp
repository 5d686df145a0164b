#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "semrb/assembly.hpp"
#include "semrb/discretization.hpp"
#include "semrb/flow_field.hpp"
#include "semrb/parallel.hpp"

namespace semrb {

struct IterationConfig {
  double tol = 1e-8;               // relative H1 change between iterates
  int max_iter = 100;
  double continuation_step = 1e-3; // largest |delta nu| per continuation move
  double relaxation = 1.0;         // u <- w u_new + (1 - w) u_old

  void validate() const;
};

struct IterationEvent {
  double nu = 0.0;
  int iteration = 0;
  double change = 0.0;
  double seconds = 0.0;
};

using IterationLogger = std::function<void(const IterationEvent&)>;

struct SteadyResult {
  FlowField field;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;            // relative H1 change per iteration
  std::vector<double> iteration_seconds;  // wall time per iteration
};

/// Oseen fixed-point iteration for steady incompressible flow on one
/// discretization with fixed Dirichlet data.
class OseenSolver {
 public:
  OseenSolver(const Discretization& disc, Eigen::VectorXd dirichlet_velocity,
              VelocityFunction forcing = {}, Exec exec = Exec::parallel);

  const Discretization& discretization() const { return *disc_; }
  const Eigen::VectorXd& dirichlet() const { return dirichlet_; }
  void set_dirichlet(Eigen::VectorXd values);
  void set_logger(IterationLogger logger) { logger_ = std::move(logger); }

  /// One linearized solve about u_k; relaxation blends with u_k.
  FlowField step(const FlowField& u_k, double nu, double relaxation = 1.0) const;

  /// Iterate from `initial` until the relative H1 change drops below tol.
  /// Non-convergence is reported through SteadyResult::converged.
  SteadyResult solve_steady(double nu, const FlowField& initial, const IterationConfig& cfg) const;

  /// ||R(u)|| / ||R(lift)|| where R is the gathered residual of the Oseen
  /// system linearized at u itself, over all non-Dirichlet rows.
  double steady_residual(const FlowField& u, double nu) const;

  /// The Dirichlet lift as a field: boundary values only.
  FlowField lift_field() const;

 private:
  const Discretization* disc_;
  Eigen::VectorXd dirichlet_;
  VelocityFunction forcing_;
  Exec exec_;
  IterationLogger logger_;
};

/// Per-parameter record for reports.
struct SweepResult {
  double nu = 0.0;
  double reynolds = 0.0;
  int iterations = 0;
  double final_rel_change = 0.0;
  double asymmetry = 0.0;
  double fom_time_s = std::numeric_limits<double>::quiet_NaN();
  double rom_time_s = std::numeric_limits<double>::quiet_NaN();
  double rel_h1_error = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

/// Characteristic velocity 1/4 and length 1: Re = 1 / (4 nu).
inline double reynolds_number(double nu) { return 1.0 / (4.0 * nu); }

struct ContinuationOutput {
  std::vector<SweepResult> results;
  std::vector<FlowField> solutions;
  std::vector<std::vector<double>> histories;
  std::vector<std::vector<double>> iteration_seconds;
  bool complete = false;
};

/// Continuation in nu (descending). The solution at each parameter seeds the
/// next; gaps wider than cfg.continuation_step get unrecorded intermediate
/// solves. When `perturbed_dirichlet` is given, the first parameter is
/// first converged with that data and then re-converged with the solver's
/// own data. A non-converged parameter stops the sweep.
ContinuationOutput continuation_sweep(const OseenSolver& solver, const std::vector<double>& nus,
                                      const IterationConfig& cfg,
                                      const std::optional<Eigen::VectorXd>& perturbed_dirichlet = {});

/// ||u_x(x,y) - u_x(x, Ly-y)||_L2 / ||u_x||_L2, by quadrature on the
/// mirrored element grid.
double asymmetry_indicator(const Discretization& disc, const FlowField& field);

/// Median of a list (0 for empty input).
double median(std::vector<double> values);

}  // namespace semrb
