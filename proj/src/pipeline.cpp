#include "semrb/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace semrb {

ChannelProblem make_channel_problem(const ChannelConfig& cfg, double perturbation) {
  Discretization disc = build_channel(cfg);
  const std::vector<double> breaks{cfg.inflow.y0, cfg.inflow.y1};
  Eigen::VectorXd lift = dirichlet_values(disc, channel_inflow(cfg.inflow), breaks);
  Eigen::VectorXd perturbed = dirichlet_values(disc, channel_inflow(cfg.inflow, perturbation), breaks);
  return {std::move(disc), std::move(lift), std::move(perturbed)};
}

std::vector<double> nu_range(double a, double b, int count) {
  if (count < 0) throw std::invalid_argument("parameter count must be >= 0");
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {hi};
  for (int i = 0; i < count; ++i) out.push_back(hi + (lo - hi) * i / (count - 1));
  out.back() = lo;
  return out;
}

OnlineRun online_sweep(const Discretization& disc, const RomOperators& ops,
                       const std::vector<double>& nus, const IterationConfig& cfg, RomMethod method) {
  OnlineRun run;
  std::optional<Eigen::VectorXd> previous;
  for (double nu : nus) {
    // Training coordinates first: seeding from the previous reduced state
    // tends to follow spurious reduced branches. That state is only a
    // fallback, and the cost of both attempts is kept.
    RomResult res = rom_solve(ops, nu, cfg, nearest_training_coords(ops, nu), method);
    if (!res.converged && previous) {
      RomResult retry = rom_solve(ops, nu, cfg, *previous, method);
      retry.iterations += res.iterations;
      retry.history.insert(retry.history.begin(), res.history.begin(), res.history.end());
      retry.iteration_seconds.insert(retry.iteration_seconds.begin(), res.iteration_seconds.begin(),
                                     res.iteration_seconds.end());
      res = std::move(retry);
    }
    if (res.converged) previous = res.coords;
    FlowField field = recover_full(disc, ops, res.coords);
    field.nu = nu;
    field.iterations = res.iterations;
    SweepResult row;
    row.nu = nu;
    row.reynolds = reynolds_number(nu);
    row.iterations = res.iterations;
    row.final_rel_change = res.history.empty() ? 0.0 : res.history.back();
    row.asymmetry = asymmetry_indicator(disc, field);
    row.rom_time_s = median(res.iteration_seconds);
    row.converged = res.converged;
    run.complete = run.complete && res.converged;
    run.results.push_back(row);
    run.fields.push_back(std::move(field));
    run.solves.push_back(std::move(res));
  }
  return run;
}

TimingSummary summarize_timing(const std::vector<std::vector<double>>& fom_iterations,
                               const std::vector<RomResult>& rom_solves) {
  std::vector<double> fom, rom;
  for (const auto& v : fom_iterations) fom.insert(fom.end(), v.begin(), v.end());
  for (const auto& r : rom_solves) rom.insert(rom.end(), r.iteration_seconds.begin(), r.iteration_seconds.end());
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  TimingSummary t;
  t.fom_mean = mean(fom);
  t.rom_mean = mean(rom);
  t.fom_median = median(fom);
  t.rom_median = median(rom);
  return t;
}

}  // namespace semrb
