// semrb: steady channel flow, Kovasznay verification and the reduced model.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semrb/errors.hpp"
#include "semrb/io.hpp"
#include "semrb/kovasznay.hpp"
#include "semrb/pipeline.hpp"
#include "semrb/rom.hpp"
#include "semrb/solver.hpp"

namespace {

using namespace semrb;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitArtifact = 4;

// Total reported for the default channel in the reference publication; its
// composition is not stated, so it is only printed next to our count.
constexpr int kReferenceGlobalDofs = 14259;

class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ChannelConfig channel;
  std::vector<double> nus;
  std::vector<double> nu_bounds;  // --nu-range lo hi
  int nu_count = -1;              // -1: subcommand default
  IterationConfig iteration;
  bool perturb = true;
  double perturbation = 1e-3;
  double energy = 0.999;
  Truncation truncation = Truncation::energy;
  std::string snapshots = "snapshots.bin";
  std::string rom = "rom.bin";
  std::string report;
  std::string field = "field.csv";
  std::string spectrum = "pod_spectrum.csv";
  int grid_nx = 361;
  int grid_ny = 61;
  int threads = 0;
  bool allow_partial = false;
  bool quiet = false;
  bool from_snapshots = false;
  std::string rom_method = "auto";
  std::vector<int> p_list{4, 6, 8, 10};
  double kov_re = 40.0;
  int kov_nx = 4;
  int kov_ny = 4;

  void validate() const {
    if (channel.nx < 1 || channel.ny < 1) throw ConfigError("--nx and --ny must be >= 1");
    if (!(channel.lx > 0.0) || !(channel.ly > 0.0)) throw ConfigError("--lx and --ly must be positive");
    if (channel.order < 2) throw ConfigError("--order must be >= 2");
    if (channel.quad != 0 && channel.quad < channel.order + 2) {
      throw ConfigError("--quad must be 0 (auto) or >= order + 2");
    }
    for (double nu : nus) {
      if (!(nu > 0.0)) throw ConfigError("--nu values must be positive");
    }
    if (!nu_bounds.empty() && (nu_bounds.size() != 2 || !(nu_bounds[0] > 0.0) || !(nu_bounds[1] > 0.0))) {
      throw ConfigError("--nu-range expects two positive values");
    }
    if (!(energy > 0.0 && energy <= 1.0)) throw ConfigError("--energy must lie in (0, 1]");
    if (threads < 0) throw ConfigError("--threads must be >= 0");
    if (grid_nx < 2 || grid_ny < 2) throw ConfigError("--grid-nx/--grid-ny must be >= 2");
    if (!(kov_re > 0.0)) throw ConfigError("--kov-re must be positive");
    for (int p : p_list) {
      if (p < 2) throw ConfigError("--p-list orders must be >= 2");
    }
    if (rom_method != "oseen" && rom_method != "newton" && rom_method != "auto") {
      throw ConfigError("--rom-method must be oseen, newton or auto");
    }
    try {
      iteration.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  /// Explicit --nu list wins; otherwise the range (default [0.0025, 0.0075])
  /// sampled at --nu-count points.
  std::vector<double> parameters(int default_count) const {
    if (!nus.empty()) {
      std::vector<double> v = nus;
      std::sort(v.begin(), v.end(), std::greater<>());
      return v;
    }
    const double a = nu_bounds.empty() ? 0.0025 : nu_bounds[0];
    const double b = nu_bounds.empty() ? 0.0075 : nu_bounds[1];
    return nu_range(a, b, nu_count >= 0 ? nu_count : default_count);
  }

  RomMethod method() const {
    if (rom_method == "oseen") return RomMethod::oseen;
    if (rom_method == "newton") return RomMethod::newton;
    return RomMethod::automatic;
  }
};

void log_dofs(const Discretization& disc) {
  const int local_bnd = disc.maps.local_boundary_total();
  const int global = disc.global_total();
  std::cout << "discretization: " << disc.mesh.nx << "x" << disc.mesh.ny << " elements, order "
            << disc.spec.order_velocity << ", " << disc.spec.quad_points << " quadrature points\n"
            << "  local boundary velocity dofs: " << local_bnd << "\n"
            << "  global velocity boundary dofs: " << disc.maps.velocity_global << "\n"
            << "  pressure dofs: " << disc.maps.total_pressure() << "\n"
            << "  interior velocity dofs: " << disc.elements() * disc.local_interior() << "\n"
            << "  global dofs (gathered boundary + pressure + interior): " << global << "\n"
            << "  Schur system size: " << disc.maps.free_count << "\n";
  if (disc.mesh.nx == 8 && disc.mesh.ny == 4 && disc.spec.order_velocity == 12) {
    const int scalar_c0 = disc.maps.scalar_global + disc.elements() * disc.interior_modes();
    std::cout << "  reference total " << kReferenceGlobalDofs << " vs ours " << global
              << " (difference " << kReferenceGlobalDofs - global << "); 3 x scalar C0 space = "
              << 3 * scalar_c0 << "\n";
  }
}

IterationLogger make_logger(bool quiet) {
  if (quiet) return {};
  return [](const IterationEvent& ev) {
    std::cout << "  nu=" << ev.nu << " iter=" << ev.iteration << " rel_change=" << std::scientific
              << std::setprecision(3) << ev.change << " time=" << std::fixed << std::setprecision(4)
              << ev.seconds << "s" << std::defaultfloat << std::setprecision(6) << "\n";
  };
}

void print_rows(const std::vector<SweepResult>& rows) {
  for (const auto& r : rows) {
    std::cout << "nu=" << r.nu << " Re=" << r.reynolds << " iterations=" << r.iterations
              << (r.converged ? "" : " (not converged)");
    if (!std::isnan(r.rel_h1_error)) std::cout << " rel_h1_error=" << r.rel_h1_error;
    std::cout << " asymmetry=" << r.asymmetry << "\n";
  }
}

int finish(bool complete, const RunConfig& cfg) {
  if (complete) return kExitOk;
  std::cerr << "error: at least one solve did not converge";
  if (!cfg.allow_partial) {
    std::cerr << " (use --allow-partial to accept partial results)\n";
    return kExitNotConverged;
  }
  std::cerr << "; partial results kept (--allow-partial)\n";
  return kExitOk;
}

std::string require_file(const std::string& path, const char* hint) {
  if (!std::filesystem::exists(path)) {
    throw MissingArtifact("missing artifact " + path + "; " + hint);
  }
  return path;
}

int cmd_verify(const RunConfig& cfg) {
  KovasznayConfig kc;
  kc.nx = cfg.kov_nx;
  kc.ny = cfg.kov_ny;
  kc.re = cfg.kov_re;
  kc.iteration = cfg.iteration;
  std::cout << "Kovasznay flow, Re=" << kc.re << ", " << kc.nx << "x" << kc.ny << " elements\n";
  std::cout << "order  h1_error      iterations  converged\n";
  std::vector<VerifyRow> rows;
  bool complete = true;
  for (int p : cfg.p_list) {
    VerifyRow row = verify_kovasznay(kc, p);
    std::cout << std::setw(5) << row.order << "  " << std::scientific << std::setprecision(4)
              << row.h1_error << std::defaultfloat << "  " << std::setw(10) << row.iterations << "  "
              << (row.converged ? "yes" : "no") << "\n";
    complete = complete && row.converged;
    rows.push_back(row);
  }
  const std::string path = cfg.report.empty() ? "verify.csv" : cfg.report;
  write_verify_table(path, rows);
  std::cout << "wrote " << path << "\n";
  return finish(complete, cfg);
}

ContinuationOutput run_sweep(const ChannelProblem& prob, const std::vector<double>& nus,
                             const RunConfig& cfg) {
  OseenSolver solver(prob.disc, prob.lift);
  solver.set_logger(make_logger(cfg.quiet));
  std::optional<Eigen::VectorXd> bias;
  if (cfg.perturb) bias = prob.perturbed;
  return continuation_sweep(solver, nus, cfg.iteration, bias);
}

int cmd_solve(const RunConfig& cfg) {
  const ChannelProblem prob = make_channel_problem(cfg.channel, cfg.perturbation);
  log_dofs(prob.disc);
  const std::vector<double> nus = cfg.nus.empty() && cfg.nu_bounds.empty() && cfg.nu_count < 0
                                      ? std::vector<double>{0.0075}
                                      : cfg.parameters(1);
  if (nus.empty()) {
    std::cout << "no parameters requested\n";
    return kExitOk;
  }
  const ContinuationOutput out = run_sweep(prob, nus, cfg);
  print_rows(out.results);
  const std::string report = cfg.report.empty() ? "solve_report.csv" : cfg.report;
  write_sweep_report(report, out.results);
  std::cout << "wrote " << report << "\n";
  if (!out.solutions.empty()) {
    const int rows = export_field(cfg.field, prob.disc, out.solutions.back(), {cfg.grid_nx, cfg.grid_ny});
    std::cout << "wrote " << cfg.field << " (" << rows << " samples at nu=" << out.solutions.back().nu
              << ")\n";
  }
  return finish(out.complete, cfg);
}

int cmd_offline(const RunConfig& cfg) {
  const ChannelProblem prob = make_channel_problem(cfg.channel, cfg.perturbation);
  log_dofs(prob.disc);
  SnapshotSet set;
  bool complete = true;
  if (cfg.from_snapshots) {
    set = load_snapshots(require_file(cfg.snapshots, "run `semrb offline` without --from-snapshots"),
                         prob.disc.fingerprint());
    std::cout << "loaded " << set.size() << " snapshots from " << cfg.snapshots << "\n";
  } else {
    const std::vector<double> nus = cfg.parameters(11);
    if (nus.empty()) throw ConfigError("offline needs at least one training parameter");
    const ContinuationOutput out = run_sweep(prob, nus, cfg);
    print_rows(out.results);
    if (!cfg.report.empty()) write_sweep_report(cfg.report, out.results);
    complete = out.complete;
    if (!complete && !cfg.allow_partial) return finish(false, cfg);
    if (out.solutions.empty()) return finish(false, cfg);
    std::vector<double> done(nus.begin(), nus.begin() + static_cast<long>(out.solutions.size()));
    set = collect_snapshots(prob.disc, prob.lift, done, out.solutions);
    save_snapshots(cfg.snapshots, set);
    std::cout << "wrote " << cfg.snapshots << " (" << set.size() << " snapshots)\n";
  }
  const RomOperators ops = offline_build(prob.disc, set, cfg.energy, Exec::parallel, cfg.truncation);
  save_rom(cfg.rom, ops);
  write_pod_spectrum(cfg.spectrum, ops);
  std::cout << "reduced basis: " << ops.na() << " state modes + " << ops.nd()
            << " interior modes (" << (cfg.truncation == Truncation::count ? "count " : "energy ") << cfg.energy << ", tails " << ops.state_pod.truncation_tail()
            << ", " << ops.interior_pod.truncation_tail() << ")\n"
            << "wrote " << cfg.rom << " and " << cfg.spectrum << "\n";
  return finish(complete, cfg);
}

int cmd_online(const RunConfig& cfg) {
  const Discretization disc = build_channel(cfg.channel);
  const RomOperators ops =
      load_rom(require_file(cfg.rom, "run `semrb offline` first to build it"), disc.fingerprint());
  const std::vector<double> nus = cfg.parameters(21);
  const OnlineRun run = online_sweep(disc, ops, nus, cfg.iteration, cfg.method());
  print_rows(run.results);
  const std::string report = cfg.report.empty() ? "online_report.csv" : cfg.report;
  write_sweep_report(report, run.results);
  std::cout << "wrote " << report << "\n";
  return finish(run.complete, cfg);
}

int cmd_compare(const RunConfig& cfg) {
  const ChannelProblem prob = make_channel_problem(cfg.channel, cfg.perturbation);
  const RomOperators ops =
      load_rom(require_file(cfg.rom, "run `semrb offline` first to build it"), prob.disc.fingerprint());
  log_dofs(prob.disc);
  const std::vector<double> nus = cfg.parameters(21);
  if (nus.empty()) {
    write_sweep_report(cfg.report.empty() ? "compare_report.csv" : cfg.report, {});
    return kExitOk;
  }
  const ContinuationOutput full = run_sweep(prob, nus, cfg);
  const OnlineRun run = online_sweep(prob.disc, ops, nus, cfg.iteration, cfg.method());

  std::vector<SweepResult> rows = full.results;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rom_time_s = run.results[i].rom_time_s;
    if (i < full.solutions.size()) {
      rows[i].rel_h1_error = relative_h1_error(prob.disc, full.solutions[i], run.fields[i]);
    }
  }
  print_rows(rows);
  const std::string report = cfg.report.empty() ? "compare_report.csv" : cfg.report;
  write_sweep_report(report, rows);

  const TimingSummary t = summarize_timing(full.iteration_seconds, run.solves);
  std::cout << "timing: full iteration mean " << t.fom_mean << " s (median " << t.fom_median
            << "), reduced iteration mean " << t.rom_mean << " s (median " << t.rom_median
            << "), median ratio " << t.ratio() << "\n"
            << "POD truncation tail: state " << ops.state_pod.truncation_tail() << ", interior "
            << ops.interior_pod.truncation_tail() << "\n"
            << "wrote " << report << "\n";
  return finish(full.complete && run.complete, cfg);
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--nx", cfg.channel.nx, "elements in x")->capture_default_str();
  sub->add_option("--ny", cfg.channel.ny, "elements in y")->capture_default_str();
  sub->add_option("--lx", cfg.channel.lx, "domain length")->capture_default_str();
  sub->add_option("--ly", cfg.channel.ly, "domain height")->capture_default_str();
  sub->add_option("--order", cfg.channel.order, "velocity polynomial order p")->capture_default_str();
  sub->add_option("--quad", cfg.channel.quad, "GLL points per direction (0: p + 2)")->capture_default_str();
  auto* nu = sub->add_option("--nu", cfg.nus, "viscosity values");
  sub->add_option("--nu-range", cfg.nu_bounds, "viscosity interval lo hi")->expected(2)->excludes(nu);
  sub->add_option("--nu-count", cfg.nu_count, "samples in the viscosity interval");
  sub->add_option("--tol", cfg.iteration.tol, "relative H1 change tolerance")->capture_default_str();
  sub->add_option("--max-iter", cfg.iteration.max_iter, "iteration cap per parameter")->capture_default_str();
  sub->add_option("--relax", cfg.iteration.relaxation, "under-relaxation factor in (0, 1]")
      ->capture_default_str();
  sub->add_option("--continuation-step", cfg.iteration.continuation_step, "largest viscosity step")
      ->capture_default_str();
  sub->add_flag("--perturb,!--no-perturb", cfg.perturb, "bias the inflow at the first parameter")
      ->capture_default_str();
  sub->add_option("--perturbation", cfg.perturbation, "inflow bias amplitude")->capture_default_str();
  sub->add_option("--energy", cfg.energy, "retained POD fraction")->capture_default_str();
  sub->add_option("--truncation", cfg.truncation, "read --energy as squared singular value share or mode count share")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Truncation>{{"energy", Truncation::energy}, {"count", Truncation::count}},
          CLI::ignore_case));
  sub->add_option("--snapshots", cfg.snapshots, "snapshot file")->capture_default_str();
  sub->add_option("--rom", cfg.rom, "reduced model file")->capture_default_str();
  sub->add_option("--report", cfg.report, "CSV report path");
  sub->add_option("--field", cfg.field, "field export CSV (solve)")->capture_default_str();
  sub->add_option("--spectrum", cfg.spectrum, "POD spectrum CSV (offline)")->capture_default_str();
  sub->add_option("--grid-nx", cfg.grid_nx, "field export samples in x")->capture_default_str();
  sub->add_option("--grid-ny", cfg.grid_ny, "field export samples in y")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "OpenMP threads (0: runtime default)")->capture_default_str();
  sub->add_flag("--allow-partial", cfg.allow_partial, "exit 0 even if a solve does not converge");
  sub->add_flag("--quiet", cfg.quiet, "no per-iteration log lines");
  sub->add_option("--rom-method", cfg.rom_method, "reduced solver: oseen, newton or auto")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral element channel flow with a POD reduced model"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* verify = app.add_subcommand("verify", "Kovasznay convergence under p-refinement");
  add_common(verify, cfg);
  verify->add_option("--p-list", cfg.p_list, "orders to run")->delimiter(',')->capture_default_str();
  verify->add_option("--kov-re", cfg.kov_re, "Kovasznay Reynolds number")->capture_default_str();
  verify->add_option("--kov-nx", cfg.kov_nx, "Kovasznay elements in x")->capture_default_str();
  verify->add_option("--kov-ny", cfg.kov_ny, "Kovasznay elements in y")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "full-order steady solve(s) with continuation");
  add_common(solve, cfg);
  auto* offline = app.add_subcommand("offline", "snapshots, POD and reduced operators");
  add_common(offline, cfg);
  offline->add_flag("--from-snapshots", cfg.from_snapshots, "reuse the snapshot file");
  auto* online = app.add_subcommand("online", "reduced solves over a viscosity list");
  add_common(online, cfg);
  auto* compare = app.add_subcommand("compare", "full vs reduced error and timing");
  add_common(compare, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    cfg.validate();
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    if (verify->parsed()) return cmd_verify(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (offline->parsed()) return cmd_offline(cfg);
    if (online->parsed()) return cmd_online(cfg);
    if (compare->parsed()) return cmd_compare(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingArtifact& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArtifact;
  } catch (const IncompatibleArtifact& e) {
    std::cerr << "incompatible artifact: " << e.what() << "\n";
    return kExitArtifact;
  } catch (const CorruptArtifact& e) {
    std::cerr << "corrupt artifact: " << e.what() << "\n";
    return kExitArtifact;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
