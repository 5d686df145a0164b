#pragma once

#include "semrb/pipeline.hpp"
#include "semrb/rom.hpp"
#include "support.hpp"

namespace semrb::testing {

/// Small channel (p = 4) with three converged training states; built once.
struct RomFixture {
  ChannelProblem prob;
  std::vector<double> nus;
  std::vector<FlowField> fields;
  SnapshotSet snapshots;
  RomOperators exact;  // energy 1.0
};

inline const RomFixture& rom_fixture() {
  static const RomFixture f = [] {
    ChannelConfig c;
    c.order = 4;
    RomFixture r{make_channel_problem(c), {0.02, 0.014, 0.01}, {}, {}, {}};
    OseenSolver solver(r.prob.disc, r.prob.lift);
    IterationConfig cfg;
    cfg.tol = 1e-11;
    cfg.max_iter = 500;
    const ContinuationOutput out = continuation_sweep(solver, r.nus, cfg, r.prob.perturbed);
    if (!out.complete) throw std::runtime_error("fixture sweep did not converge");
    r.fields = out.solutions;
    r.snapshots = collect_snapshots(r.prob.disc, r.prob.lift, r.nus, r.fields);
    r.exact = offline_build(r.prob.disc, r.snapshots, 1.0);
    return r;
  }();
  return f;
}

}  // namespace semrb::testing
