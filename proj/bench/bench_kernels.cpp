// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <map>

#include "semrb/assembly.hpp"
#include "semrb/condense.hpp"
#include "semrb/pipeline.hpp"

namespace {

using namespace semrb;

struct Case {
  ChannelProblem prob;
  FlowField uk;
};

const Case& channel_case(int order) {
  static std::map<int, Case> cache;
  auto it = cache.find(order);
  if (it == cache.end()) {
    ChannelConfig c;
    c.order = order;
    ChannelProblem prob = make_channel_problem(c);
    OseenSolver solver(prob.disc, prob.lift);
    FlowField u = solver.step(solver.lift_field(), 0.005);
    it = cache.emplace(order, Case{std::move(prob), std::move(u)}).first;
  }
  return it->second;
}

void BM_AssembleParallel(benchmark::State& state) {
  const Case& c = channel_case(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_oseen(c.prob.disc, 0.005, &c.uk, {}, {}, Exec::parallel));
  }
}

void BM_AssembleSerial(benchmark::State& state) {
  const Case& c = channel_case(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_oseen(c.prob.disc, 0.005, &c.uk, {}, {}, Exec::serial));
  }
}

void BM_AssembleReference(benchmark::State& state) {
  const Case& c = channel_case(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_oseen_reference(c.prob.disc, 0.005, &c.uk));
}

void condense(benchmark::State& state, Exec exec) {
  const Case& c = channel_case(static_cast<int>(state.range(0)));
  const LocalBlockSystem local = assemble_oseen(c.prob.disc, 0.005, &c.uk);
  for (auto _ : state) benchmark::DoNotOptimize(solve_oseen_system(c.prob.disc, local, c.prob.lift, exec));
}

void BM_CondenseParallel(benchmark::State& state) { condense(state, Exec::parallel); }
void BM_CondenseSerial(benchmark::State& state) { condense(state, Exec::serial); }

}  // namespace

BENCHMARK(BM_AssembleParallel)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleSerial)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleReference)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CondenseParallel)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CondenseSerial)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
