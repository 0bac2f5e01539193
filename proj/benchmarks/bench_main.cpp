#include "irsfd/baselines.hpp"
#include "irsfd/channel_gen.hpp"
#include "irsfd/ewmmse.hpp"
#include "irsfd/experiment.hpp"
#include "irsfd/irs_mm.hpp"
#include "irsfd/rate.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace irsfd;

struct Problem {
  SystemConfig cfg;
  ChannelEstimates est;
  ErrorCovariances err;
};

// preset("desk") for arg 0, preset("paper") for arg 1, at 30 dB and rho = 0.4.
Problem make_problem(int paper) {
  const ExperimentSpec spec = preset(paper ? "paper" : "desk");
  Problem p;
  p.cfg = spec.sys;
  p.cfg.alpha0 = p.cfg.alphak = 1000.0;
  Rng rng(1);
  p.est = generate_estimates(p.cfg, spec.geo, rng);
  p.err = error_covariances(spec.csi, 1000.0, p.cfg);
  return p;
}

void BM_OuterSweep(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  const SolverOptions opts;
  const BeamformingState init = initial_state(p.est, p.err, p.cfg, opts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ewmmse_sweep(p.est, p.err, init, p.cfg, opts));
  }
}
BENCHMARK(BM_OuterSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Algorithm2(benchmark::State& state) {
  const Problem p = make_problem(0);
  const SolverOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(run_algorithm2(p.est, p.err, p.cfg, opts));
}
BENCHMARK(BM_Algorithm2)->Unit(benchmark::kMillisecond);

void BM_MmStep(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  const SolverOptions opts;
  const BeamformingState s = initial_state(p.est, p.err, p.cfg, opts);
  const StzMatrices m = build_stz(p.est, p.err, s, p.cfg);
  const MmProblem prob = build_mm_problem(m.s_mat, m.t_mat, m.z_mat);
  IrsPhase theta = s.theta;
  for (auto _ : state) {
    theta = mm_step(prob, theta);
    benchmark::DoNotOptimize(theta);
  }
}
BENCHMARK(BM_MmStep)->Arg(0)->Arg(1);

void BM_BuildSigma(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  const BeamformingState s = initial_state(p.est, p.err, p.cfg, {});
  const Mat u = s.u_cov(), v = s.v_cov();
  for (auto _ : state) benchmark::DoNotOptimize(build_sigma(p.est, p.err, s.theta, u, v, p.cfg));
}
BENCHMARK(BM_BuildSigma)->Arg(0)->Arg(1);

void BM_MonteCarloRate(benchmark::State& state) {
  const Problem p = make_problem(0);
  const BeamformingState s = initial_state(p.est, p.err, p.cfg, {});
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(monte_carlo_wsr(p.est, p.err, s, p.cfg, 200, rng));
  }
}
BENCHMARK(BM_MonteCarloRate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
