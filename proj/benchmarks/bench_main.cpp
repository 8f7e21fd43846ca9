#include <benchmark/benchmark.h>

#include <plm_enet/plm_enet.hpp>

using namespace plm_enet;

namespace {

SimulatedData replicate(Index n) {
  SimulationConfig config;
  config.n = n;
  return generate_dgp(config, 0);
}

void BM_PartialOut(benchmark::State& state) {
  const Index n = state.range(0);
  const StandardizedData s = standardize(replicate(n).data);
  const SmootherConfig smoother = rule_of_thumb_smoother(n);
  for (auto _ : state) benchmark::DoNotOptimize(partial_out(s.data, smoother));
  state.SetComplexityN(n);
}
BENCHMARK(BM_PartialOut)->RangeMultiplier(2)->Range(250, 4000)->Complexity();

void BM_EnetFit(benchmark::State& state) {
  const Index n = state.range(0);
  const StandardizedData s = standardize(replicate(n).data);
  const PartialResiduals pr = partial_out(s.data, rule_of_thumb_smoother(n));
  const PenaltySpec spec = PenaltySpec::enet(0.05 * lambda1_max(pr.x_tilde, pr.y_tilde, PenaltySpec::enet(0, 1.0 / 3.0)),
                                             1.0 / 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit(pr, spec));
}
BENCHMARK(BM_EnetFit)->Arg(300)->Arg(1000)->Arg(4000);

void BM_LassoPathWide(benchmark::State& state) {
  const SimulatedData sim = generate_pggn(38, state.range(0), {10, 10}, 1);
  const StandardizedData s = standardize(sim.data);
  const PartialResiduals pr = partial_out(s.data, rule_of_thumb_smoother(38));
  const PenaltySpec spec = PenaltySpec::lasso(0.0);
  const auto grid = default_lambda1_grid(pr, spec, 100);
  for (auto _ : state) benchmark::DoNotOptimize(fit_path(pr.x_tilde, pr.y_tilde, spec, grid));
}
BENCHMARK(BM_LassoPathWide)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_CrossValidate(benchmark::State& state) {
  const Index n = state.range(0);
  const StandardizedData s = standardize(replicate(n).data);
  const SmootherConfig smoother = rule_of_thumb_smoother(n);
  const CvPlan plan = make_cv_plan(n, 10, {}, 1.0 / 3.0, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cross_validate(s.data, plan, smoother, PenaltySpec::enet(0.0, 1.0 / 3.0)));
  }
}
BENCHMARK(BM_CrossValidate)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
