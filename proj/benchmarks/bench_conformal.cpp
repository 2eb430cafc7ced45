#include <benchmark/benchmark.h>

#include <numeric>

#include "conformal/cqhr.hpp"
#include "conformal/metrics.hpp"
#include "conformal/models.hpp"
#include "conformal/quantile.hpp"
#include "conformal/rng.hpp"
#include "conformal/simgen.hpp"

using namespace conformal;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.normal();
  return out;
}

GeneratedData scenario_data(const char* name, std::size_t n_train, std::size_t n_cal) {
  ScenarioSpec spec = builtin_scenario(name);
  spec.n_train = n_train;
  spec.n_cal = n_cal;
  spec.n_test = 500;
  spec.seed = 7;
  return generate(spec);
}

SplitPlan two_part_plan(Eigen::Index n_train, Eigen::Index n_cal) {
  SplitPlan plan;
  plan.train_idx.resize(static_cast<std::size_t>(n_train));
  plan.cal1_idx.resize(static_cast<std::size_t>(n_cal));
  std::iota(plan.train_idx.begin(), plan.train_idx.end(), Eigen::Index{0});
  std::iota(plan.cal1_idx.begin(), plan.cal1_idx.end(), n_train);
  return plan;
}

void BM_InflatedQuantile(benchmark::State& state) {
  const auto values = random_values(static_cast<std::size_t>(state.range(0)), 11);
  for (auto _ : state)
    benchmark::DoNotOptimize(inflated_empirical_quantile(values, 0.9));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_InflatedQuantile)->Range(256, 1 << 18)->Complexity();

void BM_PinballFit(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto m = static_cast<int>(state.range(1));
  Rng rng(3);
  Eigen::MatrixXd x(n, m - 1);
  Eigen::MatrixXd y(n, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < m; ++j) x(i, j) = rng.uniform(-2.0, 2.0);
    y(i, 0) = x.row(i).sum() + rng.gamma(2.0, 1.0);
  }
  const Eigen::MatrixXd phi = FeatureMap::linear(m - 1).expand_rows(x);
  for (auto _ : state) benchmark::DoNotOptimize(fit_pinball(phi, y.col(0), 0.95));
}
BENCHMARK(BM_PinballFit)->Args({500, 5})->Args({500, 11})->Args({2000, 5});

void BM_FitCqhrSetup1(benchmark::State& state) {
  const GeneratedData data = scenario_data("setup1", 500, 500);
  const ScenarioSpec spec = builtin_scenario("setup1");
  const SplitPlan plan = two_part_plan(500, 500);
  const MiscoverageConfig config = MiscoverageConfig::symmetric(0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_cqhr(data.fit, plan, config, spec.model_bases));
}
BENCHMARK(BM_FitCqhrSetup1);

void BM_EvaluateTendim(benchmark::State& state) {
  const GeneratedData data = scenario_data("tendim", 500, 500);
  const ScenarioSpec spec = builtin_scenario("tendim");
  MethodConfig cfg;
  cfg.method = Method::kCqhr;
  const auto pred = fit_method(data.fit, 500, 500, spec.model_bases, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(*pred, data.test));
}
BENCHMARK(BM_EvaluateTendim);

void BM_GenerateSetup1(benchmark::State& state) {
  ScenarioSpec spec = builtin_scenario("setup1");
  spec.n_train = static_cast<std::size_t>(state.range(0));
  spec.n_cal = 0;
  spec.n_test = 1;
  spec.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(generate(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateSetup1)->Range(1000, 100000);

}  // namespace

BENCHMARK_MAIN();
