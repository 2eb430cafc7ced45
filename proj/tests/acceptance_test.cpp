// Acceptance suite: one test case per shipped guarantee, each printing a
// single [PASS]/[FAIL] line with the measured numbers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <thread>
#include <vector>

#include "conformal/baselines.hpp"
#include "conformal/chr.hpp"
#include "conformal/cqhr.hpp"
#include "conformal/metrics.hpp"
#include "conformal/quantile.hpp"
#include "conformal/rng.hpp"
#include "conformal/simgen.hpp"

using namespace conformal;

namespace {

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[criterion %d] %s  %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", criterion, ": ", detail);
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

double quantile_oracle(std::vector<double> values, double delta) {
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(delta * static_cast<double>(values.size() + 1));
  if (rank > static_cast<double>(values.size())) return kInfinity;
  return values[static_cast<std::size_t>(rank) - 1];
}

}  // namespace

// Finite-sample validity: joint coverage over 5000 independent replicate
// draws lies in [1 - alpha, 1 - alpha + 1/(n_cal + 1)] up to binomial noise,
// for both CHR score kinds and CQHR, with n_cal(2) = 99 and alpha = 0.1.
TEST_CASE("criterion 1: validity band") {
  const std::size_t replicates = 5000;
  const double lo_band = 0.90, hi_band = 0.91;
  const double se = std::sqrt(0.905 * 0.095 / static_cast<double>(replicates));
  bool all_ok = true;
  std::string detail;
  for (const Method method : {Method::kChrAbsolute, Method::kChrSigned, Method::kCqhr}) {
    ScenarioSpec spec = builtin_scenario("setup4");
    spec.n_train = 200;
    spec.n_cal = method == Method::kCqhr ? 99 : 198;  // CHR halves into 99 + 99
    spec.n_test = 1;
    MethodConfig cfg;
    cfg.method = method;
    cfg.alpha = 0.1;
    const auto start = std::chrono::steady_clock::now();
    const ReplicatedReport rep = run_replicated(spec, cfg, replicates, 1001, 2);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double cov = rep.aggregate.overall_coverage;
    const bool ok = cov >= lo_band - 3 * se && cov <= hi_band + 3 * se && secs < 300.0;
    all_ok = all_ok && ok;
    detail += method_name(method) + " " + fmt(cov) + " (" + fmt(secs, 1) + "s)  ";
  }
  detail += "band [" + fmt(lo_band - 3 * se) + ", " + fmt(hi_band + 3 * se) + "]";
  report(1, all_ok, detail);
}

// Table-1 reproduction at desk scale (200 x 500, fixed seed): the quantile
// method's coverage and marginals, and the absolute-max hypercube marginals
// with exactly equal sides.
TEST_CASE("criterion 2: table-1 rows at desk scale") {
  const ScenarioSpec spec = builtin_scenario("setup1");
  MethodConfig cqhr_cfg;
  cqhr_cfg.method = Method::kCqhr;
  const ReplicatedReport cqhr = run_replicated(spec, cqhr_cfg, 200, 20260810, 2);
  MethodConfig am_cfg;
  am_cfg.method = Method::kAbsoluteMax;
  const ReplicatedReport am = run_replicated(spec, am_cfg, 200, 20260810, 2);

  bool ok = std::abs(cqhr.aggregate.overall_coverage - 0.900) <= 0.010;
  const double cqhr_marg[] = {0.957, 0.943, 0.968};
  const double am_marg[] = {0.991, 1.000, 0.906};
  for (int j = 0; j < 3; ++j) {
    ok = ok && std::abs(cqhr.aggregate.marginal_coverage[j] - cqhr_marg[j]) <= 0.02;
    ok = ok && std::abs(am.aggregate.marginal_coverage[j] - am_marg[j]) <= 0.02;
  }

  // equal sides, exactly: one fitted hypercube applies a single scalar
  ScenarioSpec one = spec;
  one.seed = 77;
  const GeneratedData data = generate(one);
  const auto pred = fit_method(data.fit, one.n_train, one.n_cal, one.model_bases, am_cfg);
  const auto* am_pred = dynamic_cast<const AbsoluteMaxPredictor*>(pred.get());
  bool equal_sides = am_pred != nullptr;
  for (Eigen::Index i = 0; equal_sides && i < 100; ++i) {
    const Eigen::VectorXd probe = data.test.x.row(i).transpose();
    const Hyperrectangle rect = pred->predict(probe);
    const Eigen::VectorXd f = predict_point(am_pred->model, probe);
    for (Eigen::Index j = 0; j < 3; ++j)
      equal_sides = equal_sides && rect.lo[j] == f[j] - am_pred->half_width &&
                    rect.hi[j] == f[j] + am_pred->half_width;
  }
  ok = ok && equal_sides;

  report(2, ok,
         "cqhr cov " + fmt(cqhr.aggregate.overall_coverage) + " marg (" +
             fmt(cqhr.aggregate.marginal_coverage[0], 3) + ", " +
             fmt(cqhr.aggregate.marginal_coverage[1], 3) + ", " +
             fmt(cqhr.aggregate.marginal_coverage[2], 3) + ");  absmax marg (" +
             fmt(am.aggregate.marginal_coverage[0], 3) + ", " +
             fmt(am.aggregate.marginal_coverage[1], 3) + ", " +
             fmt(am.aggregate.marginal_coverage[2], 3) + "), equal sides " +
             (equal_sides ? "exact" : "BROKEN"));
}

// Ten-dimensional homoskedastic balance at desk scale: coverage, all ten
// marginals near 0.965, and mean lengths within 5% of the 1:2:3:4:5 pattern.
TEST_CASE("criterion 3: ten-dimensional balance") {
  const ScenarioSpec spec = builtin_scenario("balance-homo");
  MethodConfig cfg;
  cfg.method = Method::kCqhr;
  const ReplicatedReport rep = run_replicated(spec, cfg, 200, 97531, 2);
  const auto& a = rep.aggregate;
  bool ok = std::abs(a.overall_coverage - 0.900) <= 0.012;
  double worst_marg = 0.0, worst_len = 0.0;
  const double pattern[] = {4.26, 8.51, 12.78, 17.04, 21.30};
  for (Eigen::Index j = 0; j < 10; ++j) {
    worst_marg = std::max(worst_marg, std::abs(a.marginal_coverage[j] - 0.965));
    const double target = pattern[j % 5];
    worst_len = std::max(worst_len, std::abs(a.mean_lengths[j] - target) / target);
  }
  ok = ok && worst_marg <= 0.02 && worst_len <= 0.05;
  report(3, ok,
         "cov " + fmt(a.overall_coverage) + ", max |marg-0.965| " + fmt(worst_marg) +
             ", max length deviation " + fmt(100.0 * worst_len, 2) + "%");
}

// Bonferroni overcoverage contrast on the same scenario.
TEST_CASE("criterion 4: bonferroni overcoverage contrast") {
  const ScenarioSpec spec = builtin_scenario("balance-homo");
  MethodConfig bonf_cfg;
  bonf_cfg.method = Method::kBonferroniCqr;
  const ReplicatedReport bonf = run_replicated(spec, bonf_cfg, 200, 97531, 2);
  MethodConfig cqhr_cfg;
  cqhr_cfg.method = Method::kCqhr;
  const ReplicatedReport cqhr = run_replicated(spec, cqhr_cfg, 200, 97531, 2);

  bool ok = bonf.aggregate.overall_coverage >= 0.955;
  double worst_marg = 0.0;
  for (Eigen::Index j = 0; j < 10; ++j)
    worst_marg = std::max(worst_marg, std::abs(bonf.aggregate.marginal_coverage[j] - 0.990));
  ok = ok && worst_marg <= 0.01;
  ok = ok && bonf.aggregate.overall_coverage > cqhr.aggregate.overall_coverage;
  report(4, ok,
         "bonf cov " + fmt(bonf.aggregate.overall_coverage) + " (cqhr " +
             fmt(cqhr.aggregate.overall_coverage) + "), max |marg-0.990| " + fmt(worst_marg));
}

// CHR predictions are identical for every reference-dimension choice.
TEST_CASE("criterion 5: reference-dimension invariance") {
  ScenarioSpec spec = builtin_scenario("setup1");
  spec.seed = 1357;
  spec.n_test = 100;
  const GeneratedData data = generate(spec);
  SplitPlan plan;
  for (Eigen::Index i = 0; i < 500; ++i) plan.train_idx.push_back(i);
  for (Eigen::Index i = 0; i < 250; ++i) plan.cal1_idx.push_back(500 + i);
  for (Eigen::Index i = 0; i < 250; ++i) plan.cal2_idx.push_back(750 + i);
  const MiscoverageConfig config = MiscoverageConfig::symmetric(0.1);

  double worst = 0.0;
  std::vector<ChrPredictor> fits;
  for (Eigen::Index ref = 0; ref < 3; ++ref)
    fits.push_back(
        fit_chr(data.fit, plan, config, ScoreKind::kAbsolute, spec.model_bases, ref));
  for (Eigen::Index i = 0; i < data.test.rows(); ++i) {
    const Eigen::VectorXd probe = data.test.x.row(i).transpose();
    const Hyperrectangle base = fits[0].predict(probe);
    for (std::size_t r = 1; r < 3; ++r) {
      const Hyperrectangle other = fits[r].predict(probe);
      for (Eigen::Index j = 0; j < 3; ++j) {
        worst = std::max(worst,
                         std::abs(other.lo[j] - base.lo[j]) / (1.0 + std::abs(base.lo[j])));
        worst = std::max(worst,
                         std::abs(other.hi[j] - base.hi[j]) / (1.0 + std::abs(base.hi[j])));
      }
    }
  }
  report(5, worst <= 1e-10, "max relative deviation " + fmt(worst, 14) + " over 100 points");
}

// The production quantile matches an independent sort-and-index oracle on
// 10,000 random (sample, delta) instances, exactly.
TEST_CASE("criterion 6: inflated quantile vs oracle") {
  Rng rng(8086);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.bounded(60));
    std::vector<double> values(static_cast<std::size_t>(n));
    for (auto& v : values) v = rng.normal(0.0, 1.0 + rng.uniform() * 9.0);
    if (trial % 5 == 0 && n > 3) {
      values[2] = values[0];  // exercise tie handling
      values[1] = values[0];
    }
    const double delta = 0.005 + 0.99 * rng.uniform();
    if (inflated_empirical_quantile(values, delta) != quantile_oracle(values, delta))
      ++mismatches;
  }
  report(6, mismatches == 0, "mismatches " + std::to_string(mismatches) + " / 10000");
}

// Membership of each calibration response in its own adjusted rectangle is
// exactly equivalent to W_k <= Adj_ref.
TEST_CASE("criterion 7: coverage-equivalence identity") {
  Rng rng(42424242);
  long violations = 0, geometric_violations = 0, pivot_errors = 0;
  const char* scenarios[] = {"setup1", "setup2", "setup3", "setup4"};
  for (int fit = 0; fit < 50; ++fit) {
    ScenarioSpec spec = builtin_scenario(scenarios[fit % 4]);
    const std::size_t n_cal = 40 + rng.bounded(120);
    spec.n_train = 150 + rng.bounded(200);
    spec.n_cal = n_cal;
    spec.n_test = 1;
    spec.seed = rng.next_u64();
    const double alpha = 0.05 + 0.3 * rng.uniform();
    const GeneratedData data = generate(spec);
    SplitPlan plan;
    for (std::size_t i = 0; i < spec.n_train; ++i)
      plan.train_idx.push_back(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < n_cal; ++i)
      plan.cal1_idx.push_back(static_cast<Eigen::Index>(spec.n_train + i));
    const CqhrPredictor pred =
        fit_cqhr(data.fit, plan, MiscoverageConfig::symmetric(alpha), spec.model_bases);
    const MultiTargetDataset cal = data.fit.subset(plan.cal1_idx);

    long covered = 0;
    for (Eigen::Index k = 0; k < cal.rows(); ++k) {
      const Eigen::VectorXd xk = cal.x.row(k).transpose();
      const Eigen::VectorXd yk = cal.y.row(k).transpose();
      const bool member = pred.calibration_scores[k] <= pred.adj_ref;
      if (pred.covers(xk, yk) != member) ++violations;
      covered += member ? 1 : 0;
      if (std::abs(pred.calibration_scores[k] - pred.adj_ref) >
          1e-9 * (1.0 + std::abs(pred.adj_ref)))
        if (pred.predict(xk).contains(yk) != member) ++geometric_violations;
    }
    const double rank = std::ceil((1.0 - alpha) * static_cast<double>(n_cal + 1));
    const long expected =
        rank > static_cast<double>(n_cal) ? static_cast<long>(n_cal) : static_cast<long>(rank);
    if (covered != expected) ++pivot_errors;
  }
  report(7, violations == 0 && geometric_violations == 0 && pivot_errors == 0,
         "identity violations " + std::to_string(violations) + ", geometric " +
             std::to_string(geometric_violations) + ", pivot-count errors " +
             std::to_string(pivot_errors) + " over 50 fits");
}

// ICED-violation balance: gamma three-dimensional setups R1..R4 keep the
// balance statistic under 0.03, homoskedastic and heteroskedastic alike.
TEST_CASE("criterion 8: balance under ICED violation") {
  bool ok = true;
  std::string detail;
  for (const bool hetero : {false, true}) {
    for (int r = 1; r <= 4; ++r) {
      const std::string name = std::string("balance-gamma3") + (hetero ? "-hetero" : "") +
                               "-r" + std::to_string(r);
      const ScenarioSpec spec = builtin_scenario(name);
      MethodConfig cfg;
      cfg.method = Method::kCqhr;
      const ReplicatedReport rep = run_replicated(spec, cfg, 60, 8800 + r, 2);
      ok = ok && rep.aggregate.balance_stat < 0.03;
      detail += (hetero ? "h" : "") + std::string("r") + std::to_string(r) + " " +
                fmt(rep.aggregate.balance_stat, 4) + "  ";
    }
  }
  report(8, ok, "balance stats: " + detail);
}

// Clinical-pipeline stand-in: fixed 1289-row synthetic two-target dataset,
// 200 permutations into 900/200/189, overfit-prone quadratic basis. The
// unconformalized Bonferroni model undercovers, CQHR hits ~0.90, and
// conformal Bonferroni overcovers.
TEST_CASE("criterion 9: pipeline ordering on synthetic two-target data") {
  ScenarioSpec spec = builtin_scenario("bp-synth");
  spec.n_train = 1289;
  spec.n_cal = 0;
  spec.n_test = 1;
  spec.seed = 160309;
  const MultiTargetDataset pool = generate(spec).fit;

  const int permutations = 200;
  std::vector<double> cov_naive(permutations), cov_cqhr(permutations), cov_bonf(permutations);
  std::atomic<int> next{0};
  const auto worker = [&]() {
    for (;;) {
      const int perm = next.fetch_add(1);
      if (perm >= permutations) return;
      Rng rng = Rng::stream(991199, static_cast<std::uint64_t>(perm), 3);
      std::vector<Eigen::Index> order(1289);
      for (Eigen::Index i = 0; i < 1289; ++i) order[static_cast<std::size_t>(i)] = i;
      for (Eigen::Index i = 1288; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[rng.bounded(static_cast<std::uint64_t>(i) + 1)]);
      SplitPlan plan;
      plan.train_idx.assign(order.begin(), order.begin() + 900);
      plan.cal1_idx.assign(order.begin() + 900, order.begin() + 1100);
      std::vector<Eigen::Index> test_idx(order.begin() + 1100, order.end());
      const MultiTargetDataset test = pool.subset(test_idx);

      const auto coverage = [&](const RegionPredictor& pred) {
        int covered = 0;
        for (Eigen::Index i = 0; i < test.rows(); ++i)
          covered += pred.predict(test.x.row(i).transpose())
                             .contains(test.y.row(i).transpose())
                         ? 1
                         : 0;
        return static_cast<double>(covered) / static_cast<double>(test.rows());
      };
      MethodConfig cfg;
      cfg.alpha = 0.1;
      cfg.method = Method::kCqhr;
      cov_cqhr[static_cast<std::size_t>(perm)] =
          coverage(*fit_with_plan(pool, plan, spec.model_bases, cfg));
      cfg.method = Method::kBonferroniCqr;
      cov_bonf[static_cast<std::size_t>(perm)] =
          coverage(*fit_with_plan(pool, plan, spec.model_bases, cfg));
      cfg.method = Method::kNaiveBonferroni;
      cov_naive[static_cast<std::size_t>(perm)] =
          coverage(*fit_with_plan(pool, plan, spec.model_bases, cfg));
    }
  };
  std::thread other(worker);
  worker();
  other.join();

  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double naive = mean(cov_naive), cqhr = mean(cov_cqhr), bonf = mean(cov_bonf);
  const bool ok = naive < cqhr && cqhr < bonf && cqhr >= 0.88 && cqhr <= 0.92;
  report(9, ok,
         "naive " + fmt(naive) + " < cqhr " + fmt(cqhr) + " < bonferroni " + fmt(bonf) +
             " over 200 permutations");
}
