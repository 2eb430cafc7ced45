#include "conformal/metrics.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "conformal/baselines.hpp"
#include "conformal/chr.hpp"
#include "conformal/cqhr.hpp"
#include "conformal/rng.hpp"

namespace conformal {

namespace {

double sample_se(const Eigen::VectorXd& values) {
  const double n = static_cast<double>(values.size());
  if (n < 2) return 0.0;
  const double mean = values.mean();
  const double var = (values.array() - mean).square().sum() / (n - 1.0);
  return std::sqrt(var / n);
}

double binomial_se(double p, std::size_t n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

double balance_statistic(const Eigen::VectorXd& marginal_coverage) {
  const Eigen::ArrayXd misc = 1.0 - marginal_coverage.array();
  return (misc - misc.mean()).abs().maxCoeff();
}

}  // namespace

EvaluationReport evaluate(const RegionPredictor& predictor, const MultiTargetDataset& test) {
  const Eigen::Index p = predictor.response_dim();
  if (test.response_dim() != p)
    throw std::invalid_argument("dimension mismatch: test response dim != predictor");
  const Eigen::Index n = test.rows();

  Eigen::VectorXd overall(n), volume(n);
  Eigen::MatrixXd covered(n, p), widths(n, p);
  std::size_t infinite_sides = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Hyperrectangle rect = predictor.predict(test.x.row(i).transpose());
    bool all_in = true;
    bool any_infinite = false;
    double vol = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double y = test.y(i, j);
      const bool in = y >= rect.lo[j] && y <= rect.hi[j];
      covered(i, j) = in ? 1.0 : 0.0;
      all_in = all_in && in;
      const double w = rect.width(j);
      widths(i, j) = w;
      if (!std::isfinite(w)) any_infinite = true;
      vol *= w;
    }
    if (any_infinite) {
      ++infinite_sides;
      vol = kInfinity;
    }
    overall[i] = all_in ? 1.0 : 0.0;
    volume[i] = vol;
  }

  EvaluationReport report;
  report.n_test = static_cast<std::size_t>(n);
  report.infinite_side_count = infinite_sides;
  report.overall_coverage = overall.mean();
  report.marginal_coverage = covered.colwise().mean().transpose();
  report.mean_lengths = widths.colwise().mean().transpose();
  report.mean_volume = volume.mean();
  report.balance_stat = balance_statistic(report.marginal_coverage);
  report.overall_se = binomial_se(report.overall_coverage, report.n_test);
  report.marginal_se.resize(p);
  report.length_se.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    report.marginal_se[j] = binomial_se(report.marginal_coverage[j], report.n_test);
    report.length_se[j] = widths.col(j).allFinite() ? sample_se(widths.col(j)) : kInfinity;
  }
  report.volume_se = volume.allFinite() ? sample_se(volume) : kInfinity;
  return report;
}

Method method_from_name(const std::string& name) {
  if (name == "chr-abs") return Method::kChrAbsolute;
  if (name == "chr-signed") return Method::kChrSigned;
  if (name == "cqhr") return Method::kCqhr;
  if (name == "absmax") return Method::kAbsoluteMax;
  if (name == "bonf-cqr") return Method::kBonferroniCqr;
  if (name == "bonf-naive") return Method::kNaiveBonferroni;
  throw std::invalid_argument("unknown method: " + name);
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kChrAbsolute: return "chr-abs";
    case Method::kChrSigned: return "chr-signed";
    case Method::kCqhr: return "cqhr";
    case Method::kAbsoluteMax: return "absmax";
    case Method::kBonferroniCqr: return "bonf-cqr";
    case Method::kNaiveBonferroni: return "bonf-naive";
  }
  throw std::logic_error("unknown method");
}

std::shared_ptr<const RegionPredictor> fit_with_plan(const MultiTargetDataset& data,
                                                     const SplitPlan& plan,
                                                     const FeatureBases& bases,
                                                     const MethodConfig& config) {
  const MiscoverageConfig mc = MiscoverageConfig::symmetric(config.alpha);
  const Eigen::Index ref = config.reference_dim;
  switch (config.method) {
    case Method::kChrAbsolute:
      return std::make_shared<ChrPredictor>(
          fit_chr(data, plan, mc, ScoreKind::kAbsolute, bases, ref < 0 ? 0 : ref));
    case Method::kChrSigned:
      return std::make_shared<ChrPredictor>(
          fit_chr(data, plan, mc, ScoreKind::kSigned, bases, ref < 0 ? 0 : ref));
    case Method::kCqhr:
      return std::make_shared<CqhrPredictor>(
          fit_cqhr(data, plan, mc, bases, config.lo_level, config.hi_level, ref));
    case Method::kAbsoluteMax:
      return std::make_shared<AbsoluteMaxPredictor>(fit_absolute_max(data, plan, mc, bases));
    case Method::kBonferroniCqr:
      return std::make_shared<BonferroniCqrPredictor>(
          fit_bonferroni_cqr(data, plan, mc, bases, config.lo_level, config.hi_level));
    case Method::kNaiveBonferroni:
      return std::make_shared<NaiveBonferroniPredictor>(
          fit_naive_bonferroni(data, plan, mc, bases));
  }
  throw std::logic_error("unknown method");
}

std::shared_ptr<const RegionPredictor> fit_method(const MultiTargetDataset& fit_data,
                                                  std::size_t n_train, std::size_t n_cal,
                                                  const FeatureBases& bases,
                                                  const MethodConfig& config) {
  const auto total = static_cast<std::size_t>(fit_data.rows());
  if (n_train + n_cal > total) throw std::invalid_argument("split too small");
  // Rows are i.i.d. by construction here, so the plan is contiguous;
  // make_split covers user-supplied data paths.
  SplitPlan plan;
  auto fill = [](std::vector<Eigen::Index>& idx, std::size_t from, std::size_t to) {
    idx.resize(to - from);
    std::iota(idx.begin(), idx.end(), static_cast<Eigen::Index>(from));
  };
  const bool two_cal =
      config.method == Method::kChrAbsolute || config.method == Method::kChrSigned;
  fill(plan.train_idx, 0, n_train);
  if (two_cal) {
    const std::size_t half = n_cal / 2;
    fill(plan.cal1_idx, n_train, n_train + half);
    fill(plan.cal2_idx, n_train + half, n_train + n_cal);
  } else {
    fill(plan.cal1_idx, n_train, n_train + n_cal);
  }
  return fit_with_plan(fit_data, plan, bases, config);
}

ReplicatedReport run_replicated(const ScenarioSpec& spec, const MethodConfig& config,
                                std::size_t replicates, std::uint64_t master_seed, int jobs) {
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  ReplicatedReport out;
  out.per_replicate.resize(replicates);
  out.replicate_seeds.resize(replicates);
  for (std::size_t r = 0; r < replicates; ++r)
    out.replicate_seeds[r] = derive_seed(master_seed, r, 0);

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::string failure;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= replicates) return;
      try {
        ScenarioSpec local = spec;
        local.seed = out.replicate_seeds[r];
        const GeneratedData data = generate(local);
        const auto predictor =
            fit_method(data.fit, spec.n_train, spec.n_cal, spec.model_bases, config);
        out.per_replicate[r] = evaluate(*predictor, data.test);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "replicate " << r << " (seed 0x" << std::hex << out.replicate_seeds[r]
            << std::dec << ") failed: " << e.what();
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure.empty()) failure = msg.str();
        next.store(replicates);
        return;
      }
    }
  };

  const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(replicates)));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!failure.empty()) throw std::runtime_error(failure);

  // aggregate in replicate order (independent of completion order)
  const Eigen::Index p = out.per_replicate.front().marginal_coverage.size();
  const auto rn = static_cast<Eigen::Index>(replicates);
  Eigen::VectorXd overall(rn), volume(rn);
  Eigen::MatrixXd marginal(rn, p), lengths(rn, p);
  std::size_t total_test = 0, infinite = 0;
  for (Eigen::Index r = 0; r < rn; ++r) {
    const auto& rep = out.per_replicate[static_cast<std::size_t>(r)];
    overall[r] = rep.overall_coverage;
    volume[r] = rep.mean_volume;
    marginal.row(r) = rep.marginal_coverage.transpose();
    lengths.row(r) = rep.mean_lengths.transpose();
    total_test += rep.n_test;
    infinite += rep.infinite_side_count;
  }

  EvaluationReport& agg = out.aggregate;
  agg.n_test = total_test;
  agg.infinite_side_count = infinite;
  agg.overall_coverage = overall.mean();
  agg.marginal_coverage = marginal.colwise().mean().transpose();
  agg.mean_lengths = lengths.colwise().mean().transpose();
  agg.mean_volume = volume.mean();
  agg.balance_stat = balance_statistic(agg.marginal_coverage);
  agg.overall_se = sample_se(overall);
  agg.marginal_se.resize(p);
  agg.length_se.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    agg.marginal_se[j] = sample_se(marginal.col(j));
    agg.length_se[j] = lengths.col(j).allFinite() ? sample_se(lengths.col(j)) : kInfinity;
  }
  agg.volume_se = volume.allFinite() ? sample_se(volume) : kInfinity;
  return out;
}

}  // namespace conformal
