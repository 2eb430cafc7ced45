#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "conformal/simgen.hpp"
#include "conformal/types.hpp"

namespace conformal {

/// Coverage, geometry, and balance of a predictor on held-out data.
/// Volume is +infinity (and counted) whenever a side is unbounded.
struct EvaluationReport {
  double overall_coverage = 0.0;
  Eigen::VectorXd marginal_coverage;
  Eigen::VectorXd mean_lengths;
  double mean_volume = 0.0;
  double balance_stat = 0.0;  // max_j |miscoverage_j - mean miscoverage|
  double overall_se = 0.0;
  Eigen::VectorXd marginal_se;
  Eigen::VectorXd length_se;
  double volume_se = 0.0;
  std::size_t n_test = 0;
  std::size_t infinite_side_count = 0;
};

EvaluationReport evaluate(const RegionPredictor& predictor, const MultiTargetDataset& test);

enum class Method {
  kChrAbsolute,
  kChrSigned,
  kCqhr,
  kAbsoluteMax,
  kBonferroniCqr,
  kNaiveBonferroni,
};

Method method_from_name(const std::string& name);
std::string method_name(Method method);

struct MethodConfig {
  Method method = Method::kCqhr;
  double alpha = 0.1;
  /// kAutoReference selects the min-CV dimension (CQHR only).
  Eigen::Index reference_dim = 0;
  /// Initial quantile levels; negative values pick the method defaults.
  double lo_level = -1.0;
  double hi_level = -1.0;
};

/// Dispatches to the fitter selected by config.method using an explicit
/// split plan (cal2 is only consumed by the CHR variants).
std::shared_ptr<const RegionPredictor> fit_with_plan(const MultiTargetDataset& data,
                                                     const SplitPlan& plan,
                                                     const FeatureBases& bases,
                                                     const MethodConfig& config);

/// Fits one method on the first n_train + n_cal rows of `fit_data`
/// (rows [0, n_train) train; CHR variants split the calibration rows in half).
std::shared_ptr<const RegionPredictor> fit_method(const MultiTargetDataset& fit_data,
                                                  std::size_t n_train, std::size_t n_cal,
                                                  const FeatureBases& bases,
                                                  const MethodConfig& config);

struct ReplicatedReport {
  EvaluationReport aggregate;
  std::vector<EvaluationReport> per_replicate;
  std::vector<std::uint64_t> replicate_seeds;
};

/// Monte-Carlo harness: independent seeded replicates of
/// generate -> fit -> evaluate, aggregated with simulation standard errors.
/// Deterministic for a fixed master seed regardless of `jobs`.
ReplicatedReport run_replicated(const ScenarioSpec& spec, const MethodConfig& config,
                                std::size_t replicates, std::uint64_t master_seed,
                                int jobs = 1);

}  // namespace conformal
