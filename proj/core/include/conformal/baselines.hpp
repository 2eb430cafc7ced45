#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conformal/models.hpp"
#include "conformal/types.hpp"

namespace conformal {

/// Hypercube baseline around a point fit: the score is max_j |y_j - f_j(x)|,
/// so every side gets the same half-width.
class AbsoluteMaxPredictor : public RegionPredictor {
 public:
  PointModel model;
  double half_width = 0.0;
  MiscoverageConfig config = MiscoverageConfig::symmetric(0.1);

  Hyperrectangle predict(const Eigen::VectorXd& x) const override;
  Eigen::Index response_dim() const override { return model.response_dim(); }
};

/// Per-dimension univariate conformalized quantile regression at miscoverage
/// alpha / p; the region is the product of the marginal intervals.
class BonferroniCqrPredictor : public RegionPredictor {
 public:
  QuantileModel model;
  Eigen::VectorXd adjustments;  // per-dimension symmetric expansions
  MiscoverageConfig config = MiscoverageConfig::symmetric(0.1);
  int crossing_repairs = 0;

  Hyperrectangle predict(const Eigen::VectorXd& x) const override;
  Eigen::Index response_dim() const override { return model.response_dim(); }
};

/// Raw Bonferroni-adjusted quantile model at levels (alpha/(2p), 1 - alpha/(2p))
/// without any conformal adjustment.
class NaiveBonferroniPredictor : public RegionPredictor {
 public:
  QuantileModel model;
  MiscoverageConfig config = MiscoverageConfig::symmetric(0.1);

  Hyperrectangle predict(const Eigen::VectorXd& x) const override;
  Eigen::Index response_dim() const override { return model.response_dim(); }
};

AbsoluteMaxPredictor fit_absolute_max(const MultiTargetDataset& data, const SplitPlan& split,
                                      const MiscoverageConfig& config,
                                      const FeatureBases& bases);

/// Negative levels default to tails of alpha/(2p) per dimension.
BonferroniCqrPredictor fit_bonferroni_cqr(const MultiTargetDataset& data,
                                          const SplitPlan& split,
                                          const MiscoverageConfig& config,
                                          const FeatureBases& bases, double lo_level = -1.0,
                                          double hi_level = -1.0);

NaiveBonferroniPredictor fit_naive_bonferroni(const MultiTargetDataset& data,
                                              const SplitPlan& split,
                                              const MiscoverageConfig& config,
                                              const FeatureBases& bases);

}  // namespace conformal
