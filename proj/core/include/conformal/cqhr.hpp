#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conformal/models.hpp"
#include "conformal/types.hpp"

namespace conformal {

/// Rescales an interval score into reference-dimension units: e * len_ref / len_j.
/// Negative scores (interior points) rescale too.
double convert_to_reference(double e, double len_ref, double len_j);

/// Picks the "most homoskedastic" dimension: the column of calibration side
/// lengths with the smallest coefficient of variation.
Eigen::Index pick_reference_min_cv(const Eigen::MatrixXd& side_lengths);

/// Use pick_reference_min_cv instead of a fixed reference dimension.
inline constexpr Eigen::Index kAutoReference = -1;

/// Fitted conformal quantile hyperrectangular regressor. Side lengths vary
/// with the covariates; only the reference-dimension adjustment is stored
/// and the others are derived per query point.
class CqhrPredictor : public RegionPredictor {
 public:
  QuantileModel model;
  Eigen::Index reference_dim = 0;
  double adj_ref = 0.0;
  MiscoverageConfig config = MiscoverageConfig::symmetric(0.1);
  int crossing_repairs = 0;           // calibration-time quantile crossings
  Eigen::VectorXd calibration_scores;  // W_k, in reference units
  std::vector<std::string> warnings;

  Hyperrectangle predict(const Eigen::VectorXd& x) const override;
  Eigen::Index response_dim() const override { return model.response_dim(); }

  /// Converted max interval score of (x, y); shares the calibration code
  /// path, so score_at on a calibration pair reproduces its W_k bitwise.
  double score_at(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  /// Membership through the score route: score_at(x, y) <= adj_ref. This is
  /// the predicate the coverage proof equates with rectangle membership.
  bool covers(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return score_at(x, y) <= adj_ref;
  }
};

/// Conformal calibration of an already-fitted quantile model
/// (Algorithm 2 steps 3-7).
CqhrPredictor calibrate_cqhr(const QuantileModel& model, const MultiTargetDataset& cal,
                             const MiscoverageConfig& config,
                             Eigen::Index reference_dim = 0);

/// Algorithm 2 end to end: fit 2p quantile surfaces on the training part at
/// (lo_level, hi_level), then calibrate the reference adjustment on cal1.
/// Negative levels default to the equal-tail split (alpha_lo, 1 - alpha_hi).
CqhrPredictor fit_cqhr(const MultiTargetDataset& data, const SplitPlan& split,
                       const MiscoverageConfig& config, const FeatureBases& bases,
                       double lo_level = -1.0, double hi_level = -1.0,
                       Eigen::Index reference_dim = 0);

Hyperrectangle predict_cqhr(const CqhrPredictor& predictor, const Eigen::VectorXd& x);

}  // namespace conformal
