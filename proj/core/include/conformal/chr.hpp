#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conformal/models.hpp"
#include "conformal/types.hpp"

namespace conformal {

enum class ScoreKind { kAbsolute, kSigned };

/// Non-conformity scores produced while fitting a CHR predictor:
/// first-stage scores on cal1, interval scores on cal2, and their
/// reference-converted row maxima.
struct ScoreSet {
  Eigen::MatrixXd v;  // n_cal1 x p; absolute scores or signed residuals y - f
  Eigen::MatrixXd e;  // n_cal2 x p interval scores
  Eigen::VectorXd w;  // n_cal2 reference-converted row maxima
};

/// Constant per-dimension side lengths with conversion ratios to a
/// reference dimension.
struct SideRatios {
  Eigen::Index reference_dim = 0;
  Eigen::VectorXd lengths;  // > 0

  double ratio_to_reference(Eigen::Index j) const {
    return lengths[reference_dim] / lengths[j];
  }
};

/// Fitted conformal hyperrectangular regressor from a point model. Regions
/// have constant width: [f_j(x) - lo_offset_j - adj_j, f_j(x) + hi_offset_j + adj_j].
class ChrPredictor : public RegionPredictor {
 public:
  PointModel model;
  Eigen::VectorXd lo_offset;  // stage-1 lower offsets (equal to hi for absolute scores)
  Eigen::VectorXd hi_offset;
  SideRatios ratios;
  Eigen::VectorXd adjustment;  // adj_j = adj_ref * lengths[j] / lengths[ref]
  ScoreKind score_kind = ScoreKind::kAbsolute;
  MiscoverageConfig config = MiscoverageConfig::symmetric(0.1);
  ScoreSet scores;
  std::vector<std::string> warnings;

  Hyperrectangle predict(const Eigen::VectorXd& x) const override;
  Eigen::Index response_dim() const override { return model.response_dim(); }
};

/// max{lo - y, y - hi}: negative iff y lies strictly inside [lo, hi].
double interval_score(double lo, double hi, double y);

/// Conformal calibration of an already-fitted point model (Algorithm 1
/// steps 3-10). Exposed separately so prefit models can be calibrated.
ChrPredictor calibrate_chr(const PointModel& model, const MultiTargetDataset& cal1,
                           const MultiTargetDataset& cal2, const MiscoverageConfig& config,
                           ScoreKind kind, Eigen::Index reference_dim = 0,
                           double stage1_miscoverage = -1.0);

/// Algorithm 1 end to end: fit the point model on the training part, form
/// stage-1 intervals from cal1 scores, calibrate the joint adjustment on
/// cal2. stage1_miscoverage defaults to config.alpha.
ChrPredictor fit_chr(const MultiTargetDataset& data, const SplitPlan& split,
                     const MiscoverageConfig& config, ScoreKind kind,
                     const FeatureBases& bases, Eigen::Index reference_dim = 0,
                     double stage1_miscoverage = -1.0);

Hyperrectangle predict_chr(const ChrPredictor& predictor, const Eigen::VectorXd& x);

}  // namespace conformal
