#include "conformal/chr.hpp"

#include <cmath>
#include <stdexcept>

#include "conformal/cqhr.hpp"
#include "conformal/quantile.hpp"

namespace conformal {

namespace {

constexpr double kLengthFloor = 1e-12;

Eigen::MatrixXd predict_point_rows(const PointModel& model, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), model.response_dim());
  for (Eigen::Index j = 0; j < model.response_dim(); ++j) {
    const auto& map = model.bases[static_cast<std::size_t>(j)];
    out.col(j) = map.expand_rows(x) * model.coef[static_cast<std::size_t>(j)];
  }
  return out;
}

// Collapses an inverted side to its midpoint: the adjusted interval is empty,
// which a zero-width interval represents up to a null set.
void repair_inverted(double& lo, double& hi) {
  if (lo > hi) {
    const double mid = 0.5 * (lo + hi);
    lo = mid;
    hi = mid;
  }
}

}  // namespace

double interval_score(double lo, double hi, double y) {
  if (lo > hi) throw std::invalid_argument("inverted interval");
  return std::max(lo - y, y - hi);
}

ChrPredictor calibrate_chr(const PointModel& model, const MultiTargetDataset& cal1,
                           const MultiTargetDataset& cal2, const MiscoverageConfig& config,
                           ScoreKind kind, Eigen::Index reference_dim,
                           double stage1_miscoverage) {
  const Eigen::Index p = model.response_dim();
  if (cal1.response_dim() != p || cal2.response_dim() != p)
    throw std::invalid_argument("dimension mismatch: calibration response dim != model");
  if (reference_dim < 0 || reference_dim >= p)
    throw std::invalid_argument("dimension mismatch: reference_dim out of range");
  const double stage1_alpha = stage1_miscoverage > 0.0 ? stage1_miscoverage : config.alpha;
  if (!(stage1_alpha > 0.0 && stage1_alpha < 1.0)) throw std::invalid_argument("invalid level");

  ChrPredictor out;
  out.model = model;
  out.score_kind = kind;
  out.config = config;
  out.ratios.reference_dim = reference_dim;

  // stage 1: per-dimension offsets from cal1 scores
  const Eigen::MatrixXd f1 = predict_point_rows(model, cal1.x);
  const Eigen::MatrixXd resid1 = cal1.y - f1;
  out.lo_offset.resize(p);
  out.hi_offset.resize(p);
  out.scores.v.resize(cal1.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (kind == ScoreKind::kAbsolute) {
      const Eigen::VectorXd abs_scores = resid1.col(j).cwiseAbs();
      out.scores.v.col(j) = abs_scores;
      const double off = inflated_empirical_quantile(
          {abs_scores.data(), static_cast<std::size_t>(abs_scores.size())}, 1.0 - stage1_alpha);
      out.lo_offset[j] = off;
      out.hi_offset[j] = off;
    } else {
      out.scores.v.col(j) = resid1.col(j);
      const Eigen::VectorXd neg = -resid1.col(j);
      const double lo_level = 1.0 - stage1_alpha * (config.alpha_lo / config.alpha);
      const double hi_level = 1.0 - stage1_alpha * (config.alpha_hi / config.alpha);
      out.lo_offset[j] = inflated_empirical_quantile(
          {neg.data(), static_cast<std::size_t>(neg.size())}, lo_level);
      const Eigen::VectorXd pos = resid1.col(j);
      out.hi_offset[j] = inflated_empirical_quantile(
          {pos.data(), static_cast<std::size_t>(pos.size())}, hi_level);
      if (out.lo_offset[j] + out.hi_offset[j] < 0.0) {
        const double mid = 0.5 * (out.hi_offset[j] - out.lo_offset[j]);
        out.lo_offset[j] = -mid;
        out.hi_offset[j] = mid;
        out.warnings.push_back("stage-1 interval inverted; collapsed to midpoint in dimension " +
                               std::to_string(j));
      }
    }
  }

  out.ratios.lengths = out.lo_offset + out.hi_offset;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (out.ratios.lengths[j] < kLengthFloor) {
      out.ratios.lengths[j] = kLengthFloor;
      out.warnings.push_back("degenerate stage-1 side floored in dimension " + std::to_string(j));
    }
  }
  // The stage-1 quantile index depends only on n_cal1 and the level, so the
  // lengths are either all finite or all infinite.
  if (!std::isfinite(out.ratios.lengths[reference_dim]))
    throw std::runtime_error(
        "degenerate reference side: stage-1 quantile undefined (cal1 too small for the level)");

  // stage 2: interval scores on cal2, converted to reference units
  const Eigen::MatrixXd f2 = predict_point_rows(model, cal2.x);
  const Eigen::Index n2 = cal2.rows();
  out.scores.e.resize(n2, p);
  out.scores.w.resize(n2);
  const double len_ref = out.ratios.lengths[reference_dim];
  for (Eigen::Index k = 0; k < n2; ++k) {
    double wk = -kInfinity;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double e =
          interval_score(f2(k, j) - out.lo_offset[j], f2(k, j) + out.hi_offset[j], cal2.y(k, j));
      out.scores.e(k, j) = e;
      wk = std::max(wk, convert_to_reference(e, len_ref, out.ratios.lengths[j]));
    }
    out.scores.w[k] = wk;
  }

  const double adj_ref = inflated_empirical_quantile(
      {out.scores.w.data(), static_cast<std::size_t>(out.scores.w.size())}, 1.0 - config.alpha);
  out.adjustment.resize(p);
  for (Eigen::Index j = 0; j < p; ++j)
    out.adjustment[j] = adj_ref * (out.ratios.lengths[j] / len_ref);
  return out;
}

ChrPredictor fit_chr(const MultiTargetDataset& data, const SplitPlan& split,
                     const MiscoverageConfig& config, ScoreKind kind,
                     const FeatureBases& bases, Eigen::Index reference_dim,
                     double stage1_miscoverage) {
  if (split.train_idx.empty() || split.cal1_idx.empty() || split.cal2_idx.empty())
    throw std::invalid_argument("split too small");
  const PointModel model = fit_least_squares(data.subset(split.train_idx), bases);
  return calibrate_chr(model, data.subset(split.cal1_idx), data.subset(split.cal2_idx), config,
                       kind, reference_dim, stage1_miscoverage);
}

Hyperrectangle predict_chr(const ChrPredictor& predictor, const Eigen::VectorXd& x) {
  const Eigen::VectorXd f = predict_point(predictor.model, x);
  const Eigen::Index p = f.size();
  Eigen::VectorXd lo(p), hi(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    lo[j] = f[j] - predictor.lo_offset[j] - predictor.adjustment[j];
    hi[j] = f[j] + predictor.hi_offset[j] + predictor.adjustment[j];
    repair_inverted(lo[j], hi[j]);
  }
  return Hyperrectangle(std::move(lo), std::move(hi));
}

Hyperrectangle ChrPredictor::predict(const Eigen::VectorXd& x) const {
  return predict_chr(*this, x);
}

}  // namespace conformal
