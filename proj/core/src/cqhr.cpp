#include "conformal/cqhr.hpp"

#include <cmath>
#include <stdexcept>

#include "conformal/chr.hpp"
#include "conformal/quantile.hpp"

namespace conformal {

namespace {

constexpr double kLengthFloor = 1e-12;

Eigen::VectorXd floored_lengths(const QuantileBand& band, bool* floored = nullptr) {
  Eigen::VectorXd len = band.hi - band.lo;
  for (Eigen::Index j = 0; j < len.size(); ++j) {
    if (len[j] < kLengthFloor) {
      len[j] = kLengthFloor;
      if (floored) *floored = true;
    }
  }
  return len;
}

double converted_max_score(const QuantileBand& band, const Eigen::VectorXd& lengths,
                           Eigen::Index ref, const Eigen::VectorXd& y) {
  double w = -kInfinity;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double e = interval_score(band.lo[j], band.hi[j], y[j]);
    w = std::max(w, convert_to_reference(e, lengths[ref], lengths[j]));
  }
  return w;
}

}  // namespace

double convert_to_reference(double e, double len_ref, double len_j) {
  if (!(len_ref > 0.0) || !(len_j > 0.0)) throw std::invalid_argument("degenerate side");
  return e * (len_ref / len_j);
}

Eigen::Index pick_reference_min_cv(const Eigen::MatrixXd& side_lengths) {
  if (side_lengths.rows() < 1 || side_lengths.cols() < 1)
    throw std::invalid_argument("empty score set");
  Eigen::Index best = 0;
  double best_cv = kInfinity;
  const double n = static_cast<double>(side_lengths.rows());
  for (Eigen::Index j = 0; j < side_lengths.cols(); ++j) {
    const double mean = side_lengths.col(j).mean();
    const double sd = std::sqrt((side_lengths.col(j).array() - mean).square().sum() /
                                std::max(n - 1.0, 1.0));
    const double cv = sd / mean;
    if (cv < best_cv) {
      best_cv = cv;
      best = j;
    }
  }
  return best;
}

CqhrPredictor calibrate_cqhr(const QuantileModel& model, const MultiTargetDataset& cal,
                             const MiscoverageConfig& config, Eigen::Index reference_dim) {
  const Eigen::Index p = model.response_dim();
  if (cal.response_dim() != p)
    throw std::invalid_argument("dimension mismatch: calibration response dim != model");
  if (reference_dim != kAutoReference && (reference_dim < 0 || reference_dim >= p))
    throw std::invalid_argument("dimension mismatch: reference_dim out of range");

  CqhrPredictor out;
  out.model = model;
  out.config = config;

  const Eigen::Index n = cal.rows();
  std::vector<QuantileBand> bands;
  bands.reserve(static_cast<std::size_t>(n));
  Eigen::MatrixXd lengths(n, p);
  bool floored = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    bands.push_back(predict_quantiles(model, cal.x.row(k).transpose()));
    out.crossing_repairs += bands.back().crossings;
    lengths.row(k) = floored_lengths(bands.back(), &floored).transpose();
  }
  if (floored) out.warnings.push_back("degenerate calibration side lengths floored");
  if (out.crossing_repairs > 0)
    out.warnings.push_back("repaired " + std::to_string(out.crossing_repairs) +
                           " crossed quantile pairs during calibration");

  out.reference_dim =
      reference_dim == kAutoReference ? pick_reference_min_cv(lengths) : reference_dim;

  out.calibration_scores.resize(n);
  for (Eigen::Index k = 0; k < n; ++k)
    out.calibration_scores[k] = converted_max_score(
        bands[static_cast<std::size_t>(k)], lengths.row(k).transpose(), out.reference_dim,
        cal.y.row(k).transpose());

  out.adj_ref = inflated_empirical_quantile(
      {out.calibration_scores.data(), static_cast<std::size_t>(n)}, 1.0 - config.alpha);
  return out;
}

CqhrPredictor fit_cqhr(const MultiTargetDataset& data, const SplitPlan& split,
                       const MiscoverageConfig& config, const FeatureBases& bases,
                       double lo_level, double hi_level, Eigen::Index reference_dim) {
  if (split.train_idx.empty() || split.cal1_idx.empty())
    throw std::invalid_argument("split too small");
  const double lo = lo_level > 0.0 ? lo_level : config.alpha_lo;
  const double hi = hi_level > 0.0 ? hi_level : 1.0 - config.alpha_hi;
  const QuantileModel model =
      fit_quantile_model(data.subset(split.train_idx), bases, lo, hi);
  return calibrate_cqhr(model, data.subset(split.cal1_idx), config, reference_dim);
}

double CqhrPredictor::score_at(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  const QuantileBand band = predict_quantiles(model, x);
  return converted_max_score(band, floored_lengths(band), reference_dim, y);
}

Hyperrectangle predict_cqhr(const CqhrPredictor& predictor, const Eigen::VectorXd& x) {
  const QuantileBand band = predict_quantiles(predictor.model, x);
  const Eigen::VectorXd len = floored_lengths(band);
  const Eigen::Index p = band.lo.size();
  Eigen::VectorXd lo(p), hi(p);
  const double len_ref = len[predictor.reference_dim];
  for (Eigen::Index j = 0; j < p; ++j) {
    const double adj_j = predictor.adj_ref * (len[j] / len_ref);
    lo[j] = band.lo[j] - adj_j;
    hi[j] = band.hi[j] + adj_j;
    if (lo[j] > hi[j]) {  // contracted past zero width: empty side collapses
      const double mid = 0.5 * (lo[j] + hi[j]);
      lo[j] = mid;
      hi[j] = mid;
    }
  }
  return Hyperrectangle(std::move(lo), std::move(hi));
}

Hyperrectangle CqhrPredictor::predict(const Eigen::VectorXd& x) const {
  return predict_cqhr(*this, x);
}

}  // namespace conformal
