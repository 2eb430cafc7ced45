#include "conformal/baselines.hpp"

#include <stdexcept>

#include "conformal/chr.hpp"
#include "conformal/quantile.hpp"

namespace conformal {

Hyperrectangle AbsoluteMaxPredictor::predict(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd f = predict_point(model, x);
  return Hyperrectangle(f.array() - half_width, f.array() + half_width);
}

AbsoluteMaxPredictor fit_absolute_max(const MultiTargetDataset& data, const SplitPlan& split,
                                      const MiscoverageConfig& config,
                                      const FeatureBases& bases) {
  if (split.train_idx.empty() || split.cal1_idx.empty())
    throw std::invalid_argument("split too small");
  AbsoluteMaxPredictor out;
  out.config = config;
  out.model = fit_least_squares(data.subset(split.train_idx), bases);

  const MultiTargetDataset cal = data.subset(split.cal1_idx);
  Eigen::VectorXd scores(cal.rows());
  for (Eigen::Index i = 0; i < cal.rows(); ++i) {
    const Eigen::VectorXd f = predict_point(out.model, cal.x.row(i).transpose());
    scores[i] = (cal.y.row(i).transpose() - f).cwiseAbs().maxCoeff();
  }
  out.half_width = inflated_empirical_quantile(
      {scores.data(), static_cast<std::size_t>(scores.size())}, 1.0 - config.alpha);
  return out;
}

Hyperrectangle BonferroniCqrPredictor::predict(const Eigen::VectorXd& x) const {
  const QuantileBand band = predict_quantiles(model, x);
  Eigen::VectorXd lo = band.lo - adjustments;
  Eigen::VectorXd hi = band.hi + adjustments;
  for (Eigen::Index j = 0; j < lo.size(); ++j) {
    if (lo[j] > hi[j]) {
      const double mid = 0.5 * (lo[j] + hi[j]);
      lo[j] = mid;
      hi[j] = mid;
    }
  }
  return Hyperrectangle(std::move(lo), std::move(hi));
}

BonferroniCqrPredictor fit_bonferroni_cqr(const MultiTargetDataset& data,
                                          const SplitPlan& split,
                                          const MiscoverageConfig& config,
                                          const FeatureBases& bases, double lo_level,
                                          double hi_level) {
  if (split.train_idx.empty() || split.cal1_idx.empty())
    throw std::invalid_argument("split too small");
  const auto p = static_cast<double>(data.response_dim());
  const double per_dim_alpha = config.alpha / p;
  const double lo = lo_level > 0.0 ? lo_level : per_dim_alpha / 2.0;
  const double hi = hi_level > 0.0 ? hi_level : 1.0 - per_dim_alpha / 2.0;

  BonferroniCqrPredictor out;
  out.config = config;
  out.model = fit_quantile_model(data.subset(split.train_idx), bases, lo, hi);

  const MultiTargetDataset cal = data.subset(split.cal1_idx);
  Eigen::MatrixXd e(cal.rows(), data.response_dim());
  for (Eigen::Index i = 0; i < cal.rows(); ++i) {
    const QuantileBand band = predict_quantiles(out.model, cal.x.row(i).transpose());
    out.crossing_repairs += band.crossings;
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      e(i, j) = interval_score(band.lo[j], band.hi[j], cal.y(i, j));
  }
  out.adjustments.resize(e.cols());
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    const Eigen::VectorXd col = e.col(j);
    out.adjustments[j] = inflated_empirical_quantile(
        {col.data(), static_cast<std::size_t>(col.size())}, 1.0 - per_dim_alpha);
  }
  return out;
}

Hyperrectangle NaiveBonferroniPredictor::predict(const Eigen::VectorXd& x) const {
  const QuantileBand band = predict_quantiles(model, x);
  return Hyperrectangle(band.lo, band.hi);
}

NaiveBonferroniPredictor fit_naive_bonferroni(const MultiTargetDataset& data,
                                              const SplitPlan& split,
                                              const MiscoverageConfig& config,
                                              const FeatureBases& bases) {
  if (split.train_idx.empty()) throw std::invalid_argument("split too small");
  const auto p = static_cast<double>(data.response_dim());
  const double tail = config.alpha / (2.0 * p);
  NaiveBonferroniPredictor out;
  out.config = config;
  out.model = fit_quantile_model(data.subset(split.train_idx), bases, tail, 1.0 - tail);
  return out;
}

}  // namespace conformal
