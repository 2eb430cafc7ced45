#include "conformal/models.hpp"

#include <stdexcept>

namespace conformal {

namespace {

void check_fit_inputs(const MultiTargetDataset& train, const FeatureBases& bases) {
  if (static_cast<Eigen::Index>(bases.size()) != train.response_dim())
    throw std::invalid_argument("dimension mismatch: one feature map per response dimension");
  for (const FeatureMap& map : bases)
    if (map.input_dim != train.covariate_dim())
      throw std::invalid_argument("dimension mismatch: feature map input_dim != covariate dim");
}

}  // namespace

PointModel fit_least_squares(const MultiTargetDataset& train, const FeatureBases& bases) {
  check_fit_inputs(train, bases);
  PointModel model;
  model.bases = bases;
  model.coef.reserve(bases.size());
  for (Eigen::Index j = 0; j < train.response_dim(); ++j) {
    const FeatureMap& map = bases[static_cast<std::size_t>(j)];
    const Eigen::MatrixXd phi = map.expand_rows(train.x);
    if (phi.rows() < phi.cols()) throw std::invalid_argument("underdetermined");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    if (qr.rank() < phi.cols()) throw std::runtime_error("singular design");
    model.coef.push_back(qr.solve(train.y.col(j)));
  }
  return model;
}

PointModel fit_least_squares(const MultiTargetDataset& train, const FeatureMap& map) {
  return fit_least_squares(train, shared_bases(map, train.response_dim()));
}

std::vector<Eigen::VectorXd> fit_pinball_linear(const MultiTargetDataset& train,
                                                const FeatureMap& map, double tau,
                                                const PinballOptions& options) {
  if (map.input_dim != train.covariate_dim())
    throw std::invalid_argument("dimension mismatch: feature map input_dim != covariate dim");
  const Eigen::MatrixXd phi = map.expand_rows(train.x);
  std::vector<Eigen::VectorXd> coef;
  coef.reserve(static_cast<std::size_t>(train.response_dim()));
  for (Eigen::Index j = 0; j < train.response_dim(); ++j)
    coef.push_back(fit_pinball(phi, train.y.col(j), tau, options));
  return coef;
}

QuantileModel fit_quantile_model(const MultiTargetDataset& train, const FeatureBases& bases,
                                 double lo_level, double hi_level,
                                 const PinballOptions& options) {
  check_fit_inputs(train, bases);
  if (!(lo_level > 0.0 && hi_level < 1.0 && lo_level < hi_level))
    throw std::invalid_argument("invalid level: need 0 < lo_level < hi_level < 1");
  QuantileModel model;
  model.bases = bases;
  model.lo_level = lo_level;
  model.hi_level = hi_level;
  for (Eigen::Index j = 0; j < train.response_dim(); ++j) {
    const Eigen::MatrixXd phi = bases[static_cast<std::size_t>(j)].expand_rows(train.x);
    model.lo_coef.push_back(fit_pinball(phi, train.y.col(j), lo_level, options));
    model.hi_coef.push_back(fit_pinball(phi, train.y.col(j), hi_level, options));
  }
  return model;
}

Eigen::VectorXd predict_point(const PointModel& model, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(model.response_dim());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const auto& map = model.bases[static_cast<std::size_t>(j)];
    out[j] = model.coef[static_cast<std::size_t>(j)].dot(map.expand(x));
  }
  return out;
}

QuantileBand predict_quantiles(const QuantileModel& model, const Eigen::VectorXd& x) {
  QuantileBand band;
  const Eigen::Index p = model.response_dim();
  band.lo.resize(p);
  band.hi.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& map = model.bases[static_cast<std::size_t>(j)];
    const Eigen::VectorXd phi = map.expand(x);
    double lo = model.lo_coef[static_cast<std::size_t>(j)].dot(phi);
    double hi = model.hi_coef[static_cast<std::size_t>(j)].dot(phi);
    if (lo > hi) {
      std::swap(lo, hi);
      ++band.crossings;
    }
    band.lo[j] = lo;
    band.hi[j] = hi;
  }
  return band;
}

double pinball_loss(const Eigen::MatrixXd& features, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& coef, double tau) {
  const Eigen::VectorXd r = y - features * coef;
  double total = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    total += r[i] >= 0.0 ? tau * r[i] : (tau - 1.0) * r[i];
  return total / static_cast<double>(r.size());
}

}  // namespace conformal
