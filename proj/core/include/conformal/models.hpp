#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conformal/feature_map.hpp"
#include "conformal/types.hpp"

namespace conformal {

/// Per-dimension linear point model: f_j(x) = coef[j]' * bases[j].expand(x).
struct PointModel {
  FeatureBases bases;
  std::vector<Eigen::VectorXd> coef;

  Eigen::Index response_dim() const { return static_cast<Eigen::Index>(coef.size()); }
};

/// Per-dimension linear conditional-quantile surfaces at (lo_level, hi_level).
struct QuantileModel {
  FeatureBases bases;
  double lo_level = 0.0;
  double hi_level = 0.0;
  std::vector<Eigen::VectorXd> lo_coef;
  std::vector<Eigen::VectorXd> hi_coef;

  Eigen::Index response_dim() const { return static_cast<Eigen::Index>(lo_coef.size()); }
};

/// Quantile band evaluated at one covariate vector. Crossed pairs
/// (lo > hi) are repaired by swapping; `crossings` counts the swaps.
struct QuantileBand {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  int crossings = 0;
};

struct PinballOptions {
  int max_iterations = 200;
  /// Target duality gap per observation, relative to the scale of the
  /// least-squares residuals. The solver accepts a stalled run up to
  /// accept_tol and throws beyond it.
  double gap_tol = 1e-10;
  double accept_tol = 1e-7;
};

PointModel fit_least_squares(const MultiTargetDataset& train, const FeatureBases& bases);
PointModel fit_least_squares(const MultiTargetDataset& train, const FeatureMap& map);

/// Quantile-regression coefficients minimizing mean pinball loss
/// rho_tau(u) = u * (tau - 1{u < 0}) on one response vector, via a
/// primal-dual interior-point method on the bounded-dual LP. Deterministic;
/// optimality is certified by the duality gap.
Eigen::VectorXd fit_pinball(const Eigen::MatrixXd& features, const Eigen::VectorXd& y,
                            double tau, const PinballOptions& options = {});

/// Per-dimension pinball coefficients at a common tau (one shared map).
std::vector<Eigen::VectorXd> fit_pinball_linear(const MultiTargetDataset& train,
                                                const FeatureMap& map, double tau,
                                                const PinballOptions& options = {});

QuantileModel fit_quantile_model(const MultiTargetDataset& train, const FeatureBases& bases,
                                 double lo_level, double hi_level,
                                 const PinballOptions& options = {});

Eigen::VectorXd predict_point(const PointModel& model, const Eigen::VectorXd& x);
QuantileBand predict_quantiles(const QuantileModel& model, const Eigen::VectorXd& x);

double pinball_loss(const Eigen::MatrixXd& features, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& coef, double tau);

}  // namespace conformal
