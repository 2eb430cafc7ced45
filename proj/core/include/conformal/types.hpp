#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace conformal {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Covariate matrix (n x d) paired with a p-dimensional response matrix (n x p).
/// All entries must be finite; row counts must agree.
struct MultiTargetDataset {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;

  MultiTargetDataset() = default;
  MultiTargetDataset(Eigen::MatrixXd covariates, Eigen::MatrixXd responses)
      : x(std::move(covariates)), y(std::move(responses)) {
    if (x.rows() != y.rows())
      throw std::invalid_argument("dimension mismatch: x and y row counts differ");
    if (x.rows() < 1) throw std::invalid_argument("dataset is empty");
    if (x.cols() < 1 || y.cols() < 1)
      throw std::invalid_argument("dimension mismatch: need d >= 1 and p >= 1");
    if (!x.allFinite() || !y.allFinite())
      throw std::invalid_argument("dataset contains non-finite entries");
  }

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index covariate_dim() const { return x.cols(); }
  Eigen::Index response_dim() const { return y.cols(); }

  MultiTargetDataset subset(const std::vector<Eigen::Index>& idx) const {
    Eigen::MatrixXd xs(static_cast<Eigen::Index>(idx.size()), x.cols());
    Eigen::MatrixXd ys(static_cast<Eigen::Index>(idx.size()), y.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= rows())
        throw std::out_of_range("subset index out of range");
      xs.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
      ys.row(static_cast<Eigen::Index>(i)) = y.row(idx[i]);
    }
    return MultiTargetDataset(std::move(xs), std::move(ys));
  }
};

/// Disjoint train / first-calibration / second-calibration index lists.
/// cal2 may be empty for single-calibration methods; the union need not
/// cover all rows.
struct SplitPlan {
  std::vector<Eigen::Index> train_idx;
  std::vector<Eigen::Index> cal1_idx;
  std::vector<Eigen::Index> cal2_idx;
  std::uint64_t seed = 0;
};

/// Axis-aligned prediction region: per-dimension [lo, hi] with lo <= hi.
/// Entries may be +-infinity when a conformal quantile is undefined.
struct Hyperrectangle {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Hyperrectangle() = default;
  Hyperrectangle(Eigen::VectorXd lower, Eigen::VectorXd upper)
      : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size())
      throw std::invalid_argument("dimension mismatch: lo and hi lengths differ");
    for (Eigen::Index j = 0; j < lo.size(); ++j)
      if (!(lo[j] <= hi[j]))
        throw std::invalid_argument("inverted interval");
  }

  Eigen::Index dim() const { return lo.size(); }

  bool contains(const Eigen::VectorXd& y) const {
    if (y.size() != lo.size())
      throw std::invalid_argument("dimension mismatch in contains()");
    for (Eigen::Index j = 0; j < lo.size(); ++j)
      if (y[j] < lo[j] || y[j] > hi[j]) return false;
    return true;
  }

  double width(Eigen::Index j) const { return hi[j] - lo[j]; }
};

/// Target miscoverage alpha split into lower/upper tail budgets
/// (alpha_lo + alpha_hi = alpha; used by signed and quantile variants).
struct MiscoverageConfig {
  double alpha;
  double alpha_lo;
  double alpha_hi;

  static MiscoverageConfig symmetric(double a) { return MiscoverageConfig(a, a / 2, a / 2); }

  MiscoverageConfig(double a, double a_lo, double a_hi)
      : alpha(a), alpha_lo(a_lo), alpha_hi(a_hi) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("invalid level");
    if (a_lo < 0.0 || a_hi < 0.0 || std::abs(a_lo + a_hi - a) > 1e-12)
      throw std::invalid_argument("invalid level: tail split must sum to alpha");
  }
};

/// A fitted predictor mapping a covariate vector to a Hyperrectangle.
/// Implementations are immutable after construction and safe to share.
class RegionPredictor {
 public:
  virtual ~RegionPredictor() = default;
  virtual Hyperrectangle predict(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::Index response_dim() const = 0;
};

}  // namespace conformal
