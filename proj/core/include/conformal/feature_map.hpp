#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace conformal {

/// One basis function of a covariate vector. The closed term language keeps
/// feature maps serializable (config files, model files) while covering the
/// built-in scenario structures.
struct Term {
  enum class Kind { kConstant, kLinear, kProduct, kSquare, kAbs, kAbsSqrt };
  Kind kind = Kind::kConstant;
  int i = -1;
  int j = -1;

  double eval(const Eigen::VectorXd& x) const;
  bool operator==(const Term&) const = default;
};

Term term_const();
Term term_linear(int i);
Term term_product(int i, int j);
Term term_square(int i);
Term term_abs(int i);
Term term_abs_sqrt(int i);

/// Named expansion of a d-dimensional covariate vector into m features;
/// the first feature is always the constant 1.
struct FeatureMap {
  std::string name;
  int input_dim = 0;
  std::vector<Term> terms;

  Eigen::Index feature_dim() const { return static_cast<Eigen::Index>(terms.size()); }

  Eigen::VectorXd expand(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd expand_rows(const Eigen::MatrixXd& x) const;

  /// (1, x_1, ..., x_d)
  static FeatureMap linear(int d);
  /// (1, x_i, x_i^2, x_i * x_j for i < j)
  static FeatureMap quadratic(int d);
  static FeatureMap from_terms(std::string name, int d, std::vector<Term> terms);

  bool operator==(const FeatureMap&) const = default;
};

/// One feature map per response dimension (maps may differ across dimensions).
using FeatureBases = std::vector<FeatureMap>;

FeatureBases shared_bases(const FeatureMap& map, Eigen::Index p);

}  // namespace conformal
