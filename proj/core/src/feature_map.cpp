#include "conformal/feature_map.hpp"

#include <cmath>
#include <stdexcept>

namespace conformal {

namespace {
void check_index(int idx, Eigen::Index d) {
  if (idx < 0 || idx >= d) throw std::invalid_argument("dimension mismatch: term index out of range");
}
}  // namespace

double Term::eval(const Eigen::VectorXd& x) const {
  switch (kind) {
    case Kind::kConstant:
      return 1.0;
    case Kind::kLinear:
      check_index(i, x.size());
      return x[i];
    case Kind::kProduct:
      check_index(i, x.size());
      check_index(j, x.size());
      return x[i] * x[j];
    case Kind::kSquare:
      check_index(i, x.size());
      return x[i] * x[i];
    case Kind::kAbs:
      check_index(i, x.size());
      return std::abs(x[i]);
    case Kind::kAbsSqrt:
      check_index(i, x.size());
      return std::sqrt(std::abs(x[i]));
  }
  throw std::logic_error("unknown term kind");
}

Term term_const() { return Term{Term::Kind::kConstant, -1, -1}; }
Term term_linear(int i) { return Term{Term::Kind::kLinear, i, -1}; }
Term term_product(int i, int j) { return Term{Term::Kind::kProduct, i, j}; }
Term term_square(int i) { return Term{Term::Kind::kSquare, i, -1}; }
Term term_abs(int i) { return Term{Term::Kind::kAbs, i, -1}; }
Term term_abs_sqrt(int i) { return Term{Term::Kind::kAbsSqrt, i, -1}; }

Eigen::VectorXd FeatureMap::expand(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim)
    throw std::invalid_argument("dimension mismatch: covariate length != feature map input_dim");
  Eigen::VectorXd out(feature_dim());
  for (Eigen::Index k = 0; k < out.size(); ++k)
    out[k] = terms[static_cast<std::size_t>(k)].eval(x);
  return out;
}

Eigen::MatrixXd FeatureMap::expand_rows(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim)
    throw std::invalid_argument("dimension mismatch: covariate width != feature map input_dim");
  Eigen::MatrixXd out(x.rows(), feature_dim());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Eigen::VectorXd row = x.row(r).transpose();
    for (Eigen::Index k = 0; k < out.cols(); ++k)
      out(r, k) = terms[static_cast<std::size_t>(k)].eval(row);
  }
  return out;
}

FeatureMap FeatureMap::linear(int d) {
  std::vector<Term> terms{term_const()};
  for (int i = 0; i < d; ++i) terms.push_back(term_linear(i));
  return from_terms("linear", d, std::move(terms));
}

FeatureMap FeatureMap::quadratic(int d) {
  std::vector<Term> terms{term_const()};
  for (int i = 0; i < d; ++i) terms.push_back(term_linear(i));
  for (int i = 0; i < d; ++i) terms.push_back(term_square(i));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) terms.push_back(term_product(i, j));
  return from_terms("quadratic", d, std::move(terms));
}

FeatureMap FeatureMap::from_terms(std::string name, int d, std::vector<Term> terms) {
  if (d < 1) throw std::invalid_argument("dimension mismatch: need d >= 1");
  if (terms.empty() || terms.front().kind != Term::Kind::kConstant)
    throw std::invalid_argument("feature map must start with the constant term");
  FeatureMap map;
  map.name = std::move(name);
  map.input_dim = d;
  map.terms = std::move(terms);
  for (const Term& t : map.terms) {
    if (t.kind == Term::Kind::kConstant) continue;
    check_index(t.i, d);
    if (t.kind == Term::Kind::kProduct) check_index(t.j, d);
  }
  return map;
}

FeatureBases shared_bases(const FeatureMap& map, Eigen::Index p) {
  return FeatureBases(static_cast<std::size_t>(p), map);
}

}  // namespace conformal
