#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "conformal/feature_map.hpp"
#include "conformal/types.hpp"

namespace conformal {

/// Marginal law of one covariate. kUniformBetween draws U(x[lo_index], x[hi_index])
/// from covariates earlier in the row.
struct CovariateLaw {
  enum class Kind { kExponential, kUniform, kUniformBetween };
  Kind kind = Kind::kUniform;
  double a = 0.0;  // exponential: rate; uniform: min
  double b = 1.0;  // uniform: max
  int lo_index = -1;
  int hi_index = -1;

  static CovariateLaw exponential(double rate);
  static CovariateLaw uniform(double lo, double hi);
  static CovariateLaw uniform_between(int lo_index, int hi_index);
};

/// Raw (pre-mixing) error law for one response dimension. Gamma uses the
/// shape/rate parameterization; the shape may scale with |x[shape_abs_index]|
/// (floored at 1e-6 so the sampler stays defined).
struct ErrorLaw {
  enum class Family { kNormal, kGamma };
  Family family = Family::kNormal;
  double mean = 0.0;
  double sd = 1.0;
  double shape = 1.0;
  double rate = 1.0;
  int shape_abs_index = -1;
  double shape_abs_scale = 0.0;

  static ErrorLaw normal(double mean, double sd);
  static ErrorLaw gamma(double shape, double rate);
  static ErrorLaw gamma_abs_shape(double scale, int index, double rate);
};

struct WeightedTerm {
  double coef = 0.0;
  Term term;
  bool operator==(const WeightedTerm&) const = default;
};

using TermCombo = std::vector<WeightedTerm>;

/// Everything needed to synthesize one scenario:
///   y_j = signal_j(x) + shift_j(x) + scale_j * sd_factor(x) * (raw errors * U)_j
/// where U is the upper Cholesky factor of `correlation` (R = U'U).
/// `signal` is the modeled part (model_bases span it); `shift` holds the
/// covariate terms deliberately left out of the models.
struct ScenarioSpec {
  std::string name;
  int d = 0;
  int p = 0;
  std::vector<CovariateLaw> covariates;
  std::vector<TermCombo> signal;  // p entries
  std::vector<TermCombo> shift;   // p entries (may be empty combos)
  std::vector<ErrorLaw> errors;   // p entries
  Eigen::MatrixXd correlation;    // p x p
  Eigen::VectorXd error_scale;    // p multipliers applied after mixing
  int sd_abs_sqrt_index = -1;     // post-mixing sd factor sqrt(|x[idx]|), -1 = none
  FeatureBases model_bases;       // p fitting bases
  std::size_t n_train = 500;
  std::size_t n_cal = 500;
  std::size_t n_test = 500;
  std::uint64_t seed = 0;
};

struct GeneratedData {
  MultiTargetDataset fit;   // n_train + n_cal rows, in that order
  MultiTargetDataset test;  // n_test rows
};

/// eps * U with U the upper Cholesky factor of r (row-vector convention).
Eigen::MatrixXd correlate_errors(const Eigen::MatrixXd& eps, const Eigen::MatrixXd& r);

/// Deterministic for a fixed spec.seed; fit and test sets use separate
/// derived substreams.
GeneratedData generate(const ScenarioSpec& spec);

/// Built-in scenario catalog:
///   setup1..setup4, tendim, balance-homo, balance-hetero,
///   balance-normal3[-hetero], balance-gamma3[-hetero][-r1..-r4], bp-synth
std::vector<std::string> builtin_scenario_names();
ScenarioSpec builtin_scenario(const std::string& name);

/// Versioned JSON round-trip for scenario configs.
std::string scenario_to_json(const ScenarioSpec& spec, int indent = 2);
ScenarioSpec scenario_from_json(const std::string& text);

}  // namespace conformal
