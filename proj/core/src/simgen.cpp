#include "conformal/simgen.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "conformal/rng.hpp"

namespace conformal {

namespace {
constexpr std::uint64_t kFitRole = 1;
constexpr std::uint64_t kTestRole = 2;
constexpr double kShapeFloor = 1e-6;
}  // namespace

CovariateLaw CovariateLaw::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  CovariateLaw law;
  law.kind = Kind::kExponential;
  law.a = rate;
  return law;
}

CovariateLaw CovariateLaw::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform bounds must satisfy lo < hi");
  CovariateLaw law;
  law.kind = Kind::kUniform;
  law.a = lo;
  law.b = hi;
  return law;
}

CovariateLaw CovariateLaw::uniform_between(int lo_index, int hi_index) {
  CovariateLaw law;
  law.kind = Kind::kUniformBetween;
  law.lo_index = lo_index;
  law.hi_index = hi_index;
  return law;
}

ErrorLaw ErrorLaw::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("normal sd must be positive");
  ErrorLaw law;
  law.family = Family::kNormal;
  law.mean = mean;
  law.sd = sd;
  return law;
}

ErrorLaw ErrorLaw::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma parameters must be positive");
  ErrorLaw law;
  law.family = Family::kGamma;
  law.shape = shape;
  law.rate = rate;
  return law;
}

ErrorLaw ErrorLaw::gamma_abs_shape(double scale, int index, double rate) {
  if (!(scale > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma parameters must be positive");
  ErrorLaw law;
  law.family = Family::kGamma;
  law.rate = rate;
  law.shape_abs_index = index;
  law.shape_abs_scale = scale;
  return law;
}

Eigen::MatrixXd correlate_errors(const Eigen::MatrixXd& eps, const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols() || eps.cols() != r.rows())
    throw std::invalid_argument("dimension mismatch: correlation matrix vs error columns");
  if (!r.isApprox(r.transpose(), 1e-12))
    throw std::invalid_argument("correlation not positive definite");
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("correlation not positive definite");
  return eps * Eigen::MatrixXd(llt.matrixU());
}

namespace {

void validate_spec(const ScenarioSpec& spec) {
  if (spec.d < 1 || spec.p < 1) throw std::invalid_argument("scenario needs d >= 1 and p >= 1");
  if (static_cast<int>(spec.covariates.size()) != spec.d)
    throw std::invalid_argument("dimension mismatch: covariate law count != d");
  if (static_cast<int>(spec.signal.size()) != spec.p ||
      static_cast<int>(spec.shift.size()) != spec.p ||
      static_cast<int>(spec.errors.size()) != spec.p)
    throw std::invalid_argument("dimension mismatch: per-dimension spec lists must have p entries");
  if (spec.correlation.rows() != spec.p || spec.correlation.cols() != spec.p)
    throw std::invalid_argument("dimension mismatch: correlation matrix must be p x p");
  if (spec.error_scale.size() != 0 && spec.error_scale.size() != spec.p)
    throw std::invalid_argument("dimension mismatch: error_scale must have p entries");
  if (static_cast<int>(spec.model_bases.size()) != spec.p)
    throw std::invalid_argument("dimension mismatch: model_bases must have p entries");
  for (int c = 0; c < spec.d; ++c) {
    const auto& law = spec.covariates[static_cast<std::size_t>(c)];
    if (law.kind == CovariateLaw::Kind::kUniformBetween &&
        (law.lo_index < 0 || law.hi_index < 0 || law.lo_index >= c || law.hi_index >= c))
      throw std::invalid_argument("uniform_between must reference earlier covariates");
  }
  if (spec.n_train < 1 || spec.n_test < 1)
    throw std::invalid_argument("scenario sizes must be positive");
}

double draw_error(const ErrorLaw& law, const Eigen::VectorXd& xrow, Rng& rng) {
  if (law.family == ErrorLaw::Family::kNormal) return rng.normal(law.mean, law.sd);
  double shape = law.shape;
  if (law.shape_abs_index >= 0)
    shape = std::max(law.shape_abs_scale * std::abs(xrow[law.shape_abs_index]), kShapeFloor);
  return rng.gamma(shape, law.rate);
}

double eval_combo(const TermCombo& combo, const Eigen::VectorXd& xrow) {
  double v = 0.0;
  for (const auto& wt : combo) v += wt.coef * wt.term.eval(xrow);
  return v;
}

MultiTargetDataset sample_block(const ScenarioSpec& spec, std::size_t n, Rng rng) {
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd x(ni, spec.d);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (int c = 0; c < spec.d; ++c) {
      const auto& law = spec.covariates[static_cast<std::size_t>(c)];
      switch (law.kind) {
        case CovariateLaw::Kind::kExponential:
          x(i, c) = rng.exponential(law.a);
          break;
        case CovariateLaw::Kind::kUniform:
          x(i, c) = rng.uniform(law.a, law.b);
          break;
        case CovariateLaw::Kind::kUniformBetween:
          x(i, c) = rng.uniform(x(i, law.lo_index), x(i, law.hi_index));
          break;
      }
    }
  }

  Eigen::MatrixXd raw(ni, spec.p);
  for (Eigen::Index i = 0; i < ni; ++i) {
    const Eigen::VectorXd xrow = x.row(i).transpose();
    for (int j = 0; j < spec.p; ++j)
      raw(i, j) = draw_error(spec.errors[static_cast<std::size_t>(j)], xrow, rng);
  }
  Eigen::MatrixXd mixed = correlate_errors(raw, spec.correlation);

  Eigen::MatrixXd y(ni, spec.p);
  for (Eigen::Index i = 0; i < ni; ++i) {
    const Eigen::VectorXd xrow = x.row(i).transpose();
    const double sd_factor = spec.sd_abs_sqrt_index >= 0
                                 ? std::sqrt(std::abs(xrow[spec.sd_abs_sqrt_index]))
                                 : 1.0;
    for (int j = 0; j < spec.p; ++j) {
      const double scale = spec.error_scale.size() > 0 ? spec.error_scale[j] : 1.0;
      y(i, j) = eval_combo(spec.signal[static_cast<std::size_t>(j)], xrow) +
                eval_combo(spec.shift[static_cast<std::size_t>(j)], xrow) +
                scale * sd_factor * mixed(i, j);
    }
  }
  return MultiTargetDataset(std::move(x), std::move(y));
}

}  // namespace

GeneratedData generate(const ScenarioSpec& spec) {
  validate_spec(spec);
  GeneratedData out;
  out.fit = sample_block(spec, spec.n_train + spec.n_cal, Rng::stream(spec.seed, 0, kFitRole));
  out.test = sample_block(spec, spec.n_test, Rng::stream(spec.seed, 0, kTestRole));
  return out;
}

// ---------------------------------------------------------------------------
// built-in catalog
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXd equicorrelation(int p, double rho) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(p, p, rho);
  r.diagonal().setOnes();
  return r;
}

Eigen::MatrixXd setup_correlation(int k) {
  Eigen::MatrixXd r(3, 3);
  switch (k) {
    case 1: r << 1, .3, .6, .3, 1, .5, .6, .5, 1; break;
    case 2: r << 1, .8, .8, .8, 1, .8, .8, .8, 1; break;
    case 3: r << 1, .6, .3, .6, 1, .5, .3, .5, 1; break;
    case 4: r << 1, .2, .2, .2, 1, .2, .2, .2, 1; break;
    default: throw std::invalid_argument("setup correlation index must be 1..4");
  }
  return r;
}

FeatureMap basis_from_signal(const std::string& name, int d, const TermCombo& combo,
                             const std::vector<Term>& extra = {}) {
  std::vector<Term> terms{term_const()};
  for (const auto& wt : combo)
    if (wt.term.kind != Term::Kind::kConstant) terms.push_back(wt.term);
  for (const Term& t : extra) terms.push_back(t);
  return FeatureMap::from_terms(name, d, std::move(terms));
}

void attach_signal_bases(ScenarioSpec& spec, const std::vector<Term>& extra = {}) {
  spec.model_bases.clear();
  for (int j = 0; j < spec.p; ++j)
    spec.model_bases.push_back(basis_from_signal(spec.name + "-dim" + std::to_string(j),
                                                 spec.d,
                                                 spec.signal[static_cast<std::size_t>(j)],
                                                 extra));
}

ScenarioSpec make_setup(int k) {
  ScenarioSpec s;
  s.name = "setup" + std::to_string(k);
  s.d = 2;
  s.p = 3;
  s.covariates = {CovariateLaw::exponential(0.2), CovariateLaw::uniform(-5.0, 5.0)};
  s.signal = {{{5.0, term_const()}, {2.0, term_linear(0)}},
              {{3.0, term_linear(0)}, {1.0, term_product(0, 1)}},
              {{1.0, term_square(1)}}};
  s.shift = {{}, {}, {{5.0, term_linear(1)}}};
  s.errors = {ErrorLaw::gamma(2.0, 0.2), ErrorLaw::gamma(3.0, 0.5), ErrorLaw::normal(0.0, 1.0)};
  s.correlation = setup_correlation(k);
  attach_signal_bases(s);
  return s;
}

// covariates X1..X5 of the ten-dimensional setups (x4 ~ U(x1, x3))
std::vector<CovariateLaw> tendim_covariates() {
  return {CovariateLaw::uniform(-2.0, 5.0), CovariateLaw::uniform(-5.0, -1.0),
          CovariateLaw::uniform(-6.0, 10.0), CovariateLaw::uniform(0.0, 4.0),
          CovariateLaw::uniform_between(1, 3)};
}

std::vector<TermCombo> tendim_signal() {
  return {{{2.0, term_linear(0)}},
          {{1.0, term_linear(0)}, {1.0, term_product(0, 1)}},
          {{1.0, term_square(1)}},
          {{1.0, term_product(1, 4)}},
          {{1.0, term_square(4)}},
          {{1.0, term_square(0)}},
          {{1.0, term_square(3)}},
          {{1.0, term_square(2)}},
          {{1.0, term_square(3)}},
          {{1.0, term_product(0, 1)}}};
}

ScenarioSpec make_tendim() {
  ScenarioSpec s;
  s.name = "tendim";
  s.d = 5;
  s.p = 10;
  s.covariates = tendim_covariates();
  s.signal = tendim_signal();
  s.shift = {{},
             {},
             {{5.0, term_linear(1)}},
             {{1.0, term_square(4)}},
             {},
             {{-2.0, term_linear(0)}},
             {{-1.0, term_linear(3)}},
             {},
             {},
             {}};
  s.errors.assign(10, ErrorLaw::normal(0.0, 1.0));
  s.correlation = equicorrelation(10, 0.5);
  attach_signal_bases(s);
  return s;
}

ScenarioSpec make_balance10(bool hetero) {
  ScenarioSpec s;
  s.name = hetero ? "balance-hetero" : "balance-homo";
  s.d = 5;
  s.p = 10;
  s.covariates = tendim_covariates();
  s.signal = tendim_signal();
  s.shift.assign(10, {});
  s.errors.assign(10, ErrorLaw::normal(0.0, 1.0));
  s.correlation = equicorrelation(10, 0.9);
  s.error_scale.resize(10);
  s.error_scale << 1, 2, 3, 4, 5, 1, 2, 3, 4, 5;
  if (hetero) {
    s.sd_abs_sqrt_index = 0;
    attach_signal_bases(s, {term_abs_sqrt(0)});
  } else {
    attach_signal_bases(s);
  }
  return s;
}

// The description "corr(1,2) = -0.8, all others 0.8" is not positive
// definite for p = 3; the nearest valid reading flips the sign of the
// second dimension of an equicorrelated(0.8) matrix.
ScenarioSpec make_balance_normal3(bool hetero) {
  ScenarioSpec s;
  s.name = hetero ? "balance-normal3-hetero" : "balance-normal3";
  s.d = 2;
  s.p = 3;
  s.covariates = {CovariateLaw::exponential(0.2), CovariateLaw::uniform(-5.0, 5.0)};
  s.signal = {{{5.0, term_const()}, {2.0, term_linear(0)}},
              {{3.0, term_linear(0)}, {1.0, term_product(0, 1)}},
              {{5.0, term_linear(1)}, {1.0, term_square(1)}}};
  s.shift.assign(3, {});
  s.errors.assign(3, ErrorLaw::normal(0.0, 1.0));
  s.correlation.resize(3, 3);
  s.correlation << 1, -.8, .8, -.8, 1, -.8, .8, -.8, 1;
  if (hetero) {
    s.sd_abs_sqrt_index = 0;
    attach_signal_bases(s, {term_abs_sqrt(0)});
  } else {
    attach_signal_bases(s);
  }
  return s;
}

ScenarioSpec make_balance_gamma3(bool hetero, int corr_index) {
  ScenarioSpec s;
  s.name = std::string("balance-gamma3") + (hetero ? "-hetero" : "") + "-r" +
           std::to_string(corr_index);
  s.d = 2;
  s.p = 3;
  s.covariates = {CovariateLaw::exponential(0.2), CovariateLaw::uniform(-5.0, 5.0)};
  s.signal.assign(3, {{1.0, term_linear(0)}});
  s.shift.assign(3, {});
  s.errors.assign(3, hetero ? ErrorLaw::gamma_abs_shape(2.0, 1, 0.2)
                            : ErrorLaw::gamma(2.0, 0.2));
  s.correlation = setup_correlation(corr_index);
  if (hetero) {
    attach_signal_bases(s, {term_abs(1), term_abs_sqrt(1)});
  } else {
    attach_signal_bases(s);
  }
  s.n_train = 2000;
  s.n_cal = 200;
  return s;
}

// Synthetic stand-in for the two-target clinical pipeline: nonlinear
// heteroskedastic truth, fitted with a full quadratic basis so finite-sample
// optimism is visible in the unconformalized baseline.
ScenarioSpec make_bp_synth() {
  ScenarioSpec s;
  s.name = "bp-synth";
  s.d = 5;
  s.p = 2;
  s.covariates = {CovariateLaw::uniform(0.0, 1.0), CovariateLaw::uniform(9.0, 11.5),
                  CovariateLaw::uniform(125.0, 165.0), CovariateLaw::uniform(25.0, 60.0),
                  CovariateLaw::uniform(13.0, 26.0)};
  s.signal = {{{84.36, term_const()},
               {3.0, term_linear(0)},
               {2.0, term_linear(1)},
               {0.052, term_linear(2)},
               {-0.47, term_linear(3)},
               {0.004, term_product(2, 3)}},
              {{20.0, term_const()},
               {1.5, term_linear(0)},
               {1.1, term_linear(1)},
               {0.16, term_linear(2)},
               {0.14, term_linear(3)}}};
  s.shift.assign(2, {});
  s.errors.assign(2, ErrorLaw::normal(0.0, 1.0));
  s.correlation = equicorrelation(2, 0.8);
  s.error_scale.resize(2);
  s.error_scale << 1.3, 1.3;
  s.sd_abs_sqrt_index = 3;
  s.model_bases = shared_bases(FeatureMap::quadratic(5), 2);
  s.n_train = 900;
  s.n_cal = 200;
  s.n_test = 189;
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"setup1",          "setup2",
          "setup3",          "setup4",
          "tendim",          "balance-homo",
          "balance-hetero",  "balance-normal3",
          "balance-normal3-hetero", "balance-gamma3",
          "balance-gamma3-hetero",  "bp-synth"};
}

ScenarioSpec builtin_scenario(const std::string& name) {
  if (name == "setup1") return make_setup(1);
  if (name == "setup2") return make_setup(2);
  if (name == "setup3") return make_setup(3);
  if (name == "setup4") return make_setup(4);
  if (name == "tendim") return make_tendim();
  if (name == "balance-homo") return make_balance10(false);
  if (name == "balance-hetero") return make_balance10(true);
  if (name == "balance-normal3") return make_balance_normal3(false);
  if (name == "balance-normal3-hetero") return make_balance_normal3(true);
  if (name == "bp-synth") return make_bp_synth();
  // balance-gamma3[-hetero][-rK]
  const std::string prefix = "balance-gamma3";
  if (name.rfind(prefix, 0) == 0) {
    std::string rest = name.substr(prefix.size());
    bool hetero = false;
    if (rest.rfind("-hetero", 0) == 0) {
      hetero = true;
      rest = rest.substr(7);
    }
    int corr_index = 1;
    if (!rest.empty()) {
      if (rest.size() != 3 || rest[0] != '-' || rest[1] != 'r' || rest[2] < '1' || rest[2] > '4')
        throw std::invalid_argument("unknown builtin scenario: " + name);
      corr_index = rest[2] - '0';
    }
    return make_balance_gamma3(hetero, corr_index);
  }
  throw std::invalid_argument("unknown builtin scenario: " + name);
}

// ---------------------------------------------------------------------------
// JSON round-trip
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string term_kind_name(Term::Kind k) {
  switch (k) {
    case Term::Kind::kConstant: return "const";
    case Term::Kind::kLinear: return "linear";
    case Term::Kind::kProduct: return "product";
    case Term::Kind::kSquare: return "square";
    case Term::Kind::kAbs: return "abs";
    case Term::Kind::kAbsSqrt: return "abs_sqrt";
  }
  throw std::logic_error("unknown term kind");
}

Term::Kind term_kind_from(const std::string& s) {
  if (s == "const") return Term::Kind::kConstant;
  if (s == "linear") return Term::Kind::kLinear;
  if (s == "product") return Term::Kind::kProduct;
  if (s == "square") return Term::Kind::kSquare;
  if (s == "abs") return Term::Kind::kAbs;
  if (s == "abs_sqrt") return Term::Kind::kAbsSqrt;
  throw std::invalid_argument("unknown term kind: " + s);
}

json term_to_json(const Term& t) {
  json j{{"kind", term_kind_name(t.kind)}};
  if (t.i >= 0) j["i"] = t.i;
  if (t.j >= 0) j["j"] = t.j;
  return j;
}

Term term_from_json(const json& j) {
  Term t;
  t.kind = term_kind_from(j.at("kind").get<std::string>());
  t.i = j.value("i", -1);
  t.j = j.value("j", -1);
  return t;
}

json combo_to_json(const TermCombo& combo) {
  json arr = json::array();
  for (const auto& wt : combo)
    arr.push_back(json{{"coef", wt.coef}, {"term", term_to_json(wt.term)}});
  return arr;
}

TermCombo combo_from_json(const json& arr) {
  TermCombo combo;
  for (const auto& j : arr)
    combo.push_back({j.at("coef").get<double>(), term_from_json(j.at("term"))});
  return combo;
}

json map_to_json(const FeatureMap& map) {
  json terms = json::array();
  for (const Term& t : map.terms) terms.push_back(term_to_json(t));
  return json{{"name", map.name}, {"input_dim", map.input_dim}, {"terms", terms}};
}

FeatureMap map_from_json(const json& j) {
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) terms.push_back(term_from_json(t));
  return FeatureMap::from_terms(j.at("name").get<std::string>(),
                                j.at("input_dim").get<int>(), std::move(terms));
}

}  // namespace

std::string scenario_to_json(const ScenarioSpec& spec, int indent) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = spec.name;
  j["d"] = spec.d;
  j["p"] = spec.p;
  j["covariates"] = json::array();
  for (const auto& law : spec.covariates) {
    json lj;
    switch (law.kind) {
      case CovariateLaw::Kind::kExponential:
        lj = {{"kind", "exponential"}, {"rate", law.a}};
        break;
      case CovariateLaw::Kind::kUniform:
        lj = {{"kind", "uniform"}, {"min", law.a}, {"max", law.b}};
        break;
      case CovariateLaw::Kind::kUniformBetween:
        lj = {{"kind", "uniform_between"}, {"lo_index", law.lo_index}, {"hi_index", law.hi_index}};
        break;
    }
    j["covariates"].push_back(lj);
  }
  j["signal"] = json::array();
  for (const auto& c : spec.signal) j["signal"].push_back(combo_to_json(c));
  j["shift"] = json::array();
  for (const auto& c : spec.shift) j["shift"].push_back(combo_to_json(c));
  j["errors"] = json::array();
  for (const auto& e : spec.errors) {
    json ej;
    if (e.family == ErrorLaw::Family::kNormal) {
      ej = {{"family", "normal"}, {"mean", e.mean}, {"sd", e.sd}};
    } else {
      ej = {{"family", "gamma"}, {"shape", e.shape}, {"rate", e.rate}};
      if (e.shape_abs_index >= 0) {
        ej["shape_abs_index"] = e.shape_abs_index;
        ej["shape_abs_scale"] = e.shape_abs_scale;
      }
    }
    j["errors"].push_back(ej);
  }
  j["correlation"] = json::array();
  for (Eigen::Index r = 0; r < spec.correlation.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < spec.correlation.cols(); ++c)
      row.push_back(spec.correlation(r, c));
    j["correlation"].push_back(row);
  }
  j["error_scale"] = json::array();
  for (Eigen::Index i = 0; i < spec.error_scale.size(); ++i)
    j["error_scale"].push_back(spec.error_scale[i]);
  j["sd_abs_sqrt_index"] = spec.sd_abs_sqrt_index;
  j["model_bases"] = json::array();
  for (const auto& m : spec.model_bases) j["model_bases"].push_back(map_to_json(m));
  j["n_train"] = spec.n_train;
  j["n_cal"] = spec.n_cal;
  j["n_test"] = spec.n_test;
  j["seed"] = spec.seed;
  return j.dump(indent);
}

ScenarioSpec scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("schema_version", -1) != kSchemaVersion)
    throw std::invalid_argument("unsupported scenario schema_version");
  ScenarioSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.d = j.at("d").get<int>();
  spec.p = j.at("p").get<int>();
  for (const auto& lj : j.at("covariates")) {
    const std::string kind = lj.at("kind").get<std::string>();
    if (kind == "exponential") {
      spec.covariates.push_back(CovariateLaw::exponential(lj.at("rate").get<double>()));
    } else if (kind == "uniform") {
      spec.covariates.push_back(
          CovariateLaw::uniform(lj.at("min").get<double>(), lj.at("max").get<double>()));
    } else if (kind == "uniform_between") {
      spec.covariates.push_back(CovariateLaw::uniform_between(lj.at("lo_index").get<int>(),
                                                              lj.at("hi_index").get<int>()));
    } else {
      throw std::invalid_argument("unknown covariate law: " + kind);
    }
  }
  for (const auto& c : j.at("signal")) spec.signal.push_back(combo_from_json(c));
  for (const auto& c : j.at("shift")) spec.shift.push_back(combo_from_json(c));
  for (const auto& ej : j.at("errors")) {
    const std::string family = ej.at("family").get<std::string>();
    if (family == "normal") {
      spec.errors.push_back(
          ErrorLaw::normal(ej.value("mean", 0.0), ej.value("sd", 1.0)));
    } else if (family == "gamma") {
      if (ej.contains("shape_abs_index")) {
        spec.errors.push_back(ErrorLaw::gamma_abs_shape(ej.at("shape_abs_scale").get<double>(),
                                                        ej.at("shape_abs_index").get<int>(),
                                                        ej.at("rate").get<double>()));
      } else {
        spec.errors.push_back(
            ErrorLaw::gamma(ej.at("shape").get<double>(), ej.at("rate").get<double>()));
      }
    } else {
      throw std::invalid_argument("unknown error family: " + family);
    }
  }
  const auto& corr = j.at("correlation");
  spec.correlation.resize(spec.p, spec.p);
  for (int r = 0; r < spec.p; ++r)
    for (int c = 0; c < spec.p; ++c)
      spec.correlation(r, c) = corr.at(static_cast<std::size_t>(r))
                                   .at(static_cast<std::size_t>(c))
                                   .get<double>();
  const auto& scale = j.at("error_scale");
  spec.error_scale.resize(static_cast<Eigen::Index>(scale.size()));
  for (std::size_t i = 0; i < scale.size(); ++i)
    spec.error_scale[static_cast<Eigen::Index>(i)] = scale.at(i).get<double>();
  spec.sd_abs_sqrt_index = j.value("sd_abs_sqrt_index", -1);
  for (const auto& m : j.at("model_bases")) spec.model_bases.push_back(map_from_json(m));
  spec.n_train = j.at("n_train").get<std::size_t>();
  spec.n_cal = j.at("n_cal").get<std::size_t>();
  spec.n_test = j.at("n_test").get<std::size_t>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  validate_spec(spec);
  return spec;
}

}  // namespace conformal
