#include "conformal/model_io.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "conformal/baselines.hpp"
#include "conformal/chr.hpp"
#include "conformal/cqhr.hpp"

namespace conformal {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

// JSON has no +-inf literals; unbounded quantities are tagged strings.
json enc(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

double dec(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw std::invalid_argument("model file: bad numeric tag '" + s + "'");
  }
  return j.get<double>();
}

json enc_vector(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(enc(v[i]));
  return arr;
}

Eigen::VectorXd dec_vector(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = dec(arr.at(i));
  return v;
}

json enc_coefs(const std::vector<Eigen::VectorXd>& coefs) {
  json arr = json::array();
  for (const auto& c : coefs) arr.push_back(enc_vector(c));
  return arr;
}

std::vector<Eigen::VectorXd> dec_coefs(const json& arr) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& c : arr) out.push_back(dec_vector(c));
  return out;
}

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

json enc_bases(const FeatureBases& bases) {
  json arr = json::array();
  for (const auto& map : bases) {
    json terms = json::array();
    for (const Term& t : map.terms) {
      json tj{{"kind", term_kind_name(t.kind)}};
      if (t.i >= 0) tj["i"] = t.i;
      if (t.j >= 0) tj["j"] = t.j;
      terms.push_back(tj);
    }
    arr.push_back(json{{"name", map.name}, {"input_dim", map.input_dim}, {"terms", terms}});
  }
  return arr;
}

FeatureBases dec_bases(const json& arr) {
  FeatureBases bases;
  for (const auto& mj : arr) {
    std::vector<Term> terms;
    for (const auto& tj : mj.at("terms")) {
      Term t;
      t.kind = term_kind_from(tj.at("kind").get<std::string>());
      t.i = tj.value("i", -1);
      t.j = tj.value("j", -1);
      terms.push_back(t);
    }
    bases.push_back(FeatureMap::from_terms(mj.at("name").get<std::string>(),
                                           mj.at("input_dim").get<int>(), std::move(terms)));
  }
  return bases;
}

json enc_quantile_model(const QuantileModel& m) {
  return json{{"bases", enc_bases(m.bases)},
              {"lo_level", m.lo_level},
              {"hi_level", m.hi_level},
              {"lo_coef", enc_coefs(m.lo_coef)},
              {"hi_coef", enc_coefs(m.hi_coef)}};
}

QuantileModel dec_quantile_model(const json& j) {
  QuantileModel m;
  m.bases = dec_bases(j.at("bases"));
  m.lo_level = j.at("lo_level").get<double>();
  m.hi_level = j.at("hi_level").get<double>();
  m.lo_coef = dec_coefs(j.at("lo_coef"));
  m.hi_coef = dec_coefs(j.at("hi_coef"));
  return m;
}

json enc_point_model(const PointModel& m) {
  return json{{"bases", enc_bases(m.bases)}, {"coef", enc_coefs(m.coef)}};
}

PointModel dec_point_model(const json& j) {
  PointModel m;
  m.bases = dec_bases(j.at("bases"));
  m.coef = dec_coefs(j.at("coef"));
  return m;
}

}  // namespace

std::string model_to_json(const ModelEnvelope& envelope, int indent) {
  if (!envelope.predictor) throw std::invalid_argument("model envelope has no predictor");
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = method_name(envelope.method);
  j["alpha"] = envelope.config.alpha;
  j["alpha_lo"] = envelope.config.alpha_lo;
  j["alpha_hi"] = envelope.config.alpha_hi;
  j["seed"] = envelope.seed;
  j["covariates"] = envelope.covariate_names;
  j["targets"] = envelope.target_names;

  const RegionPredictor* base = envelope.predictor.get();
  if (const auto* chr = dynamic_cast<const ChrPredictor*>(base)) {
    j["point_model"] = enc_point_model(chr->model);
    j["score_kind"] = chr->score_kind == ScoreKind::kAbsolute ? "absolute" : "signed";
    j["lo_offset"] = enc_vector(chr->lo_offset);
    j["hi_offset"] = enc_vector(chr->hi_offset);
    j["reference_dim"] = chr->ratios.reference_dim;
    j["lengths"] = enc_vector(chr->ratios.lengths);
    j["adjustment"] = enc_vector(chr->adjustment);
  } else if (const auto* cqhr = dynamic_cast<const CqhrPredictor*>(base)) {
    j["quantile_model"] = enc_quantile_model(cqhr->model);
    j["reference_dim"] = cqhr->reference_dim;
    j["adj_ref"] = enc(cqhr->adj_ref);
    j["crossing_repairs"] = cqhr->crossing_repairs;
  } else if (const auto* am = dynamic_cast<const AbsoluteMaxPredictor*>(base)) {
    j["point_model"] = enc_point_model(am->model);
    j["half_width"] = enc(am->half_width);
  } else if (const auto* bc = dynamic_cast<const BonferroniCqrPredictor*>(base)) {
    j["quantile_model"] = enc_quantile_model(bc->model);
    j["adjustments"] = enc_vector(bc->adjustments);
  } else if (const auto* nb = dynamic_cast<const NaiveBonferroniPredictor*>(base)) {
    j["quantile_model"] = enc_quantile_model(nb->model);
  } else {
    throw std::invalid_argument("unknown predictor type for serialization");
  }
  return j.dump(indent);
}

ModelEnvelope model_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("schema_version", -1) != kSchemaVersion)
    throw std::invalid_argument("unsupported model schema_version");
  ModelEnvelope env;
  env.method = method_from_name(j.at("kind").get<std::string>());
  env.config = MiscoverageConfig(j.at("alpha").get<double>(), j.at("alpha_lo").get<double>(),
                                 j.at("alpha_hi").get<double>());
  env.seed = j.at("seed").get<std::uint64_t>();
  env.covariate_names = j.at("covariates").get<std::vector<std::string>>();
  env.target_names = j.at("targets").get<std::vector<std::string>>();

  switch (env.method) {
    case Method::kChrAbsolute:
    case Method::kChrSigned: {
      auto chr = std::make_shared<ChrPredictor>();
      chr->model = dec_point_model(j.at("point_model"));
      chr->score_kind = j.at("score_kind").get<std::string>() == "absolute"
                            ? ScoreKind::kAbsolute
                            : ScoreKind::kSigned;
      chr->config = env.config;
      chr->lo_offset = dec_vector(j.at("lo_offset"));
      chr->hi_offset = dec_vector(j.at("hi_offset"));
      chr->ratios.reference_dim = j.at("reference_dim").get<Eigen::Index>();
      chr->ratios.lengths = dec_vector(j.at("lengths"));
      chr->adjustment = dec_vector(j.at("adjustment"));
      env.predictor = chr;
      break;
    }
    case Method::kCqhr: {
      auto cqhr = std::make_shared<CqhrPredictor>();
      cqhr->model = dec_quantile_model(j.at("quantile_model"));
      cqhr->config = env.config;
      cqhr->reference_dim = j.at("reference_dim").get<Eigen::Index>();
      cqhr->adj_ref = dec(j.at("adj_ref"));
      cqhr->crossing_repairs = j.value("crossing_repairs", 0);
      env.predictor = cqhr;
      break;
    }
    case Method::kAbsoluteMax: {
      auto am = std::make_shared<AbsoluteMaxPredictor>();
      am->model = dec_point_model(j.at("point_model"));
      am->config = env.config;
      am->half_width = dec(j.at("half_width"));
      env.predictor = am;
      break;
    }
    case Method::kBonferroniCqr: {
      auto bc = std::make_shared<BonferroniCqrPredictor>();
      bc->model = dec_quantile_model(j.at("quantile_model"));
      bc->config = env.config;
      bc->adjustments = dec_vector(j.at("adjustments"));
      env.predictor = bc;
      break;
    }
    case Method::kNaiveBonferroni: {
      auto nb = std::make_shared<NaiveBonferroniPredictor>();
      nb->model = dec_quantile_model(j.at("quantile_model"));
      nb->config = env.config;
      env.predictor = nb;
      break;
    }
  }
  return env;
}

void save_model(const std::string& path, const ModelEnvelope& envelope) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(envelope) << '\n';
}

ModelEnvelope load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace conformal
