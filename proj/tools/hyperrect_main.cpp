// hyperrect: conformal hyperrectangular prediction regions for multi-target
// regression. Subcommands: simulate (built-in or config-file scenarios),
// fit (CSV -> model file), predict (model file + CSV -> interval CSV).

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "conformal/cqhr.hpp"
#include "conformal/csv.hpp"
#include "conformal/metrics.hpp"
#include "conformal/model_io.hpp"
#include "conformal/simgen.hpp"
#include "conformal/split.hpp"

namespace {

using nlohmann::json;

json enc(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

json enc_vec(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(enc(v[i]));
  return arr;
}

Eigen::Index parse_reference(const std::string& text) {
  if (text == "mincv" || text == "auto") return conformal::kAutoReference;
  return static_cast<Eigen::Index>(std::stol(text));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SimulateArgs {
  std::string builtin;
  std::string config_path;
  std::string method = "cqhr";
  double alpha = 0.1;
  std::size_t replicates = 200;
  long ntest = -1;
  long ntrain = -1;
  long ncal = -1;
  std::uint64_t seed = 20260810;
  std::string reference = "0";
  double lo_level = -1.0;
  double hi_level = -1.0;
  int jobs = 1;
  std::string out = "simulate";
};

int run_simulate(const SimulateArgs& args) {
  conformal::ScenarioSpec spec;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      std::cerr << "cannot open config file: " << args.config_path << "\n";
      return 1;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    spec = conformal::scenario_from_json(buffer.str());
  } else {
    spec = conformal::builtin_scenario(args.builtin);
  }
  if (args.ntrain > 0) spec.n_train = static_cast<std::size_t>(args.ntrain);
  if (args.ncal > 0) spec.n_cal = static_cast<std::size_t>(args.ncal);
  if (args.ntest > 0) spec.n_test = static_cast<std::size_t>(args.ntest);

  conformal::MethodConfig method;
  method.method = conformal::method_from_name(args.method);
  method.alpha = args.alpha;
  method.reference_dim = parse_reference(args.reference);
  method.lo_level = args.lo_level;
  method.hi_level = args.hi_level;

  const conformal::ReplicatedReport report =
      conformal::run_replicated(spec, method, args.replicates, args.seed, args.jobs);

  const Eigen::Index p = report.aggregate.marginal_coverage.size();
  ensure_parent_dir(args.out + "_replicates.csv");

  std::ofstream csv(args.out + "_replicates.csv", std::ios::binary);
  if (!csv) {
    std::cerr << "cannot write " << args.out << "_replicates.csv\n";
    return 1;
  }
  csv << "replicate,seed,overall_coverage,mean_volume,balance_stat,infinite_sides";
  for (Eigen::Index j = 0; j < p; ++j) csv << ",len_" << (j + 1);
  for (Eigen::Index j = 0; j < p; ++j) csv << ",marg_" << (j + 1);
  csv << '\n';
  for (std::size_t r = 0; r < report.per_replicate.size(); ++r) {
    const auto& rep = report.per_replicate[r];
    csv << r << ",0x" << std::hex << report.replicate_seeds[r] << std::dec << ','
        << format_double(rep.overall_coverage) << ',' << format_double(rep.mean_volume) << ','
        << format_double(rep.balance_stat) << ',' << rep.infinite_side_count;
    for (Eigen::Index j = 0; j < p; ++j) csv << ',' << format_double(rep.mean_lengths[j]);
    for (Eigen::Index j = 0; j < p; ++j) csv << ',' << format_double(rep.marginal_coverage[j]);
    csv << '\n';
  }
  csv.close();

  json agg;
  agg["schema_version"] = 1;
  agg["scenario"] = spec.name;
  agg["method"] = args.method;
  agg["alpha"] = args.alpha;
  agg["replicates"] = args.replicates;
  agg["n_train"] = spec.n_train;
  agg["n_cal"] = spec.n_cal;
  agg["n_test"] = spec.n_test;
  agg["seed"] = args.seed;
  const auto& a = report.aggregate;
  agg["overall_coverage"] = enc(a.overall_coverage);
  agg["overall_se"] = enc(a.overall_se);
  agg["marginal_coverage"] = enc_vec(a.marginal_coverage);
  agg["marginal_se"] = enc_vec(a.marginal_se);
  agg["mean_lengths"] = enc_vec(a.mean_lengths);
  agg["length_se"] = enc_vec(a.length_se);
  agg["mean_volume"] = enc(a.mean_volume);
  agg["volume_se"] = enc(a.volume_se);
  agg["balance_stat"] = enc(a.balance_stat);
  agg["infinite_side_count"] = a.infinite_side_count;
  std::ofstream js(args.out + "_aggregate.json", std::ios::binary);
  if (!js) {
    std::cerr << "cannot write " << args.out << "_aggregate.json\n";
    return 1;
  }
  js << agg.dump(2) << '\n';

  std::cout << spec.name << " " << args.method << ": coverage "
            << format_double(a.overall_coverage) << " (se " << format_double(a.overall_se)
            << "), volume " << format_double(a.mean_volume) << ", balance "
            << format_double(a.balance_stat) << "\n";
  return 0;
}

struct FitArgs {
  std::string data_path;
  std::string targets;
  std::string method = "cqhr";
  double alpha = 0.1;
  std::uint64_t seed = 20260810;
  std::string split;
  std::string feature_map = "linear";
  std::string reference = "0";
  double lo_level = -1.0;
  double hi_level = -1.0;
  std::string out = "model.json";
};

int run_fit(const FitArgs& args) {
  const conformal::CsvTable table = conformal::read_csv(args.data_path);
  const conformal::NamedDataset named =
      conformal::split_targets(table, split_list(args.targets));

  conformal::MethodConfig method;
  method.method = conformal::method_from_name(args.method);
  method.alpha = args.alpha;
  method.reference_dim = parse_reference(args.reference);
  method.lo_level = args.lo_level;
  method.hi_level = args.hi_level;

  std::array<double, 3> fractions{};
  if (!args.split.empty()) {
    const auto parts = split_list(args.split);
    if (parts.size() != 3) throw std::invalid_argument("--split needs three fractions");
    for (int i = 0; i < 3; ++i) fractions[static_cast<std::size_t>(i)] = std::stod(parts[static_cast<std::size_t>(i)]);
  } else if (method.method == conformal::Method::kChrAbsolute ||
             method.method == conformal::Method::kChrSigned) {
    fractions = {0.5, 0.25, 0.25};
  } else if (method.method == conformal::Method::kNaiveBonferroni) {
    fractions = {1.0, 0.0, 0.0};
  } else {
    fractions = {0.7, 0.3, 0.0};
  }
  const conformal::SplitPlan plan =
      conformal::make_split(named.data.rows(), fractions, args.seed);

  const int d = static_cast<int>(named.data.covariate_dim());
  conformal::FeatureMap map;
  if (args.feature_map == "linear") {
    map = conformal::FeatureMap::linear(d);
  } else if (args.feature_map == "quadratic") {
    map = conformal::FeatureMap::quadratic(d);
  } else {
    std::cerr << "unknown feature map: " << args.feature_map << " (linear|quadratic)\n";
    return 2;
  }
  const auto bases = conformal::shared_bases(map, named.data.response_dim());

  conformal::ModelEnvelope envelope;
  envelope.method = method.method;
  envelope.config = conformal::MiscoverageConfig::symmetric(args.alpha);
  envelope.seed = args.seed;
  envelope.covariate_names = named.covariate_names;
  envelope.target_names = named.target_names;
  envelope.predictor = conformal::fit_with_plan(named.data, plan, bases, method);

  ensure_parent_dir(args.out);
  conformal::save_model(args.out, envelope);
  std::cout << "model written to " << args.out << " (" << named.data.rows() << " rows, "
            << plan.train_idx.size() << "/" << plan.cal1_idx.size() << "/"
            << plan.cal2_idx.size() << " split)\n";
  return 0;
}

struct PredictArgs {
  std::string model_path;
  std::string data_path;
  std::string out = "predictions.csv";
};

int run_predict(const PredictArgs& args) {
  const conformal::ModelEnvelope envelope = conformal::load_model(args.model_path);
  const conformal::CsvTable table = conformal::read_csv(args.data_path);

  // reassemble covariates in the order the model was trained with
  std::vector<Eigen::Index> cols;
  for (const auto& name : envelope.covariate_names) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end())
      throw std::invalid_argument("model/schema mismatch: missing covariate column '" + name +
                                  "'");
    cols.push_back(static_cast<Eigen::Index>(it - table.header.begin()));
  }
  Eigen::MatrixXd x(table.values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    x.col(static_cast<Eigen::Index>(c)) = table.values.col(cols[c]);

  const Eigen::Index p = envelope.predictor->response_dim();
  Eigen::MatrixXd out(table.values.rows(), 2 * p);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const conformal::Hyperrectangle rect = envelope.predictor->predict(x.row(r).transpose());
    for (Eigen::Index j = 0; j < p; ++j) {
      out(r, 2 * j) = rect.lo[j];
      out(r, 2 * j + 1) = rect.hi[j];
    }
  }
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < p; ++j) {
    header.push_back(envelope.target_names[static_cast<std::size_t>(j)] + "_lo");
    header.push_back(envelope.target_names[static_cast<std::size_t>(j)] + "_hi");
  }
  ensure_parent_dir(args.out);
  conformal::write_csv(args.out, header, out);
  std::cout << "predictions written to " << args.out << " (" << out.rows() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal hyperrectangular prediction regions for multi-target regression"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo coverage experiment");
  simulate->add_option("--builtin", sim.builtin,
                       "Built-in scenario (setup1|setup2|setup3|setup4|tendim|balance-homo|"
                       "balance-hetero|balance-normal3|balance-gamma3|bp-synth, plus "
                       "-hetero/-r1..-r4 variants)");
  simulate->add_option("--config", sim.config_path, "Scenario config file (JSON)");
  simulate->add_option("--method", sim.method,
                       "chr-abs|chr-signed|cqhr|absmax|bonf-cqr|bonf-naive");
  simulate->add_option("--alpha", sim.alpha, "Target miscoverage");
  simulate->add_option("--replicates", sim.replicates, "Monte-Carlo replicates");
  simulate->add_option("--ntest", sim.ntest, "Test points per replicate");
  simulate->add_option("--ntrain", sim.ntrain, "Training rows per replicate");
  simulate->add_option("--ncal", sim.ncal, "Calibration rows per replicate");
  simulate->add_option("--seed", sim.seed, "Master seed (all randomness flows from it)");
  simulate->add_option("--reference-dim", sim.reference, "Reference dimension index or 'mincv'");
  simulate->add_option("--lo-level", sim.lo_level, "Initial lower quantile level");
  simulate->add_option("--hi-level", sim.hi_level, "Initial upper quantile level");
  simulate->add_option("--jobs", sim.jobs, "Worker threads for replicates");
  simulate->add_option("--out", sim.out, "Output prefix (PREFIX_replicates.csv, PREFIX_aggregate.json)");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a predictor on a CSV dataset");
  fit_cmd->add_option("--data", fit.data_path, "Input CSV (header row required)")->required();
  fit_cmd->add_option("--targets", fit.targets, "Comma-separated response column names")
      ->required();
  fit_cmd->add_option("--method", fit.method, "chr-abs|chr-signed|cqhr|absmax|bonf-cqr|bonf-naive");
  fit_cmd->add_option("--alpha", fit.alpha, "Target miscoverage");
  fit_cmd->add_option("--seed", fit.seed, "Split seed");
  fit_cmd->add_option("--split", fit.split, "train,cal1,cal2 fractions (defaults per method)");
  fit_cmd->add_option("--feature-map", fit.feature_map, "linear|quadratic");
  fit_cmd->add_option("--reference-dim", fit.reference, "Reference dimension index or 'mincv'");
  fit_cmd->add_option("--lo-level", fit.lo_level, "Initial lower quantile level");
  fit_cmd->add_option("--hi-level", fit.hi_level, "Initial upper quantile level");
  fit_cmd->add_option("--out", fit.out, "Model file path");

  PredictArgs pred;
  CLI::App* predict = app.add_subcommand("predict", "Predict intervals from a model file");
  predict->add_option("--model", pred.model_path, "Model file from 'fit'")->required();
  predict->add_option("--data", pred.data_path, "Input CSV with the model's covariate columns")
      ->required();
  predict->add_option("--out", pred.out, "Output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      if (sim.builtin.empty() == sim.config_path.empty()) {
        std::cerr << "simulate: exactly one of --builtin or --config is required\n";
        return 2;
      }
      if (!sim.builtin.empty()) {
        try {
          conformal::builtin_scenario(sim.builtin);
        } catch (const std::invalid_argument& e) {
          std::cerr << e.what() << "\n";
          return 2;
        }
      }
      try {
        conformal::method_from_name(sim.method);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }
      return run_simulate(sim);
    }
    if (fit_cmd->parsed()) {
      try {
        conformal::method_from_name(fit.method);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }
      return run_fit(fit);
    }
    if (predict->parsed()) return run_predict(pred);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
