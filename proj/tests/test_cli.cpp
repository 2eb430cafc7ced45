#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "conformal/csv.hpp"
#include "conformal/rng.hpp"
#include "conformal/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = HYPERRECT_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "cli_output.txt";
  const std::string cmd = kCli + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hyperrect_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// two-target synthetic CSV for the fit/predict pipeline
void write_pipeline_csv(const fs::path& path, int n, std::uint64_t seed) {
  conformal::Rng rng(seed);
  Eigen::MatrixXd table(n, 5);
  std::vector<std::string> header{"u", "v", "w", "sys", "dia"};
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(0.0, 1.0);
    const double v = rng.uniform(-2.0, 2.0);
    const double w = rng.uniform(10.0, 20.0);
    table(i, 0) = u;
    table(i, 1) = v;
    table(i, 2) = w;
    table(i, 3) = 100.0 + 5.0 * u + 2.0 * v + 0.5 * w + 3.0 * rng.normal();
    table(i, 4) = 60.0 + 3.0 * u + 1.0 * v + 0.3 * w + 2.0 * rng.normal();
  }
  conformal::write_csv(path.string(), header, table);
}

}  // namespace

TEST_CASE("cli simulate: tiny run writes parseable deterministic reports") {
  const fs::path dir = fresh_dir("simulate");
  const std::string out1 = (dir / "a").string();
  const std::string out2 = (dir / "b").string();
  const std::string flags =
      "simulate --builtin setup1 --method cqhr --alpha 0.1 --replicates 3 --ntest 50 "
      "--seed 42 --jobs 2 --out ";
  const RunResult r1 = run_cli(flags + out1, dir);
  CHECK(r1.exit_code == 0);
  const RunResult r2 = run_cli(flags + out2, dir);
  CHECK(r2.exit_code == 0);

  const std::string agg1 = slurp(out1 + "_aggregate.json");
  CHECK(agg1 == slurp(out2 + "_aggregate.json"));  // byte-identical
  CHECK(slurp(out1 + "_replicates.csv") == slurp(out2 + "_replicates.csv"));

  const json agg = json::parse(agg1);
  CHECK(agg.at("schema_version") == 1);
  CHECK(agg.at("scenario") == "setup1");
  CHECK(agg.at("method") == "cqhr");
  CHECK(agg.at("replicates") == 3);
  CHECK(agg.at("marginal_coverage").size() == 3);
  const double cov = agg.at("overall_coverage").get<double>();
  CHECK(cov >= 0.0);
  CHECK(cov <= 1.0);

  const conformal::CsvTable reps = conformal::read_csv(out1 + "_replicates.csv");
  CHECK(reps.values.rows() == 3);
  CHECK(reps.header.front() == "replicate");
}

TEST_CASE("cli simulate: single point replicate gives {0,1} coverage") {
  const fs::path dir = fresh_dir("single");
  const RunResult r = run_cli(
      "simulate --builtin setup1 --method chr-abs --replicates 1 --ntest 1 --seed 7 --out " +
          (dir / "s").string(),
      dir);
  CHECK(r.exit_code == 0);
  const json agg = json::parse(slurp((dir / "s_aggregate.json").string()));
  const double cov = agg.at("overall_coverage").get<double>();
  CHECK((cov == 0.0 || cov == 1.0));
}

TEST_CASE("cli simulate: usage errors exit with code 2") {
  const fs::path dir = fresh_dir("usage");
  CHECK(run_cli("simulate --builtin setup9 --method cqhr --out " + (dir / "x").string(), dir)
            .exit_code == 2);
  CHECK(run_cli("simulate --builtin setup1 --method frobnicate --out " + (dir / "x").string(),
                dir)
            .exit_code == 2);
  CHECK(run_cli("simulate --method cqhr", dir).exit_code == 2);  // neither builtin nor config
  CHECK(run_cli("frobnicate", dir).exit_code != 0);
}

TEST_CASE("cli simulate: config file path round-trips a builtin") {
  const fs::path dir = fresh_dir("config");
  conformal::ScenarioSpec spec = conformal::builtin_scenario("setup3");
  spec.n_train = 150;
  spec.n_cal = 80;
  spec.n_test = 40;
  const fs::path cfg = dir / "scenario.json";
  std::ofstream(cfg) << conformal::scenario_to_json(spec);
  const RunResult r = run_cli("simulate --config " + cfg.string() +
                                  " --method absmax --replicates 2 --seed 5 --out " +
                                  (dir / "c").string(),
                              dir);
  CHECK(r.exit_code == 0);
  const json agg = json::parse(slurp((dir / "c_aggregate.json").string()));
  CHECK(agg.at("scenario") == "setup3");
  CHECK(agg.at("n_train") == 150);
}

TEST_CASE("cli fit/predict: round trip reproduces identical predictions") {
  const fs::path dir = fresh_dir("fitpredict");
  const fs::path data_csv = dir / "data.csv";
  // clinical-pipeline row count with a ~900/200/189 split
  write_pipeline_csv(data_csv, 1289, 99);

  const RunResult fit = run_cli("fit --data " + data_csv.string() +
                                    " --targets sys,dia --method cqhr --alpha 0.1 --seed 11 "
                                    "--split 0.698,0.155,0.147 --out " +
                                    (dir / "model.json").string(),
                                dir);
  CHECK(fit.exit_code == 0);
  CHECK(fit.output.find("/199/") != std::string::npos);  // cal1 = floor(1289 * 0.155)

  const RunResult p1 = run_cli("predict --model " + (dir / "model.json").string() +
                                   " --data " + data_csv.string() + " --out " +
                                   (dir / "pred1.csv").string(),
                               dir);
  CHECK(p1.exit_code == 0);
  const RunResult p2 = run_cli("predict --model " + (dir / "model.json").string() +
                                   " --data " + data_csv.string() + " --out " +
                                   (dir / "pred2.csv").string(),
                               dir);
  CHECK(p2.exit_code == 0);
  CHECK(slurp(dir / "pred1.csv") == slurp(dir / "pred2.csv"));

  const conformal::CsvTable pred = conformal::read_csv((dir / "pred1.csv").string());
  REQUIRE(pred.header.size() == 4);
  CHECK(pred.header[0] == "sys_lo");
  CHECK(pred.header[3] == "dia_hi");
  CHECK(pred.values.rows() == 1289);
  // every rectangle finite and ordered
  for (Eigen::Index i = 0; i < pred.values.rows(); ++i) {
    CHECK(pred.values(i, 0) <= pred.values(i, 1));
    CHECK(pred.values(i, 2) <= pred.values(i, 3));
    CHECK(std::isfinite(pred.values(i, 0)));
    CHECK(std::isfinite(pred.values(i, 3)));
  }
}

TEST_CASE("cli fit: every method runs end to end on CSV data") {
  const fs::path dir = fresh_dir("methods");
  const fs::path data_csv = dir / "data.csv";
  write_pipeline_csv(data_csv, 300, 123);
  for (const std::string method :
       {"chr-abs", "chr-signed", "cqhr", "absmax", "bonf-cqr", "bonf-naive"}) {
    const RunResult fit = run_cli("fit --data " + data_csv.string() +
                                      " --targets sys,dia --method " + method +
                                      " --alpha 0.2 --seed 3 --out " +
                                      (dir / (method + ".json")).string(),
                                  dir);
    CHECK_MESSAGE(fit.exit_code == 0, method, ": ", fit.output);
    const RunResult pred = run_cli("predict --model " + (dir / (method + ".json")).string() +
                                       " --data " + data_csv.string() + " --out " +
                                       (dir / (method + "_pred.csv")).string(),
                                   dir);
    CHECK_MESSAGE(pred.exit_code == 0, method, ": ", pred.output);
  }
}

TEST_CASE("cli: malformed csv fails with a row-numbered message") {
  const fs::path dir = fresh_dir("badcsv");
  const fs::path bad = dir / "bad.csv";
  std::ofstream(bad) << "a,b,sys\n1,2,3\n4,oops,6\n";
  const RunResult r = run_cli(
      "fit --data " + bad.string() + " --targets sys --out " + (dir / "m.json").string(), dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("row 3") != std::string::npos);
}

TEST_CASE("cli predict: missing covariate column is a schema mismatch") {
  const fs::path dir = fresh_dir("schema");
  const fs::path data_csv = dir / "data.csv";
  write_pipeline_csv(data_csv, 200, 7);
  REQUIRE(run_cli("fit --data " + data_csv.string() + " --targets sys,dia --method absmax "
                  "--seed 2 --out " +
                      (dir / "m.json").string(),
                  dir)
              .exit_code == 0);
  std::ofstream(dir / "short.csv") << "u,v,sys,dia\n0.5,0.1,100,60\n";
  const RunResult r = run_cli("predict --model " + (dir / "m.json").string() + " --data " +
                                  (dir / "short.csv").string() + " --out " +
                                  (dir / "p.csv").string(),
                              dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("missing covariate column") != std::string::npos);
}

#include "conformal/metrics.hpp"
#include "conformal/model_io.hpp"

TEST_CASE("model file: reload reproduces identical predictions bitwise") {
  conformal::ScenarioSpec spec = conformal::builtin_scenario("setup1");
  spec.n_train = 200;
  spec.n_cal = 100;
  spec.n_test = 30;
  spec.seed = 5;
  const conformal::GeneratedData data = conformal::generate(spec);
  for (const auto method : {conformal::Method::kCqhr, conformal::Method::kChrSigned,
                            conformal::Method::kAbsoluteMax, conformal::Method::kBonferroniCqr,
                            conformal::Method::kNaiveBonferroni}) {
    conformal::MethodConfig cfg;
    cfg.method = method;
    conformal::ModelEnvelope env;
    env.method = method;
    env.config = conformal::MiscoverageConfig::symmetric(0.1);
    env.seed = 5;
    env.covariate_names = {"x1", "x2"};
    env.target_names = {"y1", "y2", "y3"};
    env.predictor = conformal::fit_method(data.fit, 200, 100, spec.model_bases, cfg);

    const conformal::ModelEnvelope back =
        conformal::model_from_json(conformal::model_to_json(env));
    CHECK(back.method == method);
    CHECK(back.covariate_names == env.covariate_names);
    for (Eigen::Index i = 0; i < data.test.rows(); ++i) {
      const Eigen::VectorXd probe = data.test.x.row(i).transpose();
      const conformal::Hyperrectangle a = env.predictor->predict(probe);
      const conformal::Hyperrectangle b = back.predictor->predict(probe);
      CHECK(a.lo == b.lo);
      CHECK(a.hi == b.hi);
    }
  }
}

TEST_CASE("model file: unbounded adjustments survive the round trip") {
  // calibration too small for the level: adjustment is +infinity
  conformal::Rng rng(1);
  Eigen::MatrixXd x(23, 1), y(23, 1);
  for (int i = 0; i < 23; ++i) {
    x(i, 0) = rng.uniform(0.0, 1.0);
    y(i, 0) = x(i, 0) + rng.normal();
  }
  conformal::MethodConfig cfg;
  cfg.method = conformal::Method::kCqhr;
  cfg.alpha = 0.1;
  conformal::ModelEnvelope env;
  env.method = cfg.method;
  env.config = conformal::MiscoverageConfig::symmetric(0.1);
  env.covariate_names = {"x"};
  env.target_names = {"y"};
  env.predictor = conformal::fit_method(conformal::MultiTargetDataset(x, y), 20, 3,
                                        conformal::shared_bases(conformal::FeatureMap::linear(1), 1),
                                        cfg);
  const std::string text = conformal::model_to_json(env);
  CHECK(text.find("\"inf\"") != std::string::npos);
  const conformal::ModelEnvelope back = conformal::model_from_json(text);
  Eigen::VectorXd probe(1);
  probe << 0.5;
  const conformal::Hyperrectangle rect = back.predictor->predict(probe);
  CHECK(rect.lo[0] == -conformal::kInfinity);
  CHECK(rect.hi[0] == conformal::kInfinity);
}
