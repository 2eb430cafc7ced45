#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "conformal/rng.hpp"
#include "conformal/simgen.hpp"

using namespace conformal;

namespace {

double sample_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean(), mb = b.mean();
  const Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
  return (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
}

}  // namespace

TEST_CASE("correlate_errors: identity correlation returns the input exactly") {
  Rng rng(1);
  Eigen::MatrixXd eps(40, 3);
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i / 3, i % 3) = rng.normal();
  const Eigen::MatrixXd out = correlate_errors(eps, Eigen::MatrixXd::Identity(3, 3));
  CHECK((out - eps).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("correlate_errors: achieves the target correlation for normal inputs") {
  Rng rng(2);
  const int n = 100000;
  Eigen::MatrixXd eps(n, 2);
  for (int i = 0; i < n; ++i) {
    eps(i, 0) = rng.normal();
    eps(i, 1) = rng.normal();
  }
  Eigen::MatrixXd r(2, 2);
  r << 1.0, 0.8, 0.8, 1.0;
  const Eigen::MatrixXd out = correlate_errors(eps, r);
  CHECK(std::abs(sample_correlation(out.col(0), out.col(1)) - 0.8) < 0.01);
}

TEST_CASE("correlate_errors: equal-variance gamma inputs keep the correlation") {
  Rng rng(3);
  const int n = 100000;
  Eigen::MatrixXd eps(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) eps(i, j) = rng.gamma(2.0, 0.2);
  Eigen::MatrixXd r(3, 3);
  r << 1, .8, .8, .8, 1, .8, .8, .8, 1;
  const Eigen::MatrixXd out = correlate_errors(eps, r);
  CHECK(std::abs(sample_correlation(out.col(0), out.col(1)) - 0.8) < 0.02);
  CHECK(std::abs(sample_correlation(out.col(0), out.col(2)) - 0.8) < 0.02);
}

TEST_CASE("correlate_errors: cholesky factor satisfies U'U = R; non-PD rejected") {
  Eigen::MatrixXd r(3, 3);
  r << 1, .3, .6, .3, 1, .5, .6, .5, 1;
  const Eigen::MatrixXd u = Eigen::LLT<Eigen::MatrixXd>(r).matrixU();
  CHECK((u.transpose() * u - r).lpNorm<Eigen::Infinity>() < 1e-12);

  Eigen::MatrixXd bad(3, 3);
  bad << 1, -.8, .8, -.8, 1, .8, .8, .8, 1;  // eigenvalue -0.6
  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_WITH_AS(correlate_errors(eps, bad), "correlation not positive definite",
                       std::invalid_argument);
}

TEST_CASE("generate setup1: error moments match the gamma law") {
  ScenarioSpec spec = builtin_scenario("setup1");
  spec.n_train = 100000;
  spec.n_cal = 0;
  spec.n_test = 1;
  spec.seed = 606;
  const GeneratedData data = generate(spec);
  // U11 = 1, so Y1 - (5 + 2 X1) is exactly the raw Gamma(2, 0.2) with mean 10
  const Eigen::VectorXd resid =
      data.fit.y.col(0) - (5.0 + 2.0 * data.fit.x.col(0).array()).matrix();
  CHECK(std::abs(resid.mean() - 10.0) < 0.1);
}

TEST_CASE("generate setup1: dimension-3 shift 5*X2 survives mixing unattenuated") {
  ScenarioSpec spec = builtin_scenario("setup1");
  spec.n_train = 60000;
  spec.n_cal = 0;
  spec.n_test = 1;
  spec.seed = 607;
  const GeneratedData data = generate(spec);
  // regress Y3 - X2^2 on X2: slope estimates the post-mixing shift coefficient
  const Eigen::ArrayXd x2 = data.fit.x.col(1).array();
  const Eigen::ArrayXd resid = data.fit.y.col(2).array() - x2.square();
  const double slope = ((x2 - x2.mean()) * (resid - resid.mean())).sum() /
                       (x2 - x2.mean()).square().sum();
  CHECK(slope == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("generate tendim: X5 lies between X2 and X4 row-wise, always") {
  ScenarioSpec spec = builtin_scenario("tendim");
  spec.n_train = 5000;
  spec.n_cal = 0;
  spec.n_test = 1000;
  spec.seed = 11;
  const GeneratedData data = generate(spec);
  for (const auto* block : {&data.fit, &data.test}) {
    for (Eigen::Index i = 0; i < block->rows(); ++i) {
      CHECK(block->x(i, 4) >= block->x(i, 1));
      CHECK(block->x(i, 4) <= block->x(i, 3));
    }
  }
}

TEST_CASE("generate: bit-identical for identical spec and seed") {
  ScenarioSpec spec = builtin_scenario("setup2");
  spec.n_train = 500;
  spec.n_cal = 200;
  spec.n_test = 100;
  spec.seed = 12345;
  const GeneratedData a = generate(spec);
  const GeneratedData b = generate(spec);
  CHECK(a.fit.x == b.fit.x);
  CHECK(a.fit.y == b.fit.y);
  CHECK(a.test.x == b.test.x);
  CHECK(a.test.y == b.test.y);
  ScenarioSpec other = spec;
  other.seed = 12346;
  const GeneratedData c = generate(other);
  CHECK(a.fit.y != c.fit.y);
}

TEST_CASE("generate balance-hetero: sd factor sqrt(|X1|) present") {
  ScenarioSpec spec = builtin_scenario("balance-hetero");
  spec.n_train = 60000;
  spec.n_cal = 0;
  spec.n_test = 1;
  spec.seed = 21;
  const GeneratedData data = generate(spec);
  // dim 0 (scale 1, mean 2*X1): squared residuals should average |x1| locally
  const Eigen::ArrayXd x1 = data.fit.x.col(0).array();
  const Eigen::ArrayXd resid = data.fit.y.col(0).array() - 2.0 * x1;
  double small = 0, large = 0;
  int n_small = 0, n_large = 0;
  for (Eigen::Index i = 0; i < x1.size(); ++i) {
    if (std::abs(x1[i]) < 1.0) {
      small += resid[i] * resid[i];
      ++n_small;
    } else if (std::abs(x1[i]) > 3.0) {
      large += resid[i] * resid[i];
      ++n_large;
    }
  }
  CHECK(small / n_small < 1.1);   // E|x1| under 1 in the small band
  CHECK(large / n_large > 2.5);   // E|x1| over 3 in the large band
}

TEST_CASE("generate balance-gamma3-hetero: shape scales with |X2|") {
  ScenarioSpec spec = builtin_scenario("balance-gamma3-hetero");
  spec.n_train = 60000;
  spec.n_cal = 0;
  spec.n_test = 1;
  spec.seed = 22;
  const GeneratedData data = generate(spec);
  // raw mean of Gamma(2|x2|, 0.2) is 10|x2|; mixing row-sums preserve scale
  const Eigen::ArrayXd x2 = data.fit.x.col(1).array().abs();
  const Eigen::ArrayXd resid = data.fit.y.col(0).array() - data.fit.x.col(0).array();
  double lo_band = 0, hi_band = 0;
  int n_lo = 0, n_hi = 0;
  for (Eigen::Index i = 0; i < x2.size(); ++i) {
    if (x2[i] < 1.0) {
      lo_band += resid[i];
      ++n_lo;
    } else if (x2[i] > 4.0) {
      hi_band += resid[i];
      ++n_hi;
    }
  }
  CHECK(lo_band / n_lo < hi_band / n_hi / 3.0);  // strong monotone trend
}

TEST_CASE("scenario json: round-trip is semantically identical") {
  for (const auto& name : builtin_scenario_names()) {
    const ScenarioSpec spec = builtin_scenario(name);
    const ScenarioSpec back = scenario_from_json(scenario_to_json(spec));
    CHECK(back.name == spec.name);
    CHECK(back.d == spec.d);
    CHECK(back.p == spec.p);
    CHECK(back.correlation == spec.correlation);
    CHECK(back.error_scale == spec.error_scale);
    CHECK(back.sd_abs_sqrt_index == spec.sd_abs_sqrt_index);
    CHECK(back.n_train == spec.n_train);
    CHECK(back.n_cal == spec.n_cal);
    CHECK(back.n_test == spec.n_test);
    CHECK(back.seed == spec.seed);
    REQUIRE(back.model_bases.size() == spec.model_bases.size());
    for (std::size_t j = 0; j < spec.model_bases.size(); ++j)
      CHECK(back.model_bases[j] == spec.model_bases[j]);
    REQUIRE(back.signal.size() == spec.signal.size());
    for (std::size_t j = 0; j < spec.signal.size(); ++j) CHECK(back.signal[j] == spec.signal[j]);
    for (std::size_t j = 0; j < spec.shift.size(); ++j) CHECK(back.shift[j] == spec.shift[j]);
    // identical generation proves the laws round-tripped too
    ScenarioSpec a = spec, b = back;
    a.n_train = b.n_train = 200;
    a.n_cal = b.n_cal = 50;
    a.n_test = b.n_test = 50;
    a.seed = b.seed = 99;
    CHECK(generate(a).fit.y == generate(b).fit.y);
  }
}

TEST_CASE("builtin catalog: unknown names rejected") {
  CHECK_THROWS_AS(builtin_scenario("setup9"), std::invalid_argument);
  CHECK_THROWS_AS(builtin_scenario("balance-gamma3-r7"), std::invalid_argument);
  CHECK_NOTHROW(builtin_scenario("balance-gamma3-r4"));
  CHECK_NOTHROW(builtin_scenario("balance-gamma3-hetero-r2"));
}
