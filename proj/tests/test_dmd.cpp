#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "narkoop/dmd.hpp"
#include "narkoop/forecast.hpp"
#include "narkoop/model_io.hpp"

using narkoop::Matrix;
using narkoop::ModelVariant;
using narkoop::Series;
using narkoop::SeriesSet;
using narkoop::Vector;

namespace {

Series geometric_series(double ratio, double y0, std::size_t n) {
  Series s;
  s.reserve(n);
  double y = y0;
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(y);
    y *= ratio;
  }
  return s;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("hankel dmd identifies a scalar linear map") {
  const SeriesSet set = {geometric_series(0.5, 1.0, 60)};
  const auto dict = narkoop::build_dictionary(1, 1);
  const auto model = narkoop::fit_hankel_dmd(set, 1, dict, 1);
  REQUIRE(model.variant == ModelVariant::kHankelShift1);
  REQUIRE(model.koopman.rows() == 1);
  REQUIRE(model.koopman(0, 0) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(model.training_residual < 1e-10);
}

TEST_CASE("hankel dmd lifts a linear map onto monomial observables") {
  // For y+ = a y the lifted pair (y, y^2) evolves as diag(a, a^2).
  const double a = 0.8;
  const SeriesSet set = {geometric_series(a, 1.0, 80)};
  const auto dict = narkoop::build_dictionary(1, 2);
  const auto model = narkoop::fit_hankel_dmd(set, 1, dict, 2);
  Matrix expected(2, 2);
  expected << a, 0.0, 0.0, a * a;
  REQUIRE((model.koopman - expected).norm() < 1e-8);
}

TEST_CASE("hankel dmd recovers the AR(2) companion form") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const SeriesSet set = {testkit::simulate_nar(f, 2, {1.0, 0.0}, 400)};
  const auto dict = narkoop::build_dictionary(2, 1);
  const auto model = narkoop::fit_hankel_dmd(set, 2, dict, 2);
  const Matrix expected = testkit::ar2_companion(1.1, -0.3);
  REQUIRE((model.koopman - expected).norm() < 1e-8);
}

TEST_CASE("hankel dmd refuses cross-lag dictionaries") {
  const SeriesSet set = {geometric_series(0.5, 1.0, 30)};
  const auto cross = narkoop::build_dictionary(2, 2);
  REQUIRE_THROWS_AS(narkoop::fit_hankel_dmd(set, 2, cross, 2), narkoop::ContractError);
}

TEST_CASE("causal jump predicts through the 2-step map despite a deficient column space") {
  // Windows of y+ = 0.5 y lie on one ray, so the snapshot matrix has rank 1
  // and coefficients are not unique; predictions on the ray still must match
  // the exact 2-step map y_{k+2} = 0.25 y_k.
  const SeriesSet set = {geometric_series(0.5, 1.0, 50)};
  const auto dict = narkoop::build_dictionary(2, 1);
  const auto model = narkoop::fit_causal_jump(set, 2, dict, 2);
  REQUIRE(model.variant == ModelVariant::kCausalJump);
  Vector window(2);
  window << 1.0, 0.5;
  const auto fc = narkoop::rollout(model, window, 6);
  const double expected[] = {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  for (int i = 0; i < 6; ++i) REQUIRE(fc.predicted[static_cast<std::size_t>(i)] == Catch::Approx(expected[i]).margin(1e-8));
}

TEST_CASE("constant series yields a fixed point at rank 1") {
  const SeriesSet set = {Series(40, 3.25)};
  const auto dict = narkoop::build_dictionary(3, 1);
  const auto model = narkoop::fit_causal_jump(set, 3, dict, 1);
  REQUIRE(model.rank_used == 1);
  const auto fc = narkoop::rollout(model, Vector::Constant(3, 3.25), 12);
  for (double v : fc.predicted) REQUIRE(v == Catch::Approx(3.25).margin(1e-10));
}

TEST_CASE("causal jump matches the iterated companion matrix on AR(2)") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {1.0, 0.0}, 500);
  const auto dict = narkoop::build_dictionary(2, 1);
  const auto model = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 2);

  // Held-out rollout, checked against C^2 applied to the window.
  const Matrix c2 = testkit::ar2_companion(1.1, -0.3) * testkit::ar2_companion(1.1, -0.3);
  Vector window(2);
  window << 0.3, 0.7;
  const auto fc = narkoop::rollout(model, window, 20);
  Vector z = window;
  std::size_t idx = 0;
  for (int block = 0; block < 10; ++block) {
    z = (c2 * z).eval();
    for (int i = 0; i < 2; ++i, ++idx) {
      REQUIRE(fc.predicted[idx] == Catch::Approx(z(i)).margin(1e-8));
    }
  }
}

TEST_CASE("predictor rows of a causal model stack the 1..tau step predictors") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {1.0, 0.0}, 500);
  const auto dict = narkoop::build_dictionary(2, 1);
  const auto model = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 2);
  const auto predictor = narkoop::extract_predictor(model);
  REQUIRE(predictor.rows.rows() == 2);

  Vector window(2);
  window << 0.4, -0.2;
  const Vector predicted = predictor.rows * model.dictionary.evaluate(window);
  const Matrix c2 = testkit::ar2_companion(1.1, -0.3) * testkit::ar2_companion(1.1, -0.3);
  const Vector expected = c2 * window;
  REQUIRE((predicted - expected).norm() < 1e-8);
}

TEST_CASE("hankel predictor row is the bottom row of the companion form") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {1.0, 0.0}, 400);
  const auto dict = narkoop::build_dictionary(2, 1);
  const auto model = narkoop::fit_hankel_dmd(SeriesSet{train}, 2, dict, 2);
  const auto predictor = narkoop::extract_predictor(model);
  REQUIRE(predictor.rows.rows() == 1);
  REQUIRE(predictor.rows(0, 0) == Catch::Approx(-0.3).margin(1e-8));
  REQUIRE(predictor.rows(0, 1) == Catch::Approx(1.1).margin(1e-8));
}

TEST_CASE("identity operator predicts the window unchanged") {
  narkoop::KoopmanModel model;
  model.dictionary = narkoop::build_dictionary(2, 1);
  model.koopman = Matrix::Identity(2, 2);
  model.tau = 2;
  model.output_dim = 1;
  model.rank_used = 2;
  model.variant = ModelVariant::kCausalJump;
  const auto predictor = narkoop::extract_predictor(model);
  Vector window(2);
  window << 5.0, -3.0;
  const Vector out = predictor.rows * model.dictionary.evaluate(window);
  REQUIRE(out(0) == 5.0);
  REQUIRE(out(1) == -3.0);
}

TEST_CASE("proposition 1: iterating the lifted map reads off the multi-step predictors") {
  const std::vector<testkit::NarMap> systems = {
      testkit::ar2_map(1.1, -0.3),
      [](std::span<const double> w) {
        const std::size_t n = w.size();
        return 0.8 * w[n - 1] + 0.1 * w[n - 2] * w[n - 2];
      }};
  std::mt19937_64 rng(21);
  for (const auto& f : systems) {
    for (int tau = 2; tau <= 4; ++tau) {
      const std::vector<double> init = testkit::random_series(rng, static_cast<std::size_t>(tau), 0.0, 1.0);
      const std::vector<double> truth =
          testkit::simulate_nar(f, tau, init, static_cast<std::size_t>(2 * tau + 4));
      Eigen::VectorXd z(tau);
      for (int i = 0; i < tau; ++i) z(i) = init[static_cast<std::size_t>(i)];
      for (int i = 1; i <= tau; ++i) {
        z = testkit::nar_lift_step(f, z);
        // after i applications the last i entries are the 1..i step predictions
        for (int j = 1; j <= i; ++j) {
          const double predicted = z(tau - i + j - 1);
          const double expected = truth[static_cast<std::size_t>(tau + j - 1)];
          REQUIRE(std::abs(predicted - expected) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("proposition 2: tau applications of the shift-1 operator equal one causal jump") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {1.0, 0.0}, 500);
  const auto dict = narkoop::build_dictionary(2, 1);
  const auto one_step = narkoop::fit_hankel_dmd(SeriesSet{train}, 2, dict, 2);
  const auto jump = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 2);
  const Matrix composed = one_step.koopman * one_step.koopman;
  REQUIRE((composed - jump.koopman).norm() < 1e-6);
}

TEST_CASE("training residual is non-increasing in rank for both fitters") {
  std::mt19937_64 rng(33);
  const Series noisy = testkit::random_series(rng, 200, 0.1, 1.0);
  const SeriesSet set = {noisy};
  const auto dict = narkoop::build_dictionary(3, 2);
  double prev = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= 9; ++r) {
    const auto model = narkoop::fit_causal_jump(set, 3, dict, r);
    REQUIRE(model.training_residual <= prev + 1e-12);
    prev = model.training_residual;
  }
  const auto lag_dict = narkoop::build_lag_dictionary(3, 1, 2);
  prev = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= 6; ++r) {
    const auto model = narkoop::fit_hankel_dmd(set, 3, lag_dict, r);
    REQUIRE(model.training_residual <= prev + 1e-12);
    prev = model.training_residual;
  }
}

TEST_CASE("fits are bitwise deterministic") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {1.0, 0.0}, 300);
  const auto dict = narkoop::build_dictionary(2, 2);
  const auto a = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 3);
  const auto b = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 3);
  REQUIRE(a.koopman.rows() == b.koopman.rows());
  REQUIRE(std::memcmp(a.koopman.data(), b.koopman.data(),
                      sizeof(double) * static_cast<std::size_t>(a.koopman.size())) == 0);
}

TEST_CASE("model files round-trip bit exactly") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {0.9, 0.1}, 300);
  const auto dict = narkoop::build_dictionary(2, 2);
  auto model = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 3, {2.5});
  const auto path = temp_file("narkoop_model_roundtrip.json");
  narkoop::save_model(model, path);
  const auto loaded = narkoop::load_model(path);
  REQUIRE(loaded.tau == model.tau);
  REQUIRE(loaded.rank_used == model.rank_used);
  REQUIRE(loaded.variant == model.variant);
  REQUIRE(loaded.amplitude_scale == model.amplitude_scale);
  REQUIRE(loaded.training_residual == model.training_residual);
  REQUIRE(loaded.dictionary == model.dictionary);
  REQUIRE(std::memcmp(loaded.koopman.data(), model.koopman.data(),
                      sizeof(double) * static_cast<std::size_t>(model.koopman.size())) == 0);

  // identical bytes when saved twice
  const auto path2 = temp_file("narkoop_model_roundtrip_2.json");
  narkoop::save_model(model, path2);
  std::ifstream f1(path), f2(path2);
  const std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  REQUIRE(s1 == s2);
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("truncated model files fail to parse") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {0.9, 0.1}, 200);
  const auto dict = narkoop::build_dictionary(2, 1);
  const auto model = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 2);
  const auto path = temp_file("narkoop_model_truncated.json");
  narkoop::save_model(model, path);
  std::string text;
  {
    std::ifstream in(path);
    text.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  {
    std::ofstream out(path);
    out << text.substr(0, text.size() / 2);
  }
  REQUIRE_THROWS_AS(narkoop::load_model(path), narkoop::ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("model files with inconsistent dictionaries are rejected") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {0.9, 0.1}, 200);
  const auto dict = narkoop::build_dictionary(2, 2);
  const auto model = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 2);
  const auto path = temp_file("narkoop_model_invalid.json");
  narkoop::save_model(model, path);
  nlohmann::json j;
  {
    std::ifstream in(path);
    in >> j;
  }
  // drop the last exponent row: dictionary size no longer matches the operator
  j["dictionary"]["exponents"].erase(j["dictionary"]["exponents"].size() - 1);
  {
    std::ofstream out(path);
    out << j.dump(1);
  }
  REQUIRE_THROWS_AS(narkoop::load_model(path), narkoop::DataError);
  std::filesystem::remove(path);
}

TEST_CASE("version mismatches are reported as such") {
  const auto f = testkit::ar2_map(1.1, -0.3);
  const Series train = testkit::simulate_nar(f, 2, {0.9, 0.1}, 200);
  const auto dict = narkoop::build_dictionary(2, 1);
  const auto model = narkoop::fit_causal_jump(SeriesSet{train}, 2, dict, 2);
  const auto path = temp_file("narkoop_model_version.json");
  narkoop::save_model(model, path);
  nlohmann::json j;
  {
    std::ifstream in(path);
    in >> j;
  }
  j["version"] = 9;
  {
    std::ofstream out(path);
    out << j.dump(1);
  }
  REQUIRE_THROWS_AS(narkoop::load_model(path), narkoop::VersionError);
  std::filesystem::remove(path);
}
