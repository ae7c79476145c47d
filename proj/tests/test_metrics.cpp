#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "swid/metrics.hpp"
#include "swid/simulator.hpp"

using namespace swid;

TEST_SUITE("metrics") {

TEST_CASE("mse of identical series and of a constant offset") {
  Rng rng(1);
  const MatrixXd y = oracle::random_matrix(37, 2, rng);
  CHECK(mse(y, y) == 0.0);
  const MatrixXd z = oracle::random_matrix(53, 1, rng);
  CHECK(mse(z, (z.array() + 0.1).matrix()) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("mse agrees with a loop recomputation") {
  Rng rng(2);
  const MatrixXd a = oracle::random_matrix(100, 3, rng), b = oracle::random_matrix(100, 3, rng);
  double s = 0.0;
  for (Index t = 0; t < 100; ++t)
    for (Index j = 0; j < 3; ++j) s += (a(t, j) - b(t, j)) * (a(t, j) - b(t, j));
  CHECK(std::abs(mse(a, b) - s / 100.0) < 1e-12);
}

TEST_CASE("bfr reference points") {
  Rng rng(3);
  MatrixXd y = oracle::random_matrix(80, 1, rng);
  CHECK(bfr(y, y) == 100.0);
  CHECK(std::abs(bfr(y, MatrixXd::Constant(80, 1, y.mean()))) < 1e-12);
  y.array() -= y.mean();
  CHECK(bfr(y, 2.0 * y) == doctest::Approx(0.0));
  CHECK(bfr(y, -y) == doctest::Approx(-100.0));
  const MatrixXd c = MatrixXd::Constant(5, 1, 1.0);
  CHECK_THROWS_AS(bfr(c, c), ValidationError);
  CHECK_THROWS_AS(mse(c, MatrixXd::Zero(4, 1)), StructuralError);
}

TEST_CASE("bfr and mse determine each other") {
  Rng rng(4);
  const MatrixXd y = oracle::random_matrix(64, 2, rng), p = oracle::random_matrix(64, 2, rng, 0.3) + y;
  const double var = (y.rowwise() - y.colwise().mean()).rowwise().squaredNorm().mean();
  CHECK(std::abs(bfr(y, p) - 100.0 * (1.0 - std::sqrt(mse(y, p) / var))) < 1e-10);
}

TEST_CASE("mode match under relabeling") {
  const ModeSequence t = {0, 0, 1, 1};
  ModeMatch m = mode_match(t, t, 2);
  CHECK(m.percent == 100.0);
  CHECK(m.permutation == std::vector<int>{0, 1});
  m = mode_match(t, {1, 1, 0, 0}, 2);
  CHECK(m.percent == 100.0);
  CHECK(m.permutation == std::vector<int>{1, 0});
  CHECK(relabel({1, 1, 0, 0}, m.permutation) == t);
  CHECK(mode_match(t, {0, 1, 1, 1}, 2).percent == 75.0);
  CHECK_THROWS_AS(mode_match(ModeSequence(3, 0), ModeSequence(3, 0), 7), ValidationError);
  CHECK_THROWS_AS(mode_match(t, {0, 1}, 2), StructuralError);
}

TEST_CASE("evaluation report with and without true modes") {
  Rng rng(5);
  const SwitchingModel m = oracle::random_model(2, 2, 1, 1, 3, Activation::Tanh, rng);
  Dataset d = simulate_model(m, 120, InputLaw{}, 9);
  const EvalResult r = evaluate(m, d, WindowConfig{});
  REQUIRE(r.mode_match.has_value());
  CHECK(r.squared_error.size() == 120);
  double s = 0.0;
  for (double v : r.squared_error) s += v;
  CHECK(std::abs(s / 120.0 - r.mse) < 1e-12);
  d.true_modes.reset();
  CHECK_FALSE(evaluate(m, d, WindowConfig{}).mode_match.has_value());
}

TEST_CASE("a single-mode model is matched against multi-mode truth") {
  Rng rng(7);
  const SwitchingModel m = oracle::random_model(1, 2, 1, 1, 3, Activation::Tanh, rng);
  Dataset d = simulate_model(m, 40, InputLaw{}, 3);
  ModeSequence truth(40, 0);
  for (std::size_t t = 30; t < 40; ++t) truth[t] = 1;
  d.true_modes = truth;
  const EvalResult r = evaluate(m, d, WindowConfig{});
  REQUIRE(r.mode_match.has_value());
  CHECK(r.mode_match->percent == 75.0);
}

TEST_CASE("rollout and one-step predictions differ on noisy data") {
  Rng rng(6);
  const SwitchingModel m = oracle::random_model(1, 2, 1, 1, 3, Activation::Tanh, rng);
  const Dataset noisy = simulate_model(m, 80, InputLaw{}, 3, 50.0);
  const Predictions one = predict(m, noisy, WindowConfig{}, PredictionKind::OneStep);
  const Predictions free = predict(m, noisy, WindowConfig{}, PredictionKind::Rollout);
  CHECK((one.y_pred - free.y_pred).cwiseAbs().maxCoeff() > 1e-6);
  const Dataset clean = simulate_model(m, 80, InputLaw{}, 3, 0.0);
  CHECK(predict(m, clean, WindowConfig{}, PredictionKind::Rollout).y_pred == clean.y);
}

TEST_CASE("inputs-only datasets need rollout") {
  Rng rng(7);
  const SwitchingModel m = oracle::random_model(2, 2, 1, 1, 3, Activation::Tanh, rng);
  Dataset d;
  d.u = oracle::random_matrix(10, 1, rng);
  d.y = MatrixXd(10, 0);
  CHECK_THROWS_AS(predict(m, d, WindowConfig{}, PredictionKind::OneStep), ValidationError);
  CHECK(predict(m, d, WindowConfig{}, PredictionKind::Rollout).y_pred.rows() == 10);
}

}
