#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "swid/serialization.hpp"
#include "swid/simulator.hpp"

using namespace swid;

namespace {

// Scalar-loop reimplementation of the benchmark with the documented streams:
// 1 modes, 2 inputs, 3 process noise, 4 measurement noise.
struct Trajectory {
  std::vector<int> s;
  std::vector<double> u, y;
  std::vector<std::array<double, 3>> x;
};

Trajectory reference_benchmark(std::uint64_t seed, long T, double var) {
  const double A[2][3][3] = {{{0.8, 0.2, -0.1}, {0.0, 0.9, 0.1}, {0.1, -0.1, 0.7}},
                             {{0.5, -0.2, -0.1}, {0.0, 0.9, 0.1}, {-0.1, -0.3, 0.8}}};
  const double B[2][3] = {{-1.0, 0.5, 1.0}, {-0.5, 0.1, 0.5}};
  const double C[2][3] = {{-1.0, 1.5, 0.5}, {-0.1, -0.5, 0.8}};
  const double D[2] = {0.1, -0.1};
  const double P[2][2] = {{0.98, 0.02}, {0.02, 0.98}};  // P[next][prev]
  Rng ms(seed, 1), is(seed, 2), ps(seed, 3), ys(seed, 4);
  const double sd = std::sqrt(var);
  Trajectory tr;
  std::array<double, 3> x{0, 0, 0};
  int prev = -1;
  for (long t = 0; t < T; ++t) {
    const double r = ms.uniform();
    int s;
    if (prev < 0) s = r <= 0.5 ? 0 : 1;
    else s = r <= P[0][prev] ? 0 : 1;
    prev = s;
    const double u = is.uniform(0.0, 1.0);
    double cy = 0;
    for (int j = 0; j < 3; ++j) cy = j == 0 ? C[s][0] * std::sin(x[0]) : cy + C[s][j] * std::sin(x[j]);
    const double y = cy + D[s] * u - 2.0 + sd * ys.normal();
    std::array<double, 3> n{};
    for (int i = 0; i < 3; ++i) n[i] = sd * ps.normal();
    std::array<double, 3> next{};
    for (int i = 0; i < 3; ++i) {
      double a = A[s][i][0] * std::tanh(x[0]);
      a = a + A[s][i][1] * std::tanh(x[1]);
      a = a + A[s][i][2] * std::tanh(x[2]);
      next[i] = a + B[s][i] * u + n[i];
    }
    tr.s.push_back(s);
    tr.u.push_back(u);
    tr.y.push_back(y);
    tr.x.push_back(x);
    x = next;
  }
  return tr;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("identity chain stays put, swap chain alternates") {
  TransitionMatrix id{MatrixXd::Identity(2, 2), Eigen::Vector2d(0.5, 0.5)};
  const ModeSequence a = simulate_markov_modes(id, 50, 3);
  CHECK(std::all_of(a.begin(), a.end(), [&](int v) { return v == a[0]; }));
  MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const ModeSequence b = simulate_markov_modes({swap, Eigen::Vector2d(1, 0)}, 9, 3);
  CHECK(b == ModeSequence{0, 1, 0, 1, 0, 1, 0, 1, 0});
}

TEST_CASE("empirical transition frequencies lie within three sigma") {
  MatrixXd pi(3, 3);
  pi << 0.7, 0.2, 0.3, 0.2, 0.5, 0.3, 0.1, 0.3, 0.4;
  const TransitionMatrix tr{pi, Eigen::Vector3d(0.2, 0.3, 0.5)};
  const ModeSequence s = simulate_markov_modes(tr, 100000, 99);
  const MatrixXd C = oracle::count_transitions(s, 3);
  for (int l = 0; l < 3; ++l) {
    const double n = C.col(l).sum();
    for (int j = 0; j < 3; ++j) {
      const double p = pi(j, l);
      CHECK(std::abs(C(j, l) / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
    }
  }
}

TEST_CASE("zero input and zero noise rests at the fixed point") {
  BenchmarkSpec s;
  s.T = 40;
  s.noise_var = 0.0;
  s.input = {0.0, 0.0};
  const Dataset d = simulate_benchmark(s);
  CHECK(d.true_states->isZero(0.0));
  CHECK((d.y.array() == -2.0).all());
  CHECK(d.u.isZero(0.0));
}

TEST_CASE("one step of mode 1 from rest with unit input") {
  BenchmarkSystem sys = BenchmarkSystem::standard();
  sys.pi0 << 1.0, 0.0;
  BenchmarkSpec s;
  s.T = 2;
  s.noise_var = 0.0;
  s.input = {1.0, 1.0};
  const Dataset d = simulate_benchmark(sys, s);
  CHECK((*d.true_modes)[0] == 0);
  CHECK(d.y(0, 0) == doctest::Approx(-1.9).epsilon(1e-15));
  CHECK(d.true_states->row(1) == Eigen::RowVector3d(-1.0, 0.5, 1.0));
}

TEST_CASE("benchmark matches the scalar reference exactly") {
  for (std::uint64_t seed : {1ull, 7ull, 12345ull}) {
    BenchmarkSpec s;
    s.T = 500;
    s.seed = seed;
    s.noise_var = 1e-3;
    const Dataset d = simulate_benchmark(s);
    const Trajectory r = reference_benchmark(seed, 500, 1e-3);
    bool same = true;
    for (Index t = 0; t < 500; ++t) {
      same = same && (*d.true_modes)[static_cast<std::size_t>(t)] == r.s[static_cast<std::size_t>(t)];
      same = same && d.u(t, 0) == r.u[static_cast<std::size_t>(t)] && d.y(t, 0) == r.y[static_cast<std::size_t>(t)];
      for (int i = 0; i < 3; ++i) same = same && (*d.true_states)(t, i) == r.x[static_cast<std::size_t>(t)][i];
    }
    CHECK(same);
  }
}

TEST_CASE("noise-free benchmark trajectories satisfy the recursion") {
  BenchmarkSpec s;
  s.T = 300;
  s.noise_var = 0.0;
  s.seed = 4;
  const Dataset d = simulate_benchmark(s);
  const BenchmarkSystem sys = BenchmarkSystem::standard();
  double worst = 0.0;
  for (Index t = 0; t + 1 < d.T(); ++t) {
    const int m = (*d.true_modes)[static_cast<std::size_t>(t)];
    const Eigen::Vector3d x = d.true_states->row(t).transpose();
    const Eigen::Vector3d xn = sys.A[m] * x.array().tanh().matrix() + sys.B[m] * d.u(t, 0);
    worst = std::max(worst, (xn - d.true_states->row(t + 1).transpose()).cwiseAbs().maxCoeff());
    const double y = sys.C[m] * x.array().sin().matrix() + sys.D[m] * d.u(t, 0) - 2.0;
    worst = std::max(worst, std::abs(y - d.y(t, 0)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("same seed, identical datasets") {
  BenchmarkSpec s;
  s.seed = 3;
  s.T = 200;
  const Dataset a = simulate_benchmark(s), b = simulate_benchmark(s);
  CHECK(a.y == b.y);
  CHECK(a.u == b.u);
  CHECK(*a.true_modes == *b.true_modes);
  s.seed = 4;
  CHECK_FALSE(simulate_benchmark(s).y == a.y);
}

TEST_CASE("input law bounds") {
  BenchmarkSpec s;
  s.T = 1000;
  s.input = {-2.0, 3.0};
  const Dataset d = simulate_benchmark(s);
  CHECK(d.u.minCoeff() >= -2.0);
  CHECK(d.u.maxCoeff() <= 3.0);
  s.input = {1.0, 0.0};
  CHECK_THROWS_AS(simulate_benchmark(s), ValidationError);
}

TEST_CASE("noise-free model simulation is the rollout") {
  Rng rng(6);
  const SwitchingModel m = oracle::random_model(1, 2, 1, 2, 4, Activation::Tanh, rng);
  const Dataset d = simulate_model(m, 50, InputLaw{}, 8, 0.0);
  CHECK(d.y == rollout(m, d.u, *d.true_modes));
  const Dataset n = simulate_model(m, 50, InputLaw{}, 8);
  CHECK_FALSE(n.y == d.y);
  CHECK(n.u == d.u);
}

TEST_CASE("a saved and reloaded model simulates identically") {
  Rng rng(7);
  const SwitchingModel m = oracle::random_model(2, 3, 1, 1, 5, Activation::Arctan, rng);
  const SwitchingModel back = model_from_text(model_to_text(m));
  CHECK(simulate_model(back, 100, InputLaw{}, 2).y == simulate_model(m, 100, InputLaw{}, 2).y);
}

}
