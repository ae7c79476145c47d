#pragma once

#include <array>
#include <cstdint>

#include "swid/model.hpp"
#include "swid/rng.hpp"

namespace swid {

/// i.i.d. uniform inputs on [lo, hi] (lo == hi gives a constant input).
struct InputLaw {
  double lo = 0.0;
  double hi = 1.0;
};

/// Two-mode benchmark
///   x(t+1) = A_s tanh(x(t)) + B_s u(t) + ζ,  y(t) = C_s sin(x(t)) + D_s u(t) − 2 + ξ
/// with n_x = 3, n_u = n_y = 1.
struct BenchmarkSystem {
  std::array<Eigen::Matrix3d, 2> A;
  std::array<Eigen::Vector3d, 2> B;
  std::array<Eigen::RowVector3d, 2> C;
  std::array<double, 2> D;
  Eigen::Matrix2d pi;   ///< pi(next, prev)
  Eigen::Vector2d pi0;

  static BenchmarkSystem standard();
};

struct BenchmarkSpec {
  Index T = 1000;
  double noise_var = 1e-3;  ///< variance of every entry of ζ and ξ
  std::uint64_t seed = 0;
  Eigen::Vector3d x0 = Eigen::Vector3d::Zero();
  InputLaw input;

  void validate() const;
};

/// s_1 ~ π0, s_t | s_{t−1} ~ column s_{t−1} of Π.
ModeSequence simulate_markov_modes(const TransitionMatrix& trans, Index T, std::uint64_t seed);

/// Dataset with true modes and states; states row t is the state paired with u(t), y(t).
Dataset simulate_benchmark(const BenchmarkSpec& spec);
Dataset simulate_benchmark(const BenchmarkSystem& sys, const BenchmarkSpec& spec);

/// Same recursion driven by a model's own networks, Σ1 and Σ2; both noise
/// terms are multiplied by `noise_scale` (0 gives a noise-free trajectory).
Dataset simulate_model(const SwitchingModel& model, Index T, const InputLaw& input,
                       std::uint64_t seed, double noise_scale = 1.0);

/// Noise-free rollout of `model` along fixed modes and inputs; returns T × n_y outputs.
MatrixXd rollout(const SwitchingModel& model, const MatrixXd& u, const ModeSequence& modes);

}  // namespace swid
