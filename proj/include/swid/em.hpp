#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swid/ekf.hpp"
#include "swid/mode_estimation.hpp"
#include "swid/model.hpp"
#include "swid/rng.hpp"

namespace swid {

/// Shapes of the networks created by `initial_model`.
struct NetArchitecture {
  Index n_x = 3;
  std::vector<Index> state_hidden{6};
  std::vector<Index> output_hidden{6};
  Activation hidden_activation = Activation::Arctan;
  Activation output_activation = Activation::Identity;
};

struct IterationRecord;

struct EmConfig {
  int max_iterations = 10;
  WindowConfig window;
  EkfConfig ekf;
  double tol_rel_cost = 1e-4;
  std::uint64_t seed = 0;
  double dirichlet_floor = 1e-3;  ///< ε added to every transition count
  NetArchitecture arch;
  double init_weight_std = 0.1;
  double sigma1 = 1e-3;  ///< Σ1 = sigma1·I
  double sigma2 = 1e-3;  ///< Σ2 = sigma2·I
  std::function<void(const IterationRecord&)> on_iteration;

  void validate() const;
};

struct CostBreakdown {
  double data_nll = 0.0;     ///< innovation NLL including the ½·n_y·log 2π constant
  double param_prior = 0.0;  ///< Gaussian prior N(0, p0_param·I) on every ϑ_k
  double mode_cost = 0.0;    ///< −log π0(s_1) − Σ log π(s_t | s_{t−1})
  double total = 0.0;
};

struct IterationRecord {
  int iteration = 0;
  std::uint64_t seed = 0;  ///< the run's initialization seed
  CostBreakdown cost;
  MatrixXd pi;
  VectorXd pi0;
  Index modes_changed = 0;  ///< vs the previous iteration (T on the first)
  bool params_accepted = true;      ///< the M-step's networks were committed
  bool transitions_accepted = true;  ///< the re-estimated Π, π0 were committed
  double e_step_seconds = 0.0;
  double m_step_seconds = 0.0;
};

enum class StopReason { CostTolerance, ModeFixpoint, MaxIterations, Diverged };
std::string to_string(StopReason r);

struct EmReport {
  std::vector<IterationRecord> iterations;
  ModeSequence modes;
  StopReason stop = StopReason::MaxIterations;
  bool degraded = false;
  double seconds = 0.0;
};

struct EmResult {
  SwitchingModel model;
  ModeSequence modes;
  EmReport report;
};

/// π(j, l) = (ε + #{t ≥ 2 : s_t = j, s_{t−1} = l}) / Σ_j (ε + count); a column
/// with no mass (ε = 0, unused previous mode) is uniform. π0 is the one-hot
/// vector at s_1 smoothed by ε.
TransitionMatrix update_transition(const ModeSequence& decoded, int K, double eps);

/// J = data NLL + r(Θ) + 𝓛(S), the data term from the state-only filter along `modes`.
CostBreakdown total_cost(const SwitchingModel& model, const Dataset& data,
                         const ModeSequence& modes, const EkfConfig& ekf);

/// Θ⁰: weights ~ N(0, init_weight_std²), biases 0, Π and π0 uniform, x0 = 0.
SwitchingModel initial_model(Index n_u, Index n_y, int K, const EmConfig& config);

/// Hard-EM identification. E-step: moving-window decoding under Θᵏ. M-step:
/// transition update from the decoded labels, then `ekf.epochs` EKF sweeps.
/// Each iteration commits the first of (new Θ, new Π), (old Θ, new Π),
/// (old Θ, old Π) whose J does not exceed the committed J, so the committed
/// cost never increases; the EKF belief keeps training either way. A decode
/// that would raise J is replaced by the committed sequence.
EmResult run(const Dataset& data, int K, const EmConfig& config);

/// Runs `restarts` seeds (config.seed + r) in parallel and keeps the lowest final J.
EmResult run_restarts(const Dataset& data, int K, const EmConfig& config, int restarts);

}  // namespace swid
