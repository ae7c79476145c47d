#pragma once

// E-step: MAP decoding of the switching sequence with parameters held fixed.
//
// Every candidate mode at time t is scored by the Gaussian negative
// log-likelihood of the output innovation under a state-only EKF, plus
// −log of the transition probability into it.

#include <cstdint>
#include <vector>

#include "swid/model.hpp"

namespace swid {

struct WindowConfig {
  int length = 3;                            ///< T_w
  std::uint64_t candidate_cap = 1u << 20;    ///< max K^{T_w} (and K^T for exhaustive search)
  double p0_state = 1.0;                     ///< initial state covariance scale
  /// Choose s_1 by a window of length T_w + 1 anchored at π0 instead of the
  /// one-step score; makes T_w = T − 1 identical to the exhaustive search.
  bool lookahead_start = true;

  void validate(Index T) const;
};

/// State-only filter belief; parameters are frozen during decoding.
struct StateBelief {
  VectorXd x;
  MatrixXd P;
};

StateBelief initial_state_belief(const SwitchingModel& model, double p0_state);

struct StepScore {
  double cost = 0.0;  ///< ½ eᵀS⁻¹e + ½ log det S, +∞ when not finite
  StateBelief next;   ///< prior for t+1 after the measurement and time updates
  VectorXd y_pred;    ///< one-step-ahead output prediction
};

/// Scores mode `mode` at one time step and advances the belief under it.
StepScore step_nll(const SwitchingModel& model, int mode, const StateBelief& belief,
                   const Eigen::Ref<const VectorXd>& u, const Eigen::Ref<const VectorXd>& y);

/// −log π(next | prev); prev < 0 selects the initial distribution.
double transition_penalty(const TransitionMatrix& trans, int next, int prev);

struct InitialMode {
  int mode = 0;
  std::vector<double> scores;  ///< step_nll(t=1) − log π0, per mode
};

InitialMode initial_mode(const SwitchingModel& model, const Dataset& data, double p0_state);

struct WindowResult {
  ModeSequence modes;
  double cost = 0.0;
  std::uint64_t candidates = 0;
};

/// Enumerates all K^length sequences over [t, t+length) (0-based t) with
/// s_{t−1} = prev_mode (prev_mode < 0: the window starts the sequence and is
/// anchored at π0). Ties go to the lexicographically smallest sequence.
WindowResult window_decode(const SwitchingModel& model, const Dataset& data,
                           const StateBelief& belief, Index t, int prev_mode, int length,
                           std::uint64_t candidate_cap = 1u << 20);

struct DecodeResult {
  ModeSequence modes;
  std::vector<double> step_costs;  ///< committed step_nll per t
  double transition_cost = 0.0;    ///< −log π0(s_1) − Σ log π(s_t | s_{t−1})
  std::uint64_t candidates = 0;    ///< complete candidate sequences scored
  double total() const;
};

/// Moving-window decoding: commit the first element of each window's winner,
/// and the whole winner of the final window.
DecodeResult moving_window_estimate(const SwitchingModel& model, const Dataset& data,
                                    const WindowConfig& config);

/// Exact MAP sequence by enumerating all K^T sequences; refuses beyond `cap`.
ModeSequence exhaustive_estimate(const SwitchingModel& model, const Dataset& data,
                                 double p0_state, std::uint64_t cap = 1u << 20);

/// Filters along a fixed sequence; the trace of what decoding would commit.
DecodeResult score_sequence(const SwitchingModel& model, const Dataset& data,
                            const ModeSequence& modes, double p0_state);

}  // namespace swid
