#pragma once

#include <optional>
#include <vector>

#include "swid/mode_estimation.hpp"
#include "swid/model.hpp"

namespace swid {

/// (1/T) Σ_t ‖y(t) − ŷ(t)‖².
double mse(const MatrixXd& y_true, const MatrixXd& y_pred);

/// 100·(1 − sqrt(Σ‖y − ŷ‖² / Σ‖y − ȳ‖²)) with ȳ the mean of y_true; negative
/// for predictors worse than the mean. Throws ValidationError on constant y_true.
double bfr(const MatrixXd& y_true, const MatrixXd& y_pred);

struct ModeMatch {
  double percent = 0.0;
  std::vector<int> permutation;  ///< permutation[estimated label] = true label
};

/// Best match rate over all relabelings of `est` (K ≤ 6).
ModeMatch mode_match(const ModeSequence& truth, const ModeSequence& est, int K);

/// Applies a ModeMatch permutation to an estimated sequence.
ModeSequence relabel(const ModeSequence& est, const std::vector<int>& permutation);

enum class PredictionKind { OneStep, Rollout };

struct Predictions {
  MatrixXd y_pred;
  ModeSequence modes;
};

/// One-step-ahead predictions ŷ(t) from the state-only filter prior at t.
MatrixXd one_step_predictions(const SwitchingModel& model, const Dataset& data,
                              const ModeSequence& modes, double p0_state);

/// Decodes modes (moving window) when outputs are available, else uses the
/// dataset's modes or the most probable chain, then predicts.
Predictions predict(const SwitchingModel& model, const Dataset& data, const WindowConfig& window,
                    PredictionKind kind);

struct EvalResult {
  double mse = 0.0;
  double bfr = 0.0;
  std::optional<ModeMatch> mode_match;
  std::vector<double> squared_error;  ///< ‖y(t) − ŷ(t)‖² per t
  Predictions predictions;
};

EvalResult evaluate(const SwitchingModel& model, const Dataset& data, const WindowConfig& window,
                    PredictionKind kind = PredictionKind::OneStep);

}  // namespace swid
