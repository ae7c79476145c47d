#include "swid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swid/simulator.hpp"

namespace swid {

namespace {

void check_pair(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw StructuralError("true and predicted series must have the same shape");
  if (a.rows() == 0) throw ValidationError("series are empty");
}

}  // namespace

double mse(const MatrixXd& y_true, const MatrixXd& y_pred) {
  check_pair(y_true, y_pred);
  return (y_true - y_pred).rowwise().squaredNorm().sum() / static_cast<double>(y_true.rows());
}

double bfr(const MatrixXd& y_true, const MatrixXd& y_pred) {
  check_pair(y_true, y_pred);
  const Eigen::RowVectorXd mean = y_true.colwise().mean();
  const double denom = (y_true.rowwise() - mean).rowwise().squaredNorm().sum();
  if (!(denom > 0.0)) throw ValidationError("BFR is undefined for a constant output series");
  const double num = (y_true - y_pred).rowwise().squaredNorm().sum();
  return 100.0 * (1.0 - std::sqrt(num / denom));
}

ModeMatch mode_match(const ModeSequence& truth, const ModeSequence& est, int K) {
  if (truth.size() != est.size()) throw StructuralError("mode sequences differ in length");
  if (truth.empty()) throw ValidationError("mode sequences are empty");
  if (K < 1) throw ValidationError("K must be >= 1");
  if (K > 6)
    throw ValidationError("label alignment enumerates K! permutations; K > 6 is refused");
  for (std::size_t t = 0; t < truth.size(); ++t)
    if (truth[t] < 0 || truth[t] >= K || est[t] < 0 || est[t] >= K)
      throw ValidationError("mode label out of range 1..K");

  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  ModeMatch best{-1.0, perm};
  do {
    std::size_t hits = 0;
    for (std::size_t t = 0; t < truth.size(); ++t)
      hits += truth[t] == perm[static_cast<std::size_t>(est[t])];
    const double pct = 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
    if (pct > best.percent) best = {pct, perm};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

ModeSequence relabel(const ModeSequence& est, const std::vector<int>& permutation) {
  ModeSequence out(est.size());
  for (std::size_t t = 0; t < est.size(); ++t)
    out[t] = permutation[static_cast<std::size_t>(est[t])];
  return out;
}

MatrixXd one_step_predictions(const SwitchingModel& model, const Dataset& data,
                              const ModeSequence& modes, double p0_state) {
  if (static_cast<Index>(modes.size()) != data.T())
    throw StructuralError("mode sequence length must equal T");
  MatrixXd y(data.T(), model.n_y());
  StateBelief b = initial_state_belief(model, p0_state);
  for (Index t = 0; t < data.T(); ++t) {
    const StepScore s = step_nll(model, modes[static_cast<std::size_t>(t)], b,
                                 data.u.row(t).transpose(), data.y.row(t).transpose());
    y.row(t) = s.y_pred.transpose();
    b = s.next;
  }
  return y;
}

namespace {

ModeSequence most_probable_chain(const TransitionMatrix& trans, Index T) {
  ModeSequence s(static_cast<std::size_t>(T));
  Index k = 0;
  trans.pi0.maxCoeff(&k);
  for (Index t = 0; t < T; ++t) {
    if (t > 0) trans.pi.col(k).maxCoeff(&k);
    s[static_cast<std::size_t>(t)] = static_cast<int>(k);
  }
  return s;
}

}  // namespace

Predictions predict(const SwitchingModel& model, const Dataset& data, const WindowConfig& window,
                    PredictionKind kind) {
  if (data.n_u() != model.n_u()) throw StructuralError("dataset inputs do not match the model");
  Predictions p;
  if (data.has_outputs()) {
    if (data.n_y() != model.n_y()) throw StructuralError("dataset outputs do not match the model");
    p.modes = data.T() >= 2 ? moving_window_estimate(model, data, window).modes
                            : ModeSequence{initial_mode(model, data, window.p0_state).mode};
  } else if (data.true_modes) {
    p.modes = *data.true_modes;
  } else {
    p.modes = most_probable_chain(model.trans, data.T());
  }
  if (kind == PredictionKind::OneStep) {
    if (!data.has_outputs())
      throw ValidationError("one-step-ahead prediction needs measured outputs; use rollout");
    p.y_pred = one_step_predictions(model, data, p.modes, window.p0_state);
  } else {
    p.y_pred = rollout(model, data.u, p.modes);
  }
  return p;
}

EvalResult evaluate(const SwitchingModel& model, const Dataset& data, const WindowConfig& window,
                    PredictionKind kind) {
  if (!data.has_outputs()) throw ValidationError("evaluation needs measured outputs");
  EvalResult r;
  r.predictions = predict(model, data, window, kind);
  r.mse = mse(data.y, r.predictions.y_pred);
  r.bfr = bfr(data.y, r.predictions.y_pred);
  const Eigen::VectorXd se = (data.y - r.predictions.y_pred).rowwise().squaredNorm();
  r.squared_error.assign(se.data(), se.data() + se.size());
  if (data.true_modes) {
    // the truth may use more labels than the model has modes
    int K = static_cast<int>(model.K());
    for (int s : *data.true_modes) K = std::max(K, s + 1);
    r.mode_match = mode_match(*data.true_modes, r.predictions.modes, K);
  }
  return r;
}

}  // namespace swid
