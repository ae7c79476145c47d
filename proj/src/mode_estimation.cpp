#include "swid/mode_estimation.hpp"

#include <cmath>
#include <limits>

#include "swid/rnn.hpp"

namespace swid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t checked_power(Index K, Index n, std::uint64_t cap) {
  std::uint64_t count = 1;
  for (Index i = 0; i < n; ++i) {
    if (count > cap / static_cast<std::uint64_t>(K)) return cap + 1;
    count *= static_cast<std::uint64_t>(K);
  }
  return count;
}

void check_data(const SwitchingModel& model, const Dataset& data) {
  if (data.n_u() != model.n_u() || data.n_y() != model.n_y())
    throw StructuralError("dataset dimensions do not match the model");
  if (data.T() < 1) throw ValidationError("dataset is empty");
}

}  // namespace

void WindowConfig::validate(Index T) const {
  if (length < 1) throw ValidationError("window length must be >= 1");
  if (T >= 2 && length > T - 1)
    throw ValidationError("window length must not exceed T - 1 (T = " + std::to_string(T) + ")");
  if (!(p0_state > 0.0)) throw ValidationError("p0_state must be > 0");
}

StateBelief initial_state_belief(const SwitchingModel& model, double p0_state) {
  return {model.x0, MatrixXd::Identity(model.n_x(), model.n_x()) * p0_state};
}

double transition_penalty(const TransitionMatrix& trans, int next, int prev) {
  const double p = prev < 0 ? trans.pi0[next] : trans.pi(next, prev);
  return p > 0.0 ? -std::log(p) : kInf;
}

StepScore step_nll(const SwitchingModel& model, int mode, const StateBelief& belief,
                   const Eigen::Ref<const VectorXd>& u, const Eigen::Ref<const VectorXd>& y) {
  if (mode < 0 || mode >= model.K()) throw StructuralError("mode index out of range");
  const Submodel& sm = model.submodels[static_cast<std::size_t>(mode)];
  StepScore out;
  const JacobianPair hj =
      jacobian_output(sm.output_net.spec, sm.output_net.params, belief.x, u, &out.y_pred);
  const MatrixXd& Hx = hj.d_wrt_state;
  const VectorXd e = y - out.y_pred;
  const MatrixXd PHt = belief.P * Hx.transpose();
  const MatrixXd S = Hx * PHt + model.sigma2;
  Eigen::LLT<MatrixXd> llt(S);
  if (llt.info() != Eigen::Success || !e.allFinite()) {
    out.cost = kInf;
    out.next = belief;
    return out;
  }
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  out.cost = 0.5 * e.dot(llt.solve(e)) + 0.5 * logdet;

  const MatrixXd G = llt.solve(PHt.transpose()).transpose();
  VectorXd x = belief.x + G * e;
  MatrixXd P = belief.P - G * PHt.transpose();
  P = 0.5 * (P + P.transpose()).eval();

  VectorXd x_next;
  const JacobianPair fj =
      jacobian_state(sm.state_net.spec, sm.state_net.params, x, u, &x_next);
  out.next.x = std::move(x_next);
  out.next.P = fj.d_wrt_state * P * fj.d_wrt_state.transpose() + model.sigma1;
  if (!std::isfinite(out.cost) || !out.next.x.allFinite() || !out.next.P.allFinite())
    out.cost = kInf;
  return out;
}

InitialMode initial_mode(const SwitchingModel& model, const Dataset& data, double p0_state) {
  check_data(model, data);
  const StateBelief b0 = initial_state_belief(model, p0_state);
  InitialMode res;
  double best = kInf;
  for (int k = 0; k < model.K(); ++k) {
    const StepScore s = step_nll(model, k, b0, data.u.row(0).transpose(), data.y.row(0).transpose());
    const double score = s.cost + transition_penalty(model.trans, k, -1);
    res.scores.push_back(score);
    if (score < best) {
      best = score;
      res.mode = k;
    }
  }
  return res;
}

namespace {

struct WindowSearch {
  const SwitchingModel& model;
  const Dataset& data;
  Index t0;
  int length;
  ModeSequence current;
  ModeSequence best;
  double best_cost = kInf;
  std::uint64_t leaves = 0;

  void descend(int depth, const StateBelief& belief, int prev, double acc) {
    if (depth == length) {
      ++leaves;
      if (acc < best_cost) {
        best_cost = acc;
        best = current;
      }
      return;
    }
    const Index t = t0 + depth;
    const int K = static_cast<int>(model.K());
    for (int k = 0; k < K; ++k) {
      current[static_cast<std::size_t>(depth)] = k;
      const double tp = transition_penalty(model.trans, k, prev);
      if (!std::isfinite(acc) || !std::isfinite(tp)) {
        // every completion is +inf; count them without filtering
        std::uint64_t rest = 1;
        for (int d = depth + 1; d < length; ++d) rest *= static_cast<std::uint64_t>(K);
        leaves += rest;
        continue;
      }
      const StepScore s =
          step_nll(model, k, belief, data.u.row(t).transpose(), data.y.row(t).transpose());
      descend(depth + 1, s.next, k, acc + s.cost + tp);
    }
  }
};

}  // namespace

WindowResult window_decode(const SwitchingModel& model, const Dataset& data,
                           const StateBelief& belief, Index t, int prev_mode, int length,
                           std::uint64_t candidate_cap) {
  check_data(model, data);
  if (length < 1 || t < 0 || t + length > data.T())
    throw ValidationError("window exceeds the dataset");
  if (checked_power(model.K(), length, candidate_cap) > candidate_cap)
    throw CapacityError("window enumeration exceeds the candidate cap of " +
                        std::to_string(candidate_cap) + "; use a smaller window length");
  WindowSearch search{model, data, t, length, ModeSequence(static_cast<std::size_t>(length), 0),
                      ModeSequence(static_cast<std::size_t>(length), 0)};
  search.descend(0, belief, prev_mode, 0.0);
  return {search.best, search.best_cost, search.leaves};
}

double DecodeResult::total() const {
  double s = transition_cost;
  for (double c : step_costs) s += c;
  return s;
}

DecodeResult moving_window_estimate(const SwitchingModel& model, const Dataset& data,
                                    const WindowConfig& config) {
  check_data(model, data);
  const Index T = data.T();
  config.validate(T);
  DecodeResult res;
  StateBelief belief = initial_state_belief(model, config.p0_state);

  const auto commit = [&](Index t, int mode) {
    const int prev = t == 0 ? -1 : res.modes.back();
    const StepScore s =
        step_nll(model, mode, belief, data.u.row(t).transpose(), data.y.row(t).transpose());
    res.modes.push_back(mode);
    res.step_costs.push_back(s.cost);
    res.transition_cost += transition_penalty(model.trans, mode, prev);
    belief = s.next;
  };

  if (config.lookahead_start) {
    const int len = static_cast<int>(std::min<Index>(config.length + 1, T));
    const WindowResult w = window_decode(model, data, belief, 0, -1, len, config.candidate_cap);
    res.candidates += w.candidates;
    commit(0, w.modes.front());
  } else {
    res.candidates += static_cast<std::uint64_t>(model.K());
    commit(0, initial_mode(model, data, config.p0_state).mode);
  }
  if (T == 1) return res;

  const Index last = T - config.length;
  for (Index t = 1; t <= last; ++t) {
    const WindowResult w =
        window_decode(model, data, belief, t, res.modes.back(), config.length, config.candidate_cap);
    res.candidates += w.candidates;
    if (t < last) {
      commit(t, w.modes.front());
    } else {
      for (int d = 0; d < config.length; ++d) commit(t + d, w.modes[static_cast<std::size_t>(d)]);
    }
  }
  return res;
}

DecodeResult score_sequence(const SwitchingModel& model, const Dataset& data,
                            const ModeSequence& modes, double p0_state) {
  check_data(model, data);
  if (static_cast<Index>(modes.size()) != data.T())
    throw StructuralError("mode sequence length must equal T");
  DecodeResult res;
  StateBelief belief = initial_state_belief(model, p0_state);
  int prev = -1;
  for (Index t = 0; t < data.T(); ++t) {
    const int s = modes[static_cast<std::size_t>(t)];
    const StepScore sc =
        step_nll(model, s, belief, data.u.row(t).transpose(), data.y.row(t).transpose());
    res.modes.push_back(s);
    res.step_costs.push_back(sc.cost);
    res.transition_cost += transition_penalty(model.trans, s, prev);
    belief = sc.next;
    prev = s;
  }
  return res;
}

ModeSequence exhaustive_estimate(const SwitchingModel& model, const Dataset& data,
                                 double p0_state, std::uint64_t cap) {
  check_data(model, data);
  const Index T = data.T();
  const std::uint64_t total = checked_power(model.K(), T, cap);
  if (total > cap)
    throw CapacityError("exhaustive search over K^T sequences exceeds the limit of " +
                        std::to_string(cap) + "; use moving-window decoding");
  const int K = static_cast<int>(model.K());
  ModeSequence seq(static_cast<std::size_t>(T), 0), best = seq;
  double best_cost = kInf;
  for (std::uint64_t n = 0; n < total; ++n) {
    // odometer with the first time step as the most significant digit
    std::uint64_t r = n;
    for (Index t = T - 1; t >= 0; --t) {
      seq[static_cast<std::size_t>(t)] = static_cast<int>(r % static_cast<std::uint64_t>(K));
      r /= static_cast<std::uint64_t>(K);
    }
    StateBelief belief = initial_state_belief(model, p0_state);
    double acc = 0.0;
    int prev = -1;
    for (Index t = 0; t < T && std::isfinite(acc); ++t) {
      const int s = seq[static_cast<std::size_t>(t)];
      const double tp = transition_penalty(model.trans, s, prev);
      if (!std::isfinite(tp)) {
        acc = kInf;
        break;
      }
      const StepScore sc =
          step_nll(model, s, belief, data.u.row(t).transpose(), data.y.row(t).transpose());
      acc = acc + sc.cost + tp;
      belief = sc.next;
      prev = s;
    }
    if (acc < best_cost) {
      best_cost = acc;
      best = seq;
    }
  }
  return best;
}

}  // namespace swid
