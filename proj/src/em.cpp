#include "swid/em.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <mutex>
#include <numbers>

namespace swid {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

NetSpec make_spec(Index in, const std::vector<Index>& hidden, Index out, Activation hidden_act,
                  Activation last_act) {
  NetSpec s;
  s.input_dim = in;
  s.layer_dims = hidden;
  s.layer_dims.push_back(out);
  s.activations.assign(hidden.size(), hidden_act);
  s.activations.push_back(last_act);
  s.output_dim = out;
  return s;
}

NetParams random_params(const NetSpec& spec, double sd, Rng& rng) {
  NetParams p = NetParams::zeros(spec);
  for (auto& l : p.layers)
    for (Index r = 0; r < l.W.rows(); ++r)
      for (Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = sd * rng.normal();
  return p;
}

}  // namespace

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::CostTolerance: return "cost_tolerance";
    case StopReason::ModeFixpoint: return "mode_fixpoint";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::Diverged: return "diverged";
  }
  return "max_iterations";
}

void EmConfig::validate() const {
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(tol_rel_cost >= 0.0)) throw ValidationError("tol_rel_cost must be >= 0");
  if (!(dirichlet_floor >= 0.0)) throw ValidationError("dirichlet_floor must be >= 0");
  if (!(init_weight_std >= 0.0)) throw ValidationError("init_weight_std must be >= 0");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw ValidationError("sigma1 and sigma2 must be > 0");
  if (arch.n_x < 1) throw ValidationError("n_x must be >= 1");
  ekf.validate();
}

TransitionMatrix update_transition(const ModeSequence& decoded, int K, double eps) {
  if (decoded.empty()) throw ValidationError("decoded sequence is empty");
  if (K < 1) throw ValidationError("K must be >= 1");
  if (!(eps >= 0.0)) throw ValidationError("smoothing floor must be >= 0");
  for (int s : decoded)
    if (s < 0 || s >= K) throw ValidationError("decoded label out of range");

  MatrixXd counts = MatrixXd::Zero(K, K);
  for (std::size_t t = 1; t < decoded.size(); ++t) counts(decoded[t], decoded[t - 1]) += 1.0;
  counts.array() += eps;
  TransitionMatrix tr;
  tr.pi.resize(K, K);
  for (Index l = 0; l < K; ++l) {
    double col = 0.0;
    for (Index j = 0; j < K; ++j) col += counts(j, l);
    for (Index j = 0; j < K; ++j)
      tr.pi(j, l) = col > 0.0 ? counts(j, l) / col : 1.0 / static_cast<double>(K);
  }
  tr.pi0 = VectorXd::Constant(K, eps);
  tr.pi0[decoded.front()] += 1.0;
  tr.pi0 /= tr.pi0.sum();
  tr.validate();
  return tr;
}

CostBreakdown total_cost(const SwitchingModel& model, const Dataset& data,
                         const ModeSequence& modes, const EkfConfig& ekf) {
  const DecodeResult trace = score_sequence(model, data, modes, ekf.p0_state);
  CostBreakdown c;
  for (double s : trace.step_costs) c.data_nll += s;
  c.data_nll += 0.5 * static_cast<double>(data.T() * model.n_y()) *
                std::log(2.0 * std::numbers::pi);
  for (const auto& sm : model.submodels) {
    const VectorXd theta = vectorize(sm);
    c.param_prior += 0.5 * theta.squaredNorm() / ekf.p0_param +
                     0.5 * static_cast<double>(theta.size()) *
                         std::log(2.0 * std::numbers::pi * ekf.p0_param);
  }
  c.mode_cost = trace.transition_cost;
  c.total = c.data_nll + c.param_prior + c.mode_cost;
  return c;
}

SwitchingModel initial_model(Index n_u, Index n_y, int K, const EmConfig& config) {
  const auto& a = config.arch;
  Rng rng(config.seed, 100);
  SwitchingModel m;
  for (int k = 0; k < K; ++k) {
    Submodel sm;
    sm.state_net.spec = make_spec(a.n_x + n_u, a.state_hidden, a.n_x, a.hidden_activation,
                                  Activation::Identity);
    sm.output_net.spec = make_spec(a.n_x + n_u, a.output_hidden, n_y, a.hidden_activation,
                                   a.output_activation);
    sm.state_net.params = random_params(sm.state_net.spec, config.init_weight_std, rng);
    sm.output_net.params = random_params(sm.output_net.spec, config.init_weight_std, rng);
    m.submodels.push_back(std::move(sm));
  }
  m.trans = TransitionMatrix::uniform(K);
  m.sigma1 = MatrixXd::Identity(a.n_x, a.n_x) * config.sigma1;
  m.sigma2 = MatrixXd::Identity(n_y, n_y) * config.sigma2;
  m.sigma_theta = config.ekf.sigma_theta0;
  m.x0 = VectorXd::Zero(a.n_x);
  m.validate();
  return m;
}

EmResult run(const Dataset& data, int K, const EmConfig& config) {
  config.validate();
  data.validate();
  if (K < 1) throw ValidationError("K must be >= 1");
  if (data.T() < 2) throw ValidationError("identification needs T >= 2");
  config.window.validate(data.T());
  const auto t_start = Clock::now();

  EmResult res;
  res.model = initial_model(data.n_u(), data.n_y(), K, config);
  AugmentedBelief belief = initial_belief(res.model, config.ekf);
  double committed = std::numeric_limits<double>::infinity();

  for (int it = 0; it < config.max_iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it + 1;
    rec.seed = config.seed;

    auto t0 = Clock::now();
    ModeSequence modes = moving_window_estimate(res.model, data, config.window).modes;
    if (!res.modes.empty() && total_cost(res.model, data, modes, config.ekf).total > committed)
      modes = res.modes;
    rec.e_step_seconds = seconds_since(t0);
    rec.modes_changed = 0;
    for (std::size_t t = 0; t < modes.size(); ++t)
      rec.modes_changed += res.modes.empty() || res.modes[t] != modes[t];

    t0 = Clock::now();
    SwitchingModel next = res.model;
    next.trans = update_transition(modes, K, config.dirichlet_floor);
    TrainResult trained = train_pass(next, data, modes, belief, config.ekf);
    rec.m_step_seconds = seconds_since(t0);
    if (trained.diverged) res.report.degraded = true;
    if (trained.epochs_completed == 0) {
      res.report.stop = StopReason::Diverged;
      if (res.modes.empty()) res.modes = modes;
      break;
    }
    belief = std::move(trained.belief);

    // first candidate whose J does not exceed the committed cost
    const double prev = committed;
    rec.cost = total_cost(trained.model, data, modes, config.ekf);
    if (rec.cost.total <= committed) {
      res.model = std::move(trained.model);
    } else {
      rec.params_accepted = false;
      rec.cost = total_cost(next, data, modes, config.ekf);
      if (rec.cost.total <= committed) {
        res.model = std::move(next);
      } else {
        rec.transitions_accepted = false;
        rec.cost = total_cost(res.model, data, modes, config.ekf);
      }
    }
    committed = rec.cost.total;
    res.modes = std::move(modes);
    rec.pi = res.model.trans.pi;
    rec.pi0 = res.model.trans.pi0;
    res.report.iterations.push_back(rec);
    if (config.on_iteration) config.on_iteration(rec);

    if (trained.diverged) {
      res.report.stop = StopReason::Diverged;
      break;
    }
    // a rejected M-step leaves a still-training belief, so neither test applies
    if (it > 0 && rec.params_accepted) {
      if ((prev - committed) / std::abs(prev) < config.tol_rel_cost) {
        res.report.stop = StopReason::CostTolerance;
        break;
      }
      // labels only count as settled when they were decoded under a fresh Θ
      if (rec.modes_changed == 0 && res.report.iterations.size() >= 2 &&
          res.report.iterations[res.report.iterations.size() - 2].params_accepted) {
        res.report.stop = StopReason::ModeFixpoint;
        break;
      }
    }
    res.report.stop = StopReason::MaxIterations;
  }
  res.report.modes = res.modes;
  res.report.seconds = seconds_since(t_start);
  return res;
}

EmResult run_restarts(const Dataset& data, int K, const EmConfig& config, int restarts) {
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
  std::mutex progress_mutex;
  std::vector<std::future<EmResult>> jobs;
  for (int r = 0; r < restarts; ++r) {
    EmConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(r);
    if (config.on_iteration)
      c.on_iteration = [&progress_mutex, cb = config.on_iteration](const IterationRecord& rec) {
        std::lock_guard lock(progress_mutex);
        cb(rec);
      };
    jobs.push_back(std::async(std::launch::async, [&data, K, c] { return run(data, K, c); }));
  }
  EmResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool have = false;
  for (auto& j : jobs) {
    EmResult r = j.get();
    const double c = r.report.iterations.empty() ? std::numeric_limits<double>::infinity()
                                                 : r.report.iterations.back().cost.total;
    if (!have || c < best_cost) {
      best = std::move(r);
      best_cost = c;
      have = true;
    }
  }
  return best;
}

}  // namespace swid
