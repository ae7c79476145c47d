#include "swid/simulator.hpp"

#include <cmath>

#include "swid/rnn.hpp"

namespace swid {

namespace {

enum Stream : std::uint64_t { kModes = 1, kInputs = 2, kProcess = 3, kMeasurement = 4 };

int sample_categorical(const Eigen::Ref<const VectorXd>& p, double u) {
  // u in (0, 1]; the first index whose cumulative mass reaches u
  double acc = 0.0;
  int last_positive = 0;
  for (Index k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) last_positive = static_cast<int>(k);
    acc += p[k];
    if (p[k] > 0.0 && u <= acc) return static_cast<int>(k);
  }
  return last_positive;
}

}  // namespace

BenchmarkSystem BenchmarkSystem::standard() {
  BenchmarkSystem s;
  s.A[0] << 0.8, 0.2, -0.1,
            0.0, 0.9, 0.1,
            0.1, -0.1, 0.7;
  s.A[1] << 0.5, -0.2, -0.1,
            0.0, 0.9, 0.1,
            -0.1, -0.3, 0.8;
  s.B[0] << -1.0, 0.5, 1.0;
  s.B[1] << -0.5, 0.1, 0.5;
  s.C[0] << -1.0, 1.5, 0.5;
  s.C[1] << -0.1, -0.5, 0.8;
  s.D = {0.1, -0.1};
  s.pi << 0.98, 0.02,
          0.02, 0.98;
  s.pi0 << 0.5, 0.5;
  return s;
}

void BenchmarkSpec::validate() const {
  if (T < 1) throw ValidationError("benchmark needs T >= 1");
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
    throw ValidationError("noise variance must be finite and >= 0");
  if (!(input.lo <= input.hi)) throw ValidationError("input law needs lo <= hi");
}

ModeSequence simulate_markov_modes(const TransitionMatrix& trans, Index T, std::uint64_t seed) {
  trans.validate();
  Rng rng(seed, kModes);
  ModeSequence s(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    const double u = rng.uniform();
    s[static_cast<std::size_t>(t)] =
        t == 0 ? sample_categorical(trans.pi0, u)
               : sample_categorical(trans.pi.col(s[static_cast<std::size_t>(t - 1)]), u);
  }
  return s;
}

Dataset simulate_benchmark(const BenchmarkSpec& spec) {
  return simulate_benchmark(BenchmarkSystem::standard(), spec);
}

Dataset simulate_benchmark(const BenchmarkSystem& sys, const BenchmarkSpec& spec) {
  spec.validate();
  const TransitionMatrix trans{sys.pi, sys.pi0};
  Rng inputs(spec.seed, kInputs), process(spec.seed, kProcess), meas(spec.seed, kMeasurement);
  const double sd = std::sqrt(spec.noise_var);

  Dataset d;
  d.true_modes = simulate_markov_modes(trans, spec.T, spec.seed);
  d.u.resize(spec.T, 1);
  d.y.resize(spec.T, 1);
  d.true_states = MatrixXd(spec.T, 3);
  Eigen::Vector3d x = spec.x0;
  for (Index t = 0; t < spec.T; ++t) {
    const int s = (*d.true_modes)[static_cast<std::size_t>(t)];
    const double u = spec.input.lo == spec.input.hi ? spec.input.lo
                                                    : inputs.uniform(spec.input.lo, spec.input.hi);
    d.u(t, 0) = u;
    d.true_states->row(t) = x.transpose();
    // scalar loops fix the summation order, so results do not depend on SIMD width
    double cy = 0.0;
    for (int j = 0; j < 3; ++j) cy += sys.C[s][j] * std::sin(x[j]);
    d.y(t, 0) = cy + sys.D[s] * u - 2.0 + sd * meas.normal();
    Eigen::Vector3d next;
    for (int i = 0; i < 3; ++i) {
      double a = 0.0;
      for (int j = 0; j < 3; ++j) a += sys.A[s](i, j) * std::tanh(x[j]);
      next[i] = a + sys.B[s][i] * u + sd * process.normal();
    }
    x = next;
  }
  return d;
}

Dataset simulate_model(const SwitchingModel& model, Index T, const InputLaw& input,
                       std::uint64_t seed, double noise_scale) {
  model.validate();
  if (T < 1) throw ValidationError("simulation needs T >= 1");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale))
    throw ValidationError("noise scale must be finite and >= 0");
  Rng inputs(seed, kInputs), process(seed, kProcess), meas(seed, kMeasurement);
  const MatrixXd L1 = MatrixXd(model.sigma1.llt().matrixL()) * std::sqrt(noise_scale);
  const MatrixXd L2 = MatrixXd(model.sigma2.llt().matrixL()) * std::sqrt(noise_scale);
  const Index nx = model.n_x(), nu = model.n_u(), ny = model.n_y();

  Dataset d;
  d.true_modes = simulate_markov_modes(model.trans, T, seed);
  d.u.resize(T, nu);
  d.y.resize(T, ny);
  d.true_states = MatrixXd(T, nx);
  VectorXd x = model.x0;
  VectorXd u(nu), n1(nx), n2(ny);
  for (Index t = 0; t < T; ++t) {
    const auto& sm = model.submodels[static_cast<std::size_t>((*d.true_modes)[static_cast<std::size_t>(t)])];
    for (Index j = 0; j < nu; ++j)
      u[j] = input.lo == input.hi ? input.lo : inputs.uniform(input.lo, input.hi);
    for (Index j = 0; j < ny; ++j) n2[j] = meas.normal();
    for (Index j = 0; j < nx; ++j) n1[j] = process.normal();
    d.u.row(t) = u.transpose();
    d.true_states->row(t) = x.transpose();
    d.y.row(t) = (forward_output(sm.output_net.spec, sm.output_net.params, x, u) + L2 * n2).transpose();
    x = forward_state(sm.state_net.spec, sm.state_net.params, x, u) + L1 * n1;
  }
  return d;
}

MatrixXd rollout(const SwitchingModel& model, const MatrixXd& u, const ModeSequence& modes) {
  if (u.cols() != model.n_u()) throw StructuralError("input dimension mismatch");
  if (static_cast<Index>(modes.size()) != u.rows())
    throw StructuralError("mode sequence length must equal T");
  MatrixXd y(u.rows(), model.n_y());
  VectorXd x = model.x0;
  for (Index t = 0; t < u.rows(); ++t) {
    const auto& sm = model.submodels[static_cast<std::size_t>(modes[static_cast<std::size_t>(t)])];
    const VectorXd ut = u.row(t).transpose();
    y.row(t) = forward_output(sm.output_net.spec, sm.output_net.params, x, ut).transpose();
    x = forward_state(sm.state_net.spec, sm.state_net.params, x, ut);
  }
  return y;
}

}  // namespace swid
