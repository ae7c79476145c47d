#include "swid/ekf.hpp"

#include <cmath>

#include "swid/rnn.hpp"

namespace swid {

void EkfConfig::validate() const {
  if (!(sigma_theta0 > 0.0)) throw ValidationError("sigma_theta0 must be > 0");
  if (!(sigma_theta_decay > 0.0 && sigma_theta_decay <= 1.0))
    throw ValidationError("sigma_theta_decay must lie in (0, 1]");
  if (!(p0_state > 0.0)) throw ValidationError("p0_state must be > 0");
  if (!(p0_param > 0.0)) throw ValidationError("p0_param must be > 0");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(jitter > 0.0)) throw ValidationError("jitter must be > 0");
}

double EkfConfig::sigma_theta(int epoch) const {
  return sigma_theta0 * std::pow(sigma_theta_decay, epoch);
}

AugmentedLayout::AugmentedLayout(const SwitchingModel& model) : n_x_(model.n_x()) {
  Index off = n_x_;
  for (const auto& sm : model.submodels) {
    offsets_.push_back(off);
    state_sizes_.push_back(sm.state_net.spec.num_params());
    output_sizes_.push_back(sm.output_net.spec.num_params());
    off += sm.num_params();
  }
  size_ = off;
}

AugmentedBelief initial_belief(const SwitchingModel& model, const EkfConfig& config) {
  const AugmentedLayout layout(model);
  AugmentedBelief b;
  b.mean.resize(layout.size());
  b.mean.head(layout.n_x()) = model.x0;
  for (int k = 0; k < model.K(); ++k)
    b.mean.segment(layout.param_offset(k), layout.param_size(k)) =
        vectorize(model.submodels[static_cast<std::size_t>(k)]);
  b.cov = MatrixXd::Zero(layout.size(), layout.size());
  b.cov.diagonal().head(layout.n_x()).setConstant(config.p0_state);
  b.cov.diagonal().tail(layout.size() - layout.n_x()).setConstant(config.p0_param);
  return b;
}

Submodel submodel_at(const AugmentedBelief& belief, const SwitchingModel& model, int mode) {
  const AugmentedLayout layout(model);
  Submodel sm = model.submodels[static_cast<std::size_t>(mode)];
  devectorize(belief.mean.segment(layout.param_offset(mode), layout.param_size(mode)), sm);
  return sm;
}

void load_parameters(const AugmentedBelief& belief, SwitchingModel& model) {
  const AugmentedLayout layout(model);
  if (belief.mean.size() != layout.size())
    throw StructuralError("belief dimension does not match the model");
  for (int k = 0; k < model.K(); ++k)
    devectorize(belief.mean.segment(layout.param_offset(k), layout.param_size(k)),
                model.submodels[static_cast<std::size_t>(k)]);
}

namespace {

void check_belief(const AugmentedBelief& b, const AugmentedLayout& layout) {
  if (b.mean.size() != layout.size() || b.cov.rows() != layout.size() ||
      b.cov.cols() != layout.size())
    throw StructuralError("belief dimension does not match the model");
}

void check_mode(const SwitchingModel& model, int mode) {
  if (mode < 0 || mode >= model.K()) throw StructuralError("mode index out of range");
}

}  // namespace

AugmentedBelief predict(AugmentedBelief belief, const SwitchingModel& model, int mode,
                        const Eigen::Ref<const VectorXd>& u, double sigma_theta, long t) {
  check_mode(model, mode);
  const AugmentedLayout layout(model);
  check_belief(belief, layout);
  const Index nx = layout.n_x();
  const Index off = layout.param_offset(mode);
  const Index nf = layout.state_block_size(mode);

  const Submodel sm = submodel_at(belief, model, mode);
  VectorXd x_next;
  const JacobianPair jac = jacobian_state(sm.state_net.spec, sm.state_net.params,
                                          belief.mean.head(nx), u, &x_next);
  const MatrixXd& Fx = jac.d_wrt_state;
  const MatrixXd& Ff = jac.d_wrt_params;

  // F differs from the identity only in its first n_x rows [Fx, 0.., Ff, 0..].
  MatrixXd& P = belief.cov;
  const MatrixXd R = Fx * P.topRows(nx) + Ff * P.middleRows(off, nf);
  const MatrixXd Pxx = R.leftCols(nx) * Fx.transpose() + R.middleCols(off, nf) * Ff.transpose();
  P.topRows(nx) = R;
  P.leftCols(nx) = R.transpose();
  P.topLeftCorner(nx, nx) = Pxx + model.sigma1;
  P.diagonal().segment(off, layout.param_size(mode)).array() += sigma_theta;

  belief.mean.head(nx) = x_next;
  if (!x_next.allFinite() || !Pxx.allFinite())
    throw FilterDivergence("state prediction is not finite", t);
  return belief;
}

Innovation innovation(const AugmentedBelief& prior, const SwitchingModel& model, int mode,
                      const Eigen::Ref<const VectorXd>& u, const Eigen::Ref<const VectorXd>& y) {
  check_mode(model, mode);
  const AugmentedLayout layout(model);
  check_belief(prior, layout);
  if (y.size() != model.n_y()) throw StructuralError("output dimension mismatch");
  const Index nx = layout.n_x();

  const Submodel sm = submodel_at(prior, model, mode);
  Innovation inn;
  const JacobianPair jac = jacobian_output(sm.output_net.spec, sm.output_net.params,
                                           prior.mean.head(nx), u, &inn.y_pred);
  inn.e = y - inn.y_pred;
  inn.H = MatrixXd::Zero(model.n_y(), layout.size());
  inn.H.leftCols(nx) = jac.d_wrt_state;
  inn.H.middleCols(layout.output_offset(mode), layout.output_block_size(mode)) = jac.d_wrt_params;
  return inn;
}

void regularize_covariance(MatrixXd& P, double floor) {
  P = 0.5 * (P + P.transpose()).eval();
  for (Index i = 0; i < P.rows(); ++i)
    if (P(i, i) < floor) P(i, i) = floor;
}

AugmentedBelief update(AugmentedBelief prior, const Eigen::Ref<const VectorXd>& e,
                       const Eigen::Ref<const MatrixXd>& H, const Eigen::Ref<const MatrixXd>& gamma,
                       const Eigen::Ref<const MatrixXd>& sigma2, const EkfConfig& config,
                       long t) {
  const Index n = prior.mean.size();
  if (H.cols() != n || gamma.rows() != n || gamma.cols() != e.size() || H.rows() != e.size())
    throw StructuralError("update operands have inconsistent shapes");
  prior.mean.noalias() += gamma * e;
  MatrixXd& P = prior.cov;
  if (config.joseph_form) {
    MatrixXd A = MatrixXd::Identity(n, n);
    A.noalias() -= gamma * H;
    P = (A * P * A.transpose()).eval();
    P.noalias() += gamma * sigma2 * gamma.transpose();
  } else {
    const MatrixXd HP = H * P;
    P.noalias() -= gamma * HP;
  }
  regularize_covariance(P, config.jitter);
  if (!prior.mean.allFinite() || !P.diagonal().allFinite())
    throw FilterDivergence("posterior is not finite", t);
  return prior;
}

TrainResult train_pass(const SwitchingModel& model, const Dataset& data,
                       const ModeSequence& modes, AugmentedBelief belief,
                       const EkfConfig& config) {
  config.validate();
  const AugmentedLayout layout(model);
  check_belief(belief, layout);
  if (static_cast<Index>(modes.size()) != data.T())
    throw StructuralError("mode sequence length must equal T");
  if (data.n_u() != model.n_u() || data.n_y() != model.n_y())
    throw StructuralError("dataset dimensions do not match the model");

  const Index nx = layout.n_x();
  const Index T = data.T();
  TrainResult res;
  res.model = model;
  res.belief = belief;
  res.residuals = MatrixXd::Zero(T, model.n_y());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    AugmentedBelief b = res.belief;
    b.mean.head(nx) = model.x0;
    b.cov.topRows(nx).setZero();
    b.cov.leftCols(nx).setZero();
    b.cov.topLeftCorner(nx, nx).diagonal().setConstant(config.p0_state);
    const double lambda = config.sigma_theta(b.epoch);

    MatrixXd residuals(T, model.n_y());
    try {
      for (Index t = 0; t < T; ++t) {
        const int s = modes[static_cast<std::size_t>(t)];
        const VectorXd u = data.u.row(t).transpose();
        const Innovation inn = innovation(b, model, s, u, data.y.row(t).transpose());
        residuals.row(t) = inn.e.transpose();
        const MatrixXd G = gain(b.cov, inn.H, model.sigma2, t);
        b = update(std::move(b), inn.e, inn.H, G, model.sigma2, config, t);
        b = predict(std::move(b), model, s, u, lambda, t);
      }
    } catch (const FilterDivergence& err) {
      res.diverged = true;
      res.divergence_time = err.time_index();
      break;
    }
    ++b.epoch;
    res.belief = std::move(b);
    res.residuals = std::move(residuals);
    res.epoch_mse.push_back(res.residuals.rowwise().squaredNorm().mean());
    res.model.sigma_theta = lambda;
    ++res.epochs_completed;
  }
  load_parameters(res.belief, res.model);
  return res;
}

}  // namespace swid
