#include <doctest.h>

#include "oracles.hpp"
#include "swid/ekf.hpp"
#include "swid/rnn.hpp"

using namespace swid;

namespace {

// x+ = a·x + b·u, y = c·x: one linear layer each, n_x = n_u = n_y = 1.
SwitchingModel scalar_model(double a, double b, double c) {
  SwitchingModel m;
  Submodel sm;
  sm.state_net.spec = oracle::spec(2, {1}, {Activation::Identity});
  sm.output_net.spec = oracle::spec(2, {1}, {Activation::Identity});
  sm.state_net.params = NetParams::zeros(sm.state_net.spec);
  sm.output_net.params = NetParams::zeros(sm.output_net.spec);
  sm.state_net.params.layers[0].W << a, b;
  sm.output_net.params.layers[0].W << c, 0.0;
  m.submodels.push_back(sm);
  m.trans = TransitionMatrix::uniform(1);
  m.sigma1 = MatrixXd::Constant(1, 1, 0.1);
  m.sigma2 = MatrixXd::Constant(1, 1, 1.0);
  m.x0 = VectorXd::Zero(1);
  return m;
}

AugmentedBelief random_belief(const SwitchingModel& m, Rng& rng) {
  AugmentedBelief b = initial_belief(m, EkfConfig{});
  b.mean.head(m.n_x()) = oracle::random_vector(m.n_x(), rng);
  b.cov = oracle::random_spd(b.mean.size(), rng, 0.5) * 0.1;
  b.cov = (0.5 * (b.cov + b.cov.transpose())).eval();  // exactly symmetric
  return b;
}

// Dense F = I with the first n_x rows replaced by [Fx, 0.., Ff, 0..].
MatrixXd dense_transition(const AugmentedBelief& b, const SwitchingModel& m, int mode,
                          const VectorXd& u) {
  const AugmentedLayout L(m);
  const Submodel sm = submodel_at(b, m, mode);
  const auto J = jacobian_state(sm.state_net.spec, sm.state_net.params, b.mean.head(m.n_x()), u);
  MatrixXd F = MatrixXd::Identity(L.size(), L.size());
  F.topRows(m.n_x()).setZero();
  F.topLeftCorner(m.n_x(), m.n_x()) = J.d_wrt_state;
  F.block(0, L.param_offset(mode), m.n_x(), L.state_block_size(mode)) = J.d_wrt_params;
  return F;
}

}  // namespace

TEST_SUITE("ekf") {

TEST_CASE("scalar predict adds the process noise") {
  SwitchingModel m = scalar_model(1.0, 0.0, 1.0);
  AugmentedBelief b = initial_belief(m, EkfConfig{});
  b.cov.setZero();
  b.cov(0, 0) = 1.0;
  const AugmentedBelief p = predict(b, m, 0, VectorXd::Zero(1), 0.0);
  CHECK(p.cov(0, 0) == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("noise-free predict with P = I gives F Fᵀ") {
  Rng rng(2);
  SwitchingModel m = oracle::random_model(2, 2, 1, 1, 0, Activation::Identity, rng);
  m.sigma1.setZero();
  AugmentedBelief b = initial_belief(m, EkfConfig{});
  b.cov.setIdentity();
  const VectorXd u = oracle::random_vector(1, rng);
  const MatrixXd F = dense_transition(b, m, 1, u);
  const AugmentedBelief p = predict(b, m, 1, u, 0.0);
  CHECK((p.cov - F * F.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("structured predict matches a dense textbook time update") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    SwitchingModel m = oracle::random_model(3, 2 + trial % 2, 1, 1, 4, Activation::Tanh, rng);
    const AugmentedLayout L(m);
    AugmentedBelief b = random_belief(m, rng);
    const VectorXd u = oracle::random_vector(1, rng);
    const int mode = trial % 3;
    const double lambda = 1e-3;
    const MatrixXd F = dense_transition(b, m, mode, u);
    MatrixXd Q = MatrixXd::Zero(L.size(), L.size());
    Q.topLeftCorner(m.n_x(), m.n_x()) = m.sigma1;
    Q.diagonal().segment(L.param_offset(mode), L.param_size(mode)).setConstant(lambda);
    const MatrixXd expected = F * b.cov * F.transpose() + Q;
    const Submodel sm = submodel_at(b, m, mode);
    const VectorXd x_next = forward_state(sm.state_net.spec, sm.state_net.params, b.mean.head(m.n_x()), u);

    const AugmentedBelief p = predict(b, m, mode, u, lambda);
    CHECK((p.cov - expected).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p.mean.head(m.n_x()) - x_next).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(p.mean.tail(L.size() - m.n_x()) == b.mean.tail(L.size() - m.n_x()));
  }
}

TEST_CASE("innovation: perfect prediction, constant H, zero inactive blocks") {
  Rng rng(7);
  SwitchingModel m = oracle::random_model(2, 2, 1, 1, 0, Activation::Identity, rng);
  const AugmentedLayout L(m);
  AugmentedBelief b = initial_belief(m, EkfConfig{});
  const VectorXd u = oracle::random_vector(1, rng);
  const Submodel& sm = m.submodels[1];
  const VectorXd y = forward_output(sm.output_net.spec, sm.output_net.params, b.mean.head(2), u);
  const Innovation a = innovation(b, m, 1, u, y);
  CHECK(a.e.isZero(0.0));
  b.mean.head(2) = oracle::random_vector(2, rng);
  const Innovation c = innovation(b, m, 1, u, y);
  CHECK(c.H.leftCols(2) == a.H.leftCols(2));
  CHECK(c.H.middleCols(L.param_offset(0), L.param_size(0)).isZero(0.0));
  CHECK(c.H.middleCols(L.param_offset(1), L.state_block_size(1)).isZero(0.0));
  CHECK_FALSE(c.H.middleCols(L.output_offset(1), L.output_block_size(1)).isZero(0.0));
}

TEST_CASE("scalar gain and its large-noise limit") {
  const MatrixXd one = MatrixXd::Ones(1, 1);
  CHECK(gain(one, one, one)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gain(one, one, MatrixXd::Constant(1, 1, 1e12)).norm() < 1e-10);
  CHECK_THROWS_AS(gain(one, one, MatrixXd::Constant(1, 1, -5.0)), FilterDivergence);
}

TEST_CASE("gain equals the information form") {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 1 + trial % 12, m = 1 + trial % 4;
    const MatrixXd P = oracle::random_spd(n, rng);
    const MatrixXd S2 = oracle::random_spd(m, rng);
    const MatrixXd H = oracle::random_matrix(m, n, rng);
    const MatrixXd info = (P.inverse() + H.transpose() * S2.inverse() * H).inverse() * H.transpose() * S2.inverse();
    const MatrixXd G = gain(P, H, S2);
    CHECK((G - info).norm() / info.norm() < 1e-8);
  }
}

TEST_CASE("zero gain leaves the belief unchanged") {
  Rng rng(5);
  SwitchingModel m = oracle::random_model(2, 2, 1, 1, 3, Activation::Tanh, rng);
  const AugmentedBelief b = random_belief(m, rng);
  const MatrixXd H = oracle::random_matrix(1, b.mean.size(), rng);
  const AugmentedBelief post = update(b, VectorXd::Ones(1), H, MatrixXd::Zero(b.mean.size(), 1), m.sigma2, EkfConfig{});
  CHECK(post.mean == b.mean);
  CHECK(post.cov == b.cov);
}

TEST_CASE("scalar update chain") {
  SwitchingModel m = scalar_model(1.0, 0.0, 1.0);
  AugmentedBelief b = initial_belief(m, EkfConfig{});
  b.cov.setZero();
  b.cov(0, 0) = 1.1;
  MatrixXd H = MatrixXd::Zero(1, b.mean.size());
  H(0, 0) = 1.0;
  const MatrixXd G = gain(b.cov, H, m.sigma2);
  CHECK(G(0, 0) == doctest::Approx(11.0 / 21.0).epsilon(1e-15));
  const AugmentedBelief post = update(b, VectorXd::Ones(1), H, G, m.sigma2, EkfConfig{});
  CHECK(post.cov(0, 0) == doctest::Approx((1.0 - 11.0 / 21.0) * 1.1).epsilon(1e-14));
  CHECK(post.mean[0] == doctest::Approx(11.0 / 21.0).epsilon(1e-15));
}

TEST_CASE("short form, long form and Joseph form agree at the optimal gain") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + trial % 20, m = 1 + trial % 3;
    AugmentedBelief b{oracle::random_vector(n, rng), oracle::random_spd(n, rng), 0};
    const MatrixXd S2 = oracle::random_spd(m, rng);
    const MatrixXd H = oracle::random_matrix(m, n, rng);
    const MatrixXd G = gain(b.cov, H, S2);
    const MatrixXd& P = b.cov;
    const MatrixXd longform = P - G * H * P - P * H.transpose() * G.transpose() + G * (H * P * H.transpose() + S2) * G.transpose();
    EkfConfig joseph;
    joseph.joseph_form = true;
    const AugmentedBelief a = update(b, VectorXd::Zero(m), H, G, S2, EkfConfig{});
    const AugmentedBelief j = update(b, VectorXd::Zero(m), H, G, S2, joseph);
    CHECK((a.cov - longform).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((j.cov - longform).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("regularization symmetrizes and floors the diagonal") {
  MatrixXd P(2, 2);
  P << 1e-20, 2.0, 1.0, 3.0;
  regularize_covariance(P, 1e-12);
  CHECK(P(0, 1) == 1.5);
  CHECK(P(1, 0) == 1.5);
  CHECK(P(0, 0) == 1e-12);
}

TEST_CASE("process-noise schedule decays per epoch") {
  EkfConfig c;
  CHECK(c.sigma_theta(0) == 1e-2);
  CHECK(c.sigma_theta(2) == doctest::Approx(1e-2 * 0.81));
  c.p0_param = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("linear single-mode training drives the residual down") {
  // truth: x+ = 0.6x + 0.8u, y = 1.5x; the learned model starts elsewhere
  const SwitchingModel truth = scalar_model(0.6, 0.8, 1.5);
  Rng rng(9);
  Dataset d;
  d.u = MatrixXd(200, 1);
  for (Index t = 0; t < 200; ++t) d.u(t, 0) = rng.uniform();
  d.y = MatrixXd(200, 1);
  double x = 0.0;
  for (Index t = 0; t < 200; ++t) {
    d.y(t, 0) = 1.5 * x;
    x = 0.6 * x + 0.8 * d.u(t, 0);
  }
  SwitchingModel m = scalar_model(0.3, 0.5, 1.0);
  m.sigma1(0, 0) = 1e-8;
  m.sigma2(0, 0) = 1e-6;
  EkfConfig c;
  c.epochs = 10;
  c.sigma_theta0 = 1e-4;
  c.p0_state = 1e-6;
  const ModeSequence modes(200, 0);
  const TrainResult r = train_pass(m, d, modes, initial_belief(m, c), c);
  REQUIRE(r.epochs_completed == 10);
  CHECK_FALSE(r.diverged);
  // non-increasing until the residual reaches round-off
  for (std::size_t e = 1; e < r.epoch_mse.size(); ++e)
    CHECK((r.epoch_mse[e] <= r.epoch_mse[e - 1] || r.epoch_mse[e] < 1e-24));
  CHECK(r.epoch_mse.back() < 1e-6);
  CHECK(r.belief.epoch == 10);
}

TEST_CASE("a single-sample dataset trains without error") {
  SwitchingModel m = scalar_model(0.5, 1.0, 1.0);
  Dataset d{MatrixXd::Ones(1, 1), MatrixXd::Constant(1, 1, 0.3), {}, {}, {}};
  EkfConfig c;
  c.epochs = 1;
  const TrainResult r = train_pass(m, d, {0}, initial_belief(m, c), c);
  CHECK(r.epochs_completed == 1);
  CHECK(r.residuals(0, 0) == doctest::Approx(0.3));
}

TEST_CASE("an inactive submodel keeps its block when uncorrelated") {
  Rng rng(12);
  SwitchingModel m = oracle::random_model(1, 2, 1, 1, 4, Activation::Tanh, rng);
  m.submodels.push_back(m.submodels[0]);
  m.trans = TransitionMatrix::uniform(2);
  const Dataset d = [&] {
    Dataset out;
    out.u = oracle::random_matrix(50, 1, rng);
    out.y = oracle::random_matrix(50, 1, rng, 0.3);
    return out;
  }();
  EkfConfig c;
  c.epochs = 3;
  const AugmentedBelief b0 = initial_belief(m, c);
  const TrainResult r = train_pass(m, d, ModeSequence(50, 0), b0, c);
  const AugmentedLayout L(m);
  const Index o = L.param_offset(1), n = L.param_size(1);
  CHECK(r.belief.mean.segment(o, n) == b0.mean.segment(o, n));
  CHECK(r.belief.cov.block(o, o, n, n) == b0.cov.block(o, o, n, n));
  CHECK(r.model.submodels[1] == m.submodels[1]);
  CHECK_FALSE(r.model.submodels[0] == m.submodels[0]);
}

TEST_CASE("divergence keeps the last stable parameters") {
  SwitchingModel m = scalar_model(0.5, 1.0, 1.0);
  Dataset d{MatrixXd::Ones(3, 1), MatrixXd::Constant(3, 1, 1e300), {}, {}, {}};
  d.y(2, 0) = std::numeric_limits<double>::infinity();
  EkfConfig c;
  c.epochs = 2;
  const TrainResult r = train_pass(m, d, {0, 0, 0}, initial_belief(m, c), c);
  CHECK(r.diverged);
  CHECK(r.epochs_completed == 0);
  CHECK(r.divergence_time >= 0);
  CHECK(r.model == m);
}

}
