#pragma once

// Joint state/parameter extended Kalman filter over the augmented vector
// [x; ϑ_1; …; ϑ_K]. Each step only the active mode's blocks carry nonzero
// Jacobian entries, so a single sweep over a mixed-mode trajectory trains
// every submodel on the samples assigned to it.

#include <Eigen/Dense>

#include <vector>

#include "swid/model.hpp"

namespace swid {

struct EkfConfig {
  double sigma_theta0 = 1e-2;      ///< parameter random-walk variance at epoch 0
  double sigma_theta_decay = 0.9;  ///< per-epoch multiplier of that variance
  double p0_state = 1.0;           ///< initial state covariance scale
  double p0_param = 0.1;           ///< initial parameter covariance scale
  int epochs = 10;
  double jitter = 1e-12;  ///< floor for covariance diagonal entries
  bool joseph_form = false;

  void validate() const;
  /// Σϑ used during the given (0-based, cumulative) epoch.
  double sigma_theta(int epoch) const;
};

/// Block offsets inside the augmented vector.
class AugmentedLayout {
 public:
  explicit AugmentedLayout(const SwitchingModel& model);

  Index n_x() const { return n_x_; }
  Index size() const { return size_; }
  Index K() const { return static_cast<Index>(offsets_.size()); }
  /// Start of ϑ_k (its state-net block); the output-net block follows.
  Index param_offset(int k) const { return offsets_[static_cast<std::size_t>(k)]; }
  Index state_block_size(int k) const { return state_sizes_[static_cast<std::size_t>(k)]; }
  Index output_block_size(int k) const { return output_sizes_[static_cast<std::size_t>(k)]; }
  Index param_size(int k) const { return state_block_size(k) + output_block_size(k); }
  Index output_offset(int k) const { return param_offset(k) + state_block_size(k); }

 private:
  Index n_x_ = 0;
  Index size_ = 0;
  std::vector<Index> offsets_, state_sizes_, output_sizes_;
};

struct AugmentedBelief {
  VectorXd mean;
  MatrixXd cov;
  int epoch = 0;
};

/// Mean [x0; ϑ_1; …; ϑ_K] from the model, covariance blockdiag(p0_state·I, p0_param·I).
AugmentedBelief initial_belief(const SwitchingModel& model, const EkfConfig& config);

/// Submodel `mode` with its parameters read from the belief mean.
Submodel submodel_at(const AugmentedBelief& belief, const SwitchingModel& model, int mode);
/// Copies every ϑ_k block of the belief mean into the model's networks.
void load_parameters(const AugmentedBelief& belief, SwitchingModel& model);

/// Time update under `mode`: the x-block goes through that submodel's state
/// net, ϑ-blocks are unchanged, P⁻ = F P Fᵀ + blockdiag(Σ1, Σϑ on the active
/// ϑ block, 0 elsewhere).
AugmentedBelief predict(AugmentedBelief belief, const SwitchingModel& model, int mode,
                        const Eigen::Ref<const VectorXd>& u, double sigma_theta, long t = -1);

struct Innovation {
  VectorXd e;       ///< y − ŷ
  MatrixXd H;       ///< n_y × augmented size
  VectorXd y_pred;  ///< ŷ at the prior mean
};

/// Output residual and Jacobian; H is zero over the active ϑ_f block and every
/// inactive submodel.
Innovation innovation(const AugmentedBelief& prior, const SwitchingModel& model, int mode,
                      const Eigen::Ref<const VectorXd>& u, const Eigen::Ref<const VectorXd>& y);

/// Γ = P⁻Hᵀ(HP⁻Hᵀ + Σ2)⁻¹ through a Cholesky solve; throws FilterDivergence
/// when the innovation covariance is not positive definite.
template <typename DerivedP, typename DerivedH, typename DerivedS>
MatrixXd gain(const Eigen::MatrixBase<DerivedP>& P, const Eigen::MatrixBase<DerivedH>& H,
              const Eigen::MatrixBase<DerivedS>& sigma2, long t = -1) {
  const MatrixXd PHt = P * H.transpose();
  const MatrixXd S = H * PHt + sigma2;
  Eigen::LLT<MatrixXd> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite())
    throw FilterDivergence("innovation covariance is not positive definite", t);
  return llt.solve(PHt.transpose()).transpose();
}

/// Measurement update: mean += Γe, cov = (I − ΓH)P⁻ (or the Joseph form),
/// then symmetrized and diagonal-floored at `config.jitter`.
AugmentedBelief update(AugmentedBelief prior, const Eigen::Ref<const VectorXd>& e,
                       const Eigen::Ref<const MatrixXd>& H, const Eigen::Ref<const MatrixXd>& gamma,
                       const Eigen::Ref<const MatrixXd>& sigma2, const EkfConfig& config,
                       long t = -1);

/// Symmetrizes in place and raises diagonal entries below `floor`.
void regularize_covariance(MatrixXd& P, double floor);

struct TrainResult {
  SwitchingModel model;   ///< parameters from the last completed epoch
  AugmentedBelief belief;
  MatrixXd residuals;     ///< T × n_y output residuals of the last completed epoch
  std::vector<double> epoch_mse;
  int epochs_completed = 0;
  bool diverged = false;
  long divergence_time = -1;
};

/// `config.epochs` sweeps over the dataset with the given mode labels. Each
/// epoch starts with the x-block reset to x0 (and its covariance to
/// p0_state·I, uncorrelated); parameter means and covariances persist.
TrainResult train_pass(const SwitchingModel& model, const Dataset& data,
                       const ModeSequence& modes, AugmentedBelief belief,
                       const EkfConfig& config);

}  // namespace swid
