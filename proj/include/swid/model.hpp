#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swid/errors.hpp"

namespace swid {

using Index = Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Activation { Tanh, Arctan, Relu, Sigmoid, Identity };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Layer shapes and activations of one feedforward network.
///
/// Layer i maps a vector of width layer_dims[i-1] (input_dim for i = 0) to
/// layer_dims[i]. A state network (next-state map) never applies the last
/// activation; an output network does.
struct NetSpec {
  Index input_dim = 0;
  std::vector<Index> layer_dims;
  std::vector<Activation> activations;
  Index output_dim = 0;

  Index num_layers() const { return static_cast<Index>(layer_dims.size()); }
  Index layer_input_dim(Index layer) const {
    return layer == 0 ? input_dim : layer_dims[static_cast<std::size_t>(layer - 1)];
  }
  /// Σ (rows·cols + rows) over all layers.
  Index num_params() const;
  void validate() const;

  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

template <typename Scalar>
struct BasicLayer {
  Matrix<Scalar> W;
  Vector<Scalar> b;
};

template <typename Scalar>
struct BasicNetParams {
  std::vector<BasicLayer<Scalar>> layers;

  static BasicNetParams zeros(const NetSpec& spec) {
    BasicNetParams p;
    p.layers.reserve(spec.layer_dims.size());
    for (Index i = 0; i < spec.num_layers(); ++i) {
      const Index rows = spec.layer_dims[static_cast<std::size_t>(i)];
      p.layers.push_back({Matrix<Scalar>::Zero(rows, spec.layer_input_dim(i)),
                          Vector<Scalar>::Zero(rows)});
    }
    return p;
  }

  template <typename Other>
  BasicNetParams<Other> cast() const {
    BasicNetParams<Other> out;
    for (const auto& l : layers)
      out.layers.push_back({l.W.template cast<Other>(), l.b.template cast<Other>()});
    return out;
  }
};

using Layer = BasicLayer<double>;
using NetParams = BasicNetParams<double>;

bool operator==(const NetParams& a, const NetParams& b);

/// Throws StructuralError when `params` does not have the shape `spec` declares,
/// ValidationError when an entry is not finite.
void check_shapes(const NetSpec& spec, const NetParams& params);

struct Net {
  NetSpec spec;
  NetParams params;

  friend bool operator==(const Net&, const Net&) = default;
};

/// One mode of the switching system: a next-state network and an output network,
/// both reading [x; u].
struct Submodel {
  Net state_net;
  Net output_net;

  Index n_x() const { return state_net.spec.output_dim; }
  Index n_y() const { return output_net.spec.output_dim; }
  Index n_u() const { return state_net.spec.input_dim - n_x(); }
  Index num_params() const {
    return state_net.spec.num_params() + output_net.spec.num_params();
  }
  void validate() const;

  friend bool operator==(const Submodel&, const Submodel&) = default;
};

/// Mode transition probabilities, stored as pi(next, prev); every column sums to 1.
struct TransitionMatrix {
  MatrixXd pi;
  VectorXd pi0;

  Index K() const { return pi.rows(); }
  static TransitionMatrix uniform(Index K);
  void validate() const;

  friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
    return a.pi == b.pi && a.pi0 == b.pi0;
  }
};

/// Shared column-stochastic validator; throws ValidationError.
void validate_transition(const MatrixXd& pi, const VectorXd& pi0, double tol = 1e-12);

struct SwitchingModel {
  std::vector<Submodel> submodels;
  TransitionMatrix trans;
  MatrixXd sigma1;  ///< process-noise covariance, n_x × n_x
  MatrixXd sigma2;  ///< measurement-noise covariance, n_y × n_y
  double sigma_theta = 1e-2;  ///< parameter random-walk variance scale
  VectorXd x0;

  Index K() const { return static_cast<Index>(submodels.size()); }
  Index n_x() const { return submodels.front().n_x(); }
  Index n_u() const { return submodels.front().n_u(); }
  Index n_y() const { return submodels.front().n_y(); }
  void validate() const;

  friend bool operator==(const SwitchingModel& a, const SwitchingModel& b) {
    return a.submodels == b.submodels && a.trans == b.trans && a.sigma1 == b.sigma1 &&
           a.sigma2 == b.sigma2 && a.sigma_theta == b.sigma_theta && a.x0 == b.x0;
  }
};

/// Decoded or true mode per time step, 0-based internally (files use 1..K).
using ModeSequence = std::vector<int>;

struct Dataset {
  MatrixXd u;  ///< T × n_u
  MatrixXd y;  ///< T × n_y
  std::optional<ModeSequence> true_modes;
  /// Row t holds the state that produced y(t) together with u(t).
  std::optional<MatrixXd> true_states;
  std::optional<double> sample_period;

  Index T() const { return u.rows(); }
  Index n_u() const { return u.cols(); }
  Index n_y() const { return y.cols(); }
  bool has_outputs() const { return y.cols() > 0; }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Parameter vectorization.
//
// Layout of one submodel's ParamVector: the state network first, then the
// output network; inside a network, layers in order, and inside a layer the
// weight matrix row-major followed by the bias vector.
// ---------------------------------------------------------------------------

enum class NetRole { State, Output };

struct ParamLayout {
  NetSpec state_spec;
  NetSpec output_spec;

  explicit ParamLayout(const Submodel& sm)
      : state_spec(sm.state_net.spec), output_spec(sm.output_net.spec) {}

  Index state_size() const { return state_spec.num_params(); }
  Index output_size() const { return output_spec.num_params(); }
  Index size() const { return state_size() + output_size(); }
  /// Flat offset of W(row, col) of `layer` in net `role`.
  Index weight_offset(NetRole role, Index layer, Index row, Index col) const;
  /// Flat offset of b(row) of `layer` in net `role`.
  Index bias_offset(NetRole role, Index layer, Index row) const;

 private:
  Index layer_base(NetRole role, Index layer) const;
};

/// Flattened network parameters in the layout above (single net).
VectorXd vectorize(const NetSpec& spec, const NetParams& params);
NetParams devectorize(const NetSpec& spec, const Eigen::Ref<const VectorXd>& flat);

/// ϑ = [vec(θ_f); vec(θ_g)] for one submodel.
VectorXd vectorize(const Submodel& sm);
/// Overwrites the parameters of `sm` from ϑ; throws StructuralError on length mismatch.
void devectorize(const Eigen::Ref<const VectorXd>& flat, Submodel& sm);

}  // namespace swid
