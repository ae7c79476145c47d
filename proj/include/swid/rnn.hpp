#pragma once

// Forward evaluation and analytic Jacobians of the per-mode networks.
//
// A state network computes
//   h1 = W1 [x; u] + b1,  h(i+1) = W(i+1) f_i(h_i) + b(i+1),  x+ = h_L
// (no activation after the last affine layer). An output network uses the
// same recursion and additionally applies its last activation: y = g_L(h_L).

#include <Eigen/Dense>

#include <cmath>

#include "swid/model.hpp"

namespace swid {

template <typename Scalar>
Scalar activate(Activation a, Scalar z) {
  using std::atan;
  using std::exp;
  using std::tanh;
  switch (a) {
    case Activation::Tanh: return tanh(z);
    case Activation::Arctan: return atan(z);
    case Activation::Relu: return z > Scalar(0) ? z : Scalar(0);
    case Activation::Sigmoid:
      if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
      else {
        const Scalar e = exp(z);
        return e / (Scalar(1) + e);
      }
    case Activation::Identity: return z;
  }
  return z;
}

/// a'(z); relu'(0) is 0.
template <typename Scalar>
Scalar activate_derivative(Activation a, Scalar z) {
  switch (a) {
    case Activation::Tanh: {
      const Scalar t = std::tanh(z);
      return Scalar(1) - t * t;
    }
    case Activation::Arctan: return Scalar(1) / (Scalar(1) + z * z);
    case Activation::Relu: return z > Scalar(0) ? Scalar(1) : Scalar(0);
    case Activation::Sigmoid: {
      const Scalar s = activate(Activation::Sigmoid, z);
      return s * (Scalar(1) - s);
    }
    case Activation::Identity: return Scalar(1);
  }
  return Scalar(1);
}

template <typename Scalar>
struct BasicJacobianPair {
  Matrix<Scalar> d_wrt_state;   ///< out_dim × n_x
  Matrix<Scalar> d_wrt_params;  ///< out_dim × net params, ParamVector column order
};

using JacobianPair = BasicJacobianPair<double>;

namespace detail {

template <typename Scalar, typename DerivedX, typename DerivedU>
Vector<Scalar> stack_input(const NetSpec& spec, const Eigen::MatrixBase<DerivedX>& x,
                           const Eigen::MatrixBase<DerivedU>& u, Index n_x) {
  if (x.size() != n_x || x.size() + u.size() != spec.input_dim)
    throw StructuralError("network input [x; u] has dimension " +
                          std::to_string(x.size() + u.size()) + ", expected " +
                          std::to_string(spec.input_dim));
  Vector<Scalar> in(spec.input_dim);
  in << x.template cast<Scalar>(), u.template cast<Scalar>();
  return in;
}

template <typename Scalar>
void check_params(const NetSpec& spec, const BasicNetParams<Scalar>& p) {
  if (static_cast<Index>(p.layers.size()) != spec.num_layers())
    throw StructuralError("parameter layer count does not match net spec");
}

/// Runs the layer recursion, keeping pre-activations and layer inputs.
template <typename Scalar>
Vector<Scalar> run_layers(const NetSpec& spec, const BasicNetParams<Scalar>& p,
                          Vector<Scalar> a, bool final_activation,
                          std::vector<Vector<Scalar>>* inputs,
                          std::vector<Vector<Scalar>>* pre) {
  check_params(spec, p);
  const Index L = spec.num_layers();
  for (Index i = 0; i < L; ++i) {
    const auto& layer = p.layers[static_cast<std::size_t>(i)];
    if (layer.W.cols() != a.size()) throw StructuralError("layer width mismatch");
    Vector<Scalar> h = layer.W * a + layer.b;
    if (inputs) inputs->push_back(a);
    if (pre) pre->push_back(h);
    const Activation act = spec.activations[static_cast<std::size_t>(i)];
    if (i + 1 < L || final_activation)
      a = h.unaryExpr([act](Scalar z) { return activate(act, z); });
    else
      a = std::move(h);
  }
  return a;
}

template <typename Scalar>
BasicJacobianPair<Scalar> backward(const NetSpec& spec, const BasicNetParams<Scalar>& p,
                                   Index n_x, bool final_activation,
                                   const std::vector<Vector<Scalar>>& inputs,
                                   const std::vector<Vector<Scalar>>& pre) {
  const Index L = spec.num_layers();
  const Index out = spec.output_dim;
  BasicJacobianPair<Scalar> jac;
  jac.d_wrt_params = Matrix<Scalar>::Zero(out, spec.num_params());

  // G = d out / d h_i for the current layer i.
  Matrix<Scalar> G;
  if (final_activation) {
    const Activation act = spec.activations.back();
    G = pre.back()
            .unaryExpr([act](Scalar z) { return activate_derivative(act, z); })
            .asDiagonal();
  } else {
    G = Matrix<Scalar>::Identity(out, out);
  }

  Index offset = spec.num_params();
  for (Index i = L - 1; i >= 0; --i) {
    const auto& layer = p.layers[static_cast<std::size_t>(i)];
    const auto& a = inputs[static_cast<std::size_t>(i)];
    const Index rows = layer.W.rows(), cols = layer.W.cols();
    offset -= rows * cols + rows;
    for (Index r = 0; r < rows; ++r)
      jac.d_wrt_params.block(0, offset + r * cols, out, cols) = G.col(r) * a.transpose();
    jac.d_wrt_params.block(0, offset + rows * cols, out, rows) = G;

    Matrix<Scalar> through = G * layer.W;
    if (i == 0) {
      jac.d_wrt_state = through.leftCols(n_x);
    } else {
      const Activation act = spec.activations[static_cast<std::size_t>(i - 1)];
      const Vector<Scalar> d = pre[static_cast<std::size_t>(i - 1)].unaryExpr(
          [act](Scalar z) { return activate_derivative(act, z); });
      G = through * d.asDiagonal();
    }
  }
  return jac;
}

}  // namespace detail

/// Next-state mean of a state network (affine last layer).
template <typename Scalar, typename DerivedX, typename DerivedU>
Vector<Scalar> forward_state(const NetSpec& spec, const BasicNetParams<Scalar>& params,
                             const Eigen::MatrixBase<DerivedX>& x,
                             const Eigen::MatrixBase<DerivedU>& u) {
  return detail::run_layers<Scalar>(spec, params,
                            detail::stack_input<Scalar>(spec, x, u, spec.output_dim), false,
                            nullptr, nullptr);
}

/// Output mean of an output network; `n_x` is the state width inside [x; u].
template <typename Scalar, typename DerivedX, typename DerivedU>
Vector<Scalar> forward_output(const NetSpec& spec, const BasicNetParams<Scalar>& params,
                              const Eigen::MatrixBase<DerivedX>& x,
                              const Eigen::MatrixBase<DerivedU>& u) {
  return detail::run_layers<Scalar>(spec, params,
                            detail::stack_input<Scalar>(spec, x, u, x.size()), true,
                            nullptr, nullptr);
}

template <typename Scalar, typename DerivedX, typename DerivedU>
BasicJacobianPair<Scalar> jacobian_state(const NetSpec& spec,
                                         const BasicNetParams<Scalar>& params,
                                         const Eigen::MatrixBase<DerivedX>& x,
                                         const Eigen::MatrixBase<DerivedU>& u,
                                         Vector<Scalar>* value = nullptr) {
  std::vector<Vector<Scalar>> inputs, pre;
  Vector<Scalar> v = detail::run_layers<Scalar>(
      spec, params, detail::stack_input<Scalar>(spec, x, u, spec.output_dim), false, &inputs,
      &pre);
  if (value) *value = std::move(v);
  return detail::backward(spec, params, spec.output_dim, false, inputs, pre);
}

template <typename Scalar, typename DerivedX, typename DerivedU>
BasicJacobianPair<Scalar> jacobian_output(const NetSpec& spec,
                                          const BasicNetParams<Scalar>& params,
                                          const Eigen::MatrixBase<DerivedX>& x,
                                          const Eigen::MatrixBase<DerivedU>& u,
                                          Vector<Scalar>* value = nullptr) {
  std::vector<Vector<Scalar>> inputs, pre;
  Vector<Scalar> v = detail::run_layers<Scalar>(
      spec, params, detail::stack_input<Scalar>(spec, x, u, x.size()), true, &inputs, &pre);
  if (value) *value = std::move(v);
  return detail::backward(spec, params, x.size(), true, inputs, pre);
}

}  // namespace swid
