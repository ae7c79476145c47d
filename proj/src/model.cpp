#include "swid/model.hpp"

#include <cmath>
#include <sstream>

namespace swid {

namespace {

bool all_finite(const Eigen::Ref<const MatrixXd>& m) { return m.allFinite(); }

void require_spd(const MatrixXd& m, const char* name) {
  std::ostringstream os;
  if (m.rows() != m.cols() || m.rows() == 0) {
    os << name << " must be a non-empty square matrix";
    throw ValidationError(os.str());
  }
  if (!all_finite(m)) {
    os << name << " has non-finite entries";
    throw ValidationError(os.str());
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
    os << name << " is not symmetric";
    throw ValidationError(os.str());
  }
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    os << name << " is not positive definite";
    throw ValidationError(os.str());
  }
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Arctan: return "arctan";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "arctan" || name == "atan") return Activation::Arctan;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "identity" || name == "linear") return Activation::Identity;
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

Index NetSpec::num_params() const {
  Index n = 0;
  for (Index i = 0; i < num_layers(); ++i) {
    const Index rows = layer_dims[static_cast<std::size_t>(i)];
    n += rows * layer_input_dim(i) + rows;
  }
  return n;
}

void NetSpec::validate() const {
  if (input_dim < 1) throw StructuralError("net input_dim must be >= 1");
  if (layer_dims.empty()) throw StructuralError("net must have at least one layer");
  for (Index d : layer_dims)
    if (d < 1) throw StructuralError("layer widths must be >= 1");
  if (activations.size() != layer_dims.size())
    throw StructuralError("net needs exactly one activation per layer");
  if (layer_dims.back() != output_dim)
    throw StructuralError("last layer width must equal output_dim");
}

bool operator==(const NetParams& a, const NetParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const auto& la = a.layers[i];
    const auto& lb = b.layers[i];
    if (la.W.rows() != lb.W.rows() || la.W.cols() != lb.W.cols() || la.b.size() != lb.b.size())
      return false;
    if (la.W != lb.W || la.b != lb.b) return false;
  }
  return true;
}

void check_shapes(const NetSpec& spec, const NetParams& params) {
  spec.validate();
  if (static_cast<Index>(params.layers.size()) != spec.num_layers())
    throw StructuralError("parameter layer count does not match net spec");
  for (Index i = 0; i < spec.num_layers(); ++i) {
    const auto& l = params.layers[static_cast<std::size_t>(i)];
    const Index rows = spec.layer_dims[static_cast<std::size_t>(i)];
    if (l.W.rows() != rows || l.W.cols() != spec.layer_input_dim(i) || l.b.size() != rows) {
      std::ostringstream os;
      os << "layer " << i << " has shape W " << l.W.rows() << "x" << l.W.cols() << ", b "
         << l.b.size() << "; expected W " << rows << "x" << spec.layer_input_dim(i);
      throw StructuralError(os.str());
    }
    if (!l.W.allFinite() || !l.b.allFinite())
      throw ValidationError("layer " + std::to_string(i) + " has non-finite parameters");
  }
}

void Submodel::validate() const {
  check_shapes(state_net.spec, state_net.params);
  check_shapes(output_net.spec, output_net.params);
  if (state_net.spec.input_dim != output_net.spec.input_dim)
    throw StructuralError("state and output nets must read the same [x; u]");
  if (state_net.spec.input_dim <= n_x())
    throw StructuralError("net input_dim must be n_x + n_u with n_u >= 1");
}

TransitionMatrix TransitionMatrix::uniform(Index K) {
  return {MatrixXd::Constant(K, K, 1.0 / static_cast<double>(K)),
          VectorXd::Constant(K, 1.0 / static_cast<double>(K))};
}

void validate_transition(const MatrixXd& pi, const VectorXd& pi0, double tol) {
  const Index K = pi.rows();
  if (K < 1 || pi.cols() != K || pi0.size() != K)
    throw ValidationError("transition matrix must be K x K with a length-K initial distribution");
  if (!pi.allFinite() || !pi0.allFinite())
    throw ValidationError("transition probabilities must be finite");
  if ((pi.array() < 0.0).any() || (pi0.array() < 0.0).any())
    throw ValidationError("transition probabilities must be nonnegative");
  for (Index l = 0; l < K; ++l) {
    if (std::abs(pi.col(l).sum() - 1.0) > tol)
      throw ValidationError("transition column " + std::to_string(l + 1) + " does not sum to 1");
  }
  if (std::abs(pi0.sum() - 1.0) > tol)
    throw ValidationError("initial mode distribution does not sum to 1");
}

void TransitionMatrix::validate() const { validate_transition(pi, pi0); }

void SwitchingModel::validate() const {
  if (submodels.empty()) throw ValidationError("model needs K >= 1 submodels");
  for (const auto& sm : submodels) sm.validate();
  const Index nx = n_x(), nu = n_u(), ny = n_y();
  for (const auto& sm : submodels) {
    if (sm.n_x() != nx || sm.n_u() != nu || sm.n_y() != ny)
      throw StructuralError("all submodels must share n_x, n_u and n_y");
  }
  if (trans.K() != K()) throw StructuralError("transition matrix size does not match K");
  trans.validate();
  if (sigma1.rows() != nx) throw StructuralError("sigma1 must be n_x x n_x");
  if (sigma2.rows() != ny) throw StructuralError("sigma2 must be n_y x n_y");
  require_spd(sigma1, "sigma1");
  require_spd(sigma2, "sigma2");
  if (!(sigma_theta >= 0.0) || !std::isfinite(sigma_theta))
    throw ValidationError("sigma_theta must be finite and >= 0");
  if (x0.size() != nx) throw StructuralError("x0 must have n_x entries");
  if (!x0.allFinite()) throw ValidationError("x0 has non-finite entries");
}

void Dataset::validate() const {
  if (u.rows() < 1) throw ValidationError("dataset needs T >= 1 samples");
  if (y.rows() != u.rows()) throw ValidationError("u and y must have the same length");
  if (true_modes && static_cast<Index>(true_modes->size()) != T())
    throw ValidationError("true_modes length must equal T");
  if (true_states && true_states->rows() != T())
    throw ValidationError("true_states length must equal T");
  if (!u.allFinite() || !y.allFinite()) throw ValidationError("dataset has non-finite samples");
}

// -- vectorization ----------------------------------------------------------

Index ParamLayout::layer_base(NetRole role, Index layer) const {
  const NetSpec& spec = role == NetRole::State ? state_spec : output_spec;
  if (layer < 0 || layer >= spec.num_layers()) throw StructuralError("layer index out of range");
  Index base = role == NetRole::State ? 0 : state_size();
  for (Index i = 0; i < layer; ++i) {
    const Index rows = spec.layer_dims[static_cast<std::size_t>(i)];
    base += rows * spec.layer_input_dim(i) + rows;
  }
  return base;
}

Index ParamLayout::weight_offset(NetRole role, Index layer, Index row, Index col) const {
  const NetSpec& spec = role == NetRole::State ? state_spec : output_spec;
  return layer_base(role, layer) + row * spec.layer_input_dim(layer) + col;
}

Index ParamLayout::bias_offset(NetRole role, Index layer, Index row) const {
  const NetSpec& spec = role == NetRole::State ? state_spec : output_spec;
  const Index rows = spec.layer_dims[static_cast<std::size_t>(layer)];
  return layer_base(role, layer) + rows * spec.layer_input_dim(layer) + row;
}

VectorXd vectorize(const NetSpec& spec, const NetParams& params) {
  check_shapes(spec, params);
  VectorXd flat(spec.num_params());
  Index k = 0;
  for (const auto& l : params.layers) {
    for (Index r = 0; r < l.W.rows(); ++r)
      for (Index c = 0; c < l.W.cols(); ++c) flat[k++] = l.W(r, c);
    flat.segment(k, l.b.size()) = l.b;
    k += l.b.size();
  }
  return flat;
}

NetParams devectorize(const NetSpec& spec, const Eigen::Ref<const VectorXd>& flat) {
  spec.validate();
  if (flat.size() != spec.num_params())
    throw StructuralError("flat parameter length " + std::to_string(flat.size()) +
                          " does not match net size " + std::to_string(spec.num_params()));
  NetParams p = NetParams::zeros(spec);
  Index k = 0;
  for (auto& l : p.layers) {
    for (Index r = 0; r < l.W.rows(); ++r)
      for (Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = flat[k++];
    l.b = flat.segment(k, l.b.size());
    k += l.b.size();
  }
  return p;
}

VectorXd vectorize(const Submodel& sm) {
  const Index ns = sm.state_net.spec.num_params();
  VectorXd flat(sm.num_params());
  flat.head(ns) = vectorize(sm.state_net.spec, sm.state_net.params);
  flat.tail(flat.size() - ns) = vectorize(sm.output_net.spec, sm.output_net.params);
  return flat;
}

void devectorize(const Eigen::Ref<const VectorXd>& flat, Submodel& sm) {
  const Index ns = sm.state_net.spec.num_params();
  const Index no = sm.output_net.spec.num_params();
  if (flat.size() != ns + no)
    throw StructuralError("ParamVector length " + std::to_string(flat.size()) +
                          " does not match submodel size " + std::to_string(ns + no));
  sm.state_net.params = devectorize(sm.state_net.spec, flat.head(ns));
  sm.output_net.params = devectorize(sm.output_net.spec, flat.tail(no));
}

}  // namespace swid
