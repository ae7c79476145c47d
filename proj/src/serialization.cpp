#include "swid/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace swid {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_impl(const json& j, int indent, int depth, std::string& out) {
  const auto pad = [&](int d) {
    if (indent > 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent * d), ' ');
    }
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        out += json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_impl(it.value(), indent, depth + 1, out);
      }
      pad(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line so matrices read row by row.
      const bool flat = std::all_of(j.begin(), j.end(),
                                    [](const json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) pad(depth + 1);
        dump_impl(e, indent, depth + 1, out);
      }
      if (!flat) pad(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      std::string s = format_double(v);
      // keep it a JSON float even when %.17g prints an integer
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const Net& net) {
  json spec;
  spec["input_dim"] = net.spec.input_dim;
  spec["layer_dims"] = net.spec.layer_dims;
  json acts = json::array();
  for (Activation a : net.spec.activations) acts.push_back(std::string(to_string(a)));
  spec["activations"] = acts;
  spec["output_dim"] = net.spec.output_dim;
  json layers = json::array();
  for (const auto& l : net.params.layers) layers.push_back({{"W", to_json(l.W)}, {"b", to_json(l.b)}});
  return {{"spec", spec}, {"params", {{"layers", layers}}}};
}

// -- reading with field paths ----------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw FormatError("model file: " + path + ": " + msg);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& path) {
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown field");
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, j.is_null() ? "non-finite or null value" : "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "non-finite value");
  return v;
}

Index count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
  return static_cast<Index>(j.get<long long>());
}

VectorXd vector_from(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

MatrixXd matrix_from(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  MatrixXd m;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    VectorXd row = vector_from(j[r], rp);
    if (cols < 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(rp, "ragged matrix row");
    }
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  if (cols < 0) m.resize(0, 0);
  return m;
}

Net net_from(const json& j, const std::string& path) {
  reject_unknown(j, {"spec", "params"}, path);
  Net net;
  const std::string sp = path + ".spec";
  const json& spec = field(j, "spec", path);
  reject_unknown(spec, {"input_dim", "layer_dims", "activations", "output_dim"}, sp);
  net.spec.input_dim = count(field(spec, "input_dim", sp), sp + ".input_dim");
  net.spec.output_dim = count(field(spec, "output_dim", sp), sp + ".output_dim");
  const json& dims = field(spec, "layer_dims", sp);
  if (!dims.is_array()) fail(sp + ".layer_dims", "expected an array");
  for (std::size_t i = 0; i < dims.size(); ++i)
    net.spec.layer_dims.push_back(count(dims[i], sp + ".layer_dims[" + std::to_string(i) + "]"));
  const json& acts = field(spec, "activations", sp);
  if (!acts.is_array()) fail(sp + ".activations", "expected an array");
  for (std::size_t i = 0; i < acts.size(); ++i) {
    const std::string ap = sp + ".activations[" + std::to_string(i) + "]";
    if (!acts[i].is_string()) fail(ap, "expected a string");
    try {
      net.spec.activations.push_back(parse_activation(acts[i].get<std::string>()));
    } catch (const ValidationError& e) {
      fail(ap, e.what());
    }
  }
  try {
    net.spec.validate();
  } catch (const std::exception& e) {
    fail(sp, e.what());
  }

  const std::string pp = path + ".params";
  const json& params = field(j, "params", path);
  reject_unknown(params, {"layers"}, pp);
  const json& layers = field(params, "layers", pp);
  if (!layers.is_array()) fail(pp + ".layers", "expected an array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string lp = pp + ".layers[" + std::to_string(i) + "]";
    reject_unknown(layers[i], {"W", "b"}, lp);
    Layer l;
    l.W = matrix_from(field(layers[i], "W", lp), lp + ".W");
    l.b = vector_from(field(layers[i], "b", lp), lp + ".b");
    net.params.layers.push_back(std::move(l));
  }
  try {
    check_shapes(net.spec, net.params);
  } catch (const std::exception& e) {
    fail(pp, e.what());
  }
  return net;
}

/// Maps the bare tokens NaN / Infinity (emitted by some JSON writers) to null
/// so the failure can be reported against the field that holds them.
std::string neutralize_nonfinite(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < text.size()) out += text[++i];
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      continue;
    }
    for (const char* tok : {"-Infinity", "Infinity", "NaN", "-nan", "nan", "-inf", "inf"}) {
      const std::size_t n = std::char_traits<char>::length(tok);
      if (text.compare(i, n, tok) == 0) {
        out += "null";
        i += n - 1;
        goto next;
      }
    }
    out += c;
  next:;
  }
  return out;
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_impl(j, indent, 0, out);
  out += '\n';
  return out;
}

std::string model_to_text(const SwitchingModel& model) {
  model.validate();
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["n_x"] = model.n_x();
  doc["n_u"] = model.n_u();
  doc["n_y"] = model.n_y();
  doc["K"] = model.K();
  json subs = json::array();
  for (const auto& sm : model.submodels)
    subs.push_back({{"state_net", to_json(sm.state_net)}, {"output_net", to_json(sm.output_net)}});
  doc["submodels"] = subs;
  doc["transition"] = {{"pi", to_json(model.trans.pi)}, {"pi0", to_json(model.trans.pi0)}};
  doc["sigma1"] = to_json(model.sigma1);
  doc["sigma2"] = to_json(model.sigma2);
  doc["sigma_theta"] = model.sigma_theta;
  doc["x0"] = to_json(model.x0);
  return dump_json(doc);
}

SwitchingModel model_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(neutralize_nonfinite(text));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file: parse error at byte ") + std::to_string(e.byte) +
                      ": " + e.what());
  }
  const std::string root = "$";
  if (!doc.is_object()) fail(root, "expected an object");
  reject_unknown(doc,
                 {"format_version", "n_x", "n_u", "n_y", "K", "submodels", "transition",
                  "sigma1", "sigma2", "sigma_theta", "x0"},
                 root);
  const json& ver = field(doc, "format_version", root);
  if (!ver.is_number_integer() || ver.get<int>() != kModelFormatVersion)
    fail(root + ".format_version", "unsupported version " + ver.dump() + " (expected " +
                                       std::to_string(kModelFormatVersion) + ")");
  const Index nx = count(field(doc, "n_x", root), "$.n_x");
  const Index nu = count(field(doc, "n_u", root), "$.n_u");
  const Index ny = count(field(doc, "n_y", root), "$.n_y");
  const Index K = count(field(doc, "K", root), "$.K");

  SwitchingModel m;
  const json& subs = field(doc, "submodels", root);
  if (!subs.is_array() || static_cast<Index>(subs.size()) != K)
    fail("$.submodels", "expected an array of K submodels");
  for (std::size_t k = 0; k < subs.size(); ++k) {
    const std::string p = "$.submodels[" + std::to_string(k) + "]";
    reject_unknown(subs[k], {"state_net", "output_net"}, p);
    Submodel sm{net_from(field(subs[k], "state_net", p), p + ".state_net"),
                net_from(field(subs[k], "output_net", p), p + ".output_net")};
    if (sm.n_x() != nx || sm.n_y() != ny || sm.state_net.spec.input_dim != nx + nu ||
        sm.output_net.spec.input_dim != nx + nu)
      fail(p, "network dimensions disagree with n_x/n_u/n_y");
    m.submodels.push_back(std::move(sm));
  }
  const json& tr = field(doc, "transition", root);
  reject_unknown(tr, {"pi", "pi0"}, "$.transition");
  m.trans.pi = matrix_from(field(tr, "pi", "$.transition"), "$.transition.pi");
  m.trans.pi0 = vector_from(field(tr, "pi0", "$.transition"), "$.transition.pi0");
  m.sigma1 = matrix_from(field(doc, "sigma1", root), "$.sigma1");
  m.sigma2 = matrix_from(field(doc, "sigma2", root), "$.sigma2");
  m.sigma_theta = number(field(doc, "sigma_theta", root), "$.sigma_theta");
  m.x0 = vector_from(field(doc, "x0", root), "$.x0");
  try {
    m.validate();
  } catch (const std::exception& e) {
    fail(root, e.what());
  }
  return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_model(const SwitchingModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_text(model));
}

SwitchingModel load_model(const std::filesystem::path& path) {
  return model_from_text(read_file(path));
}

}  // namespace swid
