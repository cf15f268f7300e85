#include "rnncert/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rnncert/errors.hpp"

namespace rnncert {

namespace {

using json = nlohmann::json;

json parse_text(const std::string& text, const std::string& what) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw InputError(what + ": top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    throw InputError(what + ": malformed text (" + std::string(e.what()) + ")");
  }
}

const json& need(const json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError("missing key \"" + key + "\"");
  return *it;
}

double get_number(const json& j, const std::string& key) {
  const json& v = need(j, key);
  if (!v.is_number()) throw InputError(key + ": expected a number");
  return v.get<double>();
}

int get_dim(const json& j, const std::string& key) {
  const json& v = need(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InputError(key + ": expected a nonnegative integer");
  }
  return static_cast<int>(v.get<long long>());
}

std::string get_string(const json& j, const std::string& key) {
  const json& v = need(j, key);
  if (!v.is_string()) throw InputError(key + ": expected a string");
  return v.get<std::string>();
}

// rows/cols < 0 means "take it from the data".
Matrix to_matrix(const json& v, const std::string& name, int rows = -1, int cols = -1) {
  if (!v.is_array()) throw InputError(name + ": expected an array of rows");
  const int r = static_cast<int>(v.size());
  if (rows >= 0 && r != rows) {
    std::ostringstream msg;
    msg << name << ": expected " << rows << " rows, got " << r;
    throw InputError(msg.str());
  }
  int c = cols;
  if (c < 0) c = r == 0 ? 0 : static_cast<int>(v.front().is_array() ? v.front().size() : 0);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<int>(row.size()) != c) {
      std::ostringstream msg;
      msg << name << ": row " << i << " must have " << c << " entries";
      if (row.is_array()) msg << ", got " << row.size();
      throw InputError(msg.str());
    }
    for (int k = 0; k < c; ++k) {
      if (!row[k].is_number()) {
        std::ostringstream msg;
        msg << name << ": entry (" << i << ", " << k << ") is not a number";
        throw InputError(msg.str());
      }
      m(i, k) = row[k].get<double>();
    }
  }
  if (!all_finite(m)) throw InputError(name + ": non-finite entries");
  return m;
}

Matrix get_matrix(const json& j, const std::string& key, int rows = -1, int cols = -1) {
  return to_matrix(need(j, key), key, rows, cols);
}

// A matrix with a zero dimension may be omitted.
Matrix get_matrix_or_empty(const json& j, const std::string& key, int rows, int cols) {
  if ((rows == 0 || cols == 0) && !j.contains(key)) return Matrix(rows, cols);
  if (rows == 0) {
    const json& v = need(j, key);
    if (!v.is_array() || !v.empty()) throw InputError(key + ": expected 0 rows");
    return Matrix(0, cols);
  }
  return get_matrix(j, key, rows, cols);
}

Vector to_vector(const json& v, const std::string& name, int size = -1) {
  if (!v.is_array()) throw InputError(name + ": expected an array of numbers");
  if (size >= 0 && static_cast<int>(v.size()) != size) {
    std::ostringstream msg;
    msg << name << ": expected " << size << " entries, got " << v.size();
    throw InputError(msg.str());
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw InputError(name + ": entry " + std::to_string(i) + " is not a number");
    }
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  if (!all_finite(out)) throw InputError(name + ": non-finite entries");
  return out;
}

json from_matrix(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

json from_vector(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Activation get_activation(const json& j, const std::string& key = "activation") {
  try {
    return Activation::parse(get_string(j, key));
  } catch (const InputError& e) {
    throw InputError(key + ": " + e.what());
  }
}

SynapticModel model_from_json(const json& j) {
  SynapticModel m;
  const int n = get_dim(j, "n");
  const int in = get_dim(j, "m");
  const int out = get_dim(j, "p");
  if (n == 0) throw InputError("n: must be positive");
  const std::string arch = get_string(j, "arch");
  if (arch == "fr") {
    m.arch = Arch::FiringRate;
  } else if (arch == "hopfield") {
    m.arch = Arch::Hopfield;
  } else {
    throw InputError("arch: expected \"fr\" or \"hopfield\", got \"" + arch + "\"");
  }
  const std::string time = get_string(j, "time");
  if (time == "cts") {
    m.domain = TimeDomain::Continuous;
  } else if (time == "disc") {
    m.domain = TimeDomain::Discrete;
  } else {
    throw InputError("time: expected \"cts\" or \"disc\", got \"" + time + "\"");
  }
  m.act = get_activation(j);
  m.W = get_matrix(j, "W", n, n);
  m.B = get_matrix_or_empty(j, "B", n, in);
  m.C = get_matrix_or_empty(j, "C", out, n);
  m.D = get_matrix_or_empty(j, "D", out, in);
  m.validate();
  return m;
}

json model_to_json(const SynapticModel& m) {
  json j;
  j["n"] = m.n();
  j["m"] = m.m();
  j["p"] = m.p();
  j["arch"] = m.arch == Arch::FiringRate ? "fr" : "hopfield";
  j["time"] = m.domain == TimeDomain::Continuous ? "cts" : "disc";
  j["activation"] = m.act.tag();
  j["W"] = from_matrix(m.W);
  j["B"] = from_matrix(m.B);
  j["C"] = from_matrix(m.C);
  j["D"] = from_matrix(m.D);
  return j;
}

std::vector<AffineLayer> layers_from_json(const json& v, const std::string& name) {
  if (!v.is_array()) throw InputError(name + ": expected an array of layers");
  std::vector<AffineLayer> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string field = name + "[" + std::to_string(i) + "]";
    const json& l = v[i];
    if (!l.is_object()) throw InputError(field + ": expected an object");
    AffineLayer layer;
    layer.weight = to_matrix(need(l, "weight"), field + ".weight");
    layer.bias = to_vector(need(l, "bias"), field + ".bias",
                           static_cast<int>(layer.weight.rows()));
    if (l.contains("activation")) layer.act = get_activation(l);
    out.push_back(std::move(layer));
  }
  return out;
}

json layers_to_json(const FeedForward& f) {
  json out = json::array();
  for (const AffineLayer& l : f.layers) {
    json j;
    j["weight"] = from_matrix(l.weight);
    j["bias"] = from_vector(l.bias);
    if (l.act) j["activation"] = l.act->tag();
    out.push_back(j);
  }
  return out;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

SynapticModel model_from_text(const std::string& text) {
  return model_from_json(parse_text(text, "model"));
}

std::string model_to_text(const SynapticModel& model) { return model_to_json(model).dump(2); }

SynapticModel parse_model(const std::string& path) { return model_from_text(read_file(path)); }

void write_model(const std::string& path, const SynapticModel& model) {
  write_file(path, model_to_text(model) + "\n");
}

GainSet gains_from_text(const std::string& text) {
  const json j = parse_text(text, "gains");
  GainSet g;
  g.K_f = get_matrix(j, "K_f");
  const int m = static_cast<int>(g.K_f.rows()), n = static_cast<int>(g.K_f.cols());
  g.L = get_matrix(j, "L", n);
  const int p = static_cast<int>(g.L.cols());
  g.K_i = j.contains("K_i") ? get_matrix(j, "K_i", m, p) : Matrix(Matrix::Zero(m, p));
  g.epsilon = j.contains("epsilon") ? get_number(j, "epsilon") : 0.0;
  g.c_K = get_number(j, "c_K");
  g.c_O = get_number(j, "c_O");
  g.c_r = j.contains("c_r") ? get_number(j, "c_r") : 0.0;
  g.P_X = SymMatrix(get_matrix(j, "P_X", n, n));
  g.P_O = SymMatrix(get_matrix(j, "P_O", n, n));
  if (j.contains("P_R")) g.P_R = SymMatrix(get_matrix(j, "P_R", p, p));
  return g;
}

std::string gains_to_text(const GainSet& g) {
  json j;
  j["K_f"] = from_matrix(g.K_f);
  j["L"] = from_matrix(g.L);
  j["K_i"] = from_matrix(g.K_i);
  j["epsilon"] = g.epsilon;
  j["c_K"] = g.c_K;
  j["c_O"] = g.c_O;
  j["c_r"] = g.c_r;
  j["P_X"] = from_matrix(g.P_X.matrix());
  j["P_O"] = from_matrix(g.P_O.matrix());
  if (g.P_R.dim() > 0) j["P_R"] = from_matrix(g.P_R.matrix());
  return j.dump(2);
}

GainSet parse_gains(const std::string& path) { return gains_from_text(read_file(path)); }

PiecewiseConstant reference_from_text(const std::string& text) {
  const json j = parse_text(text, "reference");
  PiecewiseConstant r;
  const Vector starts = to_vector(need(j, "starts"), "starts");
  const json& vals = need(j, "values");
  if (!vals.is_array() || vals.size() != static_cast<std::size_t>(starts.size())) {
    throw InputError("values: expected one vector per start time");
  }
  if (starts.size() == 0 || starts(0) != 0.0) throw InputError("starts: must begin at 0");
  for (Eigen::Index i = 0; i < starts.size(); ++i) {
    if (i > 0 && !(starts(i) > starts(i - 1))) throw InputError("starts: must increase");
    r.starts.push_back(starts(i));
    const int dim = i == 0 ? -1 : static_cast<int>(r.values.front().size());
    r.values.push_back(to_vector(vals[i], "values[" + std::to_string(i) + "]", dim));
  }
  return r;
}

PiecewiseConstant parse_reference(const std::string& path) {
  return reference_from_text(read_file(path));
}

GraphFile graph_from_text(const std::string& text) {
  const json j = parse_text(text, "graph");
  GraphFile g;
  g.model.W = get_matrix(j, "W");
  const int m = static_cast<int>(g.model.W.rows());
  if (g.model.W.cols() != m || m == 0) throw InputError("W: expected a nonempty square matrix");
  g.model.B = get_matrix(j, "B", m);
  g.model.A = get_matrix(j, "A");
  const int n = static_cast<int>(g.model.A.rows());
  if (g.model.A.cols() != n || n == 0) throw InputError("A: expected a nonempty square matrix");
  g.model.act = get_activation(j);
  const int p = static_cast<int>(g.model.B.cols());
  g.U = j.contains("U") ? get_matrix(j, "U", p, n) : Matrix(Matrix::Zero(p, n));
  g.X0 = j.contains("X0") ? get_matrix(j, "X0", m, n) : Matrix(Matrix::Zero(m, n));
  if (j.contains("H") || j.contains("degree")) {
    g.variant.kind = GraphVariant::Kind::Symmetrizable;
    g.variant.H = get_matrix(j, "H", n, n);
    g.variant.degree = to_vector(need(j, "degree"), "degree", n);
  }
  return g;
}

GraphFile parse_graph(const std::string& path) { return graph_from_text(read_file(path)); }

Interconnection interconnection_from_text(const std::string& text) {
  const json j = parse_text(text, "interconnection");
  Interconnection ic;
  const json& subs = need(j, "subsystems");
  if (!subs.is_array() || subs.empty()) {
    throw InputError("subsystems: expected a nonempty array of models");
  }
  int m = 0, p = 0;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    try {
      ic.subsystems.push_back(model_from_json(subs[i]));
    } catch (const InputError& e) {
      throw InputError("subsystems[" + std::to_string(i) + "]." + e.what());
    }
    m += ic.subsystems.back().m();
    p += ic.subsystems.back().p();
  }
  ic.coupling = get_matrix_or_empty(j, "coupling", m, p);
  return ic;
}

Interconnection parse_interconnection(const std::string& path) {
  return interconnection_from_text(read_file(path));
}

DeqSpec deq_from_text(const std::string& text) {
  const json j = parse_text(text, "deq");
  DeqSpec s;
  s.n = get_dim(j, "n");
  s.c = get_number(j, "c");
  s.d = to_vector(need(j, "d"), "d", s.n);
  s.Y = get_matrix(j, "Y", s.n, s.n);
  s.eps_reg = get_number(j, "eps_reg");
  if (j.contains("activation")) s.act = get_activation(j);
  s.x_map.layers = layers_from_json(need(j, "x_map"), "x_map");
  s.b_map.layers = layers_from_json(need(j, "b_map"), "b_map");
  s.validate();
  return s;
}

std::string deq_to_text(const DeqSpec& s) {
  json j;
  j["n"] = s.n;
  j["c"] = s.c;
  j["d"] = from_vector(s.d);
  j["Y"] = from_matrix(s.Y);
  j["eps_reg"] = s.eps_reg;
  j["activation"] = s.act.tag();
  j["x_map"] = layers_to_json(s.x_map);
  j["b_map"] = layers_to_json(s.b_map);
  return j.dump(2);
}

}  // namespace rnncert
