// rnncert: command-line front end for certification, synthesis, composition,
// parameterization and simulation of firing-rate and Hopfield networks.
//
// Exit codes: 0 success or feasible, 1 certified infeasible (or a failed
// check), 2 input error, 3 solver budget exhausted, 4 internal error.

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rnncert/certificates.hpp"
#include "rnncert/dynamics.hpp"
#include "rnncert/errors.hpp"
#include "rnncert/model_io.hpp"
#include "rnncert/networks.hpp"
#include "rnncert/param_deq.hpp"
#include "rnncert/synthesis.hpp"

using json = nlohmann::json;
using namespace rnncert;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kInputError = 2;
constexpr int kBudget = 3;
constexpr int kInternal = 4;

const double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Options {
  std::string model, gains, adjacency, out, ref, report, model_out;
  double rate = kUnset;
  double factor = kUnset;
  std::string nonlin = "mone";
  std::string arch, time;
  double delta = kUnset;
  double epsilon = kUnset;
  double scale = kUnset;
  double tol = 1e-3;
  double dt = kUnset;
  double horizon = 10.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  int dim = 4;
  int count = 1;
};

json mat(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

json vec_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix mat_from(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array()) throw InputError("report: missing matrix \"" + key + "\"");
  const json& v = j[key];
  const auto r = static_cast<Eigen::Index>(v.size());
  const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(v[0].size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!v[i].is_array() || static_cast<Eigen::Index>(v[i].size()) != c) {
      throw InputError("report: ragged matrix \"" + key + "\"");
    }
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = v[i][k].get<double>();
  }
  return m;
}

Vector vec_from(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array()) throw InputError("report: missing vector \"" + key + "\"");
  Vector v(j[key].size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[key][i].get<double>();
  return v;
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "infeasible";
}

int status_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return kOk;
    case SolveStatus::Infeasible: return kInfeasible;
    case SolveStatus::BudgetExhausted: return kBudget;
  }
  return kInfeasible;
}

class Job {
 public:
  Job(const Options& o, std::string command) : opt_(o) {
    report_["command"] = std::move(command);
    start_ = std::chrono::steady_clock::now();
  }
  json& report() { return report_; }

  int finish(int code) {
    report_["wall_time"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    report_["exit_code"] = code;
    const std::string text = report_.dump(2) + "\n";
    if (opt_.out.empty()) {
      std::cout << text;
    } else {
      write_file(opt_.out, text);
    }
    return code;
  }

 private:
  const Options& opt_;
  json report_;
  std::chrono::steady_clock::time_point start_;
};

std::string arch_name(Arch a) { return a == Arch::FiringRate ? "fr" : "hopfield"; }
std::string time_name(TimeDomain t) { return t == TimeDomain::Continuous ? "cts" : "disc"; }

Arch parse_arch(const std::string& s) {
  if (s == "fr") return Arch::FiringRate;
  if (s == "hopfield") return Arch::Hopfield;
  throw InputError("--arch must be fr or hopfield");
}

TimeDomain parse_time(const std::string& s) {
  if (s == "cts") return TimeDomain::Continuous;
  if (s == "disc") return TimeDomain::Discrete;
  throw InputError("--time must be cts or disc");
}

ActivationClass parse_nonlin(const std::string& s) {
  if (s == "mone") return ActivationClass::mone();
  if (s == "cone") return ActivationClass::cone();
  throw InputError("--nonlin must be cone or mone");
}

ActivationClass nonlin_from_report(const json& j) {
  if (j.contains("k1") && j.contains("k2")) {
    return ActivationClass::slope(j["k1"].get<double>(), j["k2"].get<double>());
  }
  return parse_nonlin(j.value("nonlin", "mone"));
}

SynapticModel load_model(const Options& o) {
  if (o.model.empty()) throw InputError("--model is required");
  return parse_model(o.model);
}

// Spec from flags, falling back to the model's own architecture and time.
CertificateSpec spec_from(const Options& o, const SynapticModel* m, bool need_rate = true) {
  CertificateSpec s;
  s.arch = !o.arch.empty() ? parse_arch(o.arch) : (m ? m->arch : Arch::FiringRate);
  s.domain = !o.time.empty() ? parse_time(o.time) : (m ? m->domain : TimeDomain::Continuous);
  s.nonlin = parse_nonlin(o.nonlin);
  if (s.domain == TimeDomain::Continuous) {
    if (std::isnan(o.rate) && need_rate) throw InputError("--rate is required in continuous time");
    s.rate = std::isnan(o.rate) ? 0.5 : o.rate;
  } else {
    const double r = std::isnan(o.factor) ? o.rate : o.factor;
    if (std::isnan(r) && need_rate) throw InputError("--factor is required in discrete time");
    s.rate = std::isnan(r) ? 0.5 : r;
  }
  return s;
}

SolverOptions solver_opts(const Options&) { return SolverOptions{}; }

void put_cert(json& r, const CertificateSpec& s, const Certificate* c) {
  r["arch"] = arch_name(s.arch);
  r["time"] = time_name(s.domain);
  r["nonlin"] = s.nonlin.is_cone() ? "cone" : "mone";
  r["k1"] = s.nonlin.k1;
  r["k2"] = s.nonlin.k2;
  r["rate"] = s.rate;
  if (c) {
    r["margin"] = c->margin;
    r["P"] = mat(c->P.matrix());
    r["Q"] = vec_json(c->Q.diagonal());
  }
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": malformed text (" + e.what() + ")");
  }
}

// Reads the gain file if it exists, applies the update, writes it back.
void update_gain_file(const std::string& path, const json& update) {
  json g = json::object();
  if (std::filesystem::exists(path)) g = read_json_file(path);
  if (!g.is_object()) throw InputError(path + ": gain file must hold an object");
  g.update(update);
  write_file(path, g.dump(2) + "\n");
}

int cmd_certify(const Options& o, Job& job) {
  const SynapticModel m = load_model(o);
  const CertificateSpec s = spec_from(o, &m);
  const CertifyOutcome r = certify(m.W, s, solver_opts(o));
  json& rep = job.report();
  rep["feasible"] = r.feasible();
  rep["status"] = status_name(r.status);
  rep["iterations"] = r.iterations;
  rep["best_margin"] = r.best_margin;
  put_cert(rep, s, r.cert ? &*r.cert : nullptr);
  return job.finish(status_code(r.status));
}

int cmd_max_rate(const Options& o, Job& job) {
  const SynapticModel m = load_model(o);
  const CertificateSpec s = spec_from(o, &m, false);
  const RateOutcome r = max_rate(m.W, s, o.tol, solver_opts(o));
  json& rep = job.report();
  rep["feasible"] = !r.infeasible;
  rep["status"] = r.infeasible ? "infeasible" : "feasible";
  CertificateSpec at = s;
  at.rate = r.rate;
  put_cert(rep, r.cert ? r.cert->spec : at, r.cert ? &*r.cert : nullptr);
  return job.finish(r.infeasible ? kInfeasible : kOk);
}

int cmd_synth(const Options& o, Job& job, const std::string& kind) {
  const SynapticModel m = load_model(o);
  if (m.arch != Arch::FiringRate || m.domain != TimeDomain::Continuous) {
    throw InputError("synthesis needs a continuous-time FR model");
  }
  json& rep = job.report();
  json gains_update;
  int code = kOk;
  if (kind == "feedback" || kind == "observer") {
    if (std::isnan(o.rate)) throw InputError("--rate is required");
    const bool fb = kind == "feedback";
    const GainDesign d = fb ? synth_state_feedback(m.W, m.B, o.rate, solver_opts(o))
                            : synth_observer(m.W, m.C, o.rate, solver_opts(o));
    rep["feasible"] = d.feasible;
    rep["status"] = status_name(d.status);
    rep["best_margin"] = d.best_margin;
    rep["rate"] = o.rate;
    if (d.feasible) {
      rep["gain"] = mat(d.gain);
      put_cert(rep, d.closed_loop->spec, &*d.closed_loop);
      if (fb) {
        gains_update = {{"K_f", mat(d.gain)}, {"c_K", o.rate}, {"P_X", mat(d.closed_loop->P.matrix())}};
      } else {
        gains_update = {{"L", mat(d.gain)}, {"c_O", o.rate}, {"P_O", mat(d.closed_loop->P.matrix())}};
      }
    }
    code = status_code(d.status);
  } else if (kind == "integral") {
    if (o.gains.empty()) throw InputError("--gains with K_f is required");
    const double delta = std::isnan(o.delta) ? m.act.slope_class().k1 : o.delta;
    if (!(delta > 0.0)) {
      throw InputError("--delta is required when the activation's lower slope is not positive");
    }
    const json g = read_json_file(o.gains);
    const Matrix k_f = mat_from(g, "K_f");
    if (k_f.rows() != m.m() || k_f.cols() != m.n()) throw InputError("K_f: shape mismatch");
    const Matrix w_cl = m.W + m.B * k_f;
    const IntegralDesign d =
        std::isnan(o.rate) ? synth_integral_gain_max_rate(w_cl, m.B, m.C, delta, o.tol, 10.0,
                                                          solver_opts(o))
                           : synth_integral_gain(w_cl, m.B, m.C, delta, o.rate, solver_opts(o));
    rep["feasible"] = d.feasible;
    rep["status"] = status_name(d.status);
    rep["best_margin"] = d.best_margin;
    if (d.feasible) {
      rep["K_i"] = mat(d.K_i);
      rep["c_r"] = d.c_r;
      rep["P_R"] = mat(d.P.matrix());
      gains_update = {{"K_i", mat(d.K_i)}, {"c_r", d.c_r}, {"P_R", mat(d.P.matrix())}};
    }
    code = status_code(d.status);
  } else {
    throw InputError("synth expects feedback, observer or integral");
  }
  if (!o.gains.empty() && !gains_update.is_null()) update_gain_file(o.gains, gains_update);
  return job.finish(code);
}

NormConstants constants_for(const SynapticModel& m, const GainSet& g) {
  const SymMatrix p_r = g.P_R.dim() > 0 ? g.P_R : SymMatrix::identity(m.m());
  return compute_norm_constants(m.B, g.K_f, g.K_i, m.C, g.P_X, g.P_O, p_r);
}

int cmd_epsilon_bound(const Options& o, Job& job) {
  const SynapticModel m = load_model(o);
  if (o.gains.empty()) throw InputError("--gains is required");
  const GainSet g = parse_gains(o.gains);
  const NormConstants k = constants_for(m, g);
  const double bound = epsilon_bound(k, g.c_K, g.c_r);
  json& rep = job.report();
  rep["ell_u"] = k.ell_u;
  rep["ell_K"] = k.ell_K;
  rep["ell_iR"] = k.ell_iR;
  rep["ell_iU"] = k.ell_iU;
  rep["epsilon_bound"] = std::isfinite(bound) ? json(bound) : json("inf");
  double eps = o.epsilon;
  if (std::isnan(eps) && !std::isnan(o.scale) && std::isfinite(bound)) eps = o.scale * bound;
  if (std::isnan(eps) && g.epsilon > 0.0) eps = g.epsilon;
  int code = kOk;
  if (!std::isnan(eps)) {
    const TrackingMatrix t = tracking_gain_matrix(k, g.c_O, g.c_K, g.c_r, eps);
    rep["epsilon"] = eps;
    rep["M"] = mat(t.M);
    rep["hurwitz"] = t.hurwitz;
    code = t.hurwitz ? kOk : kInfeasible;
    if (!std::isnan(o.scale)) update_gain_file(o.gains, {{"epsilon", eps}});
  }
  return job.finish(code);
}

int cmd_interconnect(const Options& o, Job& job) {
  if (o.model.empty()) throw InputError("--model (interconnection file) is required");
  const Interconnection ic = parse_interconnection(o.model);
  const ComposedNetwork net = interconnect(ic);
  json& rep = job.report();
  rep["wellposed_margin"] = net.wellposed_margin;
  rep["W_net"] = mat(net.model.W);
  if (!o.model_out.empty()) write_model(o.model_out, net.model);
  int code = kOk;
  if (!std::isnan(o.rate)) {
    CertificateSpec s{Arch::FiringRate, TimeDomain::Continuous, parse_nonlin(o.nonlin), o.rate};
    const CertifyOutcome r = certify(net.model.W, s, solver_opts(o));
    rep["feasible"] = r.feasible();
    rep["status"] = status_name(r.status);
    rep["best_margin"] = r.best_margin;
    put_cert(rep, s, r.cert ? &*r.cert : nullptr);
    if (r.cert) {
      json blocks = json::array();
      for (const Certificate& c : block_necessary_check(*r.cert, net)) {
        blocks.push_back({{"margin", c.margin}, {"P", mat(c.P.matrix())}, {"Q", vec_json(c.Q.diagonal())}});
      }
      rep["blocks"] = blocks;
    } else {
      json diag = json::array();
      for (const BlockDiagnosis& d : diagnose_blocks(net, s, solver_opts(o))) {
        diag.push_back({{"subsystem", d.subsystem}, {"certifiable", d.certifiable},
                        {"best_margin", d.best_margin}});
      }
      rep["diagnosis"] = diag;
    }
    code = status_code(r.status);
  }
  return job.finish(code);
}

int cmd_graph(const Options& o, Job& job, const std::string& kind) {
  if (o.adjacency.empty()) throw InputError("--adjacency is required");
  const GraphFile gf = parse_graph(o.adjacency);
  json& rep = job.report();
  if (kind == "certify") {
    if (std::isnan(o.rate)) throw InputError("--rate is required");
    const GraphCertOutcome r = graph_certify(gf.model, o.rate, gf.variant, solver_opts(o));
    rep["feasible"] = r.feasible();
    rep["best_margin"] = r.best_margin;
    rep["spectrum"] = vec_json(graph_spectrum(gf.model, gf.variant));
    put_cert(rep, CertificateSpec{Arch::FiringRate, TimeDomain::Continuous,
                                  ActivationClass::mone(), o.rate},
             r.cert ? &*r.cert : nullptr);
    return job.finish(r.feasible() ? kOk : kInfeasible);
  }
  if (kind != "simulate") throw InputError("graph expects certify or simulate");
  const double dt = std::isnan(o.dt) ? default_dt(gf.model.W) : o.dt;
  const GraphTrajectory tr = simulate_graph(gf.model, gf.U, gf.X0, o.horizon, dt);
  std::ostringstream csv;
  csv << "t";
  const Eigen::Index m = gf.X0.rows(), n = gf.X0.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) csv << ",X_" << i + 1 << "_" << j + 1;
  }
  csv << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    csv << tr.t[k];
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) csv << "," << tr.X[k](i, j);
    }
    csv << "\n";
  }
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(o.out, csv.str());
  }
  return tr.diverged ? kInfeasible : kOk;
}

ParamWeights random_weights(std::uint64_t seed, int n, double c) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  auto draw = [&](Eigen::Index r, Eigen::Index k) {
    Matrix m(r, k);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
    return m;
  };
  FreeWeights f;
  f.X = draw(n, n);
  f.Y = draw(n, n) / std::sqrt(static_cast<double>(n));
  f.d = 0.5 * draw(n, 1);
  f.eps_reg = 1e-2;
  return free_to_constrained(f, c);
}

int cmd_parameterize(const Options& o, Job& job) {
  if (o.dim < 1) throw InputError("--dim must be positive");
  if (o.count < 1) throw InputError("--count must be positive");
  const double c = std::isnan(o.rate) ? 0.5 : o.rate;
  if (!(c >= 0.0 && c <= 1.0)) throw InputError("--rate must lie in [0, 1]");
  std::vector<WeightCertificate> results(o.count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < o.count; i = next++) {
      results[i] = parameterize_weight(random_weights(o.seed + i, o.dim, c));
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min(o.jobs, o.count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  json& rep = job.report();
  rep["generator"] = "mt19937_64";
  rep["seed"] = o.seed;
  rep["dim"] = o.dim;
  const CertificateSpec s{Arch::FiringRate, TimeDomain::Continuous, ActivationClass::mone(), c};
  auto instance = [&](const WeightCertificate& w) {
    json j;
    Certificate cert{s, w.P, w.Q, w.margin};
    put_cert(j, s, &cert);
    j["W"] = mat(w.W);
    j["contracting"] = w.contracting();
    return j;
  };
  if (o.count == 1) {
    rep.update(instance(results.front()));
  } else {
    json all = json::array();
    for (const auto& w : results) all.push_back(instance(w));
    rep["instances"] = all;
  }
  rep["feasible"] = true;
  return job.finish(kOk);
}

Vector random_vector(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

int cmd_simulate(const Options& o, Job&) {
  const SynapticModel m = load_model(o);
  std::mt19937_64 gen(o.seed);
  const Vector x0 = o.seed_given ? random_vector(gen, m.n()) : Vector(Vector::Zero(m.n()));
  const double dt = std::isnan(o.dt) ? default_dt(m.W) : o.dt;
  Trajectory tr;
  if (!o.gains.empty()) {
    const GainSet g = parse_gains(o.gains);
    PiecewiseConstant ref;
    if (o.ref.empty()) {
      ref.starts = {0.0};
      ref.values = {Vector::Zero(m.p())};
    } else {
      ref = parse_reference(o.ref);
    }
    GainSet gs = g;
    if (!std::isnan(o.epsilon)) gs.epsilon = o.epsilon;
    ClosedLoopOptions co;
    co.horizon = o.horizon;
    co.dt = dt;
    co.record_every = std::max(1, static_cast<int>(std::round(0.01 / dt)));
    tr = simulate_closed_loop(m, gs, ref, x0, Vector::Zero(m.n()), Vector::Zero(m.m()), co);
  } else {
    if (!o.ref.empty()) throw InputError("--ref needs --gains");
    tr = simulate(m, constant_input(Vector::Zero(m.m())), x0, o.horizon, dt,
                  m.domain == TimeDomain::Discrete
                      ? 1
                      : std::max(1, static_cast<int>(std::round(0.01 / dt))));
  }
  std::ostringstream csv;
  tr.write_csv(csv);
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(o.out, csv.str());
  }
  return tr.diverged ? kInfeasible : kOk;
}

int cmd_verify(const Options& o, Job& job) {
  if (o.report.empty()) throw InputError("--report is required");
  const json r = read_json_file(o.report);
  if (!r.is_object() || !r.contains("P") || !r.contains("Q")) {
    throw InputError("report holds no certificate");
  }
  Matrix w;
  if (!o.model.empty()) {
    w = parse_model(o.model).W;
  } else if (r.contains("W")) {
    w = mat_from(r, "W");
  } else {
    throw InputError("--model is required for reports without W");
  }
  Certificate c;
  c.spec.arch = parse_arch(r.value("arch", "fr"));
  c.spec.domain = parse_time(r.value("time", "cts"));
  c.spec.nonlin = nonlin_from_report(r);
  c.spec.rate = r.at("rate").get<double>();
  c.P = SymMatrix(mat_from(r, "P"));
  const Vector q = vec_from(r, "Q");
  if (q.size() != c.P.dim() || c.P.dim() != w.rows()) throw InputError("report: dimension mismatch");
  if (q.minCoeff() <= 0.0) throw InputError("report: Q must be positive");
  c.Q = DiagPosMatrix(q);
  const double margin = certificate_margin(w, c);
  json& rep = job.report();
  rep["recomputed_margin"] = margin;
  const bool has_stored = r.contains("margin");
  const double stored = has_stored ? r["margin"].get<double>() : margin;
  rep["stored_margin"] = stored;
  const bool matches = std::abs(margin - stored) <= 1e-7;
  rep["matches"] = matches;
  rep["verified"] = matches && margin >= -1e-8;
  return job.finish(matches && margin >= -1e-8 ? kOk : kInfeasible);
}

int cmd_check_bounds(const Options& o, Job& job) {
  const SynapticModel m = load_model(o);
  if (o.gains.empty()) throw InputError("--gains is required");
  GainSet g = parse_gains(o.gains);
  g.epsilon = 0.0;
  g.K_i = Matrix::Zero(m.m(), m.p());
  const NormConstants k = constants_for(m, g);
  const double dt = std::isnan(o.dt) ? 1e-3 : o.dt;
  json& rep = job.report();
  json runs = json::array();
  bool all_ok = true;
  for (int i = 0; i < o.count; ++i) {
    std::mt19937_64 gen(o.seed + i);
    const Vector x0 = random_vector(gen, m.n());
    const Vector xi0 = random_vector(gen, m.n());
    PiecewiseConstant ref{{0.0}, {Vector::Zero(m.p())}};
    ClosedLoopOptions co;
    co.horizon = o.horizon;
    co.dt = dt;
    co.record_every = std::max(1, static_cast<int>(std::round(0.01 / dt)));
    const Trajectory tr = simulate_closed_loop(m, g, ref, x0, xi0, Vector::Zero(m.m()), co);
    const BoundReport b = check_separation_bounds(m, g, k, tr, BoundMode{}, 5e-2);
    all_ok = all_ok && b.ok;
    json run = {{"seed", o.seed + i}, {"ok", b.ok}, {"checked", b.checked},
                {"worst_obs_ratio", b.worst_obs_ratio}, {"worst_state_ratio", b.worst_state_ratio}};
    if (b.first_violation_time) {
      run["first_violation_time"] = *b.first_violation_time;
      run["first_violation"] = b.first_violation;
    }
    runs.push_back(run);
  }
  rep["runs"] = runs;
  rep["ok"] = all_ok;
  return job.finish(all_ok ? kOk : kInfeasible);
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

void add_common(CLI::App* c, Options& o) {
  c->add_option("--model", o.model, "Model file");
  c->add_option("--gains", o.gains, "Gain file");
  c->add_option("--out", o.out, "Output path (stdout when absent)");
  c->add_option("--rate", o.rate, "Continuous-time rate c");
  c->add_option("--factor", o.factor, "Discrete-time factor rho");
  c->add_option("--nonlin", o.nonlin, "cone or mone");
  c->add_option("--arch", o.arch, "fr or hopfield (overrides the model)");
  c->add_option("--time", o.time, "cts or disc (overrides the model)");
  c->add_option("--tol", o.tol, "Bisection tolerance");
  c->add_option("--jobs", o.jobs, "Worker threads for sweeps");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Contraction certificates and controller synthesis for recurrent networks"};
  app.require_subcommand(1);

  auto* certify_cmd = app.add_subcommand("certify", "Certify a model at a given rate");
  add_common(certify_cmd, o);
  auto* rate_cmd = app.add_subcommand("max-rate", "Best certifiable rate by bisection");
  add_common(rate_cmd, o);

  auto* synth_cmd = app.add_subcommand("synth", "Gain synthesis");
  synth_cmd->require_subcommand(1);
  std::string synth_kind;
  for (const char* kind : {"feedback", "observer", "integral"}) {
    auto* s = synth_cmd->add_subcommand(kind, std::string(kind) + " gain");
    add_common(s, o);
    s->add_option("--delta", o.delta, "Lower slope bound of the activation (default: from the model)");
    s->callback([&synth_kind, kind] { synth_kind = kind; });
  }

  auto* eps_cmd = app.add_subcommand("epsilon-bound", "Low-gain bound and M(epsilon) test");
  add_common(eps_cmd, o);
  eps_cmd->add_option("--epsilon", o.epsilon, "Gain parameter to test");
  eps_cmd->add_option("--scale", o.scale, "Store epsilon = scale * bound in the gain file");

  auto* ic_cmd = app.add_subcommand("interconnect", "Compose interconnected subsystems");
  add_common(ic_cmd, o);
  ic_cmd->add_option("--model-out", o.model_out, "Write the composed model here");

  auto* graph_cmd = app.add_subcommand("graph", "Graph networks");
  graph_cmd->require_subcommand(1);
  std::string graph_kind;
  for (const char* kind : {"certify", "simulate"}) {
    auto* s = graph_cmd->add_subcommand(kind, std::string("graph ") + kind);
    add_common(s, o);
    s->add_option("--adjacency", o.adjacency, "Graph file")->required();
    s->add_option("--dt", o.dt, "Step size");
    s->add_option("--horizon", o.horizon, "Final time");
    s->callback([&graph_kind, kind] { graph_kind = kind; });
  }

  auto* param_cmd = app.add_subcommand("parameterize", "Random contracting weight matrices");
  add_common(param_cmd, o);
  param_cmd->add_option("--seed", o.seed, "Generator seed");
  param_cmd->add_option("--dim", o.dim, "State dimension");
  param_cmd->add_option("--count", o.count, "Number of instances (seeds seed, seed+1, ...)");

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a model or a closed loop");
  add_common(sim_cmd, o);
  sim_cmd->add_option("--ref", o.ref, "Piecewise-constant reference file");
  sim_cmd->add_option("--dt", o.dt, "Step size");
  sim_cmd->add_option("--horizon", o.horizon, "Final time");
  sim_cmd->add_option("--epsilon", o.epsilon, "Override the gain file's epsilon");
  sim_cmd->add_option("--seed", o.seed, "Random initial state");

  auto* verify_cmd = app.add_subcommand("verify", "Re-verify a report's certificate");
  add_common(verify_cmd, o);
  verify_cmd->add_option("--report", o.report, "Report file")->required();

  auto* bounds_cmd = app.add_subcommand("check-bounds", "Check separation error bounds");
  add_common(bounds_cmd, o);
  bounds_cmd->add_option("--dt", o.dt, "Step size");
  bounds_cmd->add_option("--horizon", o.horizon, "Final time");
  bounds_cmd->add_option("--seed", o.seed, "First seed");
  bounds_cmd->add_option("--count", o.count, "Number of random initializations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  o.seed_given = sim_cmd->count("--seed") > 0;

  Job job(o, join_args(argc, argv));
  try {
    if (*certify_cmd) return cmd_certify(o, job);
    if (*rate_cmd) return cmd_max_rate(o, job);
    if (*synth_cmd) return cmd_synth(o, job, synth_kind);
    if (*eps_cmd) return cmd_epsilon_bound(o, job);
    if (*ic_cmd) return cmd_interconnect(o, job);
    if (*graph_cmd) return cmd_graph(o, job, graph_kind);
    if (*param_cmd) return cmd_parameterize(o, job);
    if (*sim_cmd) return cmd_simulate(o, job);
    if (*verify_cmd) return cmd_verify(o, job);
    if (*bounds_cmd) return cmd_check_bounds(o, job);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConvergenceError& e) {
    std::cerr << "iteration budget exhausted: " << e.what() << "\n";
    return kBudget;
  } catch (const MonotonicityError& e) {
    std::cerr << "solver anomaly: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInputError;
}
