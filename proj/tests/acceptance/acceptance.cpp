// Acceptance run: one PASS/FAIL line per criterion. Tolerances, sample counts
// and time budgets are fixed here and never read from the environment.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rnncert/certificates.hpp"
#include "rnncert/dynamics.hpp"
#include "rnncert/errors.hpp"
#include "rnncert/networks.hpp"
#include "rnncert/param_deq.hpp"
#include "rnncert/synthesis.hpp"

using namespace rnncert;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

CertificateSpec spec(Arch a, TimeDomain t, ActivationClass s, double rate) { return {a, t, s, rate}; }

const Arch kArchs[] = {Arch::FiringRate, Arch::Hopfield};
const TimeDomain kTimes[] = {TimeDomain::Continuous, TimeDomain::Discrete};
const ActivationClass kClasses[] = {ActivationClass::cone(), ActivationClass::mone()};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome skew_counterexample() {
  Matrix w(2, 2);
  w << 0, 4, -4, 0;
  bool pass = true;
  std::ostringstream d;
  for (double c : {0.01, 0.1, 0.5}) {
    const CertifyOutcome r = certify(w, spec(Arch::FiringRate, TimeDomain::Continuous,
                                             ActivationClass::mone(), c));
    pass = pass && !r.feasible();
    d << "c=" << c << (r.feasible() ? " feasible; " : " infeasible; ");
  }
  const auto q = lds_check(w);
  const bool q_ok = q && (q->dense() - Matrix::Identity(2, 2)).norm() < 1e-6;
  // Q = I itself satisfies the strict inequality, checked without the solver.
  const Matrix wi = w - Matrix::Identity(2, 2);
  const bool identity_lds = oracle::max_eig(wi + wi.transpose()) < 0.0;
  pass = pass && q_ok && identity_lds;
  d << "lds Q=" << (q ? (q_ok ? "I" : "not I") : "none");
  return {pass, d.str()};
}

Outcome symmetric_sharpness() {
  std::mt19937_64 gen(1002);
  std::uniform_real_distribution<double> alpha_dist(0.05, 0.95);
  double worst_gap = 0.0, worst_margin = 1e300;
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + t % 4;
    const double alpha = alpha_dist(gen);
    Vector lam = -oracle::random_vector(gen, n).cwiseAbs();
    lam(0) = alpha;
    const Matrix w = oracle::with_spectrum(gen, lam);
    const RateOutcome r = max_rate(w, spec(Arch::FiringRate, TimeDomain::Continuous,
                                          ActivationClass::mone(), 0.5),
                                   1e-3);
    const double gap = r.infeasible ? 1.0 : std::abs(r.rate - (1.0 - alpha));
    worst_gap = std::max(worst_gap, gap);
    const Certificate c = symmetric_closed_form(SymMatrix(w));
    worst_margin = std::min(worst_margin, certificate_margin(w, c));
    worst_margin = std::min(worst_margin, -oracle::certificate_violation(w, c));
    if (std::abs(c.spec.rate - (1.0 - alpha)) > 1e-12) worst_gap = 1.0;
  }
  return {worst_gap <= 2e-3 && worst_margin >= -1e-7,
          fmt("max |c - (1-alpha)| = %.2e", worst_gap) + fmt(", min closed-form margin %.2e", worst_margin)};
}

Outcome structural_relationships() {
  std::mt19937_64 gen(1003);
  std::uniform_real_distribution<double> scale(0.15, 0.6);
  int cone_ok = 0, cone_n = 0, disc_ok = 0, disc_n = 0, dual_ok = 0, dual_n = 0;
  double worst_drift = 0.0;
  for (Arch a : kArchs) {
    for (TimeDomain t : kTimes) {
      for (ActivationClass s : kClasses) {
        const double rate = t == TimeDomain::Continuous ? 0.3 : 0.7;
        for (int k = 0; k < 200; ++k) {
          const int n = 2 + k % 3;
          const Matrix w = oracle::random_matrix(gen, n, n, scale(gen));
          const CertifyOutcome r = certify(w, spec(a, t, s, rate));
          if (!r.feasible()) continue;
          const Certificate& c = *r.cert;
          if (s.is_cone()) {
            Certificate m = c;
            m.spec.nonlin = ActivationClass::mone();
            ++cone_n;
            cone_ok += certificate_margin(w, m) >= -1e-9 && oracle::certificate_violation(w, m) <= 1e-8;
          }
          if (t == TimeDomain::Discrete) {
            ++disc_n;
            try {
              const Certificate x = disc_to_cts_transfer(w, c);
              disc_ok += std::abs(x.spec.rate - 0.5 * (1 - rate * rate)) < 1e-15 &&
                         oracle::certificate_violation(w, x) <= 1e-8;
            } catch (const ConsistencyError&) {
            }
          }
          ++dual_n;
          const Certificate d = dual_transform(w, c);
          const Certificate back = dual_transform(w.transpose(), d);
          const double m_dual = certificate_margin(w.transpose(), d);
          const double m_back = certificate_margin(w, back);
          // The discrete CONE dual goes through a shared Schur-diagonal Q; it is
          // tight by construction and only re-verification is meaningful there.
          const bool involutive = t == TimeDomain::Continuous || s.is_mone();
          const double drift = involutive ? std::abs(m_back - c.margin) : std::max(0.0, -m_back);
          worst_drift = std::max(worst_drift, drift);
          dual_ok += m_dual >= -1e-7 && drift <= 1e-7;
        }
      }
    }
  }
  std::ostringstream d;
  d << "cone->mone " << cone_ok << "/" << cone_n << ", disc->cts " << disc_ok << "/" << disc_n
    << ", duality " << dual_ok << "/" << dual_n << fmt(" (drift %.1e)", worst_drift);
  const bool enough = cone_n >= 200 && disc_n >= 200 && dual_n >= 400;
  return {enough && cone_ok == cone_n && disc_ok == disc_n && dual_ok == dual_n, d.str()};
}

Outcome schur_equivalence() {
  std::mt19937_64 gen(1004);
  std::uniform_real_distribution<double> radius(0.3, 1.7);
  int disagreements = 0, stable = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 3;
    Matrix w = oracle::random_matrix(gen, n, n);
    w *= radius(gen) / spectral_norm(w);
    const bool schur = schur_diag_stable(w).has_value();
    stable += schur;
    for (Arch a : kArchs) {
      const RateOutcome r =
          max_rate(w, spec(a, TimeDomain::Discrete, ActivationClass::cone(), 0.5), 1e-3);
      const bool some_rho = !r.infeasible && r.rate < 1.0;
      disagreements += some_rho != schur;
    }
  }
  std::ostringstream d;
  d << disagreements << " disagreements (" << stable << "/100 Schur diagonally stable)";
  return {disagreements == 0 && stable > 10 && stable < 90, d.str()};
}

Outcome parameterization_round_trip() {
  std::mt19937_64 gen(1005);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cs[] = {0.0, 0.1, 0.5, 0.9, 1.0};
  double worst = 1e300;
  for (int k = 0; k < 300; ++k) {
    const int n = 2 + k % 5;
    ParamWeights p;
    p.c = cs[k % 5];
    p.d = oracle::random_vector(gen, n, 0.5);
    Matrix s = oracle::random_matrix(gen, n, n);
    p.S = s * (unit(gen) / spectral_norm(s));
    p.V = oracle::random_matrix(gen, n, n) + 0.5 * Matrix::Identity(n, n);
    if (Eigen::JacobiSVD<Matrix>(p.V).singularValues().minCoeff() < 1e-3) {
      p.V += Matrix::Identity(n, n);
    }
    const WeightCertificate w = parameterize_weight(p);
    const Matrix g = p.V.transpose() * p.V;
    Certificate c{spec(Arch::FiringRate, TimeDomain::Continuous, ActivationClass::mone(), p.c),
                  SymMatrix(g * g), DiagPosMatrix(Vector((-2.0 * p.d).array().exp())), 0.0};
    worst = std::min({worst, w.margin, certificate_margin(w.W, c)});
  }
  double worst_s = -1e300;
  int recon = 0;
  for (int k = 0; recon < 50 && k < 500; ++k) {
    const int n = 2 + k % 4;
    const Matrix w = oracle::random_matrix(gen, n, n, 0.4);
    const double c = 0.05 + 0.9 * unit(gen);
    const CertifyOutcome r = certify(w, spec(Arch::FiringRate, TimeDomain::Continuous,
                                             ActivationClass::mone(), c));
    if (!r.feasible()) continue;
    ++recon;
    const Matrix s = reconstruct_S(w, r.cert->P, r.cert->Q, c);
    worst_s = std::max(worst_s, oracle::max_eig(s.transpose() * s) - 1.0);
  }
  return {worst >= -1e-8 && recon == 50 && worst_s <= 1e-8,
          fmt("min margin %.2e over 300", worst) + fmt(", max eig(S'S) - 1 = %.2e over 50", worst_s)};
}

// Largest local slope of log ||x - y||_P, or the largest one-step ratio.
Outcome contraction_decay() {
  std::mt19937_64 gen(1006);
  int certified = 0, attempts = 0;
  double worst_cts = -1e300, worst_disc = -1e300;
  std::ostringstream d;
  while (certified < 20 && attempts < 400) {
    ++attempts;
    const Arch a = kArchs[certified % 2];
    const TimeDomain t = kTimes[(certified / 2) % 2];
    const ActivationClass s = kClasses[(certified / 4) % 2];
    const bool cts = t == TimeDomain::Continuous;
    const double rate = cts ? 0.3 : 0.6;
    const int n = 3 + certified % 3;
    const Matrix w = oracle::random_matrix(gen, n, n, (cts ? 0.5 : 0.25) / std::sqrt(double(n)));
    const CertifyOutcome r = certify(w, spec(a, t, s, rate));
    if (!r.feasible()) continue;
    ++certified;
    SynapticModel m;
    m.arch = a;
    m.domain = t;
    m.W = w;
    m.B = Matrix::Identity(n, n);
    m.C = Matrix::Zero(0, n);
    m.D = Matrix::Zero(0, n);
    m.act = Activation(ActivationKind::Tanh);
    const Vector u = oracle::random_vector(gen, n);
    const Vector x0 = oracle::random_vector(gen, n, 2.0), y0 = oracle::random_vector(gen, n, 2.0);
    const double dt = 1e-3, horizon = cts ? 20.0 : 40.0;
    const int every = cts ? 10 : 1;
    const Trajectory tx = simulate(m, constant_input(u), x0, horizon, dt, every);
    const Trajectory ty = simulate(m, constant_input(u), y0, horizon, dt, every);
    const SymMatrix& p = r.cert->P;
    for (std::size_t k = 1; k < tx.size(); ++k) {
      const double d0 = weighted_norm(tx.x[k - 1] - ty.x[k - 1], p);
      const double d1 = weighted_norm(tx.x[k] - ty.x[k], p);
      if (d0 < 1e-9 * weighted_norm(x0 - y0, p)) break;
      if (cts) {
        worst_cts = std::max(worst_cts, (std::log(d1) - std::log(d0)) / (tx.t[k] - tx.t[k - 1]) + rate);
      } else {
        worst_disc = std::max(worst_disc, d1 / d0 - rate);
      }
    }
  }
  d << certified << " models; max(slope + c) = " << fmt("%.2e", worst_cts)
    << ", max(ratio - rho) = " << fmt("%.2e", worst_disc);
  return {certified == 20 && worst_cts <= 1e-2 && worst_disc <= 1e-9, d.str()};
}

// Synthetic tracking plant: orthonormal actuation with matched sensing and a
// leaky activation with slope in [0.5, 1].
struct TrackingPlant {
  SynapticModel model;
  GainSet gains;
  NormConstants consts;
  double delta = 0.5;
  double bound = 0.0;
  bool ok = false;
  std::string why;
};

TrackingPlant tracking_plant() {
  TrackingPlant tp;
  std::mt19937_64 gen(2);
  const int n = 8, m = 2;
  SynapticModel& pl = tp.model;
  pl.W = oracle::random_matrix(gen, n, n, 0.1 / std::sqrt(double(n)));
  Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(gen, n, m));
  pl.B = qr.householderQ() * Matrix::Identity(n, m);
  pl.C = pl.B.transpose();
  pl.D = Matrix::Zero(m, m);
  pl.act = Activation::parse("leaky-relu:0.5");
  const double c_k = 0.8, c_o = 0.5;
  const GainDesign fb = synth_state_feedback(pl.W, pl.B, c_k);
  const GainDesign ob = synth_observer(pl.W, pl.C, c_o);
  if (!fb.feasible || !ob.feasible) {
    tp.why = "feedback or observer synthesis infeasible";
    return tp;
  }
  const IntegralDesign ig =
      synth_integral_gain_max_rate(pl.W + pl.B * fb.gain, pl.B, pl.C, tp.delta);
  if (!ig.feasible) {
    tp.why = "integral gain synthesis infeasible";
    return tp;
  }
  GainSet& g = tp.gains;
  g.K_f = fb.gain;
  g.L = ob.gain;
  g.K_i = ig.K_i;
  g.c_K = c_k;
  g.c_O = c_o;
  g.c_r = ig.c_r;
  g.P_X = fb.closed_loop->P;
  g.P_O = ob.closed_loop->P;
  g.P_R = ig.P;
  tp.consts = compute_norm_constants(pl.B, g.K_f, g.K_i, pl.C, g.P_X, g.P_O, g.P_R);
  tp.bound = epsilon_bound(tp.consts, c_k, ig.c_r);
  g.epsilon = 0.5 * tp.bound;
  tp.ok = std::isfinite(tp.bound) && tp.bound > 0.0;
  if (!tp.ok) tp.why = "no finite epsilon bound";
  return tp;
}

Outcome separation_bounds() {
  TrackingPlant tp = tracking_plant();
  if (!tp.ok) return {false, tp.why};
  GainSet g = tp.gains;
  g.epsilon = 0.0;
  std::mt19937_64 gen(1007);
  int ok = 0;
  double worst_obs = 0.0, worst_state = 0.0;
  std::size_t points = 0;
  const PiecewiseConstant ref{{0.0}, {Vector::Zero(2)}};
  for (int k = 0; k < 100; ++k) {
    ClosedLoopOptions co;
    co.horizon = 10.0;
    co.dt = 1e-3;
    co.record_every = 10;
    const Vector x0 = oracle::random_vector(gen, 8), xi0 = oracle::random_vector(gen, 8);
    const Vector u0 = oracle::random_vector(gen, 2, 0.5);
    const Trajectory tr = simulate_closed_loop(tp.model, g, ref, x0, xi0, u0, co);
    const BoundReport b = check_separation_bounds(tp.model, g, tp.consts, tr, BoundMode{}, 5e-2);
    ok += b.ok && !tr.diverged;
    points += b.checked;
    worst_obs = std::max(worst_obs, b.worst_obs_ratio);
    worst_state = std::max(worst_state, b.worst_state_ratio);
  }
  std::ostringstream d;
  d << ok << "/100 runs within bounds over " << points << " points; worst ratios "
    << fmt("%.3f", worst_obs) << " (observer), " << fmt("%.3f", worst_state) << " (state)";
  return {ok == 100, d.str()};
}

Outcome reference_tracking() {
  TrackingPlant tp = tracking_plant();
  if (!tp.ok) return {false, tp.why};
  const GainSet& g = tp.gains;
  const TrackingMatrix tm = tracking_gain_matrix(tp.consts, g.c_O, g.c_K, g.c_r, g.epsilon);
  Vector r1(2), r2(2);
  r1 << 0.3, -0.2;
  r2 << -0.1, 0.25;
  const double t_switch = 600.0, horizon = 1200.0;
  const PiecewiseConstant ref{{0.0, t_switch}, {r1, r2}};
  ClosedLoopOptions co;
  co.horizon = horizon;
  co.dt = 1e-3;
  co.record_every = 1000;
  const Vector zero8 = Vector::Zero(8);
  const Trajectory tr = simulate_closed_loop(tp.model, g, ref, zero8, zero8, Vector::Zero(2), co);
  if (tr.diverged) return {false, "closed loop diverged"};
  std::size_t before = 0;
  while (before + 1 < tr.size() && tr.t[before + 1] < t_switch) ++before;
  const double e1 = (tr.y[before] - r1).norm();
  const double e2 = (tr.y.back() - r2).norm();
  std::ostringstream d;
  d << "c_r=" << fmt("%.3f", g.c_r) << " eps=" << fmt("%.3g", g.epsilon)
    << " M Hurwitz=" << (tm.hurwitz ? "yes" : "no") << "; |y-r| " << fmt("%.1e", e1) << " at t="
    << fmt("%.0f", tr.t[before]) << ", " << fmt("%.1e", e2) << " at t=" << fmt("%.0f", tr.t.back());
  return {tm.hurwitz && e1 <= 1e-3 && e2 <= 1e-3, d.str()};
}

Outcome graph_equivalence() {
  std::mt19937_64 gen(1009);
  std::bernoulli_distribution edge(0.5);
  int certified = 0, attempts = 0;
  double worst_lmi = 0.0, worst_sim = 0.0;
  while (certified < 20 && attempts < 200) {
    ++attempts;
    const int n = 2 + attempts % 5;
    Matrix raw = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      raw(i, (i + 1) % n) = raw((i + 1) % n, i) = 1.0;
      for (int j = i + 2; j < n; ++j) {
        if (edge(gen)) raw(i, j) = raw(j, i) = 1.0;
      }
    }
    GraphModel g;
    const int m = 2 + attempts % 3;
    g.W = oracle::random_matrix(gen, m, m, 0.4);
    g.B = oracle::random_matrix(gen, m, 1);
    g.A = normalize_adjacency(raw).matrix();
    g.act = Activation(ActivationKind::Tanh);
    const double c = 0.2;
    const GraphCertOutcome r = graph_certify(g, c);
    if (!r.feasible()) continue;
    ++certified;
    const Matrix full = graph_full_lmi(g.W, g.A, r.cert->P, r.cert->Q, c, Matrix::Identity(n, n));
    const Vector lam = graph_spectrum(g, {});
    Vector blocks(0);
    for (int k = 0; k < lam.size(); ++k) {
      const Vector e = oracle::jacobi_eigenvalues(graph_eigen_block(g.W, lam(k), r.cert->P, r.cert->Q, c));
      blocks.conservativeResize(blocks.size() + e.size());
      blocks.tail(e.size()) = e;
    }
    const Vector fe = oracle::jacobi_eigenvalues(full);
    worst_lmi = std::max({worst_lmi, std::abs(fe.minCoeff() - blocks.minCoeff()),
                          std::abs(fe.maxCoeff() - blocks.maxCoeff())});
    const Matrix u = oracle::random_matrix(gen, 1, n);
    const Matrix x0 = oracle::random_matrix(gen, m, n);
    const GraphTrajectory gt = simulate_graph(g, u, x0, 3.0, 1e-2);
    SynapticModel v;
    v.W = kron(g.A.transpose(), g.W);
    v.B = kron(Matrix::Identity(n, n), g.B);
    v.C = Matrix::Zero(0, n * m);
    v.D = Matrix::Zero(0, n);
    v.act = g.act;
    const Trajectory vt = simulate(v, constant_input(vec(u)), vec(x0), 3.0, 1e-2);
    if (vt.size() != gt.X.size()) return {false, "trajectory lengths differ"};
    for (std::size_t k = 0; k < vt.size(); ++k) {
      worst_sim = std::max(worst_sim, (vec(gt.X[k]) - vt.x[k]).cwiseAbs().maxCoeff());
    }
  }
  std::ostringstream d;
  d << certified << " graphs; eigenvalue gap " << fmt("%.1e", worst_lmi) << ", simulation gap "
    << fmt("%.1e", worst_sim);
  return {certified == 20 && worst_lmi <= 1e-8 && worst_sim <= 1e-9, d.str()};
}

SynapticModel random_subsystem(std::mt19937_64& gen, int n, double scale, bool feedthrough) {
  SynapticModel s;
  s.W = oracle::random_matrix(gen, n, n, scale);
  s.B = oracle::random_matrix(gen, n, 1, 0.5);
  s.C = oracle::random_matrix(gen, 1, n, 0.5);
  s.D = feedthrough ? oracle::random_matrix(gen, 1, 1, 0.2) : Matrix::Zero(1, 1);
  s.act = Activation(ActivationKind::Tanh);
  return s;
}

Outcome interconnection_necessity() {
  std::mt19937_64 gen(1010);
  int certified = 0, attempts = 0, blocks_ok = 0, blocks = 0;
  const CertificateSpec s = spec(Arch::FiringRate, TimeDomain::Continuous, ActivationClass::mone(), 0.2);
  while (certified < 20 && attempts < 200) {
    ++attempts;
    const int k = 2 + attempts % 3;
    Interconnection ic;
    for (int i = 0; i < k; ++i) ic.subsystems.push_back(random_subsystem(gen, 2 + i % 2, 0.3, true));
    ic.coupling = oracle::random_matrix(gen, k, k, 0.4);
    const ComposedNetwork net = interconnect(ic);
    const CertifyOutcome r = certify(net.model.W, s);
    if (!r.feasible()) continue;
    ++certified;
    try {
      const std::vector<Certificate> local = block_necessary_check(*r.cert, net);
      for (int i = 0; i < net.num_subsystems(); ++i) {
        ++blocks;
        blocks_ok += oracle::certificate_violation(net.local_weight(i), local[i]) <= 1e-8;
      }
    } catch (const ConsistencyError&) {
      blocks += net.num_subsystems();
    }
  }
  // Skew-4 subsystem without feedthrough or self-loop in feedthrough-free networks.
  int skew_certified = 0, skew_runs = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Interconnection ic;
    SynapticModel skew = random_subsystem(gen, 2, 0.0, false);
    skew.W << 0, 4, -4, 0;
    ic.subsystems = {skew, random_subsystem(gen, 2, 0.3, false), random_subsystem(gen, 3, 0.3, false)};
    ic.coupling = oracle::random_matrix(gen, 3, 3, 1.0);
    ic.coupling(0, 0) = 0.0;
    const ComposedNetwork net = interconnect(ic);
    for (double c : {0.01, 0.1, 0.5}) {
      ++skew_runs;
      skew_certified += certify(net.model.W, spec(Arch::FiringRate, TimeDomain::Continuous,
                                                  ActivationClass::mone(), c))
                            .feasible();
    }
  }
  std::ostringstream d;
  d << certified << " networks, " << blocks_ok << "/" << blocks << " local certificates verify; skew network certified "
    << skew_certified << "/" << skew_runs;
  return {certified == 20 && blocks_ok == blocks && skew_certified == 0, d.str()};
}

Outcome deq_lipschitz() {
  std::mt19937_64 gen(1011);
  const int n = 4, in = 3;
  DeqSpec s;
  s.n = n;
  s.c = 0.3;
  s.d = oracle::random_vector(gen, n, 0.3);
  s.Y = oracle::random_matrix(gen, n, n, 0.5);
  s.x_map.layers = {{oracle::random_matrix(gen, 8, in, 0.5), oracle::random_vector(gen, 8),
                     Activation(ActivationKind::Tanh)},
                    {oracle::random_matrix(gen, n * n, 8, 0.4), oracle::random_vector(gen, n * n), {}}};
  s.b_map.layers = {{oracle::random_matrix(gen, 6, in), oracle::random_vector(gen, 6),
                     Activation::parse("leaky-relu:0.1")},
                    {oracle::random_matrix(gen, n, 6, 0.5), oracle::random_vector(gen, n), {}}};
  int violations = 0;
  double tightest = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vector u = oracle::random_vector(gen, in);
    const Vector v = u + oracle::random_vector(gen, in, k % 2 ? 0.05 : 1.0);
    const LipschitzReport r = lipschitz_bound_check(s, u, v);
    violations += !r.ok;
    tightest = std::max(tightest, r.distance / r.bound);
  }
  std::ostringstream d;
  d << violations << " violations in 200 pairs; max distance/bound " << fmt("%.3f", tightest);
  return {violations == 0, d.str()};
}

Outcome epsilon_consistency() {
  std::mt19937_64 gen(1012);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  int hurwitz = 0, fails = 0, tuples = 0;
  while (tuples < 100) {
    const NormConstants k{u(gen), u(gen), u(gen), u(gen)};
    const double c_o = u(gen), c_k = u(gen), c_r = u(gen);
    const double eb = epsilon_bound(k, c_k, c_r);
    if (!std::isfinite(eb)) continue;
    ++tuples;
    hurwitz += tracking_gain_matrix(k, c_o, c_k, c_r, 0.99 * eb).hurwitz;
    const TrackingMatrix over = tracking_gain_matrix(k, c_o, c_k, c_r, 1.01 * eb);
    fails += over.trace2 >= 0.0 || over.det2 <= 0.0;
  }
  std::ostringstream d;
  d << hurwitz << "/100 Hurwitz at 0.99x, " << fails << "/100 violate trace/det at 1.01x";
  return {hurwitz == 100 && fails == 100, d.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "skew counterexample", 5, skew_counterexample},
      {2, "symmetric sharpness", 60, symmetric_sharpness},
      {3, "structural relationships", 300, structural_relationships},
      {4, "Schur diagonal equivalence", 120, schur_equivalence},
      {5, "parameterization round-trip", 120, parameterization_round_trip},
      {6, "contraction decay", 120, contraction_decay},
      {7, "separation bounds", 180, separation_bounds},
      {8, "reference tracking", 120, reference_tracking},
      {9, "graph certificate equivalence", 120, graph_equivalence},
      {10, "interconnection necessity", 120, interconnection_necessity},
      {11, "DEQ Lipschitz guarantee", 120, deq_lipschitz},
      {12, "epsilon-bound consistency", 10, epsilon_consistency},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s [%2d] %s: %s (%.2f s of %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
