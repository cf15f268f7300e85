#include "rnncert/synthesis.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "rnncert/errors.hpp"

namespace rnncert {

namespace {

void require_rate(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw InputError("rate c must lie in (0, 1]");
}

void require_square(const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() == 0) throw InputError("W must be square");
  if (!all_finite(w)) throw InputError("W has non-finite entries");
}

CertificateSpec fr_cts_mone(double c) {
  CertificateSpec s;
  s.arch = Arch::FiringRate;
  s.domain = TimeDomain::Continuous;
  s.nonlin = ActivationClass::mone();
  s.rate = c;
  return s;
}

// Re-certify a closed loop from a candidate (P, Q); fall back to a fresh solve.
std::optional<Certificate> recertify(const Matrix& w_cl, double c, const Matrix& p,
                                     const Matrix& q, const SolverOptions& opts) {
  Certificate cand;
  cand.spec = fr_cts_mone(c);
  bool ok = min_eig(SymMatrix(p)) > 0.0 && q.diagonal().minCoeff() > 0.0;
  if (ok) {
    cand.P = SymMatrix(p);
    cand.Q = DiagPosMatrix(q.diagonal());
    cand.margin = certificate_margin(w_cl, cand);
    if (cand.margin >= 0.0) return cand;
  }
  const CertifyOutcome fresh = certify(w_cl, cand.spec, opts);
  if (fresh.feasible()) return fresh.cert;
  return std::nullopt;
}

bool pbh(const Matrix& a, const Matrix& b) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return true;
  Eigen::EigenSolver<Matrix> es(a, false);
  const double scale = 1.0 + spectral_norm(a);
  for (int i = 0; i < n; ++i) {
    const std::complex<double> lam = es.eigenvalues()(i);
    if (lam.real() < -1e-10 * scale) continue;
    Eigen::MatrixXcd m(n, n + b.cols());
    m.leftCols(n) = a.cast<std::complex<double>>() -
                    lam * Eigen::MatrixXcd::Identity(n, n);
    m.rightCols(b.cols()) = b.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    const double thresh = 1e-8 * sv(0);
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv(k) > thresh ? 1 : 0;
    if (rank < n) return false;
  }
  return true;
}

}  // namespace

GainDesign synth_state_feedback(const Matrix& w, const Matrix& b, double c,
                                const SolverOptions& opts) {
  require_square(w);
  require_rate(c);
  const int n = static_cast<int>(w.rows());
  if (b.rows() != n || b.cols() == 0) throw InputError("B must have n rows");
  const int m = static_cast<int>(b.cols());
  AffineLmi l;
  const int x = l.add_var("X", VarKind::Symmetric, n);
  const int d = l.add_var("D", VarKind::Diagonal, n);
  const int y = l.add_var("Y", VarKind::Rectangular, m, n);
  l.require_pd(x);
  l.require_pd(d);
  l.normalize_trace(x);
  const int blk = l.add_block(2 * n);
  const Matrix id;
  l.add_term(blk, 0, 0, id, x, id, -2.0 * (1.0 - c));
  l.add_term(blk, n, 0, id, d, id);
  l.add_term(blk, n, 0, w, x, id);
  l.add_term(blk, n, 0, b, y, id);
  l.add_term(blk, n, n, id, d, id, -2.0);

  const FeasResult r = solve_feasibility(l, opts);
  GainDesign out;
  out.status = r.status;
  out.best_margin = r.worst_margin;
  if (!r.feasible) return out;
  const SymMatrix xs(r.assignment[x]);
  const Matrix x_inv = inverse_pd(xs).matrix();
  out.gain = r.assignment[y] * x_inv;
  const Matrix q = r.assignment[d].diagonal().cwiseInverse().asDiagonal();
  out.closed_loop = recertify(w + b * out.gain, c, x_inv, q, opts);
  out.feasible = out.closed_loop.has_value();
  if (!out.feasible) out.status = SolveStatus::Infeasible;
  return out;
}

bool feedback_feasible_projection(const Matrix& w, const Matrix& b, const SolverOptions& opts) {
  require_square(w);
  const int n = static_cast<int>(w.rows());
  if (b.rows() != n) throw InputError("B must have n rows");
  const Matrix pi = null_basis(b.transpose());
  const int r = static_cast<int>(pi.cols());
  AffineLmi l;
  const int x = l.add_var("X", VarKind::Symmetric, n);
  const int d = l.add_var("D", VarKind::Diagonal, n);
  l.require_pd(x);
  l.require_pd(d);
  l.normalize_trace(x);
  const int blk = l.add_block(n + r);
  const Matrix id;
  l.add_term(blk, 0, 0, id, x, id, -2.0);
  if (r > 0) {
    const Matrix pit = pi.transpose();
    l.add_term(blk, n, 0, pit, d, id);
    l.add_term(blk, n, 0, pit * w, x, id);
    l.add_term(blk, n, n, pit, d, pi, -2.0);
  }
  return solve_feasibility(l, opts).feasible;
}

bool stabilizability_check(const Matrix& w, const Matrix& b) {
  require_square(w);
  if (b.rows() != w.rows()) throw InputError("B must have n rows");
  return pbh(w - Matrix::Identity(w.rows(), w.cols()), b);
}

GainDesign synth_observer(const Matrix& w, const Matrix& c_out, double c,
                          const SolverOptions& opts) {
  require_square(w);
  require_rate(c);
  const int n = static_cast<int>(w.rows());
  if (c_out.cols() != n || c_out.rows() == 0) throw InputError("C must have n columns");
  const int p = static_cast<int>(c_out.rows());
  AffineLmi l;
  const int pv = l.add_var("P", VarKind::Symmetric, n);
  const int qv = l.add_var("Q", VarKind::Diagonal, n);
  const int mv = l.add_var("M", VarKind::Rectangular, n, p);
  l.require_pd(pv);
  l.require_pd(qv);
  l.normalize_trace(pv);
  const int blk = l.add_block(2 * n);
  const Matrix id;
  l.add_term(blk, 0, 0, id, pv, id, -2.0 * (1.0 - c));
  l.add_term(blk, n, 0, id, pv, id);
  l.add_term(blk, n, 0, id, qv, w);
  l.add_term(blk, n, 0, id, mv, c_out, -1.0);
  l.add_term(blk, n, n, id, qv, id, -2.0);

  const FeasResult r = solve_feasibility(l, opts);
  GainDesign out;
  out.status = r.status;
  out.best_margin = r.worst_margin;
  if (!r.feasible) return out;
  const Vector qd = r.assignment[qv].diagonal();
  out.gain = qd.cwiseInverse().asDiagonal() * r.assignment[mv];
  out.closed_loop = recertify(w - out.gain * c_out, c, r.assignment[pv], r.assignment[qv], opts);
  out.feasible = out.closed_loop.has_value();
  if (!out.feasible) out.status = SolveStatus::Infeasible;
  return out;
}

bool observer_feasible_projection(const Matrix& w, const Matrix& c_out,
                                  const SolverOptions& opts) {
  require_square(w);
  const int n = static_cast<int>(w.rows());
  if (c_out.cols() != n) throw InputError("C must have n columns");
  const Matrix pi = null_basis(c_out);
  const int r = static_cast<int>(pi.cols());
  AffineLmi l;
  const int pv = l.add_var("P", VarKind::Symmetric, n);
  const int qv = l.add_var("Q", VarKind::Diagonal, n);
  l.require_pd(pv);
  l.require_pd(qv);
  l.normalize_trace(pv);
  const int blk = l.add_block(r + n);
  const Matrix id;
  if (r > 0) {
    l.add_term(blk, 0, 0, pi.transpose(), pv, pi, -2.0);
    l.add_term(blk, r, 0, id, pv, pi);
    l.add_term(blk, r, 0, id, qv, w * pi);
  }
  l.add_term(blk, r, r, id, qv, id, -2.0);
  return solve_feasibility(l, opts).feasible;
}

bool detectability_check(const Matrix& w, const Matrix& c_out) {
  require_square(w);
  if (c_out.cols() != w.rows()) throw InputError("C must have n columns");
  const Matrix a = w - Matrix::Identity(w.rows(), w.cols());
  return pbh(a.transpose(), c_out.transpose());
}

AffineLmi integral_gain_lmi(const Matrix& w_cl, const Matrix& b, const Matrix& c_out,
                            double delta, double c_r, double pd_floor) {
  require_square(w_cl);
  const int n = static_cast<int>(w_cl.rows());
  if (b.rows() != n || c_out.cols() != n) throw InputError("B and C must conform with W");
  if (!(delta > 0.0 && delta <= 1.0)) throw InputError("delta must lie in (0, 1]");
  if (!(c_r > 0.0)) throw InputError("c_r must be positive");
  const int m = static_cast<int>(b.cols());
  const int p = static_cast<int>(c_out.rows());
  const Matrix a = Matrix::Identity(n, n) - w_cl;
  const Matrix id;

  AffineLmi l;
  const int pv = l.add_var("P", VarKind::Symmetric, m);
  const int yv = l.add_var("Y", VarKind::Rectangular, m, p);
  const int qv = l.add_var("Q", VarKind::Diagonal, n);
  l.require_pd(pv, pd_floor);
  l.require_pd(qv, pd_floor);
  l.normalize_trace(pv);
  const int blk = l.add_block(m + n);
  l.add_term(blk, 0, 0, id, pv, id, 2.0 * c_r);
  l.add_term(blk, 0, 0, b.transpose(), qv, b, -2.0 * delta);
  // Z - Y C with Z = B'Q((1 - delta) I + 2 delta A)
  const Matrix zr = (1.0 - delta) * Matrix::Identity(n, n) + 2.0 * delta * a;
  l.add_term(blk, 0, m, b.transpose(), qv, zr);
  l.add_term(blk, 0, m, id, yv, c_out, -1.0);
  // -R = -2 delta A'QA - (1 - delta)(QA + A'Q)
  l.add_term(blk, m, m, a.transpose(), qv, a, -2.0 * delta);
  l.add_term(blk, m, m, id, qv, a, -2.0 * (1.0 - delta));
  return l;
}

IntegralDesign synth_integral_gain(const Matrix& w_cl, const Matrix& b, const Matrix& c_out,
                                   double delta, double c_r, const SolverOptions& opts) {
  const AffineLmi l = integral_gain_lmi(w_cl, b, c_out, delta, c_r);
  const FeasResult r = solve_feasibility(l, opts);
  IntegralDesign out;
  out.status = r.status;
  out.best_margin = r.worst_margin;
  if (!r.feasible) return out;
  out.feasible = true;
  out.c_r = c_r;
  out.P = SymMatrix(r.assignment[0]);
  out.Y = r.assignment[1];
  out.Q = DiagPosMatrix(r.assignment[2].diagonal());
  out.K_i = inverse_pd(out.P).matrix() * out.Y;
  return out;
}

IntegralDesign synth_integral_gain_max_rate(const Matrix& w_cl, const Matrix& b,
                                            const Matrix& c_out, double delta, double tol,
                                            double c_max, const SolverOptions& opts) {
  if (!(c_max > tol && tol > 0.0)) throw InputError("need 0 < tol < c_max");
  const int m = static_cast<int>(b.cols());
  const int p = static_cast<int>(c_out.rows());
  auto family = [&](double c_r) {
    AffineLmi l = integral_gain_lmi(w_cl, b, c_out, delta, c_r);
    // [[I, Y], [Y', I]] >= 0, i.e. ||Y|| <= 1.
    const int blk = l.add_block(m + p, Sense::PosSemidef);
    l.add_constant(blk, 0, 0, Matrix::Identity(m, m));
    l.add_constant(blk, m, m, Matrix::Identity(p, p));
    l.add_term(blk, 0, m, Matrix(), 1, Matrix());
    return l;
  };
  const BisectResult br = bisect_rate(family, tol, c_max, tol, opts);
  IntegralDesign out;
  out.status = br.at_rate.status;
  out.best_margin = br.at_rate.worst_margin;
  if (br.lo_infeasible) {
    out.status = br.at_rate.status == SolveStatus::BudgetExhausted ? SolveStatus::BudgetExhausted
                                                                    : SolveStatus::Infeasible;
    return out;
  }
  const Assignment& a = br.at_rate.assignment;
  out.feasible = true;
  out.status = SolveStatus::Feasible;
  out.c_r = br.rate;
  out.P = SymMatrix(a[0]);
  out.Y = a[1];
  out.Q = DiagPosMatrix(a[2].diagonal());
  out.K_i = inverse_pd(out.P).matrix() * out.Y;
  out.best_margin = verify_assignment(integral_gain_lmi(w_cl, b, c_out, delta, out.c_r), a);
  return out;
}

double input_lipschitz(const Matrix& b, const SymMatrix& p_x) {
  const int n = static_cast<int>(b.rows());
  if (p_x.dim() != n) throw InputError("input_lipschitz: weight does not conform with B");
  const SymMatrix id_u = SymMatrix::identity(static_cast<int>(b.cols()));
  if (n > 16) return spectral_norm(sqrtm_psd(p_x).matrix()) * spectral_norm(b);
  double best = 0.0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Matrix db = b;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) db.row(i).setZero();
    }
    best = std::max(best, induced_norm(db, id_u, p_x));
  }
  return best;
}

NormConstants compute_norm_constants(const Matrix& b, const Matrix& k_f, const Matrix& k_i,
                                     const Matrix& c_out, const SymMatrix& p_x,
                                     const SymMatrix& p_o, const SymMatrix& p_r) {
  const SymMatrix id_u = SymMatrix::identity(static_cast<int>(b.cols()));
  NormConstants k;
  k.ell_u = input_lipschitz(b, p_x);
  k.ell_K = induced_norm(k_f, p_o, id_u);
  const Matrix kc = k_i * c_out;
  k.ell_iR = induced_norm(kc, p_x, p_r);
  k.ell_iU = induced_norm(kc, p_x, id_u);
  return k;
}

double epsilon_bound(const NormConstants& k, double c_k, double c_r) {
  if (!(c_k > 0.0) || !(c_r > 0.0)) throw InputError("epsilon_bound: rates must be positive");
  const double inf = std::numeric_limits<double>::infinity();
  const double a = k.ell_iU * k.ell_u;
  const double a1 = a - c_k * c_r;
  const double b1 = a1 > 0.0 ? c_k * c_k / a1 : inf;
  const double a2 = a * (c_k * c_r + k.ell_u * k.ell_iR);
  const double b2 = a2 > 0.0 ? c_r * c_k * c_k * c_k / a2 : inf;
  return std::min(b1, b2);
}

TrackingMatrix tracking_gain_matrix(const NormConstants& k, double c_o, double c_k, double c_r,
                                    double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  const double a = k.ell_iU * k.ell_u;
  TrackingMatrix t;
  t.M = Matrix::Zero(3, 3);
  t.M(0, 0) = -c_o;
  t.M(1, 0) = k.ell_u * k.ell_K;
  t.M(1, 1) = -(c_k - epsilon * a / c_k);
  t.M(1, 2) = epsilon * k.ell_iU * k.ell_u * k.ell_u / (c_k * c_k);
  t.M(2, 1) = epsilon * k.ell_iR;
  t.M(2, 2) = -epsilon * c_r;
  t.trace2 = t.M(1, 1) + t.M(2, 2);
  t.det2 = t.M(1, 1) * t.M(2, 2) - t.M(1, 2) * t.M(2, 1);
  t.hurwitz = spectral_abscissa(t.M) < 0.0;
  return t;
}

}  // namespace rnncert
