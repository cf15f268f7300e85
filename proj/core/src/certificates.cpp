#include "rnncert/certificates.hpp"

#include <cmath>
#include <string>

#include "rnncert/errors.hpp"

namespace rnncert {

namespace {

constexpr int kP = 0;
constexpr int kQ = 1;

void require_square(const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() == 0) {
    throw InputError("W must be a nonempty square matrix");
  }
  if (!all_finite(w)) throw InputError("W has non-finite entries");
}

struct PqLmi {
  AffineLmi lmi;
  int n;
  int block;
};

PqLmi pq_lmi(int n, double pd_floor) {
  PqLmi out{AffineLmi{}, n, 0};
  out.lmi.add_var("P", VarKind::Symmetric, n);
  out.lmi.add_var("Q", VarKind::Diagonal, n);
  out.lmi.require_pd(kP, pd_floor);
  out.lmi.require_pd(kQ, pd_floor);
  out.lmi.normalize_trace(kP);
  out.block = out.lmi.add_block(2 * n);
  return out;
}

AffineLmi table_lmi(const Matrix& w, const CertificateSpec& s, double pd_floor) {
  const int n = static_cast<int>(w.rows());
  PqLmi t = pq_lmi(n, pd_floor);
  AffineLmi& l = t.lmi;
  const int b = t.block;
  const Matrix id;  // identity shorthand
  const Matrix wt = w.transpose();
  const bool cone = s.nonlin.is_cone();
  const bool fr = s.arch == Arch::FiringRate;
  if (s.domain == TimeDomain::Continuous) {
    const double c = s.rate;
    l.add_term(b, 0, 0, id, kP, id, -2.0 * (1.0 - c));
    if (fr) {
      l.add_term(b, n, 0, id, kP, id);
      if (cone) {
        l.add_term(b, 0, 0, wt, kQ, w);
        l.add_term(b, n, n, id, kQ, id, -1.0);
      } else {
        l.add_term(b, n, 0, id, kQ, w);
        l.add_term(b, n, n, id, kQ, id, -2.0);
      }
    } else {
      l.add_term(b, n, 0, wt, kP, id);
      if (cone) {
        l.add_term(b, 0, 0, id, kQ, id);
        l.add_term(b, n, n, id, kQ, id, -1.0);
      } else {
        l.add_term(b, n, 0, id, kQ, id);
        l.add_term(b, n, n, id, kQ, id, -2.0);
      }
    }
  } else {
    const double r2 = s.rate * s.rate;
    l.add_term(b, 0, 0, id, kP, id, -r2);
    if (fr) {
      if (cone) {
        l.add_term(b, 0, 0, wt, kQ, w);
        l.add_term(b, n, n, id, kP, id);
        l.add_term(b, n, n, id, kQ, id, -1.0);
      } else {
        l.add_term(b, n, 0, id, kQ, w);
        l.add_term(b, n, n, id, kP, id);
        l.add_term(b, n, n, id, kQ, id, -2.0);
      }
    } else {
      if (cone) {
        l.add_term(b, 0, 0, id, kQ, id);
        l.add_term(b, n, n, wt, kP, w);
        l.add_term(b, n, n, id, kQ, id, -1.0);
      } else {
        l.add_term(b, n, 0, id, kQ, id);
        l.add_term(b, n, n, wt, kP, w);
        l.add_term(b, n, n, id, kQ, id, -2.0);
      }
    }
  }
  return l;
}

Certificate make_cert(const CertificateSpec& spec, const Matrix& p, const Matrix& q) {
  Certificate c;
  c.spec = spec;
  c.P = SymMatrix(p);
  c.Q = DiagPosMatrix(q.diagonal());
  return c;
}

}  // namespace

ActivationClass ActivationClass::slope(double k1, double k2) {
  if (!std::isfinite(k1) || !std::isfinite(k2) || k1 > k2) {
    throw InputError("slope class needs finite k1 <= k2");
  }
  return {k1, k2};
}

SymMatrix multiplier_for_slope(double k1, double k2, const DiagPosMatrix& q) {
  if (k1 > k2) throw InputError("multiplier_for_slope: k1 must not exceed k2");
  const int m = q.dim();
  const Matrix qd = q.dense();
  Matrix out(2 * m, 2 * m);
  out << -2.0 * k1 * k2 * qd, (k1 + k2) * qd, (k1 + k2) * qd, -2.0 * qd;
  return SymMatrix(out);
}

AffineLmi lure_lmi(const Matrix& a, const Matrix& b, const Matrix& h, ActivationClass nonlin,
                   TimeDomain domain, double rate, double pd_floor) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  if (a.cols() != n || b.rows() != n || h.rows() != m || h.cols() != n) {
    throw InputError("lure_lmi: A must be n x n, B n x m and H m x n");
  }
  if (nonlin.k1 > nonlin.k2) throw InputError("lure_lmi: k1 must not exceed k2");
  AffineLmi l;
  l.add_var("P", VarKind::Symmetric, n);
  l.add_var("Q", VarKind::Diagonal, m);
  l.require_pd(kP, pd_floor);
  l.require_pd(kQ, pd_floor);
  l.normalize_trace(kP);
  const int blk = l.add_block(n + m);
  const Matrix id;
  const Matrix ht = h.transpose();
  const Matrix bt = b.transpose();
  const Matrix at = a.transpose();
  const double k1 = nonlin.k1;
  const double k2 = nonlin.k2;

  if (domain == TimeDomain::Continuous) {
    l.add_term(blk, 0, 0, id, kP, a, 2.0);
    l.add_term(blk, 0, 0, id, kP, id, 2.0 * rate);
    l.add_term(blk, n, 0, bt, kP, id);
  } else {
    l.add_term(blk, 0, 0, at, kP, a);
    l.add_term(blk, 0, 0, id, kP, id, -rate * rate);
    l.add_term(blk, n, 0, bt, kP, a);
    l.add_term(blk, n, n, bt, kP, b);
  }
  if (k1 * k2 != 0.0) l.add_term(blk, 0, 0, ht, kQ, h, -2.0 * k1 * k2);
  if (k1 + k2 != 0.0) l.add_term(blk, n, 0, id, kQ, h, k1 + k2);
  l.add_term(blk, n, n, id, kQ, id, -2.0);
  return l;
}

void validate_spec(const CertificateSpec& spec) {
  if (!std::isfinite(spec.rate)) throw InputError("rate must be finite");
  if (spec.domain == TimeDomain::Continuous) {
    if (!(spec.rate > 0.0 && spec.rate <= 1.0)) {
      throw InputError("continuous-time rate c must lie in (0, 1]");
    }
  } else if (!(spec.rate >= 0.0 && spec.rate < 1.0)) {
    throw InputError("discrete-time factor rho must lie in [0, 1)");
  }
  if (spec.nonlin.k1 > spec.nonlin.k2) throw InputError("slope class needs k1 <= k2");
}

AffineLmi certificate_lmi(const Matrix& w, const CertificateSpec& spec, double pd_floor) {
  require_square(w);
  if (spec.nonlin.is_cone() || spec.nonlin.is_mone()) return table_lmi(w, spec, pd_floor);
  const int n = static_cast<int>(w.rows());
  const Matrix id = Matrix::Identity(n, n);
  const bool cts = spec.domain == TimeDomain::Continuous;
  const Matrix a = cts ? Matrix(-id) : Matrix(Matrix::Zero(n, n));
  if (spec.arch == Arch::FiringRate) {
    return lure_lmi(a, id, w, spec.nonlin, spec.domain, spec.rate, pd_floor);
  }
  return lure_lmi(a, w, id, spec.nonlin, spec.domain, spec.rate, pd_floor);
}

double certificate_margin(const Matrix& w, const Certificate& cert) {
  const AffineLmi l = certificate_lmi(w, cert.spec);
  return verify_assignment(l, {cert.P.matrix(), cert.Q.dense()});
}

CertifyOutcome certify(const Matrix& w, const CertificateSpec& spec, const SolverOptions& opts) {
  require_square(w);
  validate_spec(spec);
  const FeasResult r = solve_feasibility(certificate_lmi(w, spec), opts);
  CertifyOutcome out;
  out.status = r.status;
  out.best_margin = r.worst_margin;
  out.iterations = r.iterations;
  if (r.feasible) {
    Certificate c = make_cert(spec, r.assignment[kP], r.assignment[kQ]);
    c.margin = r.worst_margin;
    out.cert = c;
  }
  return out;
}

RateOutcome max_rate(const Matrix& w, const CertificateSpec& spec, double tol,
                     const SolverOptions& opts) {
  require_square(w);
  const bool cts = spec.domain == TimeDomain::Continuous;
  // For discrete time bisect on t = 1 - rho so that larger is harder.
  auto family = [&](double t) {
    CertificateSpec s = spec;
    s.rate = cts ? t : 1.0 - t;
    return certificate_lmi(w, s);
  };
  const BisectResult br = bisect_rate(family, 0.0, 1.0, tol, opts);
  RateOutcome out;
  out.infeasible = br.lo_infeasible;
  out.rate = cts ? br.rate : 1.0 - br.rate;
  if (!br.lo_infeasible) {
    CertificateSpec s = spec;
    s.rate = out.rate;
    Certificate c = make_cert(s, br.at_rate.assignment[kP], br.at_rate.assignment[kQ]);
    c.margin = br.at_rate.worst_margin;
    out.cert = c;
  }
  return out;
}

namespace {

std::optional<DiagPosMatrix> diag_stability(const Matrix& w, bool discrete,
                                            const SolverOptions& opts) {
  require_square(w);
  const int n = static_cast<int>(w.rows());
  AffineLmi l;
  const int q = l.add_var("Q", VarKind::Diagonal, n);
  l.require_pd(q);
  l.normalize_trace(q);
  const int b = l.add_block(n);
  const Matrix id;
  if (discrete) {
    l.add_term(b, 0, 0, w.transpose(), q, w);
    l.add_term(b, 0, 0, id, q, id, -1.0);
  } else {
    const Matrix a = w - Matrix::Identity(n, n);
    l.add_term(b, 0, 0, id, q, a, 2.0);
  }
  const FeasResult r = solve_feasibility(l, opts);
  if (!r.feasible) return std::nullopt;
  return DiagPosMatrix(r.assignment[q].diagonal());
}

}  // namespace

std::optional<DiagPosMatrix> schur_diag_stable(const Matrix& w, const SolverOptions& opts) {
  return diag_stability(w, true, opts);
}

std::optional<DiagPosMatrix> lds_check(const Matrix& w, const SolverOptions& opts) {
  return diag_stability(w, false, opts);
}

Certificate dual_transform(const Matrix& w, const Certificate& cert) {
  require_square(w);
  const CertificateSpec& s = cert.spec;
  if (!s.nonlin.is_cone() && !s.nonlin.is_mone()) {
    throw InputError("dual_transform: only CONE and MONE certificates have explicit duals");
  }
  CertificateSpec ds = s;
  ds.arch = s.arch == Arch::FiringRate ? Arch::Hopfield : Arch::FiringRate;
  const Matrix p_inv = inverse_pd(cert.P).matrix();
  const Matrix q_inv = cert.Q.inverse().dense();
  const double rho = s.rate;
  Matrix p2;
  if (s.domain == TimeDomain::Continuous) {
    p2 = p_inv;
  } else if (s.nonlin.is_mone()) {
    if (!(rho > 0.0)) throw PreconditionError("dual_transform: discrete MONE dual needs rho > 0");
    p2 = p_inv / (rho * rho);
  } else if (s.arch == Arch::FiringRate) {
    if (!(rho > 0.0)) throw PreconditionError("dual_transform: discrete CONE dual needs rho > 0");
    p2 = q_inv / (rho * rho);
  } else {
    p2 = q_inv;
  }
  Certificate out = make_cert(ds, p2, q_inv);
  out.margin = certificate_margin(w.transpose(), out);
  return out;
}

Certificate disc_to_cts_transfer(const Matrix& w, const Certificate& cert) {
  if (cert.spec.domain != TimeDomain::Discrete) {
    throw InputError("disc_to_cts_transfer expects a discrete-time certificate");
  }
  Certificate out = cert;
  out.spec.domain = TimeDomain::Continuous;
  out.spec.rate = 0.5 * (1.0 - cert.spec.rate * cert.spec.rate);
  out.margin = certificate_margin(w, out);
  if (out.margin < -1e-9) {
    throw ConsistencyError("transferred certificate fails verification (margin " +
                           std::to_string(out.margin) + ")");
  }
  return out;
}

Certificate symmetric_closed_form(const SymMatrix& w, double pd_floor) {
  if (w.asymmetry_defect() > 1e-9 * (1.0 + w.matrix().cwiseAbs().maxCoeff())) {
    throw InputError("symmetric_closed_form needs a symmetric W");
  }
  const int n = w.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> es(w.matrix());
  const Vector& lam = es.eigenvalues();
  const double alpha = lam.maxCoeff();
  if (alpha >= 1.0) {
    throw PreconditionError("spectral abscissa " + std::to_string(alpha) +
                            " >= 1: no contraction certificate exists");
  }
  CertificateSpec spec;
  spec.arch = Arch::FiringRate;
  spec.domain = TimeDomain::Continuous;
  spec.nonlin = ActivationClass::mone();
  Matrix p;
  Matrix q;
  if (alpha <= 0.0) {
    spec.rate = 1.0;
    p = -w.matrix();
    if (alpha == 0.0) p += pd_floor * Matrix::Identity(n, n);
    q = Matrix::Identity(n, n);
  } else {
    spec.rate = 1.0 - alpha;
    Vector s2(n);
    for (int i = 0; i < n; ++i) {
      const double s = 2.0 * alpha + 2.0 * std::sqrt(alpha * std::max(0.0, alpha - lam(i)));
      s2(i) = s * s;
    }
    const Matrix& u = es.eigenvectors();
    p = u * s2.asDiagonal() * u.transpose();
    q = 4.0 * alpha * Matrix::Identity(n, n);
  }
  Certificate c = make_cert(spec, p, q);
  c.margin = certificate_margin(w.matrix(), c);
  return c;
}

}  // namespace rnncert
