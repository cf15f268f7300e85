#pragma once

// Contraction certificates for firing-rate and Hopfield networks: the eight
// CONE/MONE x CTS/DISC LMIs, their Lur'e-system origin, and the structural
// maps between them.

#include <optional>

#include "rnncert/linalg.hpp"
#include "rnncert/lmi.hpp"

namespace rnncert {

enum class Arch { FiringRate, Hopfield };
enum class TimeDomain { Continuous, Discrete };

/// Diagonal activation with every component slope-restricted to [k1, k2].
struct ActivationClass {
  double k1 = 0.0;
  double k2 = 1.0;

  static ActivationClass cone() { return {-1.0, 1.0}; }
  static ActivationClass mone() { return {0.0, 1.0}; }
  static ActivationClass slope(double k1, double k2);

  bool is_cone() const { return k1 == -1.0 && k2 == 1.0; }
  bool is_mone() const { return k1 == 0.0 && k2 == 1.0; }
};

/// rate is c for continuous time and the factor rho for discrete time.
struct CertificateSpec {
  Arch arch = Arch::FiringRate;
  TimeDomain domain = TimeDomain::Continuous;
  ActivationClass nonlin = ActivationClass::mone();
  double rate = 0.5;
};

struct Certificate {
  CertificateSpec spec;
  SymMatrix P;
  DiagPosMatrix Q;
  double margin = 0.0;
};

struct CertifyOutcome {
  std::optional<Certificate> cert;
  SolveStatus status = SolveStatus::Infeasible;
  double best_margin = 0.0;
  int iterations = 0;

  bool feasible() const { return cert.has_value(); }
};

/// [[-2 k1 k2 Q, (k1+k2) Q], [(k1+k2) Q, -2 Q]]
SymMatrix multiplier_for_slope(double k1, double k2, const DiagPosMatrix& q);

/// Lur'e LMI for x' = A x + B psi(H x) (or x+ = ...) with decision variables
/// P (index 0, symmetric) and the multiplier's diagonal Q (index 1).
/// P and Q carry positivity floors; trace(P) is normalized.
AffineLmi lure_lmi(const Matrix& a, const Matrix& b, const Matrix& h, ActivationClass nonlin,
                   TimeDomain domain, double rate, double pd_floor = 1e-6);

/// The certificate LMI for W under spec, variables P (0) and Q (1). CONE and
/// MONE use the tabulated closed forms; other slope classes go through lure_lmi.
AffineLmi certificate_lmi(const Matrix& w, const CertificateSpec& spec, double pd_floor = 1e-6);

/// Margin of (P, Q) on certificate_lmi(W, cert.spec), recomputed from scratch.
double certificate_margin(const Matrix& w, const Certificate& cert);

void validate_spec(const CertificateSpec& spec);

CertifyOutcome certify(const Matrix& w, const CertificateSpec& spec,
                       const SolverOptions& opts = {});

struct RateOutcome {
  bool infeasible = false;     // even the easiest rate fails
  double rate = 0.0;           // best c (CTS) or smallest rho (DISC)
  std::optional<Certificate> cert;
};

/// Best certifiable rate by bisection: largest c in [0, 1] for continuous
/// time, smallest rho in [0, 1] for discrete time. spec.rate is ignored.
RateOutcome max_rate(const Matrix& w, const CertificateSpec& spec, double tol = 1e-3,
                     const SolverOptions& opts = {});

/// Diagonal Q > 0 with W'QW - Q < 0.
std::optional<DiagPosMatrix> schur_diag_stable(const Matrix& w, const SolverOptions& opts = {});

/// Diagonal Q > 0 with Q(W - I) + (W - I)'Q < 0.
std::optional<DiagPosMatrix> lds_check(const Matrix& w, const SolverOptions& opts = {});

/// Certificate for W' under the other architecture, built explicitly from cert.
Certificate dual_transform(const Matrix& w, const Certificate& cert);

/// Same (P, Q) at continuous rate c = (1 - rho^2)/2.
Certificate disc_to_cts_transfer(const Matrix& w, const Certificate& cert);

/// Closed-form FR/CTS/MONE certificate for symmetric W with spectral abscissa
/// below one; the rate is min(1, 1 - alpha).
Certificate symmetric_closed_form(const SymMatrix& w, double pd_floor = 1e-6);

}  // namespace rnncert
