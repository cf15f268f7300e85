#pragma once

// Synaptic matrices that contract by construction, and implicit
// (equilibrium) networks whose weights depend on the input.

#include <optional>
#include <vector>

#include "rnncert/activation.hpp"
#include "rnncert/certificates.hpp"
#include "rnncert/linalg.hpp"

namespace rnncert {

/// W = 2 sqrt(1-c) diag(e^d) S V'V - diag(e^{2d}) (V'V)^2 with S'S <= I and V
/// full rank.
struct ParamWeights {
  Vector d;
  Matrix S;
  Matrix V;
  double c = 0.5;

  /// Throws InputError unless max_eig(S'S) <= 1 + 1e-10, sigma_min(V) >= 1e-8
  /// and c lies in [0, 1].
  void validate() const;
};

struct FreeWeights {
  Matrix X;
  Matrix Y;
  Vector d;
  double eps_reg = 1e-3;
};

/// W with its FR/CTS/MONE certificate P = (V'V)^2, Q = diag(e^{-2d}).
struct WeightCertificate {
  Matrix W;
  SymMatrix P;
  DiagPosMatrix Q;
  double c = 0.0;
  double margin = 0.0;  // verified margin of the certificate LMI
  bool contracting() const { return c > 0.0; }
};

WeightCertificate parameterize_weight(const ParamWeights& p);

/// S = X (I + X'X)^{-1/2}; V'V = sqrtm(Y'Y + eps I), V = sqrtm(V'V).
ParamWeights free_to_constrained(const FreeWeights& f, double c);

/// S = Q^{-1/2} (P + Q W) P^{-1/2} / (2 sqrt(1 - c)) for c < 1.
Matrix reconstruct_S(const Matrix& w, const SymMatrix& p, const DiagPosMatrix& q, double c);

struct AffineLayer {
  Matrix weight;
  Vector bias;
  std::optional<Activation> act;  // monotone, slope in [0, 1]
};

struct FeedForward {
  std::vector<AffineLayer> layers;

  int in_dim() const;
  int out_dim() const;
  Vector operator()(const Vector& u) const;
  /// Product of per-layer spectral norms.
  double lipschitz() const;
  void validate() const;
};

/// Input-dependent implicit network x = psi(W(u) x + B(u)). The shift d,
/// the factor Y and eps_reg are fixed; X(u) (row-major n x n) and B(u) are
/// feed-forward maps of the input.
struct DeqSpec {
  int n = 0;
  double c = 0.5;
  Vector d;
  Matrix Y;
  double eps_reg = 1e-3;
  FeedForward x_map;
  FeedForward b_map;
  Activation act{ActivationKind::Tanh};
  double delta_floor = 1e-12;

  void validate() const;
  int in_dim() const { return x_map.in_dim(); }
  /// Lipschitz constant of u -> W(u) in spectral norm.
  double lipschitz_w() const;
  double lipschitz_b() const { return b_map.lipschitz(); }
  WeightCertificate weight_at(const Vector& u) const;
};

struct DeqResult {
  Vector x_star;
  double delta = 0.0;  // lambda_min(2Q - QW - W'Q) / 2
  Matrix W;
  Vector B;
  DiagPosMatrix Q;
  double residual = 0.0;
};

/// Throws PreconditionError when delta(u) falls below the spec's floor.
DeqResult deq_forward(const DeqSpec& spec, const Vector& u, double tol = 1e-12,
                      const std::optional<Vector>& x0 = std::nullopt);

struct LipschitzReport {
  double distance = 0.0;  // ||x*(u) - x*(u')||
  double bound = 0.0;     // (||Q|| / delta) (l_W ||x*(u')|| + l_B) ||u - u'||
  double delta = 0.0;
  bool ok = true;
};

LipschitzReport lipschitz_bound_check(const DeqSpec& spec, const Vector& u,
                                      const Vector& u_prime, double tol = 1e-12);

}  // namespace rnncert
