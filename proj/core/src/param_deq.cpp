#include "rnncert/param_deq.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "rnncert/dynamics.hpp"
#include "rnncert/errors.hpp"

namespace rnncert {

namespace {

CertificateSpec mone_spec(double c) {
  return {Arch::FiringRate, TimeDomain::Continuous, ActivationClass::mone(), c};
}

void require_dim(const Matrix& m, Eigen::Index r, Eigen::Index c, const char* name) {
  if (m.rows() != r || m.cols() != c) {
    std::ostringstream msg;
    msg << name << " must be " << r << "x" << c << ", got " << m.rows() << "x" << m.cols();
    throw InputError(msg.str());
  }
  if (!all_finite(m)) throw InputError(std::string(name) + " has non-finite entries");
}

Matrix V_gram(const Matrix& v) { return SymMatrix(v.transpose() * v).matrix(); }

}  // namespace

void ParamWeights::validate() const {
  const Eigen::Index n = d.size();
  if (n == 0) throw InputError("d must be nonempty");
  require_dim(d, n, 1, "d");
  require_dim(S, n, n, "S");
  require_dim(V, n, n, "V");
  if (!(c >= 0.0 && c <= 1.0)) throw InputError("rate c must lie in [0, 1]");
  const double s_top = max_eig(SymMatrix(S.transpose() * S));
  if (s_top > 1.0 + 1e-10) {
    throw InputError("S'S exceeds the identity (max eigenvalue " + std::to_string(s_top) + ")");
  }
  const double v_min = Eigen::JacobiSVD<Matrix>(V).singularValues().minCoeff();
  if (v_min < 1e-8) throw InputError("V is rank deficient");
}

WeightCertificate parameterize_weight(const ParamWeights& p) {
  p.validate();
  const Matrix g = V_gram(p.V);
  const Vector e = p.d.array().exp();
  WeightCertificate out;
  out.c = p.c;
  out.W = 2.0 * std::sqrt(1.0 - p.c) * e.asDiagonal() * p.S * g -
          Matrix(e.array().square().matrix().asDiagonal()) * g * g;
  out.P = SymMatrix(g * g);
  out.Q = DiagPosMatrix(Vector((-2.0 * p.d).array().exp()));
  Certificate cert{mone_spec(p.c), out.P, out.Q, 0.0};
  out.margin = certificate_margin(out.W, cert);
  if (out.margin < -1e-8) {
    throw ConsistencyError("parameterized weight fails its certificate (margin " +
                           std::to_string(out.margin) + ")");
  }
  return out;
}

ParamWeights free_to_constrained(const FreeWeights& f, double c) {
  const Eigen::Index n = f.d.size();
  if (n == 0) throw InputError("d must be nonempty");
  require_dim(f.X, n, n, "X");
  require_dim(f.Y, n, n, "Y");
  if (!(f.eps_reg > 0.0)) throw InputError("eps_reg must be positive");
  ParamWeights p;
  p.d = f.d;
  p.c = c;
  const Matrix id = Matrix::Identity(n, n);
  p.S = f.X * inv_sqrtm_pd(SymMatrix(id + f.X.transpose() * f.X)).matrix();
  const SymMatrix gram = sqrtm_psd(SymMatrix(f.Y.transpose() * f.Y + f.eps_reg * id));
  p.V = sqrtm_psd(gram).matrix();
  return p;
}

Matrix reconstruct_S(const Matrix& w, const SymMatrix& p, const DiagPosMatrix& q, double c) {
  if (!(c >= 0.0 && c < 1.0)) throw InputError("reconstruction needs c in [0, 1)");
  const Vector q_inv_sqrt = q.diagonal().cwiseSqrt().cwiseInverse();
  return q_inv_sqrt.asDiagonal() * (p.matrix() + q.dense() * w) * inv_sqrtm_pd(p).matrix() /
         (2.0 * std::sqrt(1.0 - c));
}

int FeedForward::in_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
}

int FeedForward::out_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
}

void FeedForward::validate() const {
  if (layers.empty()) throw InputError("feed-forward map has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const AffineLayer& l = layers[i];
    const std::string name = "layer " + std::to_string(i);
    if (!all_finite(l.weight) || !all_finite(l.bias)) {
      throw InputError(name + " has non-finite entries");
    }
    if (l.bias.size() != l.weight.rows()) throw InputError(name + " bias has wrong length");
    if (i > 0 && l.weight.cols() != layers[i - 1].weight.rows()) {
      throw InputError(name + " input width does not match the previous layer");
    }
    if (l.act) {
      const ActivationClass s = l.act->slope_class();
      if (s.k1 < 0.0 || s.k2 > 1.0) throw InputError(name + " activation is not monotone");
    }
  }
}

Vector FeedForward::operator()(const Vector& u) const {
  Vector z = u;
  for (const AffineLayer& l : layers) {
    z = l.weight * z + l.bias;
    if (l.act) z = (*l.act)(z);
  }
  return z;
}

double FeedForward::lipschitz() const {
  double ell = 1.0;
  for (const AffineLayer& l : layers) ell *= spectral_norm(l.weight);
  return ell;
}

void DeqSpec::validate() const {
  if (n <= 0) throw InputError("state dimension must be positive");
  if (d.size() != n) throw InputError("d must have n entries");
  require_dim(Y, n, n, "Y");
  if (!(eps_reg > 0.0)) throw InputError("eps_reg must be positive");
  if (!(c >= 0.0 && c <= 1.0)) throw InputError("rate c must lie in [0, 1]");
  x_map.validate();
  b_map.validate();
  if (x_map.out_dim() != n * n) throw InputError("X map must produce n*n outputs");
  if (b_map.out_dim() != n) throw InputError("B map must produce n outputs");
  if (b_map.in_dim() != x_map.in_dim()) throw InputError("X and B maps take different inputs");
}

double DeqSpec::lipschitz_w() const {
  const Matrix id = Matrix::Identity(n, n);
  const SymMatrix gram = sqrtm_psd(SymMatrix(Y.transpose() * Y + eps_reg * id));
  return 2.0 * std::sqrt(1.0 - c) * d.array().exp().maxCoeff() * max_eig(gram) *
         x_map.lipschitz();
}

WeightCertificate DeqSpec::weight_at(const Vector& u) const {
  if (u.size() != in_dim()) throw InputError("input has wrong dimension");
  const Vector xv = x_map(u);
  // Row-major n x n.
  const Matrix x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                  Eigen::RowMajor>>(xv.data(), n, n);
  return parameterize_weight(free_to_constrained({x, Y, d, eps_reg}, c));
}

DeqResult deq_forward(const DeqSpec& spec, const Vector& u, double tol,
                      const std::optional<Vector>& x0) {
  spec.validate();
  const WeightCertificate wc = spec.weight_at(u);
  DeqResult out;
  out.W = wc.W;
  out.Q = wc.Q;
  out.B = spec.b_map(u);
  const Matrix q = wc.Q.dense();
  out.delta = 0.5 * min_eig(SymMatrix(2.0 * q - q * wc.W - wc.W.transpose() * q));
  if (!(out.delta > spec.delta_floor)) {
    throw PreconditionError("slope margin delta(u) = " + std::to_string(out.delta) +
                            " is not positive");
  }
  out.x_star = x0 ? fr_fixed_point(wc.W, out.B, spec.act, *x0, tol)
                  : fr_fixed_point(wc.W, out.B, spec.act, tol);
  out.residual = (spec.act(Vector(wc.W * out.x_star + out.B)) - out.x_star).norm();
  return out;
}

LipschitzReport lipschitz_bound_check(const DeqSpec& spec, const Vector& u,
                                      const Vector& u_prime, double tol) {
  const DeqResult a = deq_forward(spec, u, tol);
  const DeqResult b = deq_forward(spec, u_prime, tol);
  LipschitzReport r;
  r.delta = std::min(a.delta, b.delta);
  r.distance = (a.x_star - b.x_star).norm();
  const double q_norm = std::max(a.Q.diagonal().maxCoeff(), b.Q.diagonal().maxCoeff());
  r.bound = q_norm / r.delta *
            (spec.lipschitz_w() * b.x_star.norm() + spec.lipschitz_b()) * (u - u_prime).norm();
  // Each fixed point is only known to within roughly its residual over delta.
  const double solve_slack = (a.residual + b.residual) * q_norm / r.delta;
  r.ok = r.distance <= r.bound * (1.0 + 1e-6) + solve_slack;
  return r;
}

}  // namespace rnncert
