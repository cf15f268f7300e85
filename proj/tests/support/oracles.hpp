#pragma once

// Reference computations for tests. Nothing here calls the library's solvers
// or LMI builders, so agreement with them is evidence rather than tautology.

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "rnncert/certificates.hpp"

namespace oracle {

using rnncert::Matrix;
using rnncert::Vector;

// Cyclic Jacobi rotations on a symmetric matrix; returns ascending eigenvalues.
inline Vector jacobi_eigenvalues(Matrix a, double tol = 1e-14, int sweeps = 100) {
  const Eigen::Index n = a.rows();
  a = 0.5 * (a + a.transpose()).eval();
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= tol * std::max(1.0, a.norm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  Vector ev = a.diagonal();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

inline double max_eig(const Matrix& a) { return jacobi_eigenvalues(a).maxCoeff(); }
inline double min_eig(const Matrix& a) { return jacobi_eigenvalues(a).minCoeff(); }

// Multiplier in the unscaled form: CONE -> diag(Q, -Q); otherwise the slope
// form [[-2 k1 k2 Q, (k1 + k2) Q], [., -2Q]].
inline Matrix multiplier(const rnncert::ActivationClass& s, const Matrix& q) {
  const Eigen::Index m = q.rows();
  Matrix out = Matrix::Zero(2 * m, 2 * m);
  if (s.is_cone()) {
    out.topLeftCorner(m, m) = q;
    out.bottomRightCorner(m, m) = -q;
  } else {
    out.topLeftCorner(m, m) = -2.0 * s.k1 * s.k2 * q;
    out.topRightCorner(m, m) = (s.k1 + s.k2) * q;
    out.bottomLeftCorner(m, m) = (s.k1 + s.k2) * q;
    out.bottomRightCorner(m, m) = -2.0 * q;
  }
  return out;
}

// Dense Lur'e inequality for xdot = A x + B psi(H x) (or x+ = ...).
inline Matrix lure_matrix(const Matrix& a, const Matrix& b, const Matrix& h, const Matrix& p,
                          const Matrix& mult, bool continuous, double rate) {
  const Eigen::Index n = a.rows(), m = b.cols();
  Matrix base(n + m, n + m);
  if (continuous) {
    base << p * a + a.transpose() * p + 2.0 * rate * p, p * b, b.transpose() * p,
        Matrix::Zero(m, m);
  } else {
    base << a.transpose() * p * a - rate * rate * p, a.transpose() * p * b,
        b.transpose() * p * a, b.transpose() * p * b;
  }
  Matrix hh = Matrix::Zero(2 * m, n + m);
  hh.topLeftCorner(m, n) = h;
  hh.bottomRightCorner(m, m) = Matrix::Identity(m, m);
  return base + hh.transpose() * mult * hh;
}

// The certificate inequality for a network model, assembled from its Lur'e
// data: FR uses (A, B, H) = (-I, I, W) or (0, I, W); Hopfield (-I, W, I) or (0, W, I).
inline Matrix certificate_matrix(const Matrix& w, const rnncert::Certificate& c) {
  const Eigen::Index n = w.rows();
  const bool cts = c.spec.domain == rnncert::TimeDomain::Continuous;
  const Matrix a = cts ? Matrix(-Matrix::Identity(n, n)) : Matrix(Matrix::Zero(n, n));
  const Matrix id = Matrix::Identity(n, n);
  const bool fr = c.spec.arch == rnncert::Arch::FiringRate;
  const Matrix mult = multiplier(c.spec.nonlin, c.Q.dense());
  return lure_matrix(a, fr ? id : w, fr ? w : id, c.P.matrix(), mult, cts, c.spec.rate);
}

// Largest eigenvalue of the certificate inequality, relative to the size of P.
inline double certificate_violation(const Matrix& w, const rnncert::Certificate& c) {
  return max_eig(certificate_matrix(w, c)) / std::max(1.0, c.P.matrix().norm());
}

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c,
                            double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(gen);
  return m;
}

inline Vector random_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
  return random_matrix(gen, n, 1, scale);
}

inline Matrix random_symmetric(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
  const Matrix a = random_matrix(gen, n, n, scale);
  return 0.5 * (a + a.transpose());
}

inline Matrix random_spd(std::mt19937_64& gen, Eigen::Index n) {
  const Matrix a = random_matrix(gen, n, n);
  return a * a.transpose() + 0.5 * Matrix::Identity(n, n);
}

// Symmetric matrix with prescribed eigenvalues and a random orthogonal basis.
inline Matrix with_spectrum(std::mt19937_64& gen, const Vector& lambda) {
  const Eigen::Index n = lambda.size();
  Eigen::HouseholderQR<Matrix> qr(random_matrix(gen, n, n));
  const Matrix u = qr.householderQ();
  return u * lambda.asDiagonal() * u.transpose();
}

// Matrix exponential by scaling and squaring with a Taylor core.
inline Matrix expm(const Matrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  const Matrix b = a / std::pow(2.0, s);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

}  // namespace oracle
