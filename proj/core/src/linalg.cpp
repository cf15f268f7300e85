#include "rnncert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rnncert/errors.hpp"

namespace rnncert {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InputError(std::string(what) + ": expected a square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) throw InputError(std::string(what) + ": non-finite entry");
}

Eigen::SelfAdjointEigenSolver<Matrix> eig(const SymMatrix& s, bool vectors) {
  require_finite(s.matrix(), "eigendecomposition");
  return Eigen::SelfAdjointEigenSolver<Matrix>(
      s.matrix(), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

void require_pd(const SymMatrix& p, const char* what) {
  if (p.dim() == 0) return;
  const double lo = min_eig(p);
  if (!(lo > 0.0)) {
    throw PreconditionError(std::string(what) +
                            ": weight is not positive definite (min eigenvalue " +
                            std::to_string(lo) + ")");
  }
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  require_square(m, "SymMatrix");
  const Matrix skew = m - m.transpose();
  defect_ = skew.size() == 0 ? 0.0 : skew.cwiseAbs().maxCoeff();
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(int dim) { return SymMatrix(Matrix::Identity(dim, dim)); }
SymMatrix SymMatrix::zero(int dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

DiagPosMatrix::DiagPosMatrix(Vector diagonal) : d_(std::move(diagonal)) {
  for (Eigen::Index i = 0; i < d_.size(); ++i) {
    if (!(d_(i) > 0.0) || !std::isfinite(d_(i))) {
      throw InputError("DiagPosMatrix: diagonal entry " + std::to_string(i) +
                       " is not a positive finite number");
    }
  }
}

DiagPosMatrix DiagPosMatrix::identity(int dim) { return DiagPosMatrix(Vector::Ones(dim)); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

double min_eig(const SymMatrix& s) {
  if (s.dim() == 0) return std::numeric_limits<double>::infinity();
  return eig(s, false).eigenvalues()(0);
}

double max_eig(const SymMatrix& s) {
  if (s.dim() == 0) return -std::numeric_limits<double>::infinity();
  return eig(s, false).eigenvalues()(s.dim() - 1);
}

Vector eigenvalues(const SymMatrix& s) {
  if (s.dim() == 0) return Vector();
  return eig(s, false).eigenvalues();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double weighted_norm(const Vector& x, const SymMatrix& p) {
  if (x.size() != p.dim()) throw InputError("weighted_norm: dimension mismatch");
  require_pd(p, "weighted_norm");
  const double q = x.dot(p.matrix() * x);
  return std::sqrt(std::max(q, 0.0));
}

double induced_norm(const Matrix& a, const SymMatrix& p_in, const SymMatrix& p_out) {
  if (a.cols() != p_in.dim() || a.rows() != p_out.dim()) {
    throw InputError("induced_norm: dimension mismatch");
  }
  require_pd(p_in, "induced_norm (input weight)");
  require_pd(p_out, "induced_norm (output weight)");
  if (a.size() == 0) return 0.0;
  const Matrix scaled =
      sqrtm_psd(p_out).matrix() * a * inv_sqrtm_pd(p_in).matrix();
  return spectral_norm(scaled);
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  require_finite(a, "spectral_norm");
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double spectral_abscissa(const Matrix& a) {
  require_square(a, "spectral_abscissa");
  require_finite(a, "spectral_abscissa");
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  require_finite(a, "numerical_rank");
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  const double thresh = rel_tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) ++rank;
  }
  return rank;
}

Matrix null_basis(const Matrix& a) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || n == 0) return Matrix::Identity(n, n);
  require_finite(a, "null_basis");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thresh = 1e-10 * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) ++rank;
  }
  if (sv(0) == 0.0) rank = 0;
  return svd.matrixV().rightCols(n - rank);
}

SymMatrix sqrtm_psd(const SymMatrix& s) {
  if (s.dim() == 0) return s;
  const auto es = eig(s, true);
  const double scale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
  Vector lam = es.eigenvalues();
  if (lam(0) < -1e-10 * scale) {
    throw PreconditionError("sqrtm_psd: matrix is indefinite (min eigenvalue " +
                            std::to_string(lam(0)) + ")");
  }
  lam = lam.cwiseMax(0.0).cwiseSqrt();
  const Matrix& u = es.eigenvectors();
  return SymMatrix(u * lam.asDiagonal() * u.transpose());
}

SymMatrix inv_sqrtm_pd(const SymMatrix& s) {
  if (s.dim() == 0) return s;
  const auto es = eig(s, true);
  if (!(es.eigenvalues()(0) > 0.0)) {
    throw PreconditionError("inv_sqrtm_pd: matrix is not positive definite");
  }
  const Vector lam = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix& u = es.eigenvectors();
  return SymMatrix(u * lam.asDiagonal() * u.transpose());
}

SymMatrix inverse_pd(const SymMatrix& s) {
  if (s.dim() == 0) return s;
  Eigen::LLT<Matrix> llt(s.matrix());
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("inverse_pd: matrix is not positive definite");
  }
  return SymMatrix(llt.solve(Matrix::Identity(s.dim(), s.dim())));
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace rnncert
