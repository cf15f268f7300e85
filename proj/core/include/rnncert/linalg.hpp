#pragma once

// Dense real matrix primitives for desk-scale problems (n <= 128).

#include <Eigen/Dense>

namespace rnncert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric matrix. Construction symmetrizes (S + S^T)/2 and keeps the
/// size of the discarded skew part.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(int dim);
  static SymMatrix zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// max |S - S^T| entry of the matrix handed to the constructor.
  double asymmetry_defect() const { return defect_; }

 private:
  Matrix m_;
  double defect_ = 0.0;
};

/// Diagonal matrix with strictly positive diagonal.
class DiagPosMatrix {
 public:
  DiagPosMatrix() = default;
  explicit DiagPosMatrix(Vector diagonal);

  static DiagPosMatrix identity(int dim);

  int dim() const { return static_cast<int>(d_.size()); }
  const Vector& diagonal() const { return d_; }
  Matrix dense() const { return d_.asDiagonal(); }
  SymMatrix sym() const { return SymMatrix(dense()); }
  DiagPosMatrix inverse() const { return DiagPosMatrix(d_.cwiseInverse()); }

 private:
  Vector d_;
};

bool all_finite(const Matrix& m);

double min_eig(const SymMatrix& s);
double max_eig(const SymMatrix& s);
Vector eigenvalues(const SymMatrix& s);

Matrix kron(const Matrix& a, const Matrix& b);

/// sqrt(x^T P x). Requires P positive definite.
double weighted_norm(const Vector& x, const SymMatrix& p);

/// Largest singular value of P_out^{1/2} A P_in^{-1/2}.
double induced_norm(const Matrix& a, const SymMatrix& p_in, const SymMatrix& p_out);

double spectral_norm(const Matrix& a);

/// Largest real part among the eigenvalues of a square matrix.
double spectral_abscissa(const Matrix& a);

/// Orthonormal basis of Ker(A); rank threshold 1e-10 * sigma_max.
/// Returns an (cols x 0) matrix when the kernel is trivial.
Matrix null_basis(const Matrix& a);

/// Numerical rank with threshold rel_tol * sigma_max.
int numerical_rank(const Matrix& a, double rel_tol);

/// PSD square root. Eigenvalues down to -1e-10 * (1 + |S|) are clamped to zero.
SymMatrix sqrtm_psd(const SymMatrix& s);

/// Inverse square root of a positive definite matrix.
SymMatrix inv_sqrtm_pd(const SymMatrix& s);

SymMatrix inverse_pd(const SymMatrix& s);

Matrix block_diag(const Matrix& a, const Matrix& b);

}  // namespace rnncert
