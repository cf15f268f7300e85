#include "sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rnncert::detail {

namespace {

constexpr double kStepDamping = 0.95;

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha in (0, inf] with X + alpha*dX >= 0, given the Cholesky factor of X.
double max_step(const Eigen::LLT<Matrix>& chol, const Matrix& dx) {
  const Matrix& l = chol.matrixL();
  Matrix t = l.triangularView<Eigen::Lower>().solve(dx);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(t), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

double max_step_lp(const Vector& v, const Vector& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  }
  return a;
}

struct State {
  std::vector<Matrix> X, Z;
  Vector x, s, y;
};

class Solver {
 public:
  Solver(const SdpData& d, const SdpSettings& s) : d_(d), s_(s) {
    nb_ = static_cast<int>(d_.C.size());
    m_ = static_cast<int>(d_.b.size());
    nlp_ = static_cast<int>(d_.c_lp.size());
    nu_ = nlp_;
    for (const auto& c : d_.C) nu_ += static_cast<double>(c.rows());
  }

  SdpOutcome run() {
    init();
    SdpOutcome out;
    for (int it = 1; it <= s_.max_iterations; ++it) {
      if (!step()) {
        out.exit = SdpExit::NumericalFailure;
        out.last = snapshot(it);
        return out;
      }
      out.last = snapshot(it);
      const auto& r = out.last;
      const double gap = std::abs(r.primal_obj - r.dual_obj) /
                         (1.0 + std::abs(r.primal_obj) + std::abs(r.dual_obj));
      if (s_.monitor && s_.monitor(r)) {
        out.exit = SdpExit::Stopped;
        return out;
      }
      if (gap < s_.gap_tol && r.primal_infeas < s_.feas_tol && r.dual_infeas < s_.feas_tol) {
        out.exit = SdpExit::Converged;
        return out;
      }
    }
    out.exit = SdpExit::IterationLimit;
    return out;
  }

 private:
  void init() {
    double scale = 1.0;
    for (const auto& c : d_.C) {
      if (c.size() > 0) scale = std::max(scale, c.cwiseAbs().maxCoeff());
    }
    if (nlp_ > 0) scale = std::max(scale, d_.c_lp.cwiseAbs().maxCoeff());
    st_.X.resize(nb_);
    st_.Z.resize(nb_);
    for (int j = 0; j < nb_; ++j) {
      const auto n = d_.C[j].rows();
      st_.X[j] = Matrix::Identity(n, n);
      st_.Z[j] = std::sqrt(scale) * Matrix::Identity(n, n);
    }
    st_.x = Vector::Ones(nlp_);
    st_.s = std::sqrt(scale) * Vector::Ones(nlp_);
    st_.y = Vector::Zero(m_);
  }

  // A(X)_i = sum_j tr(A_ij X_j) + A_lp(:, i)' x
  Vector apply_a(const std::vector<Matrix>& x, const Vector& xlp) const {
    Vector r = Vector::Zero(m_);
    for (int j = 0; j < nb_; ++j) {
      for (const auto& [i, a] : d_.A[j]) r(i) += a.cwiseProduct(x[j]).sum();
    }
    if (nlp_ > 0) r += d_.A_lp.transpose() * xlp;
    return r;
  }

  // sum_i y_i A_ij for one block
  Matrix apply_at(int j, const Vector& y) const {
    Matrix r = Matrix::Zero(d_.C[j].rows(), d_.C[j].cols());
    for (const auto& [i, a] : d_.A[j]) r += y(i) * a;
    return r;
  }

  double mu() const {
    double t = 0.0;
    for (int j = 0; j < nb_; ++j) t += st_.X[j].cwiseProduct(st_.Z[j]).sum();
    if (nlp_ > 0) t += st_.x.dot(st_.s);
    return t / nu_;
  }

  SdpIterate snapshot(int it) const {
    SdpIterate r;
    r.y = st_.y;
    r.iteration = it;
    double pobj = 0.0;
    double dnorm = 0.0;
    double cnorm = 1.0;
    for (int j = 0; j < nb_; ++j) {
      pobj += d_.C[j].cwiseProduct(st_.X[j]).sum();
      const Matrix rd = d_.C[j] - st_.Z[j] - apply_at(j, st_.y);
      dnorm = std::max(dnorm, rd.cwiseAbs().maxCoeff());
      cnorm = std::max(cnorm, d_.C[j].cwiseAbs().maxCoeff());
    }
    if (nlp_ > 0) {
      pobj += d_.c_lp.dot(st_.x);
      const Vector rd = d_.c_lp - st_.s - d_.A_lp * st_.y;
      dnorm = std::max(dnorm, rd.cwiseAbs().maxCoeff());
    }
    r.primal_obj = pobj;
    r.dual_obj = d_.b.dot(st_.y);
    r.primal_infeas =
        (d_.b - apply_a(st_.X, st_.x)).cwiseAbs().maxCoeff() / (1.0 + d_.b.cwiseAbs().maxCoeff());
    r.dual_infeas = dnorm / cnorm;
    return r;
  }

  struct Direction {
    std::vector<Matrix> dX, dZ;
    Vector dx, ds, dy;
  };

  // Solves the Newton system. comp_j is the target (sigma*mu*I - dXa*dZa)
  // of the complementarity equation; comp_lp its linear analogue.
  bool direction(const std::vector<Matrix>& comp, const Vector& comp_lp, Direction& dir) {
    std::vector<Matrix> h(nb_);
    std::vector<Matrix> rd(nb_);
    for (int j = 0; j < nb_; ++j) {
      rd[j] = d_.C[j] - st_.Z[j] - apply_at(j, st_.y);
      h[j] = comp[j] * zinv_[j] - st_.X[j] - st_.X[j] * rd[j] * zinv_[j];
    }
    Vector hlp, rdlp;
    if (nlp_ > 0) {
      rdlp = d_.c_lp - st_.s - d_.A_lp * st_.y;
      hlp = (comp_lp.array() / st_.s.array()).matrix() - st_.x -
            (st_.x.array() * rdlp.array() / st_.s.array()).matrix();
    }
    const Vector rp = d_.b - apply_a(st_.X, st_.x);
    const Vector rhs = rp - apply_a(h, hlp);

    dir.dy = schur_.solve(rhs);
    if (!dir.dy.allFinite()) return false;

    dir.dX.resize(nb_);
    dir.dZ.resize(nb_);
    for (int j = 0; j < nb_; ++j) {
      const Matrix ady = apply_at(j, dir.dy);
      dir.dZ[j] = rd[j] - ady;
      dir.dX[j] = sym(h[j] + st_.X[j] * ady * zinv_[j]);
    }
    if (nlp_ > 0) {
      const Vector ady = d_.A_lp * dir.dy;
      dir.ds = rdlp - ady;
      dir.dx = hlp + (st_.x.array() * ady.array() / st_.s.array()).matrix();
    }
    return true;
  }

  bool build_schur() {
    Matrix m = Matrix::Zero(m_, m_);
    zinv_.resize(nb_);
    for (int j = 0; j < nb_; ++j) {
      Eigen::LLT<Matrix> llt(st_.Z[j]);
      if (llt.info() != Eigen::Success) return false;
      zinv_[j] = sym(llt.solve(Matrix::Identity(st_.Z[j].rows(), st_.Z[j].cols())));
      for (const auto& [k, ak] : d_.A[j]) {
        const Matrix t = st_.X[j] * ak * zinv_[j];
        for (const auto& [i, ai] : d_.A[j]) m(i, k) += ai.cwiseProduct(t).sum();
      }
    }
    if (nlp_ > 0) {
      const Vector w = (st_.x.array() / st_.s.array()).matrix();
      m += d_.A_lp.transpose() * w.asDiagonal() * d_.A_lp;
    }
    m = sym(m);
    schur_.compute(m);
    if (schur_.info() != Eigen::Success) {
      const double shift = 1e-12 * (1.0 + m.diagonal().cwiseAbs().maxCoeff());
      m.diagonal().array() += shift;
      schur_.compute(m);
      if (schur_.info() != Eigen::Success) return false;
    }
    return true;
  }

  void step_lengths(const Direction& dir, double& ap, double& ad) const {
    ap = std::numeric_limits<double>::infinity();
    ad = ap;
    for (int j = 0; j < nb_; ++j) {
      ap = std::min(ap, max_step(xchol_[j], dir.dX[j]));
      ad = std::min(ad, max_step(zchol_[j], dir.dZ[j]));
    }
    if (nlp_ > 0) {
      ap = std::min(ap, max_step_lp(st_.x, dir.dx));
      ad = std::min(ad, max_step_lp(st_.s, dir.ds));
    }
  }

  bool step() {
    xchol_.clear();
    zchol_.clear();
    for (int j = 0; j < nb_; ++j) {
      xchol_.emplace_back(st_.X[j]);
      zchol_.emplace_back(st_.Z[j]);
      if (xchol_.back().info() != Eigen::Success || zchol_.back().info() != Eigen::Success) {
        return false;
      }
    }
    if (!build_schur()) return false;
    const double mu0 = mu();

    // Predictor: affine-scaling direction.
    std::vector<Matrix> comp(nb_);
    for (int j = 0; j < nb_; ++j) comp[j] = Matrix::Zero(st_.X[j].rows(), st_.X[j].cols());
    Vector comp_lp = Vector::Zero(nlp_);
    Direction pred;
    if (!direction(comp, comp_lp, pred)) return false;
    double ap = 0.0, ad = 0.0;
    step_lengths(pred, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (int j = 0; j < nb_; ++j) {
      mu_aff += (st_.X[j] + ap * pred.dX[j]).cwiseProduct(st_.Z[j] + ad * pred.dZ[j]).sum();
    }
    if (nlp_ > 0) mu_aff += (st_.x + ap * pred.dx).dot(st_.s + ad * pred.ds);
    mu_aff /= nu_;
    const double sigma = std::clamp(std::pow(mu_aff / mu0, 3.0), 0.0, 1.0);

    // Corrector.
    for (int j = 0; j < nb_; ++j) {
      comp[j] = sigma * mu0 * Matrix::Identity(st_.X[j].rows(), st_.X[j].cols()) -
                pred.dX[j] * pred.dZ[j];
    }
    if (nlp_ > 0) {
      comp_lp = (sigma * mu0 - (pred.dx.array() * pred.ds.array())).matrix();
    }
    Direction corr;
    if (!direction(comp, comp_lp, corr)) return false;
    step_lengths(corr, ap, ad);
    ap = std::min(1.0, kStepDamping * ap);
    ad = std::min(1.0, kStepDamping * ad);

    for (int j = 0; j < nb_; ++j) {
      st_.X[j] = sym(st_.X[j] + ap * corr.dX[j]);
      st_.Z[j] = sym(st_.Z[j] + ad * corr.dZ[j]);
    }
    if (nlp_ > 0) {
      st_.x += ap * corr.dx;
      st_.s += ad * corr.ds;
    }
    st_.y += ad * corr.dy;
    return st_.y.allFinite();
  }

  const SdpData& d_;
  const SdpSettings& s_;
  int nb_ = 0, m_ = 0, nlp_ = 0;
  double nu_ = 0.0;
  State st_;
  std::vector<Matrix> zinv_;
  std::vector<Eigen::LLT<Matrix>> xchol_, zchol_;
  Eigen::LLT<Matrix> schur_;
};

}  // namespace

SdpOutcome solve_sdp(const SdpData& data, const SdpSettings& settings) {
  Solver s(data, settings);
  return s.run();
}

}  // namespace rnncert::detail
