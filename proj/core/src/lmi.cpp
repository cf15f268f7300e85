#include "rnncert/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rnncert/errors.hpp"
#include "sdp_solver.hpp"

namespace rnncert {

namespace {

// Scalar coordinate q of a variable as a rows x cols basis matrix.
Matrix basis(const DecisionVar& v, int q) {
  Matrix e = Matrix::Zero(v.rows, v.cols);
  switch (v.kind) {
    case VarKind::Symmetric: {
      int i = 0;
      int rem = q;
      while (rem >= v.rows - i) {
        rem -= v.rows - i;
        ++i;
      }
      const int j = i + rem;
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      break;
    }
    case VarKind::Diagonal:
      e(q, q) = 1.0;
      break;
    case VarKind::Rectangular:
      e(q / v.cols, q % v.cols) = 1.0;
      break;
    case VarKind::Scalar:
      e(0, 0) = 1.0;
      break;
  }
  return e;
}

void place(Matrix& target, int row, int col, const Matrix& m) {
  if (row == col) {
    target.block(row, row, m.rows(), m.cols()) += 0.5 * (m + m.transpose());
  } else {
    target.block(row, col, m.rows(), m.cols()) += m;
    target.block(col, row, m.cols(), m.rows()) += m.transpose();
  }
}

Matrix lhs(const Matrix& left, const Matrix& v) {
  return left.size() == 0 ? v : Matrix(left * v);
}
Matrix rhs(const Matrix& v, const Matrix& right) {
  return right.size() == 0 ? v : Matrix(v * right);
}

double block_margin(const Matrix& f, Sense sense) {
  if (f.rows() == 0) return std::numeric_limits<double>::infinity();
  const SymMatrix s(f);
  return sense == Sense::NegSemidef ? -max_eig(s) : min_eig(s);
}

}  // namespace

int AffineLmi::add_var(const std::string& name, VarKind kind, int rows, int cols) {
  DecisionVar v;
  v.name = name;
  v.kind = kind;
  switch (kind) {
    case VarKind::Symmetric:
    case VarKind::Diagonal:
      v.rows = v.cols = rows;
      v.count = kind == VarKind::Symmetric ? rows * (rows + 1) / 2 : rows;
      break;
    case VarKind::Rectangular:
      v.rows = rows;
      v.cols = cols;
      v.count = rows * cols;
      break;
    case VarKind::Scalar:
      v.rows = v.cols = 1;
      v.count = 1;
      break;
  }
  if (v.rows < 1 || v.cols < 1) {
    throw InputError("decision variable '" + name + "' must have positive dimensions");
  }
  v.offset = num_params_;
  num_params_ += v.count;
  vars_.push_back(v);
  return static_cast<int>(vars_.size()) - 1;
}

int AffineLmi::add_block(int dim, Sense sense) {
  if (dim < 0) throw InputError("block dimension must be nonnegative");
  blocks_.push_back(Block{dim, sense, {}, {}});
  return static_cast<int>(blocks_.size()) - 1;
}

void AffineLmi::check_placement(int block, int row, int col, Eigen::Index r,
                                Eigen::Index c) const {
  if (block < 0 || block >= num_blocks()) throw InputError("unknown block index");
  const int dim = blocks_[block].dim;
  if (row < 0 || col < 0 || row + r > dim || col + c > dim) {
    throw InputError("term placement exceeds block dimension");
  }
  if (row == col && r != c) throw InputError("diagonal placement needs a square term");
  if (row != col && row < col + c && col < row + r) {
    throw InputError("off-diagonal placement overlaps the diagonal");
  }
}

void AffineLmi::add_constant(int block, int row, int col, const Matrix& c) {
  check_placement(block, row, col, c.rows(), c.cols());
  if (!all_finite(c)) throw InputError("non-finite constant in LMI");
  blocks_[block].constants.push_back(Constant{row, col, c});
}

void AffineLmi::add_term(int block, int row, int col, const Matrix& left, int var,
                         const Matrix& right, double scale) {
  if (var < 0 || var >= num_vars()) throw InputError("unknown decision variable");
  const DecisionVar& v = vars_[var];
  if (left.size() != 0 && left.cols() != v.rows) {
    throw InputError("left factor does not conform with '" + v.name + "'");
  }
  if (right.size() != 0 && right.rows() != v.cols) {
    throw InputError("right factor does not conform with '" + v.name + "'");
  }
  const Eigen::Index r = left.size() == 0 ? v.rows : left.rows();
  const Eigen::Index c = right.size() == 0 ? v.cols : right.cols();
  check_placement(block, row, col, r, c);
  if (!all_finite(left) || !all_finite(right)) throw InputError("non-finite factor in LMI");
  blocks_[block].terms.push_back(Term{row, col, left, var, right, scale});
}

void AffineLmi::require_pd(int var, double floor) {
  DecisionVar& v = vars_.at(var);
  if (v.kind != VarKind::Symmetric && v.kind != VarKind::Diagonal) {
    throw InputError("positivity applies to symmetric or diagonal variables only");
  }
  if (!(floor > 0.0)) throw InputError("positivity floor must be > 0");
  v.positive = true;
  v.floor = floor;
}

void AffineLmi::normalize_trace(int var) {
  DecisionVar& v = vars_.at(var);
  if (v.kind != VarKind::Symmetric && v.kind != VarKind::Diagonal) {
    throw InputError("trace normalization applies to square variables only");
  }
  v.trace_normalized = true;
}

Matrix AffineLmi::evaluate(int block, const Assignment& a) const {
  check_shapes(a);
  const Block& b = blocks_.at(block);
  Matrix f = Matrix::Zero(b.dim, b.dim);
  for (const auto& c : b.constants) place(f, c.row, c.col, c.value);
  for (const auto& t : b.terms) {
    place(f, t.row, t.col, t.scale * rhs(lhs(t.left, a[t.var]), t.right));
  }
  return f;
}

void AffineLmi::check_shapes(const Assignment& a) const {
  if (static_cast<int>(a.size()) != num_vars()) {
    throw InputError("assignment has " + std::to_string(a.size()) + " entries, expected " +
                     std::to_string(num_vars()));
  }
  for (int i = 0; i < num_vars(); ++i) {
    if (a[i].rows() != vars_[i].rows || a[i].cols() != vars_[i].cols) {
      throw InputError("assignment for '" + vars_[i].name + "' has wrong shape");
    }
  }
}

Vector AffineLmi::pack(const Assignment& a) const {
  check_shapes(a);
  Vector x(num_params_);
  for (const auto& v : vars_) {
    const Matrix& m = a[&v - vars_.data()];
    int q = v.offset;
    switch (v.kind) {
      case VarKind::Symmetric:
        for (int i = 0; i < v.rows; ++i) {
          for (int j = i; j < v.rows; ++j) x(q++) = 0.5 * (m(i, j) + m(j, i));
        }
        break;
      case VarKind::Diagonal:
        for (int i = 0; i < v.rows; ++i) x(q++) = m(i, i);
        break;
      case VarKind::Rectangular:
        for (int i = 0; i < v.rows; ++i) {
          for (int j = 0; j < v.cols; ++j) x(q++) = m(i, j);
        }
        break;
      case VarKind::Scalar:
        x(q) = m(0, 0);
        break;
    }
  }
  return x;
}

Assignment AffineLmi::unpack(const Vector& x) const {
  if (x.size() != num_params_) throw InputError("packed vector has wrong length");
  Assignment a;
  a.reserve(vars_.size());
  for (const auto& v : vars_) {
    Matrix m = Matrix::Zero(v.rows, v.cols);
    int q = v.offset;
    switch (v.kind) {
      case VarKind::Symmetric:
        for (int i = 0; i < v.rows; ++i) {
          for (int j = i; j < v.rows; ++j) {
            m(i, j) = x(q);
            m(j, i) = x(q++);
          }
        }
        break;
      case VarKind::Diagonal:
        for (int i = 0; i < v.rows; ++i) m(i, i) = x(q++);
        break;
      case VarKind::Rectangular:
        for (int i = 0; i < v.rows; ++i) {
          for (int j = 0; j < v.cols; ++j) m(i, j) = x(q++);
        }
        break;
      case VarKind::Scalar:
        m(0, 0) = x(q);
        break;
    }
    a.push_back(std::move(m));
  }
  return a;
}

Matrix AffineLmi::constant_part(int block) const {
  const Block& b = blocks_.at(block);
  Matrix f = Matrix::Zero(b.dim, b.dim);
  for (const auto& c : b.constants) place(f, c.row, c.col, c.value);
  return f;
}

std::vector<Matrix> AffineLmi::coefficients(int block) const {
  const Block& b = blocks_.at(block);
  std::vector<Matrix> out(num_params_);
  for (const auto& t : b.terms) {
    const DecisionVar& v = vars_[t.var];
    for (int q = 0; q < v.count; ++q) {
      Matrix& f = out[v.offset + q];
      if (f.size() == 0) f = Matrix::Zero(b.dim, b.dim);
      place(f, t.row, t.col, t.scale * rhs(lhs(t.left, basis(v, q)), t.right));
    }
  }
  return out;
}

std::vector<double> block_margins(const AffineLmi& lmi, const Assignment& a) {
  std::vector<double> out;
  for (int b = 0; b < lmi.num_blocks(); ++b) {
    out.push_back(block_margin(lmi.evaluate(b, a), lmi.block_sense(b)));
  }
  return out;
}

double verify_assignment(const AffineLmi& lmi, const Assignment& a) {
  lmi.check_shapes(a);
  for (const auto& m : a) {
    if (!all_finite(m)) throw InputError("assignment contains non-finite entries");
  }
  double worst = std::numeric_limits<double>::infinity();
  for (double m : block_margins(lmi, a)) worst = std::min(worst, m);
  for (int i = 0; i < lmi.num_vars(); ++i) {
    if (lmi.var(i).positive) worst = std::min(worst, min_eig(SymMatrix(a[i])));
  }
  return worst;
}

namespace {

// Affine reparameterization x = x0 + N z that enforces every trace normalization.
void trace_reduction(const AffineLmi& lmi, Vector& x0, Matrix& n) {
  const int np = lmi.num_params();
  x0 = Vector::Zero(np);
  std::vector<bool> dropped(np, false);
  std::vector<std::pair<int, int>> ties;  // (free coordinate, pivot coordinate)
  for (int i = 0; i < lmi.num_vars(); ++i) {
    const DecisionVar& v = lmi.var(i);
    if (!v.trace_normalized) continue;
    std::vector<int> diag;
    if (v.kind == VarKind::Diagonal) {
      for (int k = 0; k < v.rows; ++k) diag.push_back(v.offset + k);
    } else {
      int q = v.offset;
      for (int r = 0; r < v.rows; ++r) {
        diag.push_back(q);
        q += v.rows - r;
      }
    }
    for (int d : diag) x0(d) = 1.0;
    const int pivot = diag.back();
    dropped[pivot] = true;
    for (std::size_t k = 0; k + 1 < diag.size(); ++k) ties.emplace_back(diag[k], pivot);
  }
  int nz = 0;
  for (int k = 0; k < np; ++k) nz += dropped[k] ? 0 : 1;
  n = Matrix::Zero(np, nz);
  int col = 0;
  for (int k = 0; k < np; ++k) {
    if (dropped[k]) continue;
    n(k, col) = 1.0;
    for (const auto& [f, p] : ties) {
      if (f == k) n(p, col) = -1.0;
    }
    ++col;
  }
}

}  // namespace

FeasResult solve_feasibility(const AffineLmi& lmi, const SolverOptions& opts) {
  if (!(opts.target_margin >= 0.0)) throw InputError("target margin must be >= 0");
  if (lmi.num_vars() == 0) throw InputError("LMI has no decision variables");

  Vector x0;
  Matrix nmap;
  trace_reduction(lmi, x0, nmap);
  const int nz = static_cast<int>(nmap.cols());
  const int mvar = nz;  // index of the margin variable
  const int ny = nz + 1;

  detail::SdpData data;
  data.b = Vector::Zero(ny);
  data.b(mvar) = 1.0;

  auto reduce = [&](const std::vector<Matrix>& coeff, int dim, Matrix& c0,
                    std::vector<std::pair<int, Matrix>>& az, double sign) {
    for (int l = 0; l < static_cast<int>(coeff.size()); ++l) {
      if (coeff[l].size() != 0 && x0(l) != 0.0) c0 += x0(l) * coeff[l];
    }
    for (int k = 0; k < nz; ++k) {
      Matrix g;
      for (int l = 0; l < static_cast<int>(coeff.size()); ++l) {
        if (coeff[l].size() == 0 || nmap(l, k) == 0.0) continue;
        if (g.size() == 0) g = Matrix::Zero(dim, dim);
        g += nmap(l, k) * coeff[l];
      }
      if (g.size() != 0) az.emplace_back(k, sign * g);
    }
  };

  for (int b = 0; b < lmi.num_blocks(); ++b) {
    const int dim = lmi.block_dim(b);
    if (dim == 0) continue;
    Matrix f0 = lmi.constant_part(b);
    std::vector<std::pair<int, Matrix>> az;
    const bool nsd = lmi.block_sense(b) == Sense::NegSemidef;
    // NSD: Z = -F(x) - m I ; PSD: Z = F(x) - m I.
    reduce(lmi.coefficients(b), dim, f0, az, nsd ? 1.0 : -1.0);
    az.emplace_back(mvar, Matrix::Identity(dim, dim));
    data.C.push_back(nsd ? Matrix(-f0) : f0);
    data.A.push_back(std::move(az));
  }
  for (int i = 0; i < lmi.num_vars(); ++i) {
    const DecisionVar& v = lmi.var(i);
    if (!v.positive) continue;
    std::vector<Matrix> coeff(lmi.num_params());
    for (int q = 0; q < v.count; ++q) coeff[v.offset + q] = basis(v, q);
    Matrix c0 = -v.floor * Matrix::Identity(v.rows, v.rows);
    std::vector<std::pair<int, Matrix>> az;
    reduce(coeff, v.rows, c0, az, -1.0);
    data.C.push_back(c0);
    data.A.push_back(std::move(az));
  }
  const int np = lmi.num_params();
  data.c_lp.resize(2 * np);
  data.A_lp = Matrix::Zero(2 * np, ny);
  for (int l = 0; l < np; ++l) {
    data.c_lp(2 * l) = opts.box - x0(l);
    data.A_lp.row(2 * l).head(nz) = nmap.row(l);
    data.c_lp(2 * l + 1) = opts.box + x0(l);
    data.A_lp.row(2 * l + 1).head(nz) = -nmap.row(l);
  }

  auto to_assignment = [&](const Vector& y) { return lmi.unpack(x0 + nmap * y.head(nz)); };
  const double accept = 0.5 * opts.target_margin;

  detail::SdpSettings settings;
  settings.max_iterations = opts.max_iterations;
  settings.gap_tol = opts.gap_tol;
  bool proven_infeasible = false;
  settings.monitor = [&](const detail::SdpIterate& it) {
    const double ynorm = 1.0 + it.y.cwiseAbs().maxCoeff();
    if (it.primal_infeas * ynorm < 1e-9 && it.primal_obj < accept - 1e-9) {
      proven_infeasible = true;
      return true;
    }
    if (opts.stop_when_feasible) {
      const Assignment a = to_assignment(it.y);
      if (all_finite(x0 + nmap * it.y.head(nz)) && verify_assignment(lmi, a) >= opts.target_margin) {
        return true;
      }
    }
    return false;
  };

  const detail::SdpOutcome out = detail::solve_sdp(data, settings);

  FeasResult res;
  res.iterations = out.last.iteration;
  if (out.last.y.size() == ny && out.last.y.allFinite()) {
    res.assignment = to_assignment(out.last.y);
    res.worst_margin = verify_assignment(lmi, res.assignment);
  } else {
    res.assignment = lmi.unpack(x0);
    res.worst_margin = verify_assignment(lmi, res.assignment);
  }
  res.feasible = res.worst_margin >= accept;
  if (res.feasible) {
    res.status = SolveStatus::Feasible;
  } else if (proven_infeasible || out.exit == detail::SdpExit::Converged) {
    res.status = SolveStatus::Infeasible;
  } else {
    res.status = SolveStatus::BudgetExhausted;
  }
  return res;
}

BisectResult bisect_rate(const std::function<AffineLmi(double)>& family, double lo, double hi,
                         double tol, SolverOptions opts) {
  if (!(lo <= hi) || !(tol > 0.0)) throw InputError("bisect_rate: need lo <= hi and tol > 0");
  opts.stop_when_feasible = true;
  BisectResult out;
  FeasResult r = solve_feasibility(family(lo), opts);
  if (!r.feasible) {
    out.lo_infeasible = true;
    out.rate = lo;
    out.at_rate = r;
    return out;
  }
  FeasResult best = r;
  double a = lo;
  double b = hi;
  FeasResult rh = solve_feasibility(family(hi), opts);
  if (rh.feasible) {
    out.rate = hi;
    out.at_rate = rh;
    return out;
  }
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    FeasResult rm = solve_feasibility(family(mid), opts);
    if (rm.feasible) {
      a = mid;
      best = rm;
    } else {
      b = mid;
    }
  }
  const double probe = a + 2.0 * tol;
  if (probe <= hi) {
    const FeasResult rp = solve_feasibility(family(probe), opts);
    if (rp.feasible) {
      throw MonotonicityError("feasible at rate " + std::to_string(probe) +
                              " above infeasible bracket end " + std::to_string(b));
    }
  }
  out.rate = a;
  out.at_rate = best;
  return out;
}

}  // namespace rnncert
