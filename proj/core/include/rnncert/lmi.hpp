#pragma once

// Block-symmetric matrix inequalities affine in a set of decision variables,
// plus the interior-point feasibility engine and a rate bisection driver.

#include <functional>
#include <string>
#include <vector>

#include "rnncert/linalg.hpp"

namespace rnncert {

enum class VarKind { Symmetric, Diagonal, Rectangular, Scalar };

/// NegSemidef blocks are constrained to F <= -margin*I, PosSemidef to F >= margin*I.
enum class Sense { NegSemidef, PosSemidef };

struct DecisionVar {
  std::string name;
  VarKind kind = VarKind::Symmetric;
  int rows = 0;
  int cols = 0;
  bool positive = false;   // V >= floor*I is appended as an extra block
  double floor = 0.0;
  bool trace_normalized = false;
  int offset = 0;          // first scalar coordinate in the packed vector
  int count = 0;
};

/// One matrix per decision variable, in declaration order. Diagonal variables
/// are stored as dense diagonal matrices, scalars as 1x1.
using Assignment = std::vector<Matrix>;

class AffineLmi {
 public:
  int add_var(const std::string& name, VarKind kind, int rows, int cols = -1);
  int add_block(int dim, Sense sense = Sense::NegSemidef);

  /// Adds C at element offset (row, col) of a block. Off-diagonal placements
  /// (row != col) are mirrored; diagonal placements are symmetrized.
  void add_constant(int block, int row, int col, const Matrix& c);

  /// Adds scale * L * V * R with the same placement rule as add_constant.
  /// An empty L or R stands for the identity.
  void add_term(int block, int row, int col, const Matrix& left, int var,
                const Matrix& right, double scale = 1.0);

  /// Requires V >= floor*I (symmetric or diagonal variables only).
  void require_pd(int var, double floor = 1e-6);

  /// Fixes trace(V) = dim to remove the scale invariance of homogeneous LMIs.
  void normalize_trace(int var);

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_params() const { return num_params_; }
  const DecisionVar& var(int i) const { return vars_.at(i); }
  int block_dim(int b) const { return blocks_.at(b).dim; }
  Sense block_sense(int b) const { return blocks_.at(b).sense; }

  /// Evaluates a block directly from its terms.
  Matrix evaluate(int block, const Assignment& a) const;

  Vector pack(const Assignment& a) const;
  Assignment unpack(const Vector& x) const;
  void check_shapes(const Assignment& a) const;

  /// Constant part and per-coordinate coefficient matrices of a block.
  Matrix constant_part(int block) const;
  std::vector<Matrix> coefficients(int block) const;

 private:
  struct Term {
    int row, col;
    Matrix left;
    int var;
    Matrix right;
    double scale;
  };
  struct Constant {
    int row, col;
    Matrix value;
  };
  struct Block {
    int dim;
    Sense sense;
    std::vector<Term> terms;
    std::vector<Constant> constants;
  };

  void check_placement(int block, int row, int col, Eigen::Index r, Eigen::Index c) const;

  std::vector<DecisionVar> vars_;
  std::vector<Block> blocks_;
  int num_params_ = 0;
};

/// Worst signed margin over all blocks: -max_eig for NegSemidef blocks,
/// min_eig for PosSemidef blocks, and min_eig(V) for positive variables.
/// Computed from the terms with a fresh eigensolve, never from solver state.
double verify_assignment(const AffineLmi& lmi, const Assignment& a);

/// Per-block margins in block order (positivity requirements excluded).
std::vector<double> block_margins(const AffineLmi& lmi, const Assignment& a);

enum class SolveStatus { Feasible, Infeasible, BudgetExhausted };

struct SolverOptions {
  double target_margin = 1e-6;
  int max_iterations = 100;
  double box = 1e4;            // |x_k| <= box on every packed coordinate
  double gap_tol = 1e-9;
  bool stop_when_feasible = false;
};

struct FeasResult {
  bool feasible = false;
  SolveStatus status = SolveStatus::Infeasible;
  Assignment assignment;
  double worst_margin = 0.0;
  int iterations = 0;
};

FeasResult solve_feasibility(const AffineLmi& lmi, const SolverOptions& opts = {});

struct BisectResult {
  bool lo_infeasible = false;
  double rate = 0.0;
  FeasResult at_rate;
};

/// Largest rate in [lo, hi] for which family(rate) is feasible, within tol.
/// Feasibility must be nonincreasing in the rate; a feasible point at
/// rate + 2*tol (inside [lo, hi]) raises MonotonicityError.
BisectResult bisect_rate(const std::function<AffineLmi(double)>& family, double lo,
                         double hi, double tol, SolverOptions opts = {});

}  // namespace rnncert
