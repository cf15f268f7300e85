#pragma once

// Primal-dual interior-point method for block-diagonal SDPs in dual form:
//   maximize b'y  subject to  C_j - sum_i y_i A_ij >= 0  (PSD blocks),
//                             c_lp - A_lp y >= 0         (linear rows).
// HKM search direction with Mehrotra predictor-corrector steps.

#include <functional>
#include <utility>
#include <vector>

#include "rnncert/linalg.hpp"

namespace rnncert::detail {

struct SdpData {
  std::vector<Matrix> C;
  // For each block, the nonzero coefficient matrices as (variable index, A_ij).
  std::vector<std::vector<std::pair<int, Matrix>>> A;
  Vector c_lp;
  Matrix A_lp;  // rows: linear constraints, cols: dual variables
  Vector b;
};

struct SdpIterate {
  Vector y;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  int iteration = 0;
};

enum class SdpExit { Converged, Stopped, IterationLimit, NumericalFailure };

struct SdpOutcome {
  SdpExit exit = SdpExit::IterationLimit;
  SdpIterate last;
};

struct SdpSettings {
  int max_iterations = 100;
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  // Called after each iteration; returning true stops the solve.
  std::function<bool(const SdpIterate&)> monitor;
};

SdpOutcome solve_sdp(const SdpData& data, const SdpSettings& settings);

}  // namespace rnncert::detail
