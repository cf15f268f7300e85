#pragma once

// Controller and observer synthesis for firing-rate networks: contracting
// state feedback, contracting observers, low-gain integral action, and the
// constants that decide whether the interconnection tracks references.

#include <optional>

#include "rnncert/certificates.hpp"
#include "rnncert/linalg.hpp"
#include "rnncert/lmi.hpp"

namespace rnncert {

struct GainDesign {
  bool feasible = false;
  SolveStatus status = SolveStatus::Infeasible;
  double best_margin = 0.0;  // verified margin on the synthesis LMI
  Matrix gain;               // K (m x n) for feedback, L (n x p) for observers
  std::optional<Certificate> closed_loop;  // FR/CTS/MONE certificate of W+BK or W-LC
};

/// Solves for X > 0, diagonal D > 0 and Y, returns K = Y X^{-1}. The closed
/// loop W + BK is re-certified with P = X^{-1}, Q = D^{-1}; if that inversion
/// loses the margin to round-off the closed loop is certified from scratch.
GainDesign synth_state_feedback(const Matrix& w, const Matrix& b, double c,
                                const SolverOptions& opts = {});

/// Projected strict LMI in (X, D) with Pi_B spanning Ker(B').
bool feedback_feasible_projection(const Matrix& w, const Matrix& b,
                                  const SolverOptions& opts = {});

/// PBH rank test on (W - I, B) over eigenvalues with nonnegative real part.
bool stabilizability_check(const Matrix& w, const Matrix& b);

/// Solves for P > 0, diagonal Q > 0 and M, returns L = Q^{-1} M; W - LC is
/// certified with the same (P, Q).
GainDesign synth_observer(const Matrix& w, const Matrix& c_out, double c,
                          const SolverOptions& opts = {});

/// Projected strict LMI in (P, Q) with Pi_C spanning Ker(C).
bool observer_feasible_projection(const Matrix& w, const Matrix& c_out,
                                  const SolverOptions& opts = {});

bool detectability_check(const Matrix& w, const Matrix& c_out);

struct IntegralDesign {
  bool feasible = false;
  SolveStatus status = SolveStatus::Infeasible;
  double best_margin = 0.0;
  Matrix K_i;  // P^{-1} Y: the integral gain at unit epsilon
  double c_r = 0.0;
  SymMatrix P;
  DiagPosMatrix Q;
  Matrix Y;
};

/// Reduced-dynamics LMI for u' = K_i (r - C x*(u)) around the closed-loop
/// synaptic matrix W_cl, with the activation slope-restricted to [delta, 1].
IntegralDesign synth_integral_gain(const Matrix& w_cl, const Matrix& b, const Matrix& c_out,
                                   double delta, double c_r, const SolverOptions& opts = {});

/// The reduced-dynamics LMI itself, variables P (0), Y (1), Q (2).
AffineLmi integral_gain_lmi(const Matrix& w_cl, const Matrix& b, const Matrix& c_out,
                            double delta, double c_r, double pd_floor = 1e-6);

/// Largest c_r (within tol, searched in (0, c_max]) for which the
/// reduced-dynamics LMI holds with ||Y|| <= 1. Since c_r and the gain scale
/// together, fixing the size of Y turns the search into the best rate per
/// unit of integral gain, which is what the low-gain bound rewards.
IntegralDesign synth_integral_gain_max_rate(const Matrix& w_cl, const Matrix& b,
                                            const Matrix& c_out, double delta,
                                            double tol = 1e-3, double c_max = 10.0,
                                            const SolverOptions& opts = {});

struct NormConstants {
  double ell_u = 0.0;
  double ell_K = 0.0;
  double ell_iR = 0.0;
  double ell_iU = 0.0;
};

/// Largest ||D B||_{U -> X} over diagonal D with entries in [0, 1]. The
/// maximum sits at a 0/1 vertex; above 16 states the bound
/// ||P_X^{1/2}|| ||B|| is returned instead.
double input_lipschitz(const Matrix& b, const SymMatrix& p_x);

/// The U norm is Euclidean; X, O and R are weighted by p_x, p_o, p_r.
NormConstants compute_norm_constants(const Matrix& b, const Matrix& k_f, const Matrix& k_i,
                                     const Matrix& c_out, const SymMatrix& p_x,
                                     const SymMatrix& p_o, const SymMatrix& p_r);

/// Supremum of admissible epsilon (+infinity when both conditions are vacuous).
double epsilon_bound(const NormConstants& k, double c_k, double c_r);

struct TrackingMatrix {
  Matrix M;            // 3 x 3 comparison matrix
  double trace2 = 0;   // trace of the trailing 2 x 2 block
  double det2 = 0;     // determinant of the trailing 2 x 2 block
  bool hurwitz = false;
};

TrackingMatrix tracking_gain_matrix(const NormConstants& k, double c_o, double c_k, double c_r,
                                    double epsilon);

}  // namespace rnncert
