#pragma once

// Simulation of firing-rate and Hopfield networks, equilibria, and the
// observer-based tracking loop with its error-bound checks.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rnncert/activation.hpp"
#include "rnncert/certificates.hpp"
#include "rnncert/linalg.hpp"
#include "rnncert/synthesis.hpp"

namespace rnncert {

/// FR:       x' = -x + psi(W x + B u),   y = C x + D u
/// Hopfield: x' = -x + W psi(x) + B u,   y = C psi(x) + D u
/// Discrete time replaces x' by x+ and drops the -x.
struct SynapticModel {
  Arch arch = Arch::FiringRate;
  TimeDomain domain = TimeDomain::Continuous;
  Matrix W, B, C, D;
  Activation act;

  int n() const { return static_cast<int>(W.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }

  /// Throws InputError naming the offending matrix.
  void validate() const;

  Vector field(const Vector& x, const Vector& u) const;
  Vector step(const Vector& x, const Vector& u) const;
  Vector output(const Vector& x, const Vector& u) const;
};

using InputSignal = std::function<Vector(double)>;
InputSignal constant_input(const Vector& u);

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x, xi, uext, y;
  bool diverged = false;

  std::size_t size() const { return t.size(); }
  /// Header "t,x_1..,xi_1..,uext_1..,y_1.." (absent groups are skipped).
  void write_csv(std::ostream& os) const;
};

/// 1e-3 * min(1, 1/||W||).
double default_dt(const Matrix& w);

/// Classic fourth-order Runge-Kutta in continuous time, plain iteration in
/// discrete time (one sample per step, dt ignored). States beyond norm 1e9 or
/// non-finite states stop the run and set the divergence flag.
Trajectory simulate(const SynapticModel& model, const InputSignal& u, const Vector& x0,
                    double horizon, double dt, int record_every = 1);

/// Equilibrium for a constant input via damped iteration
/// x <- (1 - h) x + h T(x), halving h whenever the residual grows.
Vector equilibrium(const SynapticModel& model, const Vector& u, double tol = 1e-10,
                   double h = 0.2, long max_iter = 2000000);

/// Fixed point of x = psi(W x + drive).
Vector fr_fixed_point(const Matrix& w, const Vector& drive, const Activation& act,
                      double tol = 1e-10, double h = 0.2, long max_iter = 2000000);
Vector fr_fixed_point(const Matrix& w, const Vector& drive, const Activation& act,
                      const Vector& x0, double tol = 1e-10, double h = 0.2,
                      long max_iter = 2000000);

/// integral_0^t exp(-cK (t - s)) exp(-cO s) ds
double beta(double t, double c_k, double c_o);

struct PiecewiseConstant {
  std::vector<double> starts;  // increasing, first entry 0
  std::vector<Vector> values;

  Vector operator()(double t) const;
};

struct GainSet {
  Matrix K_f;      // m x n
  Matrix L;        // n x p
  Matrix K_i;      // m x p, applied as epsilon * K_i
  double epsilon = 0.0;
  double c_K = 0.0;
  double c_O = 0.0;
  double c_r = 0.0;
  SymMatrix P_X, P_O, P_R;
};

/// Parameters enter as additive biases inside the activation: theta in the
/// plant, theta_hat in the observer. A moving parameter theta_t overrides
/// both and is shared by plant and observer.
struct ClosedLoopOptions {
  double horizon = 10.0;
  double dt = 1e-3;
  int record_every = 1;
  Vector theta;
  Vector theta_hat;
  std::function<Vector(double)> theta_t;
};

/// Plant x' = -x + psi(W x + B K_f xi + B u_ext + theta), y = C x;
/// observer xi' = -xi + psi(W xi + B K_f xi + B u_ext + L (y - C xi) + theta_hat);
/// integrator u_ext' = epsilon K_i (r - y).
Trajectory simulate_closed_loop(const SynapticModel& plant, const GainSet& gains,
                                const PiecewiseConstant& reference, const Vector& x0,
                                const Vector& xi0, const Vector& u0,
                                const ClosedLoopOptions& opts);

struct BoundMode {
  enum class Kind { Nominal, ModelError, MovingParameter };
  Kind kind = Kind::Nominal;
  Vector theta;                              // model error: true parameter
  Vector theta_hat;                          // model error: estimate
  std::function<Vector(double)> theta_t;     // moving parameter
  std::function<Vector(double)> theta_dot;   // its derivative
};

struct BoundReport {
  bool ok = true;
  std::size_t checked = 0;
  double worst_obs_ratio = 0.0;    // max of lhs / rhs for the observer error
  double worst_state_ratio = 0.0;  // max of lhs / rhs for the state error
  std::optional<double> first_violation_time;
  std::string first_violation;     // "observer" or "state"
  double violation_margin = 0.0;   // lhs - (1 + tol) rhs at the first violation
};

/// Checks the observer and state error bounds along a trajectory produced by
/// simulate_closed_loop with a frozen integrator (epsilon = 0).
BoundReport check_separation_bounds(const SynapticModel& plant, const GainSet& gains,
                                    const NormConstants& consts, const Trajectory& traj,
                                    const BoundMode& mode, double tol = 5e-2);

}  // namespace rnncert
