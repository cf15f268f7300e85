#include "rnncert/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "rnncert/errors.hpp"

namespace rnncert {

namespace {

constexpr double kDivergence = 1e9;

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InputError(std::string(name) + " must be " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  if (!all_finite(m)) throw InputError(std::string(name) + " has non-finite entries");
}

bool blown_up(const Vector& v) { return !v.allFinite() || v.norm() > kDivergence; }

Vector or_zero(const Vector& v, Eigen::Index n) { return v.size() == 0 ? Vector::Zero(n) : v; }

template <typename F>
Vector rk4(const F& f, double t, const Vector& z, double h) {
  const Vector k1 = f(t, z);
  const Vector k2 = f(t + 0.5 * h, z + 0.5 * h * k1);
  const Vector k3 = f(t + 0.5 * h, z + 0.5 * h * k2);
  const Vector k4 = f(t + h, z + h * k3);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename Map>
Vector damped_fixed_point(const Map& map, Vector x, double tol, double h, long max_iter) {
  if (!(h > 0.0 && h <= 1.0)) throw InputError("damping h must lie in (0, 1]");
  double prev = std::numeric_limits<double>::infinity();
  double res = prev;
  for (long k = 0; k < max_iter; ++k) {
    const Vector tx = map(x);
    res = (tx - x).norm();
    if (!std::isfinite(res)) throw ConvergenceError("fixed-point iteration diverged", res);
    if (res <= tol) return x;
    if (res > prev * (1.0 + 1e-12) && h > 1e-6) h *= 0.5;
    prev = res;
    x = (1.0 - h) * x + h * tx;
  }
  throw ConvergenceError("fixed-point iteration hit its cap, residual " + std::to_string(res),
                         res);
}

}  // namespace

void SynapticModel::validate() const {
  const int nn = n();
  if (nn == 0) throw InputError("W must be nonempty");
  check_shape(W, nn, nn, "W");
  check_shape(B, nn, B.cols(), "B");
  check_shape(C, C.rows(), nn, "C");
  check_shape(D, C.rows(), B.cols(), "D");
}

Vector SynapticModel::field(const Vector& x, const Vector& u) const {
  if (arch == Arch::FiringRate) return -x + act(Vector(W * x + B * u));
  return -x + W * act(x) + B * u;
}

Vector SynapticModel::step(const Vector& x, const Vector& u) const {
  if (arch == Arch::FiringRate) return act(Vector(W * x + B * u));
  return W * act(x) + B * u;
}

Vector SynapticModel::output(const Vector& x, const Vector& u) const {
  const Vector base = arch == Arch::FiringRate ? Vector(C * x) : Vector(C * act(x));
  return base + D * u;
}

InputSignal constant_input(const Vector& u) {
  return [u](double) { return u; };
}

void Trajectory::write_csv(std::ostream& os) const {
  auto width = [](const std::vector<Vector>& v) { return v.empty() ? 0 : v.front().size(); };
  os << "t";
  for (Eigen::Index i = 0; i < width(x); ++i) os << ",x_" << i + 1;
  for (Eigen::Index i = 0; i < width(xi); ++i) os << ",xi_" << i + 1;
  for (Eigen::Index i = 0; i < width(uext); ++i) os << ",uext_" << i + 1;
  for (Eigen::Index i = 0; i < width(y); ++i) os << ",y_" << i + 1;
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << t[k];
    for (const auto* group : {&x, &xi, &uext, &y}) {
      if (group->empty()) continue;
      for (Eigen::Index i = 0; i < (*group)[k].size(); ++i) os << "," << (*group)[k](i);
    }
    os << "\n";
  }
}

double default_dt(const Matrix& w) {
  const double nw = spectral_norm(w);
  return 1e-3 * std::min(1.0, nw > 0.0 ? 1.0 / nw : 1.0);
}

Trajectory simulate(const SynapticModel& model, const InputSignal& u, const Vector& x0,
                    double horizon, double dt, int record_every) {
  model.validate();
  if (x0.size() != model.n()) throw InputError("x0 has wrong dimension");
  if (!(horizon >= 0.0)) throw InputError("horizon must be nonnegative");
  if (record_every < 1) throw InputError("record_every must be >= 1");
  Trajectory tr;
  auto record = [&](double t, const Vector& x) {
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.y.push_back(model.output(x, u(t)));
  };
  Vector x = x0;
  record(0.0, x);
  if (model.domain == TimeDomain::Discrete) {
    const long steps = static_cast<long>(std::floor(horizon));
    for (long k = 1; k <= steps; ++k) {
      x = model.step(x, u(static_cast<double>(k - 1)));
      if (blown_up(x)) {
        tr.diverged = true;
        break;
      }
      if (k % record_every == 0 || k == steps) record(static_cast<double>(k), x);
    }
    return tr;
  }
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  const long steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  auto f = [&](double t, const Vector& z) { return model.field(z, u(t)); };
  for (long k = 1; k <= steps; ++k) {
    const double t0 = (k - 1) * dt;
    const double h = std::min(dt, horizon - t0);
    x = rk4(f, t0, x, h);
    if (blown_up(x)) {
      tr.diverged = true;
      break;
    }
    if (k % record_every == 0 || k == steps) record(t0 + h, x);
  }
  return tr;
}

Vector fr_fixed_point(const Matrix& w, const Vector& drive, const Activation& act, double tol,
                      double h, long max_iter) {
  auto map = [&](const Vector& x) { return act(Vector(w * x + drive)); };
  return damped_fixed_point(map, Vector::Zero(w.rows()), tol, h, max_iter);
}

Vector fr_fixed_point(const Matrix& w, const Vector& drive, const Activation& act,
                      const Vector& x0, double tol, double h, long max_iter) {
  if (x0.size() != w.rows()) throw InputError("initial iterate has wrong dimension");
  auto map = [&](const Vector& x) { return act(Vector(w * x + drive)); };
  return damped_fixed_point(map, x0, tol, h, max_iter);
}

Vector equilibrium(const SynapticModel& model, const Vector& u, double tol, double h,
                   long max_iter) {
  model.validate();
  if (u.size() != model.m()) throw InputError("u has wrong dimension");
  auto map = [&](const Vector& x) { return model.step(x, u); };
  return damped_fixed_point(map, Vector::Zero(model.n()), tol, h, max_iter);
}

double beta(double t, double c_k, double c_o) {
  if (std::abs(c_k - c_o) < 1e-8) {
    const double c = 0.5 * (c_k + c_o);
    return t * std::exp(-c * t);
  }
  return (std::exp(-c_o * t) - std::exp(-c_k * t)) / (c_k - c_o);
}

Vector PiecewiseConstant::operator()(double t) const {
  if (values.empty() || values.size() != starts.size()) {
    throw InputError("piecewise-constant signal needs one value per start time");
  }
  std::size_t k = 0;
  while (k + 1 < starts.size() && t >= starts[k + 1]) ++k;
  return values[k];
}

Trajectory simulate_closed_loop(const SynapticModel& plant, const GainSet& g,
                                const PiecewiseConstant& reference, const Vector& x0,
                                const Vector& xi0, const Vector& u0,
                                const ClosedLoopOptions& opts) {
  plant.validate();
  if (plant.arch != Arch::FiringRate || plant.domain != TimeDomain::Continuous) {
    throw InputError("closed-loop simulation supports continuous-time FR plants");
  }
  if (!plant.D.isZero(0.0)) throw InputError("closed-loop simulation needs D = 0");
  const int n = plant.n();
  const int m = plant.m();
  const int p = plant.p();
  check_shape(g.K_f, m, n, "K_f");
  check_shape(g.L, n, p, "L");
  const bool integrate = g.epsilon != 0.0;
  if (integrate) check_shape(g.K_i, m, p, "K_i");
  if (x0.size() != n || xi0.size() != n || u0.size() != m) {
    throw InputError("initial conditions have wrong dimensions");
  }
  if (!(opts.dt > 0.0) || !(opts.horizon >= 0.0) || opts.record_every < 1) {
    throw InputError("closed-loop options: need dt > 0, horizon >= 0, record_every >= 1");
  }
  const Vector theta = or_zero(opts.theta, n);
  const Vector theta_hat = or_zero(opts.theta_hat, n);
  if (theta.size() != n || theta_hat.size() != n) throw InputError("theta must have n entries");

  const Matrix bk = plant.B * g.K_f;
  auto f = [&](double t, const Vector& z) {
    const auto x = z.segment(0, n);
    const auto xi = z.segment(n, n);
    const auto u = z.segment(2 * n, m);
    Vector th = theta;
    Vector thh = theta_hat;
    if (opts.theta_t) {
      th = opts.theta_t(t);
      thh = th;
    }
    const Vector y = plant.C * x;
    const Vector common = bk * xi + plant.B * u;
    Vector dz(2 * n + m);
    dz.segment(0, n) = -x + plant.act(Vector(plant.W * x + common + th));
    dz.segment(n, n) =
        -xi + plant.act(Vector(plant.W * xi + common + g.L * (y - plant.C * xi) + thh));
    if (integrate) {
      dz.segment(2 * n, m) = g.epsilon * g.K_i * (reference(t) - y);
    } else {
      dz.segment(2 * n, m).setZero();
    }
    return dz;
  };

  Trajectory tr;
  Vector z(2 * n + m);
  z << x0, xi0, u0;
  auto record = [&](double t) {
    tr.t.push_back(t);
    tr.x.push_back(z.segment(0, n));
    tr.xi.push_back(z.segment(n, n));
    tr.uext.push_back(z.segment(2 * n, m));
    tr.y.push_back(plant.C * z.segment(0, n));
  };
  record(0.0);
  const long steps = static_cast<long>(std::ceil(opts.horizon / opts.dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double t0 = (k - 1) * opts.dt;
    const double h = std::min(opts.dt, opts.horizon - t0);
    z = rk4(f, t0, z, h);
    if (blown_up(z)) {
      tr.diverged = true;
      break;
    }
    if (k % opts.record_every == 0 || k == steps) record(t0 + h);
  }
  return tr;
}

BoundReport check_separation_bounds(const SynapticModel& plant, const GainSet& g,
                                    const NormConstants& k, const Trajectory& traj,
                                    const BoundMode& mode, double tol) {
  if (traj.size() == 0 || traj.xi.size() != traj.size() || traj.uext.size() != traj.size()) {
    throw InputError("bound check needs a closed-loop trajectory");
  }
  const int n = plant.n();
  const Vector u = traj.uext.front();
  for (const auto& ue : traj.uext) {
    if ((ue - u).cwiseAbs().maxCoeff() > 1e-12) {
      throw InputError("bound check needs a frozen integrator (constant u_ext)");
    }
  }
  const Matrix w_cl = plant.W + plant.B * g.K_f;
  const Vector drive = plant.B * u;
  const double ck = g.c_K;
  const double co = g.c_O;
  const double abs_slack = 1e-10;

  auto theta_at = [&](double t) -> Vector {
    switch (mode.kind) {
      case BoundMode::Kind::Nominal: return Vector::Zero(n);
      case BoundMode::Kind::ModelError: return or_zero(mode.theta, n);
      case BoundMode::Kind::MovingParameter: return mode.theta_t(t);
    }
    return Vector::Zero(n);
  };
  if (mode.kind == BoundMode::Kind::MovingParameter && (!mode.theta_t || !mode.theta_dot)) {
    throw InputError("moving-parameter mode needs theta(t) and its derivative");
  }

  double ell_l = 0.0;
  double delta_theta = 0.0;
  if (mode.kind == BoundMode::Kind::ModelError) {
    ell_l = input_lipschitz(Matrix::Identity(n, n), g.P_O);
    delta_theta = (or_zero(mode.theta_hat, n) - or_zero(mode.theta, n)).norm();
  }
  const double ell_f = mode.kind == BoundMode::Kind::MovingParameter
                           ? input_lipschitz(Matrix::Identity(n, n), g.P_X)
                           : 0.0;

  BoundReport rep;
  const double t0 = traj.t.front();
  const double e0 = weighted_norm(traj.xi.front() - traj.x.front(), g.P_O);
  Vector xstar = fr_fixed_point(w_cl, drive + theta_at(t0), plant.act, 1e-12);
  const double v0 = weighted_norm(traj.x.front() - xstar, g.P_X);
  double moving_integral = 0.0;
  double prev_rate = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.t[i] - t0;
    if (mode.kind == BoundMode::Kind::MovingParameter) {
      const double rate = mode.theta_dot(traj.t[i]).norm();
      if (i > 0) {
        const double dt = traj.t[i] - traj.t[i - 1];
        const double decay = std::exp(-ck * dt);
        moving_integral = decay * moving_integral + 0.5 * dt * (decay * prev_rate + rate);
      }
      prev_rate = rate;
      if (i > 0) xstar = fr_fixed_point(w_cl, drive + theta_at(traj.t[i]), plant.act, 1e-12);
    }
    const double eo = std::exp(-co * t);
    const double ek = std::exp(-ck * t);
    const double b = beta(t, ck, co);
    double obs_bound = e0 * eo;
    double state_bound = v0 * ek + k.ell_u * k.ell_K * e0 * b;
    if (mode.kind == BoundMode::Kind::ModelError) {
      const double drift = ell_l * delta_theta / co;
      obs_bound += drift * (1.0 - eo);
      state_bound += k.ell_u * k.ell_K * drift * ((1.0 - ek) / ck - b);
    } else if (mode.kind == BoundMode::Kind::MovingParameter) {
      state_bound += ell_f / ck * moving_integral;
    }
    const double obs = weighted_norm(traj.xi[i] - traj.x[i], g.P_O);
    const double state = weighted_norm(traj.x[i] - xstar, g.P_X);
    ++rep.checked;
    if (obs_bound > 0.0) rep.worst_obs_ratio = std::max(rep.worst_obs_ratio, obs / obs_bound);
    if (state_bound > 0.0) {
      rep.worst_state_ratio = std::max(rep.worst_state_ratio, state / state_bound);
    }
    const double obs_excess = obs - ((1.0 + tol) * obs_bound + abs_slack);
    const double state_excess = state - ((1.0 + tol) * state_bound + abs_slack);
    if (rep.ok && (obs_excess > 0.0 || state_excess > 0.0)) {
      rep.ok = false;
      rep.first_violation_time = traj.t[i];
      rep.first_violation = obs_excess > 0.0 ? "observer" : "state";
      rep.violation_margin = std::max(obs_excess, state_excess);
    }
  }
  return rep;
}

}  // namespace rnncert
