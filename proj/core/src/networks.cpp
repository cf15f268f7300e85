#include "rnncert/networks.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "rnncert/errors.hpp"

namespace rnncert {

namespace {

Matrix stack_diag(const std::vector<Matrix>& parts) {
  Eigen::Index r = 0, c = 0;
  for (const auto& p : parts) {
    r += p.rows();
    c += p.cols();
  }
  Matrix out = Matrix::Zero(r, c);
  r = c = 0;
  for (const auto& p : parts) {
    out.block(r, c, p.rows(), p.cols()) = p;
    r += p.rows();
    c += p.cols();
  }
  return out;
}

bool blown_up(const Matrix& x) { return !all_finite(x) || x.norm() > 1e9; }

}  // namespace

Matrix ComposedNetwork::local_weight(int i) const {
  const int n0 = n_off[i], nn = n_off[i + 1] - n0;
  const int m0 = m_off[i], mm = m_off[i + 1] - m0;
  const int p0 = p_off[i], pp = p_off[i + 1] - p0;
  return W.block(n0, n0, nn, nn) +
         B.block(n0, m0, nn, mm) * delta.block(m0, p0, mm, pp) * C.block(p0, n0, pp, nn);
}

ComposedNetwork interconnect(const Interconnection& ic) {
  if (ic.subsystems.empty()) throw InputError("interconnection has no subsystems");
  ComposedNetwork net;
  net.n_off = {0};
  net.m_off = {0};
  net.p_off = {0};
  std::vector<Matrix> ws, bs, cs, ds;
  const std::string tag = ic.subsystems.front().act.tag();
  for (std::size_t i = 0; i < ic.subsystems.size(); ++i) {
    const SynapticModel& s = ic.subsystems[i];
    s.validate();
    if (s.arch != Arch::FiringRate || s.domain != TimeDomain::Continuous) {
      throw InputError("subsystem " + std::to_string(i) + " is not a continuous-time FR model");
    }
    if (s.act.tag() != tag) {
      throw InputError("subsystem " + std::to_string(i) + " uses a different activation");
    }
    ws.push_back(s.W);
    bs.push_back(s.B);
    cs.push_back(s.C);
    ds.push_back(s.D);
    net.n_off.push_back(net.n_off.back() + s.n());
    net.m_off.push_back(net.m_off.back() + s.m());
    net.p_off.push_back(net.p_off.back() + s.p());
  }
  net.W = stack_diag(ws);
  net.B = stack_diag(bs);
  net.C = stack_diag(cs);
  net.D = stack_diag(ds);
  const int m = net.m_off.back(), p = net.p_off.back();
  if (ic.coupling.rows() != m || ic.coupling.cols() != p) {
    std::ostringstream msg;
    msg << "coupling must be " << m << "x" << p << ", got " << ic.coupling.rows() << "x"
        << ic.coupling.cols();
    throw InputError(msg.str());
  }
  if (!all_finite(ic.coupling)) throw InputError("coupling has non-finite entries");

  const Matrix gap = Matrix::Identity(m, m) - ic.coupling * net.D;
  net.wellposed_margin = m == 0 ? 1.0 : Eigen::JacobiSVD<Matrix>(gap).singularValues().minCoeff();
  if (net.wellposed_margin < 1e-8) {
    std::ostringstream msg;
    msg << "interconnection is ill-posed: sigma_min(I - A D) = " << net.wellposed_margin;
    throw PreconditionError(msg.str());
  }
  const Matrix gap_inv = gap.inverse();
  net.delta = gap_inv * ic.coupling;

  SynapticModel& model = net.model;
  model.arch = Arch::FiringRate;
  model.domain = TimeDomain::Continuous;
  model.act = ic.subsystems.front().act;
  model.W = net.W + net.B * net.delta * net.C;
  model.B = net.B * gap_inv;
  model.C = net.C + net.D * net.delta * net.C;
  model.D = net.D * gap_inv;
  return net;
}

std::vector<Certificate> block_necessary_check(const Certificate& net_cert,
                                               const ComposedNetwork& net) {
  if (net_cert.spec.arch != Arch::FiringRate) {
    throw InputError("network certificates are firing-rate certificates");
  }
  const int n = net.n_off.back();
  if (net_cert.P.dim() != n || net_cert.Q.dim() != n) {
    throw InputError("certificate dimension does not match the network");
  }
  std::vector<Certificate> out;
  for (int i = 0; i < net.num_subsystems(); ++i) {
    const int n0 = net.n_off[i], nn = net.n_off[i + 1] - n0;
    Certificate local;
    local.spec = net_cert.spec;
    local.P = SymMatrix(net_cert.P.matrix().block(n0, n0, nn, nn));
    local.Q = DiagPosMatrix(net_cert.Q.diagonal().segment(n0, nn));
    local.margin = certificate_margin(net.local_weight(i), local);
    if (local.margin < -1e-8) {
      std::ostringstream msg;
      msg << "principal block " << i << " of a network certificate fails with margin "
          << local.margin;
      throw ConsistencyError(msg.str());
    }
    out.push_back(local);
  }
  return out;
}

std::vector<BlockDiagnosis> diagnose_blocks(const ComposedNetwork& net,
                                            const CertificateSpec& spec,
                                            const SolverOptions& opts) {
  std::vector<BlockDiagnosis> out;
  for (int i = 0; i < net.num_subsystems(); ++i) {
    const CertifyOutcome r = certify(net.local_weight(i), spec, opts);
    out.push_back({i, r.feasible(), r.best_margin});
  }
  return out;
}

Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

Matrix unvec(const Vector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) throw InputError("unvec size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector graph_spectrum(const GraphModel& g, const GraphVariant& variant) {
  const Matrix& a = g.A;
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || n == 0) throw InputError("adjacency must be a nonempty square matrix");
  if (!all_finite(a)) throw InputError("adjacency has non-finite entries");
  Vector lambda;
  if (variant.kind == GraphVariant::Kind::Undirected) {
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      throw PreconditionError("adjacency is not symmetric");
    }
    lambda = eigenvalues(SymMatrix(a));
  } else {
    const Matrix& h = variant.H;
    const Vector& d = variant.degree;
    if (h.rows() != n || h.cols() != n || d.size() != n) {
      throw InputError("symmetrizable variant needs H and Ddeg matching the adjacency");
    }
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
      throw PreconditionError("H is not symmetric");
    }
    for (int i = 0; i < n; ++i) {
      if (!(d(i) > 0.0)) {
        throw PreconditionError("degree of node " + std::to_string(i) + " is not positive");
      }
    }
    const Matrix recon = h * d.cwiseInverse().asDiagonal();
    if ((recon - a).cwiseAbs().maxCoeff() > 1e-9) {
      throw PreconditionError("adjacency differs from H Ddeg^{-1}");
    }
    const Vector s = d.cwiseSqrt().cwiseInverse();
    lambda = eigenvalues(SymMatrix(s.asDiagonal() * h * s.asDiagonal()));
  }
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -1e-9 || lambda(i) > 1.0 + 1e-9) {
      std::ostringstream msg;
      msg << "adjacency eigenvalue " << lambda(i) << " lies outside [0, 1]";
      throw PreconditionError(msg.str());
    }
  }
  return lambda;
}

GraphCertOutcome graph_certify(const GraphModel& g, double c, const GraphVariant& variant,
                               const SolverOptions& opts) {
  const int m = static_cast<int>(g.W.rows());
  if (g.W.cols() != m || m == 0) throw InputError("W must be a nonempty square matrix");
  if (g.B.rows() != m) throw InputError("B must have as many rows as W");
  graph_spectrum(g, variant);

  CertificateSpec spec{Arch::FiringRate, TimeDomain::Continuous, ActivationClass::mone(), c};
  AffineLmi lmi = certificate_lmi(g.W, spec);
  const int side = lmi.add_block(2 * m);
  lmi.add_term(side, 0, 0, Matrix(), 0, Matrix(), -4.0 * (1.0 - c));
  lmi.add_term(side, m, 0, Matrix(), 0, Matrix());
  lmi.add_term(side, m, m, Matrix(), 1, Matrix(), -1.0);

  const FeasResult r = solve_feasibility(lmi, opts);
  GraphCertOutcome out;
  out.best_margin = r.worst_margin;
  if (!r.feasible) return out;
  Certificate cert;
  cert.spec = spec;
  cert.P = SymMatrix(r.assignment[0]);
  cert.Q = DiagPosMatrix(Vector(r.assignment[1].diagonal()));
  cert.margin = r.worst_margin;
  const int n = static_cast<int>(g.A.rows());
  const Matrix node = variant.kind == GraphVariant::Kind::Undirected
                          ? Matrix::Identity(n, n)
                          : Matrix(variant.degree.asDiagonal());
  out.norm_weight = SymMatrix(kron(node, cert.P.matrix()));
  out.cert = cert;
  return out;
}

SymMatrix normalize_adjacency(const Matrix& raw) {
  const int n = static_cast<int>(raw.rows());
  if (raw.cols() != n || n == 0) throw InputError("adjacency must be a nonempty square matrix");
  if (!all_finite(raw)) throw InputError("adjacency has non-finite entries");
  if ((raw - raw.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError("adjacency is not symmetric");
  }
  if (raw.minCoeff() < 0.0) throw InputError("adjacency has negative entries");
  const Vector deg = raw.rowwise().sum();
  for (int i = 0; i < n; ++i) {
    if (!(deg(i) > 0.0)) throw InputError("node " + std::to_string(i) + " has zero degree");
  }
  const Vector s = deg.cwiseSqrt().cwiseInverse();
  const Matrix a = 0.5 * (s.asDiagonal() * raw * s.asDiagonal() + Matrix::Identity(n, n));
  const SymMatrix out(a);
  const Vector lambda = eigenvalues(out);
  if (lambda.minCoeff() < -1e-9 || lambda.maxCoeff() > 1.0 + 1e-9) {
    throw ConsistencyError("normalized adjacency spectrum left [0, 1]");
  }
  return out;
}

Matrix graph_full_lmi(const Matrix& w, const Matrix& a, const SymMatrix& p,
                      const DiagPosMatrix& q, double c, const Matrix& node_weight) {
  const Matrix np = kron(node_weight, p.matrix());
  const Matrix nq = kron(node_weight, q.dense());
  const Matrix big_w = kron(a.transpose(), w);
  const Eigen::Index d = np.rows();
  Matrix out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = -2.0 * (1.0 - c) * np;
  out.topRightCorner(d, d) = np + big_w.transpose() * nq;
  out.bottomLeftCorner(d, d) = out.topRightCorner(d, d).transpose();
  out.bottomRightCorner(d, d) = -2.0 * nq;
  return out;
}

Matrix graph_eigen_block(const Matrix& w, double lambda, const SymMatrix& p,
                         const DiagPosMatrix& q, double c) {
  const Eigen::Index m = w.rows();
  Matrix out(2 * m, 2 * m);
  out.topLeftCorner(m, m) = -2.0 * (1.0 - c) * p.matrix();
  out.topRightCorner(m, m) = p.matrix() + lambda * w.transpose() * q.dense();
  out.bottomLeftCorner(m, m) = out.topRightCorner(m, m).transpose();
  out.bottomRightCorner(m, m) = -2.0 * q.dense();
  return out;
}

GraphTrajectory simulate_graph(const GraphModel& g, const Matrix& u, const Matrix& x0,
                               double horizon, double dt, int record_every) {
  const Eigen::Index m = g.W.rows(), n = g.A.rows();
  if (g.W.cols() != m || g.A.cols() != n) throw InputError("W and A must be square");
  if (g.B.rows() != m) throw InputError("B must have as many rows as W");
  if (u.rows() != g.B.cols() || u.cols() != n) throw InputError("U must be p x n");
  if (x0.rows() != m || x0.cols() != n) throw InputError("X0 must be m x n");
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  if (!(horizon >= 0.0)) throw InputError("horizon must be nonnegative");
  if (record_every < 1) throw InputError("record_every must be >= 1");

  const Matrix bu = g.B * u;
  auto field = [&](const Matrix& x) -> Matrix {
    Matrix z = g.W * x * g.A + bu;
    for (Eigen::Index k = 0; k < z.size(); ++k) z.data()[k] = g.act(z.data()[k]);
    return z - x;
  };
  GraphTrajectory tr;
  Matrix x = x0;
  tr.t.push_back(0.0);
  tr.X.push_back(x);
  const long steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double t0 = (k - 1) * dt;
    const double h = std::min(dt, horizon - t0);
    const Matrix k1 = field(x);
    const Matrix k2 = field(x + 0.5 * h * k1);
    const Matrix k3 = field(x + 0.5 * h * k2);
    const Matrix k4 = field(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (blown_up(x)) {
      tr.diverged = true;
      break;
    }
    if (k % record_every == 0 || k == steps) {
      tr.t.push_back(t0 + h);
      tr.X.push_back(x);
    }
  }
  return tr;
}

}  // namespace rnncert
