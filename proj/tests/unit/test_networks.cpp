#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rnncert/dynamics.hpp"
#include "rnncert/errors.hpp"
#include "rnncert/networks.hpp"

using namespace rnncert;

namespace {

SynapticModel subsystem(std::mt19937_64& gen, int n, int m, int p, double scale) {
  SynapticModel s;
  s.W = oracle::random_matrix(gen, n, n, scale);
  s.B = oracle::random_matrix(gen, n, m, 0.5);
  s.C = oracle::random_matrix(gen, p, n, 0.5);
  s.D = oracle::random_matrix(gen, p, m, 0.2);
  s.act = Activation(ActivationKind::Tanh);
  return s;
}

Matrix random_graph(std::mt19937_64& gen, int n) {
  std::bernoulli_distribution edge(0.5);
  Matrix raw = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    raw(i, (i + 1) % n) = raw((i + 1) % n, i) = 1.0;  // ring keeps every degree positive
    for (int j = i + 2; j < n; ++j) {
      if (edge(gen)) raw(i, j) = raw(j, i) = 1.0;
    }
  }
  return raw;
}

}  // namespace

TEST(Interconnect, ComposedFieldSolvesTheAlgebraicLoop) {
  std::mt19937_64 gen(301);
  Interconnection ic;
  ic.subsystems = {subsystem(gen, 3, 2, 1, 0.3), subsystem(gen, 2, 1, 2, 0.3)};
  ic.coupling = oracle::random_matrix(gen, 3, 3, 0.4);
  const ComposedNetwork net = interconnect(ic);
  ASSERT_EQ(net.model.n(), 5);
  for (int t = 0; t < 20; ++t) {
    const Vector x = oracle::random_vector(gen, 5);
    const Vector v = oracle::random_vector(gen, 3);
    // u = A (C x + D u) + v solved directly.
    const Matrix lhs = Matrix::Identity(3, 3) - ic.coupling * net.D;
    const Vector u = lhs.fullPivLu().solve(ic.coupling * net.C * x + v);
    const Vector want = -x + Vector((net.W * x + net.B * u).array().tanh());
    EXPECT_LT((net.model.field(x, v) - want).norm(), 1e-12);
    EXPECT_LT((net.model.output(x, v) - (net.C * x + net.D * u)).norm(), 1e-12);
  }
  EXPECT_GT(net.wellposed_margin, 0.0);
}

TEST(Interconnect, RejectsIllPosedOrMismatchedInputs) {
  std::mt19937_64 gen(303);
  Interconnection ic;
  SynapticModel s = subsystem(gen, 1, 1, 1, 0.2);
  s.D = Matrix::Identity(1, 1);
  ic.subsystems = {s};
  ic.coupling = Matrix::Identity(1, 1);  // I - A D = 0
  EXPECT_THROW(interconnect(ic), PreconditionError);
  ic.coupling = Matrix::Zero(2, 2);
  EXPECT_THROW(interconnect(ic), InputError);
  Interconnection mixed;
  SynapticModel other = subsystem(gen, 1, 1, 1, 0.2);
  other.act = Activation(ActivationKind::Relu);
  mixed.subsystems = {subsystem(gen, 1, 1, 1, 0.2), other};
  mixed.coupling = Matrix::Zero(2, 2);
  EXPECT_THROW(interconnect(mixed), InputError);
}

TEST(Interconnect, CertifiedNetworkYieldsLocalCertificates) {
  std::mt19937_64 gen(307);
  int checked = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Interconnection ic;
    ic.subsystems = {subsystem(gen, 2, 1, 1, 0.3), subsystem(gen, 3, 1, 1, 0.3)};
    ic.coupling = oracle::random_matrix(gen, 2, 2, 0.5);
    const ComposedNetwork net = interconnect(ic);
    const CertificateSpec s{Arch::FiringRate, TimeDomain::Continuous, ActivationClass::mone(), 0.3};
    const CertifyOutcome r = certify(net.model.W, s);
    if (!r.feasible()) continue;
    const std::vector<Certificate> local = block_necessary_check(*r.cert, net);
    ASSERT_EQ(local.size(), 2u);
    for (int i = 0; i < 2; ++i) {
      EXPECT_LE(oracle::certificate_violation(net.local_weight(i), local[i]), 1e-8);
    }
    ++checked;
  }
  EXPECT_GE(checked, 3);
}

TEST(Interconnect, SkewSubsystemBlocksCertification) {
  std::mt19937_64 gen(311);
  SynapticModel skew;
  skew.W.resize(2, 2);
  skew.W << 0, 4, -4, 0;
  skew.B = oracle::random_matrix(gen, 2, 1);
  skew.C = oracle::random_matrix(gen, 1, 2);
  skew.D = Matrix::Zero(1, 1);
  skew.act = Activation(ActivationKind::Tanh);
  Interconnection ic;
  SynapticModel partner = subsystem(gen, 2, 1, 1, 0.2);
  partner.D.setZero();
  ic.subsystems = {skew, partner};
  ic.coupling = Matrix::Zero(2, 2);
  ic.coupling(0, 1) = 0.5;
  ic.coupling(1, 0) = 0.5;
  const ComposedNetwork net = interconnect(ic);
  // No self-loop and no feedthrough leave the skew block unchanged on the diagonal.
  EXPECT_LT((net.local_weight(0) - skew.W).norm(), 1e-15);
  const CertificateSpec s{Arch::FiringRate, TimeDomain::Continuous, ActivationClass::mone(), 0.1};
  EXPECT_FALSE(certify(net.model.W, s).feasible());
  const auto diag = diagnose_blocks(net, s);
  ASSERT_EQ(diag.size(), 2u);
  EXPECT_FALSE(diag[0].certifiable);
}

TEST(Graph, NormalizedAdjacencySpectrum) {
  std::mt19937_64 gen(313);
  const SymMatrix a = normalize_adjacency(random_graph(gen, 5));
  const Vector lam = oracle::jacobi_eigenvalues(a.matrix());
  EXPECT_GE(lam.minCoeff(), -1e-12);
  EXPECT_NEAR(lam.maxCoeff(), 1.0, 1e-12);
  Matrix isolated = Matrix::Zero(3, 3);
  isolated(0, 1) = isolated(1, 0) = 1.0;
  try {
    normalize_adjacency(isolated);
    FAIL() << "expected an input error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("node 2"), std::string::npos);
  }
}

TEST(Graph, KroneckerLmiDecomposesOverEigenvalues) {
  std::mt19937_64 gen(317);
  int checked = 0;
  for (int trial = 0; trial < 6; ++trial) {
    GraphModel g;
    g.W = oracle::random_matrix(gen, 3, 3, 0.25);
    g.B = Matrix::Identity(3, 3);
    g.A = normalize_adjacency(random_graph(gen, 4)).matrix();
    g.act = Activation(ActivationKind::Tanh);
    const GraphCertOutcome r = graph_certify(g, 0.2);
    if (!r.feasible()) continue;
    ++checked;
    const Matrix full = graph_full_lmi(g.W, g.A, r.cert->P, r.cert->Q, 0.2, Matrix::Identity(4, 4));
    const Vector lam = graph_spectrum(g, {});
    double worst = -1e300;
    for (int k = 0; k < lam.size(); ++k) {
      worst = std::max(worst, oracle::max_eig(graph_eigen_block(g.W, lam(k), r.cert->P, r.cert->Q, 0.2)));
    }
    EXPECT_NEAR(oracle::max_eig(full), worst, 1e-8);
    EXPECT_LE(worst, 1e-8);
  }
  EXPECT_GE(checked, 3);
}

TEST(Graph, SimulationMatchesVectorizedModel) {
  std::mt19937_64 gen(331);
  GraphModel g;
  g.W = oracle::random_matrix(gen, 2, 2, 0.5);
  g.B = oracle::random_matrix(gen, 2, 1);
  g.A = normalize_adjacency(random_graph(gen, 4)).matrix();
  g.act = Activation(ActivationKind::Tanh);
  const Matrix u = oracle::random_matrix(gen, 1, 4);
  const Matrix x0 = oracle::random_matrix(gen, 2, 4);
  const GraphTrajectory gt = simulate_graph(g, u, x0, 2.0, 1e-2);
  SynapticModel v;
  v.W = kron(g.A.transpose(), g.W);
  v.B = kron(Matrix::Identity(4, 4), g.B);
  v.C = Matrix::Zero(0, 8);
  v.D = Matrix::Zero(0, 4);
  v.act = g.act;
  const Trajectory vt = simulate(v, constant_input(vec(u)), vec(x0), 2.0, 1e-2);
  ASSERT_EQ(gt.X.size(), vt.x.size());
  for (std::size_t k = 0; k < gt.X.size(); ++k) EXPECT_LT((vec(gt.X[k]) - vt.x[k]).norm(), 1e-9);
  EXPECT_LT((unvec(vec(x0), 2, 4) - x0).norm(), 0.0 + 1e-300);
}

TEST(Graph, SymmetrizableVariantChecksReconstruction) {
  GraphModel g;
  g.W = 0.1 * Matrix::Identity(2, 2);
  g.B = Matrix::Identity(2, 2);
  Matrix h(2, 2);
  h << 0.5, 0.25, 0.25, 0.5;
  Vector d(2);
  d << 1.0, 2.0;
  g.A = h * d.cwiseInverse().asDiagonal();
  GraphVariant var{GraphVariant::Kind::Symmetrizable, h, d};
  const Vector lam = graph_spectrum(g, var);
  const Vector s = d.cwiseSqrt().cwiseInverse();
  const Vector ref = oracle::jacobi_eigenvalues(s.asDiagonal() * h * s.asDiagonal());
  EXPECT_LT((lam - ref).norm(), 1e-12);
  const GraphCertOutcome r = graph_certify(g, 0.3, var);
  ASSERT_TRUE(r.feasible());
  EXPECT_NEAR(r.norm_weight(2, 2), 2.0 * r.cert->P(0, 0), 1e-12);
  g.A(0, 1) += 0.1;
  EXPECT_THROW(graph_spectrum(g, var), PreconditionError);
}
