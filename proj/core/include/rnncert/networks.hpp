#pragma once

// Interconnected firing-rate networks and graph-structured networks.

#include <optional>
#include <string>
#include <vector>

#include "rnncert/certificates.hpp"
#include "rnncert/dynamics.hpp"
#include "rnncert/linalg.hpp"

namespace rnncert {

/// Subsystems (continuous-time FR models sharing one activation) coupled
/// through u = A y, where A has block (i, j) of size m_i x p_j.
struct Interconnection {
  std::vector<SynapticModel> subsystems;
  Matrix coupling;
};

struct ComposedNetwork {
  SynapticModel model;      // stacked FR model with W_net = W + B Delta C
  Matrix delta;             // (I - A D)^{-1} A
  Matrix W, B, C, D;        // block-diagonal stacks
  std::vector<int> n_off, m_off, p_off;  // block offsets (size k + 1)
  double wellposed_margin = 0.0;         // sigma_min(I - A D)

  int num_subsystems() const { return static_cast<int>(n_off.size()) - 1; }
  /// W_i + B_i Delta_ii C_i
  Matrix local_weight(int i) const;
};

/// External inputs v enter as u = A y + v, so the composed input matrix is
/// B (I - A D)^{-1}. Throws PreconditionError when sigma_min(I - A D) < 1e-8.
ComposedNetwork interconnect(const Interconnection& ic);

/// Principal (P_ii, Q_i) blocks of a network certificate, each verified on
/// its local weight at the network rate. Throws ConsistencyError if any block
/// fails by more than 1e-8.
std::vector<Certificate> block_necessary_check(const Certificate& net_cert,
                                               const ComposedNetwork& net);

struct BlockDiagnosis {
  int subsystem = 0;
  bool certifiable = false;
  double best_margin = 0.0;
};

/// Certifies every local weight on its own; any failure obstructs the network.
std::vector<BlockDiagnosis> diagnose_blocks(const ComposedNetwork& net,
                                            const CertificateSpec& spec,
                                            const SolverOptions& opts = {});

/// X' = -X + psi(W X A + B U), X is m x n (features x nodes).
struct GraphModel {
  Matrix W;  // m x m
  Matrix B;  // m x p
  Matrix A;  // n x n
  Activation act;
};

struct GraphVariant {
  enum class Kind { Undirected, Symmetrizable };
  Kind kind = Kind::Undirected;
  Matrix H;       // symmetric, A = H Ddeg^{-1}
  Vector degree;  // diagonal of Ddeg
};

struct GraphCertOutcome {
  std::optional<Certificate> cert;  // (P, Q) for the single-node LMI
  double best_margin = 0.0;
  SymMatrix norm_weight;            // I (x) P or Ddeg (x) P
  bool feasible() const { return cert.has_value(); }
};

/// Adjacency spectrum must lie in [-1e-9, 1 + 1e-9]. Solves the FR/CTS/MONE
/// LMI jointly with [[-4(1-c)P, P], [P, -Q]] <= 0.
GraphCertOutcome graph_certify(const GraphModel& g, double c, const GraphVariant& variant = {},
                               const SolverOptions& opts = {});

/// Checks the variant's preconditions and returns the spectrum used by the
/// certificate (eigenvalues of A, or of Ddeg^{-1/2} H Ddeg^{-1/2}).
Vector graph_spectrum(const GraphModel& g, const GraphVariant& variant);

/// 1/2 (D^{-1/2} A D^{-1/2} + I) for a symmetric nonnegative raw adjacency.
SymMatrix normalize_adjacency(const Matrix& raw);

/// FR/CTS/MONE block of kron(A', W) with weights kron(N, P), kron(N, Q).
Matrix graph_full_lmi(const Matrix& w, const Matrix& a, const SymMatrix& p,
                      const DiagPosMatrix& q, double c, const Matrix& node_weight);

/// The 2m x 2m block with W scaled by lambda.
Matrix graph_eigen_block(const Matrix& w, double lambda, const SymMatrix& p,
                         const DiagPosMatrix& q, double c);

struct GraphTrajectory {
  std::vector<double> t;
  std::vector<Matrix> X;
  bool diverged = false;
};

/// RK4 on the matrix form using W X A products; never forms kron(A', W).
GraphTrajectory simulate_graph(const GraphModel& g, const Matrix& u, const Matrix& x0,
                               double horizon, double dt, int record_every = 1);

/// Column-stacking vec(X).
Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, int rows, int cols);

}  // namespace rnncert
