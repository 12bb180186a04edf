#include "dispersal/operator.hpp"

#include <cmath>
#include <string>

#include "dispersal/errors.hpp"

namespace dispersal {

DiscreteOperator assemble(const Grid& grid, const KernelSpec& spec,
                          int max_nodes) {
  const int n = grid.size();
  if (n == 0) {
    throw PreconditionError("assemble requires a non-empty grid");
  }
  if (n > max_nodes) {
    throw PreconditionError("node count " + std::to_string(n) +
                            " exceeds the dense-storage cap " +
                            std::to_string(max_nodes));
  }

  DiscreteOperator op;
  op.grid = grid;
  op.matrix.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double k = kernel_entry(grid, spec, i, j);
      if (k < 0.0) {
        throw AuditError("kernel is negative at node pair (" + std::to_string(i) +
                         "," + std::to_string(j) + ")");
      }
      op.matrix(i, j) = grid.weights(j) * k;
    }
  }

  // Assembly requires the symmetry audit to pass; check it here on the
  // kernel values recovered from the matrix so no second evaluation pass is
  // needed. K_ij = M_ij / w_j.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double kij = op.matrix(i, j) / grid.weights(j);
      const double kji = op.matrix(j, i) / grid.weights(i);
      if (std::abs(kij - kji) > 1e-12) {
        throw AuditError("kernel symmetry defect " +
                         std::to_string(std::abs(kij - kji)) + " at node pair (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  op.rowsum.values.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      s += op.matrix(i, j);
    }
    op.rowsum.values(i) = s;
  }
  op.rowsum.sup = op.rowsum.values.maxCoeff();
  op.rowsum.inf = op.rowsum.values.minCoeff();
  return op;
}

Eigen::VectorXd apply(const DiscreteOperator& op, const Eigen::VectorXd& u) {
  if (u.size() != op.matrix.rows()) {
    throw PreconditionError("apply: vector length " + std::to_string(u.size()) +
                            " does not match node count " +
                            std::to_string(op.matrix.rows()));
  }
  return op.matrix * u;
}

ShiftedSolver::ShiftedSolver(const DiscreteOperator& op, double beta)
    : beta_(beta), n_(op.matrix.rows()) {
  if (!(beta > op.rowsum.sup)) {
    throw PreconditionError(
        "shifted solve requires beta > max row sum (beta = " +
        std::to_string(beta) + ", max row sum = " + std::to_string(op.rowsum.sup) +
        ")");
  }
  Eigen::MatrixXd shifted = op.matrix;
  shifted.diagonal().array() -= beta;
  lu_.compute(shifted);
}

Eigen::VectorXd ShiftedSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) {
    throw PreconditionError("shifted solve: rhs length mismatch");
  }
  return lu_.solve(rhs);
}

Eigen::VectorXd shifted_solve(const DiscreteOperator& op, double beta,
                              const Eigen::VectorXd& rhs) {
  return ShiftedSolver(op, beta).solve(rhs);
}

EigenPair principal_eigenpair(const DiscreteOperator& op) {
  const int n = static_cast<int>(op.matrix.rows());
  const bool connected = positivity_connected(n, [&](int i, int j) {
    return i != j && op.matrix(i, j) > 0.0;
  });
  if (!connected) {
    throw AuditError(
        "positivity graph is disconnected; the principal eigenvalue need not "
        "be simple");
  }

  // Similarity transform S = D M D^{-1} with D = diag(sqrt(w)) gives the
  // symmetric matrix S_ij = sqrt(w_i) K_ij sqrt(w_j).
  Eigen::VectorXd sqrt_w = op.grid.weights.cwiseSqrt();
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s(i, j) = sqrt_w(i) * op.matrix(i, j) / sqrt_w(j);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) {
    throw Error("symmetric eigensolver failed to converge");
  }
  double lambda = es.eigenvalues()(n - 1);
  // The Perron vector of an irreducible nonnegative matrix is strictly
  // positive, so the computed top eigenvector is one sign flip away from
  // positive up to rounding. Taking absolute values and re-applying S wipes
  // out any sign noise near zero entries.
  Eigen::VectorXd v = es.eigenvectors().col(n - 1).cwiseAbs();
  v.normalize();
  for (int pass = 0; pass < 100; ++pass) {
    Eigen::VectorXd sv = s * v;
    lambda = v.dot(sv);
    const double resid = (sv - lambda * v).cwiseAbs().maxCoeff();
    if (resid <= 1e-13 * (1.0 + std::abs(lambda))) break;
    v = sv / sv.norm();
  }

  EigenPair pair;
  pair.lambda1 = lambda;
  pair.phi1 = v.cwiseQuotient(sqrt_w);

  // Discrete L2 normalization; for the transformed vector this equals the
  // Euclidean norm of v, but the invariant is asserted on phi directly.
  double norm_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    norm_sq += op.grid.weights(i) * pair.phi1(i) * pair.phi1(i);
  }
  pair.phi1 /= std::sqrt(norm_sq);

  if (pair.phi1.minCoeff() <= 0.0) {
    throw IterationError(
        "principal eigenfunction failed to come out strictly positive");
  }

  pair.residual =
      (apply(op, pair.phi1) - pair.lambda1 * pair.phi1).cwiseAbs().maxCoeff();
  if (!(pair.residual <= 1e-10 * (1.0 + pair.lambda1))) {
    throw IterationError("eigen residual " + std::to_string(pair.residual) +
                         " exceeds tolerance");
  }

  // Perron row-sum bounds hold up to roundoff; violation beyond that slack
  // means the assembly or the solve is broken.
  const double slack = 1e-12 * (1.0 + std::abs(pair.lambda1));
  if (pair.lambda1 < op.rowsum.inf - slack || pair.lambda1 > op.rowsum.sup + slack) {
    throw Error("principal eigenvalue escaped the row-sum bounds");
  }
  return pair;
}

namespace {

double weighted_dot(const Grid& grid, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    s += grid.weights(i) * a(i) * b(i);
  }
  return s;
}

}  // namespace

ForcingDecomposition decompose_forcing(const DiscreteOperator& op,
                                       const EigenPair* eig,
                                       const Eigen::VectorXd& g, ForcingMode mode) {
  if (g.size() != op.matrix.rows()) {
    throw PreconditionError("decompose_forcing: vector length mismatch");
  }
  ForcingDecomposition fd;
  fd.mode = mode;
  fd.g = g;
  if (mode == ForcingMode::eigen) {
    if (eig == nullptr) {
      throw PreconditionError("eigen-mode forcing requires the eigenpair");
    }
    // phi1 has unit discrete L2 norm, so the coefficient is a plain
    // weighted inner product.
    fd.t = weighted_dot(op.grid, g, eig->phi1);
    fd.g1 = g - fd.t * eig->phi1;
  } else {
    fd.t = weighted_dot(op.grid, g, Eigen::VectorXd::Ones(g.size())) /
           op.grid.volume;
    fd.g1 = g.array() - fd.t;
  }
  return fd;
}

ForcingDecomposition compose_forcing(const DiscreteOperator& op,
                                     const EigenPair* eig, double t,
                                     const Eigen::VectorXd& g1_raw,
                                     ForcingMode mode) {
  if (g1_raw.size() != op.matrix.rows()) {
    throw PreconditionError("compose_forcing: vector length mismatch");
  }
  ForcingDecomposition fd;
  fd.mode = mode;
  fd.t = t;
  if (mode == ForcingMode::eigen) {
    if (eig == nullptr) {
      throw PreconditionError("eigen-mode forcing requires the eigenpair");
    }
    const double coeff = weighted_dot(op.grid, g1_raw, eig->phi1);
    fd.g1 = g1_raw - coeff * eig->phi1;
    fd.g = t * eig->phi1 + fd.g1;
  } else {
    const double mean =
        weighted_dot(op.grid, g1_raw, Eigen::VectorXd::Ones(g1_raw.size())) /
        op.grid.volume;
    fd.g1 = g1_raw.array() - mean;
    fd.g = fd.g1.array() + t;
  }
  return fd;
}

}  // namespace dispersal
