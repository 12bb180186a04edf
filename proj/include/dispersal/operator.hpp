#pragma once

#include <Eigen/Dense>

#include "dispersal/domain.hpp"
#include "dispersal/kernel.hpp"

namespace dispersal {

// Nystrom matrix of the dispersal operator: M_ij = w_j K(x_i, x_j), so that
// (M u)_i approximates the integral of K(x_i, y) u(y) over the domain. The
// row sums are accumulated from the very same products, keeping the
// invariant sum_j M_ij == rowsum.values[i] bit for bit.
struct DiscreteOperator {
  Eigen::MatrixXd matrix;
  RowSum rowsum;
  Grid grid;
};

// Rejects node counts above max_nodes (dense storage guard), negative
// kernel entries, and symmetry defects above 1e-12.
DiscreteOperator assemble(const Grid& grid, const KernelSpec& spec,
                          int max_nodes = 4096);

Eigen::VectorXd apply(const DiscreteOperator& op, const Eigen::VectorXd& u);

// Direct factorization of (M - beta I), reusable across many right-hand
// sides. beta must exceed the row-sum supremum so that beta I - M is
// strictly row diagonally dominant, hence nonsingular and inverse-positive.
class ShiftedSolver {
 public:
  ShiftedSolver(const DiscreteOperator& op, double beta);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  double beta() const { return beta_; }

 private:
  double beta_;
  Eigen::Index n_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

Eigen::VectorXd shifted_solve(const DiscreteOperator& op, double beta,
                              const Eigen::VectorXd& rhs);

// Principal eigenvalue with its strictly positive eigenfunction, normalized
// in the discrete L2 inner product: sum_i w_i phi1_i^2 = 1.
struct EigenPair {
  double lambda1 = 0.0;
  Eigen::VectorXd phi1;
  double residual = 0.0;  // max-norm of M phi1 - lambda1 phi1
};

// Symmetrizes by similarity with sqrt(w), solves the symmetric eigenproblem,
// and refines the top eigenvector by power iteration until the residual is
// below 1e-12 (1 + lambda). Requires a connected positivity graph, the
// discrete stand-in for a connected domain plus local kernel positivity.
EigenPair principal_eigenpair(const DiscreteOperator& op);

enum class ForcingMode { eigen, constant };

// g = t phi1 + g1 with g1 orthogonal to phi1 (eigen mode), or g = t + g1
// with g1 of zero mean (constant mode).
struct ForcingDecomposition {
  Eigen::VectorXd g;
  double t = 0.0;
  Eigen::VectorXd g1;
  ForcingMode mode = ForcingMode::eigen;
};

// Splits a given g; eigen mode needs the eigenpair (pass nullptr otherwise).
ForcingDecomposition decompose_forcing(const DiscreteOperator& op,
                                       const EigenPair* eig,
                                       const Eigen::VectorXd& g, ForcingMode mode);

// Builds the forcing from (t, g1): projects g1 onto the orthogonal
// complement of phi1 (or removes its mean) so the decomposition invariant
// holds by construction, then recomposes g.
ForcingDecomposition compose_forcing(const DiscreteOperator& op,
                                     const EigenPair* eig, double t,
                                     const Eigen::VectorXd& g1_raw,
                                     ForcingMode mode);

}  // namespace dispersal
