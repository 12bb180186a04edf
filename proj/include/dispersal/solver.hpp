#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dispersal/nonlinearity.hpp"
#include "dispersal/operator.hpp"

namespace dispersal {

// One fully specified problem: find u with M u = f(x, u) + g where
// g = t phi1 + g1. Holds references; the operator, eigenpair and
// nonlinearity must outlive the instance.
struct ProblemInstance {
  const DiscreteOperator& op;
  const EigenPair& eig;
  const Nonlinearity& nl;
  ForcingDecomposition forcing;
};

// M u - f(x, u) - g, the defect whose zero is a solution.
Eigen::VectorXd problem_residual(const ProblemInstance& inst,
                                 const Eigen::VectorXd& u);
double residual_inf(const ProblemInstance& inst, const Eigen::VectorXd& u);

// Certification threshold for a solution: 1e-8 (1 + |g|_inf).
double solution_tolerance(const ProblemInstance& inst);

// Default shift for the monotone scheme: clear of the row-sum supremum by a
// relative margin plus one.
double default_beta(const DiscreteOperator& op);

// sub <= super nodewise, sub with nonnegative defect and super with
// nonpositive defect, both up to 1e-10.
struct Bracket {
  Eigen::VectorXd sub;
  Eigen::VectorXd super;
};

void validate_bracket(const ProblemInstance& inst, const Bracket& bracket);

enum class SolveMethod { monotone_from_super, monotone_from_sub, picard_ft, newton };

const char* method_name(SolveMethod method);

struct SolveReport {
  Eigen::VectorXd solution;
  double residual_inf = 0.0;
  int iterations = 0;
  SolveMethod method = SolveMethod::newton;
  std::optional<Bracket> bracket;
  bool converged = false;
  // Filled only when requested through MonotoneOptions::record_trajectory;
  // holds every iterate including the starting point.
  std::vector<Eigen::VectorXd> trajectory;
};

// w = (M - A I)^{-1} (-(|g|_inf + C')) with C' = max(C, 1e-6): the
// right-hand side must stay strictly negative for w to dominate every
// subsolution strictly, so a declared C of zero is floored. Requires the
// declared A to exceed the row-sum supremum; asserts w > 0 and the
// supersolution defect sign before returning.
Eigen::VectorXd build_supersolution(const ProblemInstance& inst);

// Candidate ladder: eps phi1 for eps = 1, 1/2, ..., 2^-40; then zero; then
// c phi1 for c = -1, -2, -4, ..., -2^40; then the caller's warm start (a
// solution at larger t, which has the right defect sign at smaller t).
// First candidate with nodewise defect >= -1e-13 (1 + |z| + |g|) wins; the
// slack is kept well below the bracket tolerance so near-invalid candidates
// cannot poison the monotone scheme. Returns nothing if every candidate
// fails, which is evidence (not proof) of nonexistence.
std::optional<Eigen::VectorXd> build_subsolution(
    const ProblemInstance& inst, const Eigen::VectorXd* warm = nullptr);

struct MonotoneOptions {
  double tol = 1e-10;  // stop when |u_n - u_{n-1}|_inf drops below this
  int max_iter = 10000;
  bool record_trajectory = false;
};

// u_n = (M - beta I)^{-1} (f(u_{n-1}) - beta u_{n-1} + g), decreasing from
// the supersolution or increasing from the subsolution. Monotonicity and
// bracket containment are asserted at every step; losing them throws
// MonotonicityError (beta too small for the slopes encountered).
SolveReport monotone_iterate(const ProblemInstance& inst, const Bracket& bracket,
                             SolveMethod from, double beta,
                             const MonotoneOptions& opts = {});

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  // Declared a-priori radius; iterates beyond 10x it count as divergence.
  double divergence_radius = std::numeric_limits<double>::quiet_NaN();
  // When finite, M_const must exceed it (the Gamma bound from the audit).
  double gamma = std::numeric_limits<double>::quiet_NaN();
};

// Fixed-point iteration of F_t u = u + (M u - f(u) - g) / M_const. A fixed
// point solves the problem; divergence and iteration overrun are ordinary
// outcomes reported through `converged`, not errors.
SolveReport picard_ft(const ProblemInstance& inst, const Eigen::VectorXd& u0,
                      double M_const, const PicardOptions& opts = {});

struct NewtonOptions {
  double tol_step = 1e-10;
  int max_iter = 200;
  double dedup_scale = 1e-4;  // distinct below 1e-4 (1 + |u|_inf)
};

struct NewtonResult {
  std::vector<SolveReport> solutions;
  int seeds_tried = 0;
  std::vector<int> failed_seeds;  // indices that never certified a root
};

// Damped Newton on G(u) = M u - f(u) - g with the Jacobian diagonal taken
// from difference quotients of f. Known roots (given plus found) repel
// later runs through the deflation factor prod(1/|u - u_k|_inf + 1); the
// deflated step reduces to a scalar rescaling of the plain Newton step.
// Every accepted root re-verifies the undeflated residual.
NewtonResult newton_deflated(const ProblemInstance& inst,
                             const std::vector<Eigen::VectorXd>& seeds,
                             const std::vector<Eigen::VectorXd>& known,
                             const NewtonOptions& opts = {});

// Constant seeds c 1 for c in {-2R, -R, -R/2, 0, R/2, R, 2R}, then each
// known solution shifted by +/- (1 + R)/4.
std::vector<Eigen::VectorXd> default_newton_seeds(
    const ProblemInstance& inst, double radius,
    const std::vector<Eigen::VectorXd>& known);

// Premises: c > k nodewise and (M u - c u) <= 1e-12 nodewise. When they
// hold the discrete maximum principle demands u > 0 everywhere or u
// identically zero; a counterexample node would expose an assembly bug.
struct MaxPrincipleVerdict {
  bool premise_coefficient = false;
  bool premise_sign = false;
  bool conclusion_holds = false;
  int counterexample_node = -1;

  bool applicable() const { return premise_coefficient && premise_sign; }
};

MaxPrincipleVerdict check_max_principle(const DiscreteOperator& op,
                                        const Eigen::VectorXd& c,
                                        const Eigen::VectorXd& u);

}  // namespace dispersal
