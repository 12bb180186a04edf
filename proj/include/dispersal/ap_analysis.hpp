#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dispersal/solver.hpp"

namespace dispersal {

// Projections of the pointwise envelopes of lambda1 s - f(s) onto the
// forcing decomposition. No solution can exist with t above m_all, and no
// nonnegative solution with t above m_positive.
struct NonexistenceBound {
  double m_positive = 0.0;
  double m_all = 0.0;
};

// Certifies the growth hypotheses on the instance's own a-priori radius and
// evaluates both bounds. epsilon tunes the left envelope slope a + epsilon;
// NaN picks (lambda1 - a) / 2. Throws AuditError when the growth hypotheses
// fail, since the bounds are meaningless without them.
NonexistenceBound nonexistence_bound(
    const ProblemInstance& inst,
    double epsilon = std::numeric_limits<double>::quiet_NaN());

struct ProbeOptions {
  MonotoneOptions mono;
  NewtonOptions newton;
  // Shift for the monotone scheme; NaN means default_beta(op).
  double beta = std::numeric_limits<double>::quiet_NaN();
};

// Existence probe: build the supersolution, walk the subsolution ladder,
// run the monotone scheme downward, and fall back to deflated Newton when
// the scheme stalls. A MonotonicityError triggers one retry with the shift
// raised by the global slope bound. Returns a certified solution, or
// nothing when no bracket could be built or no iteration certified a root;
// "nothing" is evidence of nonexistence, not proof.
std::optional<SolveReport> probe_existence(const ProblemInstance& inst,
                                           const Eigen::VectorXd* warm = nullptr,
                                           const ProbeOptions& opts = {});

// A problem family indexed by t with everything else held fixed. Holds
// references; the operator, eigenpair and nonlinearity must outlive it.
// g1_raw is projected once (orthogonal to phi1, or mean-free) on
// construction.
class InstanceFamily {
 public:
  InstanceFamily(const DiscreteOperator& op, const EigenPair& eig,
                 const Nonlinearity& nl, const Eigen::VectorXd& g1_raw,
                 ForcingMode mode);

  ProblemInstance at(double t) const;

  const DiscreteOperator& op() const { return op_; }
  const EigenPair& eig() const { return eig_; }
  const Nonlinearity& nl() const { return nl_; }
  const Eigen::VectorXd& g1() const { return g1_; }
  ForcingMode mode() const { return mode_; }

 private:
  const DiscreteOperator& op_;
  const EigenPair& eig_;
  const Nonlinearity& nl_;
  Eigen::VectorXd g1_;
  ForcingMode mode_;
};

// [t_exist, t_fail] with a certified solution at t_exist and a failed probe
// at t_fail.
struct ThresholdBracket {
  double t_exist = 0.0;
  double t_fail = 0.0;
  SolveReport certificate;
  NonexistenceBound bound;

  double width() const { return t_fail - t_exist; }
};

struct ThresholdOptions {
  // First existence candidate; NaN means m_all - 1.
  double t_lo_hint = std::numeric_limits<double>::quiet_NaN();
  double tol_t = 1e-6;
  int max_bisect = 80;
  int max_doublings = 60;
  // Forwarded to nonexistence_bound.
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  ProbeOptions probe;
};

// Brackets the existence threshold in t. Starts from the certainty that
// m_all + 1 has no solution, hunts downward for a solvable t by doubling
// the distance below m_all (ThresholdDegeneracyError when max_doublings
// probes all fail), then bisects. Every probe is independent; bisection
// stops at width tol_t or after max_bisect steps, whichever comes first.
ThresholdBracket bracket_threshold(const InstanceFamily& family,
                                   const ThresholdOptions& opts = {});

struct DiagramRow {
  double t = 0.0;
  int count = 0;
  // Per solution: min, max, inf-norm, sorted lexicographically.
  std::vector<std::array<double, 3>> summaries;
  std::vector<Eigen::VectorXd> solutions;
};

struct APDiagram {
  std::vector<DiagramRow> rows;
  // Human-readable warnings, e.g. a solution count rising again after a
  // zero row, which the problem structure forbids.
  std::vector<std::string> diagnostics;
};

struct DiagramOptions {
  // Multipliers of the a-priori radius R for the constant Newton seeds;
  // empty means {-2, -1, -1/2, 0, 1/2, 1, 2}.
  std::vector<double> seed_constants;
  ProbeOptions probe;
};

// Solution-set survey over strictly ascending t values. Each row runs the
// existence probe plus deflated Newton from scratch, so rows can be compared
// without worrying about cross-row seeding effects.
APDiagram diagram(const InstanceFamily& family,
                  const std::vector<double>& t_values,
                  const DiagramOptions& opts = {});

// Scans rows in order and appends a diagnostic for every t where the count
// turns positive again after an earlier zero row. Exposed for testing;
// diagram() already calls it.
void append_indicator_diagnostics(APDiagram& dia);

}  // namespace dispersal
