#include "dispersal/ap_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dispersal/errors.hpp"

namespace dispersal {

namespace {

double weighted_phi_mass(const ProblemInstance& inst) {
  const int n = inst.op.grid.size();
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    mass += inst.op.grid.weights[i] * inst.eig.phi1[i];
  }
  return mass;
}

std::string short_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

NonexistenceBound nonexistence_bound(const ProblemInstance& inst,
                                     double epsilon) {
  const Eigen::VectorXd w = build_supersolution(inst);
  const double R = w.lpNorm<Eigen::Infinity>();

  const HypothesisReport report =
      audit_hypotheses(inst.nl, inst.op.rowsum.sup, inst.eig.lambda1, R, 1000);
  if (!report.f1_pass || !report.f2_pass) {
    std::ostringstream msg;
    msg << "nonexistence_bound: growth hypotheses fail on [-" << R << ", "
        << R << "]:";
    if (!report.f1_pass) {
      msg << " superlinear envelope (A = " << report.A << ", margin "
          << report.f1_margin << ")";
    }
    if (!report.f2_pass) {
      msg << " sublinear tail (a = " << report.a << ", lambda1 = "
          << inst.eig.lambda1 << ", tail error " << report.f2_tail_error
          << ")";
    }
    throw AuditError(msg.str());
  }

  const double eps = std::isnan(epsilon)
                         ? 0.5 * (inst.eig.lambda1 - inst.nl.a)
                         : epsilon;
  const double mass = weighted_phi_mass(inst);

  NonexistenceBound bound;
  bound.m_positive = inst.nl.C * mass;
  bound.m_all = c1_offset(inst.nl, eps, inst.eig.lambda1, R) * mass;
  return bound;
}

std::optional<SolveReport> probe_existence(const ProblemInstance& inst,
                                           const Eigen::VectorXd* warm,
                                           const ProbeOptions& opts) {
  const Eigen::VectorXd super = build_supersolution(inst);

  const std::optional<Eigen::VectorXd> sub = build_subsolution(inst, warm);
  if (!sub) return std::nullopt;

  Bracket bracket{*sub, super};
  validate_bracket(inst, bracket);

  const double beta =
      std::isnan(opts.beta) ? default_beta(inst.op) : opts.beta;

  std::optional<SolveReport> report;
  try {
    report = monotone_iterate(inst, bracket, SolveMethod::monotone_from_super,
                              beta, opts.mono);
  } catch (const MonotonicityError&) {
    // The shift was below the slopes f actually explored; raise it past the
    // global slope bound and try once more.
    const double retry =
        std::max(beta, default_beta(inst.op) + max_slope_bound(inst.nl));
    try {
      report = monotone_iterate(inst, bracket,
                                SolveMethod::monotone_from_super, retry,
                                opts.mono);
    } catch (const IterationError&) {
      report.reset();
    }
  } catch (const IterationError&) {
    report.reset();
  }

  if (!report || !report->converged) {
    const double radius = super.lpNorm<Eigen::Infinity>();
    const std::vector<Eigen::VectorXd> seeds =
        default_newton_seeds(inst, radius, {});
    NewtonResult newton = newton_deflated(inst, seeds, {}, opts.newton);
    if (newton.solutions.empty()) return std::nullopt;
    report = std::move(newton.solutions.front());
  }

  const double gap = (super - report->solution).minCoeff();
  if (!(gap > 0.0)) {
    std::ostringstream msg;
    msg << "probe_existence: certified solution touches its a-priori bound "
           "(gap "
        << gap << "); the growth constants or the certification tolerance "
                  "are inconsistent";
    throw Error(msg.str());
  }
  return report;
}

InstanceFamily::InstanceFamily(const DiscreteOperator& op, const EigenPair& eig,
                               const Nonlinearity& nl,
                               const Eigen::VectorXd& g1_raw, ForcingMode mode)
    : op_(op), eig_(eig), nl_(nl), mode_(mode) {
  g1_ = compose_forcing(op_, &eig_, 0.0, g1_raw, mode_).g1;
}

ProblemInstance InstanceFamily::at(double t) const {
  return ProblemInstance{op_, eig_, nl_,
                         compose_forcing(op_, &eig_, t, g1_, mode_)};
}

ThresholdBracket bracket_threshold(const InstanceFamily& family,
                                   const ThresholdOptions& opts) {
  const NonexistenceBound bound =
      nonexistence_bound(family.at(0.0), opts.epsilon);

  // One unit above m_all the projection argument rules out solutions by a
  // margin no certified residual can fake, so a success here is a bug, not
  // a borderline case.
  double t_fail = bound.m_all + 1.0;
  if (probe_existence(family.at(t_fail), nullptr, opts.probe)) {
    std::ostringstream msg;
    msg << "bracket_threshold: certified a solution at t = " << t_fail
        << " above the nonexistence bound m_all = " << bound.m_all;
    throw Error(msg.str());
  }

  double t_lo =
      std::isnan(opts.t_lo_hint) ? bound.m_all - 1.0 : opts.t_lo_hint;
  std::optional<SolveReport> certificate;
  for (int k = 0; k <= opts.max_doublings; ++k) {
    certificate = probe_existence(family.at(t_lo), nullptr, opts.probe);
    if (certificate) break;
    t_fail = std::min(t_fail, t_lo);
    double dist = bound.m_all - t_lo;
    dist = dist > 0.0 ? 2.0 * dist : 1.0;
    t_lo = bound.m_all - dist;
  }
  if (!certificate) {
    std::ostringstream msg;
    msg << "bracket_threshold: no solvable t found after "
        << opts.max_doublings << " doublings below m_all = " << bound.m_all
        << " (last probe at t = " << t_lo << ")";
    throw ThresholdDegeneracyError(msg.str());
  }
  if (!(t_lo < t_fail)) {
    std::ostringstream msg;
    msg << "bracket_threshold: existence at t = " << t_lo
        << " contradicts the failed probe at t = " << t_fail;
    throw Error(msg.str());
  }

  double lo = t_lo;
  double hi = t_fail;
  for (int step = 0; step < opts.max_bisect && hi - lo > opts.tol_t; ++step) {
    const double mid = lo + (hi - lo) / 2.0;
    std::optional<SolveReport> probe =
        probe_existence(family.at(mid), nullptr, opts.probe);
    if (probe) {
      lo = mid;
      certificate = std::move(probe);
    } else {
      hi = mid;
    }
  }

  ThresholdBracket bracket;
  bracket.t_exist = lo;
  bracket.t_fail = hi;
  bracket.certificate = std::move(*certificate);
  bracket.bound = bound;
  return bracket;
}

APDiagram diagram(const InstanceFamily& family,
                  const std::vector<double>& t_values,
                  const DiagramOptions& opts) {
  for (std::size_t k = 1; k < t_values.size(); ++k) {
    if (!(t_values[k - 1] < t_values[k])) {
      throw PreconditionError(
          "diagram: t values must be strictly ascending");
    }
  }

  APDiagram dia;
  for (double t : t_values) {
    const ProblemInstance inst = family.at(t);

    std::vector<Eigen::VectorXd> known;
    std::optional<SolveReport> probed = probe_existence(inst, nullptr, opts.probe);
    if (probed) known.push_back(probed->solution);

    const double radius =
        build_supersolution(inst).lpNorm<Eigen::Infinity>();
    std::vector<Eigen::VectorXd> seeds;
    if (opts.seed_constants.empty()) {
      seeds = default_newton_seeds(inst, radius, known);
    } else {
      const int n = inst.op.grid.size();
      for (double c : opts.seed_constants) {
        seeds.push_back(Eigen::VectorXd::Constant(n, c * radius));
      }
      const double shift = 0.25 * (1.0 + radius);
      for (const auto& u : known) {
        seeds.push_back(u.array() + shift);
        seeds.push_back(u.array() - shift);
      }
    }
    NewtonResult newton =
        newton_deflated(inst, seeds, known, opts.probe.newton);

    std::vector<Eigen::VectorXd> solutions = std::move(known);
    for (auto& rep : newton.solutions) {
      solutions.push_back(std::move(rep.solution));
    }

    std::stable_sort(solutions.begin(), solutions.end(),
                     [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
                       const double xmin = x.minCoeff();
                       const double ymin = y.minCoeff();
                       if (xmin != ymin) return xmin < ymin;
                       const double xmax = x.maxCoeff();
                       const double ymax = y.maxCoeff();
                       if (xmax != ymax) return xmax < ymax;
                       return x.lpNorm<Eigen::Infinity>() <
                              y.lpNorm<Eigen::Infinity>();
                     });

    DiagramRow row;
    row.t = t;
    row.count = static_cast<int>(solutions.size());
    for (const auto& u : solutions) {
      row.summaries.push_back(
          {u.minCoeff(), u.maxCoeff(), u.lpNorm<Eigen::Infinity>()});
    }
    row.solutions = std::move(solutions);
    dia.rows.push_back(std::move(row));
  }

  append_indicator_diagnostics(dia);
  return dia;
}

void append_indicator_diagnostics(APDiagram& dia) {
  bool seen_empty = false;
  double empty_t = 0.0;
  for (const DiagramRow& row : dia.rows) {
    if (row.count == 0) {
      seen_empty = true;
      empty_t = row.t;
    } else if (seen_empty) {
      dia.diagnostics.push_back(
          "solution count rose to " + std::to_string(row.count) + " at t = " +
          short_real(row.t) + " after an empty row at t = " +
          short_real(empty_t) +
          "; existence is monotone in t, so at least one row misreports");
      seen_empty = false;
    }
  }
}

}  // namespace dispersal
