#include "dispersal/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dispersal/errors.hpp"

namespace dispersal {

namespace {

Eigen::VectorXd eval_f_nodewise(const ProblemInstance& inst,
                                const Eigen::VectorXd& u) {
  const int n = inst.op.grid.size();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = eval_f(inst.nl, inst.op.grid.nodes[i], u[i]);
  }
  return out;
}

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

void require_instance_size(const ProblemInstance& inst,
                           const Eigen::VectorXd& u, const char* who) {
  if (u.size() != inst.op.matrix.rows()) {
    std::ostringstream msg;
    msg << who << ": vector has " << u.size() << " entries, operator has "
        << inst.op.matrix.rows() << " nodes";
    throw PreconditionError(msg.str());
  }
}

}  // namespace

Eigen::VectorXd problem_residual(const ProblemInstance& inst,
                                 const Eigen::VectorXd& u) {
  require_instance_size(inst, u, "problem_residual");
  return apply(inst.op, u) - eval_f_nodewise(inst, u) - inst.forcing.g;
}

double residual_inf(const ProblemInstance& inst, const Eigen::VectorXd& u) {
  return inf_norm(problem_residual(inst, u));
}

double solution_tolerance(const ProblemInstance& inst) {
  return 1e-8 * (1.0 + inf_norm(inst.forcing.g));
}

double default_beta(const DiscreteOperator& op) {
  return op.rowsum.sup * (1.0 + 1e-6) + 1.0;
}

const char* method_name(SolveMethod method) {
  switch (method) {
    case SolveMethod::monotone_from_super:
      return "monotone_from_super";
    case SolveMethod::monotone_from_sub:
      return "monotone_from_sub";
    case SolveMethod::picard_ft:
      return "picard_ft";
    case SolveMethod::newton:
      return "newton";
  }
  throw PreconditionError("method_name: unknown method");
}

void validate_bracket(const ProblemInstance& inst, const Bracket& bracket) {
  require_instance_size(inst, bracket.sub, "validate_bracket(sub)");
  require_instance_size(inst, bracket.super, "validate_bracket(super)");

  const double order_slack =
      1e-12 * (1.0 + std::max(inf_norm(bracket.sub), inf_norm(bracket.super)));
  for (Eigen::Index i = 0; i < bracket.sub.size(); ++i) {
    if (bracket.sub[i] > bracket.super[i] + order_slack) {
      std::ostringstream msg;
      msg << "validate_bracket: sub exceeds super at node " << i << " ("
          << bracket.sub[i] << " > " << bracket.super[i] << ")";
      throw PreconditionError(msg.str());
    }
  }

  const double sub_defect = problem_residual(inst, bracket.sub).minCoeff();
  if (!(sub_defect >= -1e-10)) {
    std::ostringstream msg;
    msg << "validate_bracket: subsolution defect " << sub_defect
        << " drops below -1e-10";
    throw PreconditionError(msg.str());
  }
  const double super_defect = problem_residual(inst, bracket.super).maxCoeff();
  if (!(super_defect <= 1e-10)) {
    std::ostringstream msg;
    msg << "validate_bracket: supersolution defect " << super_defect
        << " rises above 1e-10";
    throw PreconditionError(msg.str());
  }
}

Eigen::VectorXd build_supersolution(const ProblemInstance& inst) {
  const double A = inst.nl.A;
  if (!(A > inst.op.rowsum.sup)) {
    std::ostringstream msg;
    msg << "build_supersolution: declared slope A = " << A
        << " does not exceed the row-sum supremum " << inst.op.rowsum.sup;
    throw AuditError(msg.str());
  }

  // The right-hand side must stay strictly negative even when the declared
  // offset C vanishes, otherwise w could coincide with a solution instead of
  // dominating it strictly.
  const double c_eff = std::max(inst.nl.C, 1e-6);
  const double level = -(inf_norm(inst.forcing.g) + c_eff);
  const int n = inst.op.grid.size();
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, level);
  const Eigen::VectorXd w = shifted_solve(inst.op, A, rhs);

  if (!(w.minCoeff() > 0.0)) {
    std::ostringstream msg;
    msg << "build_supersolution: computed bound has min " << w.minCoeff()
        << ", expected strictly positive";
    throw Error(msg.str());
  }
  const double defect = problem_residual(inst, w).maxCoeff();
  if (!(defect <= 1e-10)) {
    std::ostringstream msg;
    msg << "build_supersolution: defect " << defect
        << " is not nonpositive; the nonlinearity violates its declared "
           "growth constants";
    throw Error(msg.str());
  }
  return w;
}

std::optional<Eigen::VectorXd> build_subsolution(const ProblemInstance& inst,
                                                 const Eigen::VectorXd* warm) {
  const int n = inst.op.grid.size();
  const double g_norm = inf_norm(inst.forcing.g);

  auto accepted = [&](const Eigen::VectorXd& z) {
    const double slack = 1e-13 * (1.0 + inf_norm(z) + g_norm);
    return problem_residual(inst, z).minCoeff() >= -slack;
  };

  // Small positive multiples of phi1 work whenever f stays below lambda1 s
  // near zero from the right; shrink geometrically before giving up.
  double eps = 1.0;
  for (int k = 0; k <= 40; ++k, eps *= 0.5) {
    Eigen::VectorXd z = eps * inst.eig.phi1;
    if (accepted(z)) return z;
  }

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  if (accepted(zero)) return zero;

  // Negative multiples of phi1 have defect roughly (lambda1 - a) c phi1,
  // which climbs as c falls only when the far-left slope a exceeds lambda1.
  // That covers steep families outside the two-solution regime; under the
  // standard hypotheses (a < lambda1) this stage never fires and the ladder
  // moves on to the caller's warm start.
  double c = -1.0;
  for (int k = 0; k <= 40; ++k, c *= 2.0) {
    Eigen::VectorXd z = c * inst.eig.phi1;
    if (accepted(z)) return z;
  }

  if (warm != nullptr) {
    require_instance_size(inst, *warm, "build_subsolution(warm)");
    if (accepted(*warm)) return *warm;
  }

  return std::nullopt;
}

SolveReport monotone_iterate(const ProblemInstance& inst, const Bracket& bracket,
                             SolveMethod from, double beta,
                             const MonotoneOptions& opts) {
  if (from != SolveMethod::monotone_from_super &&
      from != SolveMethod::monotone_from_sub) {
    throw PreconditionError(
        "monotone_iterate: direction must be monotone_from_super or "
        "monotone_from_sub");
  }
  validate_bracket(inst, bracket);

  const bool descending = from == SolveMethod::monotone_from_super;
  const ShiftedSolver solver(inst.op, beta);

  SolveReport report;
  report.method = from;
  report.bracket = bracket;

  Eigen::VectorXd u = descending ? bracket.super : bracket.sub;
  if (opts.record_trajectory) report.trajectory.push_back(u);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd rhs =
        eval_f_nodewise(inst, u) - beta * u + inst.forcing.g;
    const Eigen::VectorXd un = solver.solve(rhs);

    const double slack = 1e-12 * (1.0 + std::max(inf_norm(u), inf_norm(un)));
    const double drift =
        descending ? (un - u).maxCoeff() : (u - un).maxCoeff();
    if (drift > slack) {
      std::ostringstream msg;
      msg << "monotone_iterate: iterate moved against the "
          << (descending ? "descending" : "ascending") << " direction by "
          << drift << " at iteration " << iter << "; beta = " << beta
          << " is below the steepest slope of f on the bracket";
      throw MonotonicityError(msg.str());
    }
    const double below = (bracket.sub - un).maxCoeff();
    const double above = (un - bracket.super).maxCoeff();
    if (below > slack || above > slack) {
      std::ostringstream msg;
      msg << "monotone_iterate: iterate " << iter << " left the bracket ("
          << (below > slack ? "under the subsolution" : "over the supersolution")
          << " by " << std::max(below, above) << ")";
      throw MonotonicityError(msg.str());
    }

    const double step = inf_norm(un - u);
    u = un;
    report.iterations = iter;
    if (opts.record_trajectory) report.trajectory.push_back(u);

    if (step < opts.tol) {
      report.solution = u;
      report.residual_inf = residual_inf(inst, u);
      report.converged = report.residual_inf <= solution_tolerance(inst);
      return report;
    }
  }

  std::ostringstream msg;
  msg << "monotone_iterate: no convergence within " << opts.max_iter
      << " iterations (tol " << opts.tol << ")";
  throw IterationError(msg.str());
}

SolveReport picard_ft(const ProblemInstance& inst, const Eigen::VectorXd& u0,
                      double M_const, const PicardOptions& opts) {
  require_instance_size(inst, u0, "picard_ft");
  if (!(M_const > 0.0)) {
    throw PreconditionError("picard_ft: M_const must be positive");
  }
  if (std::isfinite(opts.gamma) && !(M_const > opts.gamma)) {
    std::ostringstream msg;
    msg << "picard_ft: M_const = " << M_const
        << " must exceed the slope bound gamma = " << opts.gamma;
    throw PreconditionError(msg.str());
  }
  const double radius = std::isfinite(opts.divergence_radius)
                            ? opts.divergence_radius
                            : 1e8 * (1.0 + inf_norm(u0));
  const double escape = 10.0 * radius;

  SolveReport report;
  report.method = SolveMethod::picard_ft;

  Eigen::VectorXd u = u0;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd r = problem_residual(inst, u);
    u += r / M_const;
    report.iterations = iter;

    if (!u.allFinite() || inf_norm(u) > escape) {
      report.solution = u;
      report.residual_inf = u.allFinite()
                                ? residual_inf(inst, u)
                                : std::numeric_limits<double>::infinity();
      report.converged = false;
      return report;
    }
    if (inf_norm(r) / M_const < opts.tol) {
      report.solution = u;
      report.residual_inf = residual_inf(inst, u);
      report.converged = report.residual_inf <= solution_tolerance(inst);
      return report;
    }
  }

  report.solution = u;
  report.residual_inf = residual_inf(inst, u);
  report.converged = false;
  return report;
}

namespace {

// Deflation weight prod_k (1 / |u - u_k|_inf + 1) and the directional
// derivative of its gradient along delta, using the first max-attaining
// coordinate of each difference as the subgradient direction.
struct Deflation {
  double mu = 1.0;
  bool degenerate = false;  // u coincides with a root already known

  static Deflation at(const Eigen::VectorXd& u,
                      const std::vector<Eigen::VectorXd>& roots) {
    Deflation d;
    for (const auto& root : roots) {
      const double r = (u - root).lpNorm<Eigen::Infinity>();
      if (r == 0.0) {
        d.degenerate = true;
        return d;
      }
      d.mu *= 1.0 / r + 1.0;
    }
    if (!std::isfinite(d.mu)) d.degenerate = true;
    return d;
  }
};

double deflation_gradient_dot(const Eigen::VectorXd& u,
                              const std::vector<Eigen::VectorXd>& roots,
                              double mu, const Eigen::VectorXd& delta) {
  double dot = 0.0;
  for (const auto& root : roots) {
    const Eigen::VectorXd v = u - root;
    Eigen::Index istar = 0;
    const double r = v.cwiseAbs().maxCoeff(&istar);
    const double factor = 1.0 / r + 1.0;
    const double sign = v[istar] >= 0.0 ? 1.0 : -1.0;
    dot += (mu / factor) * (-1.0 / (r * r)) * sign * delta[istar];
  }
  return dot;
}

}  // namespace

NewtonResult newton_deflated(const ProblemInstance& inst,
                             const std::vector<Eigen::VectorXd>& seeds,
                             const std::vector<Eigen::VectorXd>& known,
                             const NewtonOptions& opts) {
  const int n = inst.op.grid.size();
  NewtonResult result;
  result.seeds_tried = static_cast<int>(seeds.size());

  std::vector<Eigen::VectorXd> roots = known;  // deflation set, grows as we go

  auto is_duplicate = [&](const Eigen::VectorXd& u) {
    const double tol = opts.dedup_scale * (1.0 + u.lpNorm<Eigen::Infinity>());
    for (const auto& root : roots) {
      if ((u - root).lpNorm<Eigen::Infinity>() < tol) return true;
    }
    return false;
  };

  for (int si = 0; si < static_cast<int>(seeds.size()); ++si) {
    require_instance_size(inst, seeds[si], "newton_deflated(seed)");
    Eigen::VectorXd u = seeds[si];
    bool certified = false;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
      const Eigen::VectorXd G = problem_residual(inst, u);
      const double G_norm = G.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(G_norm)) break;

      Eigen::MatrixXd J = inst.op.matrix;
      for (int i = 0; i < n; ++i) {
        const double step = 1e-6 * (1.0 + std::abs(u[i]));
        J(i, i) -= slope_quotient(inst.nl, inst.op.grid.nodes[i], u[i], step);
      }
      const Eigen::VectorXd delta = J.partialPivLu().solve(-G);
      if (!delta.allFinite()) break;

      const Deflation defl = Deflation::at(u, roots);
      if (defl.degenerate) break;
      double alpha = 1.0;
      if (!roots.empty()) {
        const double gd = deflation_gradient_dot(u, roots, defl.mu, delta);
        const double denom = defl.mu - gd;
        if (std::abs(denom) >= 1e-12 * defl.mu) {
          alpha = defl.mu / denom;
          const double mag =
              std::clamp(std::abs(alpha), 1e-6, 1e6);
          alpha = std::copysign(mag, alpha);
        }
      }
      const Eigen::VectorXd scaled = alpha * delta;

      // Backtrack on the deflated residual so progress near known roots is
      // measured after the repelling weight, not before it.
      const double base = defl.mu * G_norm;
      double theta = 1.0;
      bool advanced = false;
      Eigen::VectorXd candidate;
      for (int half = 0; half <= 20; ++half, theta *= 0.5) {
        candidate = u + theta * scaled;
        const Deflation cd = Deflation::at(candidate, roots);
        if (cd.degenerate) continue;
        const double cand_norm =
            problem_residual(inst, candidate).lpNorm<Eigen::Infinity>();
        if (std::isfinite(cand_norm) && cd.mu * cand_norm < base) {
          advanced = true;
          break;
        }
      }
      if (!advanced) break;

      const double moved = theta * scaled.lpNorm<Eigen::Infinity>();
      u = candidate;

      if (moved < opts.tol_step) {
        const double final_residual = residual_inf(inst, u);
        if (final_residual <= solution_tolerance(inst)) {
          certified = true;
          if (!is_duplicate(u)) {
            SolveReport report;
            report.solution = u;
            report.residual_inf = final_residual;
            report.iterations = iter;
            report.method = SolveMethod::newton;
            report.converged = true;
            result.solutions.push_back(std::move(report));
            roots.push_back(u);
          }
        }
        break;
      }
    }

    if (!certified) result.failed_seeds.push_back(si);
  }

  return result;
}

std::vector<Eigen::VectorXd> default_newton_seeds(
    const ProblemInstance& inst, double radius,
    const std::vector<Eigen::VectorXd>& known) {
  const int n = inst.op.grid.size();
  const double R = radius;
  std::vector<Eigen::VectorXd> seeds;
  for (double c : {-2.0 * R, -R, -R / 2.0, 0.0, R / 2.0, R, 2.0 * R}) {
    seeds.push_back(Eigen::VectorXd::Constant(n, c));
  }
  const double shift = 0.25 * (1.0 + R);
  for (const auto& u : known) {
    seeds.push_back(u.array() + shift);
    seeds.push_back(u.array() - shift);
  }
  return seeds;
}

MaxPrincipleVerdict check_max_principle(const DiscreteOperator& op,
                                        const Eigen::VectorXd& c,
                                        const Eigen::VectorXd& u) {
  if (c.size() != op.matrix.rows() || u.size() != op.matrix.rows()) {
    throw PreconditionError(
        "check_max_principle: coefficient and state must match the operator "
        "size");
  }

  MaxPrincipleVerdict verdict;
  verdict.premise_coefficient = true;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (!(c[i] > op.rowsum.values[i])) {
      verdict.premise_coefficient = false;
      break;
    }
  }
  const Eigen::VectorXd lhs = apply(op, u) - c.cwiseProduct(u);
  verdict.premise_sign = lhs.maxCoeff() <= 1e-12;

  if (u.cwiseAbs().maxCoeff() == 0.0) {
    verdict.conclusion_holds = true;
    return verdict;
  }
  Eigen::Index imin = 0;
  const double umin = u.minCoeff(&imin);
  verdict.conclusion_holds = umin > 0.0;
  if (!verdict.conclusion_holds) {
    verdict.counterexample_node = static_cast<int>(imin);
  }
  return verdict;
}

}  // namespace dispersal
