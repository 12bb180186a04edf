#include "dispersal/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include "dispersal/ap_analysis.hpp"
#include "dispersal/config.hpp"
#include "dispersal/errors.hpp"
#include "dispersal/io.hpp"

namespace dispersal {

namespace {

const char* usage_text =
    "dispersal: solver suite for the nonlocal dispersal equation\n"
    "           M u = f(u) + t phi1 + g1 on interval and box domains\n"
    "\n"
    "Usage: dispersal <command> [options]\n"
    "\n"
    "Commands:\n"
    "  eigen       principal eigenvalue and eigenfunction of the operator\n"
    "  solve       one certified solution at the configured t\n"
    "  threshold   bracket the existence threshold in t\n"
    "  diagram     solution counts and extrema over a list of t values\n"
    "  check       kernel audit and nonlinearity hypothesis report\n"
    "\n"
    "Options:\n"
    "  --config <file>   INI configuration; defaults apply when omitted\n"
    "  --out <file>      write the primary output here instead of stdout\n"
    "                    (solve: a .csv suffix selects CSV instead of JSON)\n"
    "  --method <name>   solve only: auto | monotone | picard | newton\n"
    "  --svg <file>      diagram only: also write an SVG picture\n"
    "  --help            print this text\n"
    "\n"
    "Exit codes:\n"
    "  0  success\n"
    "  1  invalid configuration or a failed computation\n"
    "  2  kernel or hypothesis audit failure\n"
    "  3  no solution certified\n"
    "  4  threshold search found no solvable t\n"
    "\n";

struct CliArgs {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string method;
  std::string svg_path;
  bool help = false;
};

CliArgs parse_args(const std::vector<std::string>& args) {
  CliArgs parsed;
  if (args.empty()) {
    parsed.help = true;
    return parsed;
  }
  std::size_t i = 0;
  if (args[0] == "--help") {
    parsed.help = true;
    i = 1;
  } else {
    parsed.command = args[0];
    i = 1;
  }
  for (; i < args.size(); ++i) {
    const std::string& arg = args[i];
    auto value = [&](const char* name) -> const std::string& {
      if (i + 1 >= args.size()) {
        throw ConfigError(std::string("option ") + name + " requires a value");
      }
      return args[++i];
    };
    if (arg == "--help") {
      parsed.help = true;
    } else if (arg == "--config") {
      parsed.config_path = value("--config");
    } else if (arg == "--out") {
      parsed.out_path = value("--out");
    } else if (arg == "--method") {
      parsed.method = value("--method");
    } else if (arg == "--svg") {
      parsed.svg_path = value("--svg");
    } else {
      throw ConfigError("unknown option '" + arg + "'");
    }
  }
  return parsed;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open output file '" + path + "'");
  }
  out << content;
  if (!out) {
    throw Error("failed writing output file '" + path + "'");
  }
}

void emit(const std::string& content, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty()) {
    out << content;
  } else {
    write_file(out_path, content);
  }
}

ProbeOptions probe_options_from(const RunConfig& cfg) {
  ProbeOptions opts;
  opts.mono.tol = cfg.solver.tol;
  opts.mono.max_iter = cfg.solver.max_iter;
  opts.newton.tol_step = cfg.solver.tol;
  opts.newton.max_iter = cfg.solver.newton_max_iter;
  opts.beta = cfg.solver.beta;
  return opts;
}

int emit_solution(const Workspace& ws, double t, const SolveReport& report,
                  const std::string& out_path, std::ostream& out) {
  const bool csv = out_path.size() >= 4 && out_path.ends_with(".csv");
  emit(csv ? solution_csv(ws.op.grid, report.solution)
           : solution_json(t, report),
       out_path, out);
  return 0;
}

int cmd_eigen(const RunConfig& cfg, const CliArgs& args, std::ostream& out) {
  const Workspace ws = build_workspace(cfg);
  emit(eigen_json(ws.op, ws.eig), args.out_path, out);
  return 0;
}

int cmd_solve(const RunConfig& cfg, const CliArgs& args, std::ostream& out,
              std::ostream& err) {
  const Workspace ws = build_workspace(cfg);
  const InstanceFamily family(ws.op, ws.eig, ws.nl, ws.g1_raw, ws.mode);
  const ProblemInstance inst = family.at(cfg.forcing.t);
  const ProbeOptions popts = probe_options_from(cfg);

  std::string method = args.method.empty() ? cfg.solver.method : args.method;
  if (method != "auto" && method != "monotone" && method != "picard" &&
      method != "newton") {
    throw ConfigError("--method must be auto | monotone | picard | newton, "
                      "got '" + method + "'");
  }

  std::optional<SolveReport> report;
  if (method == "auto") {
    report = probe_existence(inst, nullptr, popts);
  } else if (method == "monotone") {
    const Eigen::VectorXd super = build_supersolution(inst);
    const std::optional<Eigen::VectorXd> sub = build_subsolution(inst);
    if (sub) {
      const Bracket bracket{*sub, super};
      validate_bracket(inst, bracket);
      const double beta =
          std::isnan(popts.beta) ? default_beta(inst.op) : popts.beta;
      try {
        report = monotone_iterate(inst, bracket,
                                  SolveMethod::monotone_from_super, beta,
                                  popts.mono);
      } catch (const MonotonicityError&) {
        const double retry =
            std::max(beta, default_beta(inst.op) + max_slope_bound(inst.nl));
        try {
          report = monotone_iterate(inst, bracket,
                                    SolveMethod::monotone_from_super, retry,
                                    popts.mono);
        } catch (const IterationError&) {
        }
      } catch (const IterationError&) {
      }
    }
  } else if (method == "picard") {
    const double m_const = std::isnan(cfg.solver.picard_m)
                               ? 2.0 * max_slope_bound(ws.nl)
                               : cfg.solver.picard_m;
    PicardOptions picard;
    picard.tol = cfg.solver.tol;
    picard.max_iter = cfg.solver.max_iter;
    picard.gamma = max_slope_bound(ws.nl);
    try {
      picard.divergence_radius =
          build_supersolution(inst).lpNorm<Eigen::Infinity>();
    } catch (const AuditError&) {
      // No a-priori radius without the growth hypothesis; the iteration
      // falls back to its own large default.
    }
    const Eigen::VectorXd u0 =
        Eigen::VectorXd::Constant(inst.op.grid.size(), cfg.solver.picard_u0);
    report = picard_ft(inst, u0, m_const, picard);
  } else {
    const double radius = build_supersolution(inst).lpNorm<Eigen::Infinity>();
    const std::vector<Eigen::VectorXd> seeds =
        default_newton_seeds(inst, radius, {});
    NewtonResult newton = newton_deflated(inst, seeds, {}, popts.newton);
    if (!newton.solutions.empty()) {
      report = std::move(newton.solutions.front());
    }
  }

  if (!report || !report->converged) {
    err << "no solution certified at t = " << format_real(cfg.forcing.t)
        << " with method " << method << "\n";
    return 3;
  }
  return emit_solution(ws, cfg.forcing.t, *report, args.out_path, out);
}

int cmd_threshold(const RunConfig& cfg, const CliArgs& args,
                  std::ostream& out) {
  const Workspace ws = build_workspace(cfg);
  const InstanceFamily family(ws.op, ws.eig, ws.nl, ws.g1_raw, ws.mode);

  ThresholdOptions topts;
  topts.t_lo_hint = cfg.threshold.t_lo_hint;
  topts.tol_t = cfg.threshold.tol_t;
  topts.max_bisect = cfg.threshold.max_bisect;
  topts.max_doublings = cfg.threshold.max_doublings;
  topts.epsilon = cfg.threshold.epsilon;
  topts.probe = probe_options_from(cfg);

  const ThresholdBracket bracket = bracket_threshold(family, topts);
  emit(threshold_json(bracket), args.out_path, out);
  return 0;
}

int cmd_diagram(const RunConfig& cfg, const CliArgs& args, std::ostream& out) {
  if (cfg.diagram.t_values.empty()) {
    throw ConfigError("diagram requires [diagram] t_values in the config");
  }
  const Workspace ws = build_workspace(cfg);
  const InstanceFamily family(ws.op, ws.eig, ws.nl, ws.g1_raw, ws.mode);

  DiagramOptions dopts;
  dopts.probe = probe_options_from(cfg);
  const APDiagram dia = diagram(family, cfg.diagram.t_values, dopts);

  emit(diagram_csv(dia), args.out_path, out);
  if (!args.svg_path.empty()) {
    write_file(args.svg_path, diagram_svg(dia));
  }
  return 0;
}

int cmd_check(const RunConfig& cfg, const CliArgs& args, std::ostream& out) {
  const Domain domain = domain_from_config(cfg.domain);
  validate(domain);
  const Grid grid = build_grid(domain);
  const KernelSpec spec = kernel_from_config(cfg.kernel, domain);

  const KernelAuditReport kernel = audit_kernel(grid, spec);
  const RowSum rs = row_sums(grid, spec);

  if (!kernel.pass()) {
    emit(check_json(kernel, rs.sup, nullptr, nullptr, false), args.out_path,
         out);
    return 2;
  }

  const DiscreteOperator op = assemble(grid, spec, cfg.domain.max_nodes);
  const EigenPair eig = principal_eigenpair(op);
  const Nonlinearity nl = nonlinearity_from_config(cfg.nonlinearity);
  const ForcingMode mode = cfg.forcing.mode == "constant"
                               ? ForcingMode::constant
                               : ForcingMode::eigen;

  Eigen::VectorXd g1_raw = Eigen::VectorXd::Zero(grid.size());
  if (cfg.forcing.g1 == "linear") {
    for (int i = 0; i < grid.size(); ++i) {
      g1_raw[i] = cfg.forcing.g1_c0 + cfg.forcing.g1_cx * grid.nodes[i][0] +
                  cfg.forcing.g1_cy * grid.nodes[i][1];
    }
  }
  const InstanceFamily family(op, eig, nl, g1_raw, mode);
  const ProblemInstance inst = family.at(cfg.forcing.t);

  double radius = 1.0;
  bool r_fallback = true;
  try {
    radius = build_supersolution(inst).lpNorm<Eigen::Infinity>();
    r_fallback = false;
  } catch (const AuditError&) {
    // A below the row sums: no a-priori radius exists, so the hypothesis
    // report certifies the unit ball instead and says so.
  }
  const HypothesisReport hyp =
      audit_hypotheses(nl, rs.sup, eig.lambda1, radius, 4001);

  emit(check_json(kernel, rs.sup, &eig.lambda1, &hyp, r_fallback),
       args.out_path, out);
  return hyp.core_pass() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  try {
    const CliArgs parsed = parse_args(args);
    if (parsed.help || parsed.command.empty()) {
      out << usage_text << config_reference();
      return 0;
    }
    if (!parsed.method.empty() && parsed.command != "solve") {
      throw ConfigError("option --method is only valid for 'solve'");
    }
    if (!parsed.svg_path.empty() && parsed.command != "diagram") {
      throw ConfigError("option --svg is only valid for 'diagram'");
    }

    const RunConfig cfg = parsed.config_path.empty()
                              ? RunConfig{}
                              : load_config(parsed.config_path);

    if (parsed.command == "eigen") return cmd_eigen(cfg, parsed, out);
    if (parsed.command == "solve") return cmd_solve(cfg, parsed, out, err);
    if (parsed.command == "threshold") return cmd_threshold(cfg, parsed, out);
    if (parsed.command == "diagram") return cmd_diagram(cfg, parsed, out);
    if (parsed.command == "check") return cmd_check(cfg, parsed, out);

    err << "unknown command '" << parsed.command
        << "'; run with --help for usage\n";
    return 1;
  } catch (const ThresholdDegeneracyError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const AuditError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dispersal
