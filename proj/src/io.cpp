#include "dispersal/io.hpp"

#include <algorithm>
#include <cstdio>

namespace dispersal {

namespace {

void append_real_array(std::string& out, const Eigen::VectorXd& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_real(v[i]);
  }
  out += ']';
}

void append_node_array(std::string& out, const Grid& grid) {
  out += '[';
  for (int i = 0; i < grid.size(); ++i) {
    if (i > 0) out += ',';
    if (grid.dim == 1) {
      out += format_real(grid.nodes[i][0]);
    } else {
      out += '[';
      out += format_real(grid.nodes[i][0]);
      out += ',';
      out += format_real(grid.nodes[i][1]);
      out += ']';
    }
  }
  out += ']';
}

const char* json_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string eigen_json(const DiscreteOperator& op, const EigenPair& eig) {
  std::string out;
  out += "{\n";
  out += "  \"lambda1\": " + format_real(eig.lambda1) + ",\n";
  out += "  \"phi1\": ";
  append_real_array(out, eig.phi1);
  out += ",\n";
  out += "  \"residual\": " + format_real(eig.residual) + ",\n";
  out += "  \"nodes\": ";
  append_node_array(out, op.grid);
  out += ",\n";
  out += "  \"weights\": ";
  append_real_array(out, op.grid.weights);
  out += "\n}\n";
  return out;
}

std::string solution_json(double t, const SolveReport& report) {
  std::string out;
  out += "{\n";
  out += "  \"t\": " + format_real(t) + ",\n";
  out += "  \"method\": \"" + std::string(method_name(report.method)) +
         "\",\n";
  out += "  \"residual_inf\": " + format_real(report.residual_inf) + ",\n";
  out += "  \"u\": ";
  append_real_array(out, report.solution);
  out += "\n}\n";
  return out;
}

std::string solution_csv(const Grid& grid, const Eigen::VectorXd& u) {
  std::string out = grid.dim == 1 ? "node_index,x,u\n" : "node_index,x,y,u\n";
  for (int i = 0; i < grid.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_real(grid.nodes[i][0]);
    if (grid.dim == 2) {
      out += ',';
      out += format_real(grid.nodes[i][1]);
    }
    out += ',';
    out += format_real(u[i]);
    out += '\n';
  }
  return out;
}

std::string threshold_json(const ThresholdBracket& bracket) {
  std::string out;
  out += "{\n";
  out += "  \"t_exist\": " + format_real(bracket.t_exist) + ",\n";
  out += "  \"t_fail\": " + format_real(bracket.t_fail) + ",\n";
  out += "  \"m_positive\": " + format_real(bracket.bound.m_positive) + ",\n";
  out += "  \"m_all\": " + format_real(bracket.bound.m_all) + ",\n";
  out += "  \"certificate_residual\": " +
         format_real(bracket.certificate.residual_inf) + "\n";
  out += "}\n";
  return out;
}

std::string check_json(const KernelAuditReport& kernel, double rowsum_sup,
                       const double* lambda1, const HypothesisReport* hyp,
                       bool r_fallback) {
  std::string out;
  out += "{\n";
  out += "  \"kernel\": {\n";
  out += "    \"symmetry_defect\": " + format_real(kernel.symmetry_defect) +
         ",\n";
  out += "    \"worst_pair\": [" + std::to_string(kernel.worst_pair_i) + "," +
         std::to_string(kernel.worst_pair_j) + "],\n";
  out += "    \"min_within_delta\": " + format_real(kernel.min_within_delta) +
         ",\n";
  out += "    \"symmetry_pass\": " + std::string(json_bool(kernel.symmetry_pass)) +
         ",\n";
  out += "    \"positivity_pass\": " +
         std::string(json_bool(kernel.positivity_pass)) + ",\n";
  out += "    \"connectivity_pass\": " +
         std::string(json_bool(kernel.connectivity_pass)) + ",\n";
  out += "    \"pass\": " + std::string(json_bool(kernel.pass())) + "\n";
  out += "  },\n";
  out += "  \"rowsum_sup\": " + format_real(rowsum_sup) + ",\n";
  if (lambda1 != nullptr) {
    out += "  \"lambda1\": " + format_real(*lambda1) + ",\n";
  } else {
    out += "  \"lambda1\": null,\n";
  }
  if (hyp != nullptr) {
    out += "  \"hypotheses\": {\n";
    out += "    \"f1_pass\": " + std::string(json_bool(hyp->f1_pass)) + ",\n";
    out += "    \"A\": " + format_real(hyp->A) + ",\n";
    out += "    \"C\": " + format_real(hyp->C) + ",\n";
    out += "    \"f1_margin\": " + format_real(hyp->f1_margin) + ",\n";
    out += "    \"f2_pass\": " + std::string(json_bool(hyp->f2_pass)) + ",\n";
    out += "    \"a\": " + format_real(hyp->a) + ",\n";
    out += "    \"f2_tail_error\": " + format_real(hyp->f2_tail_error) + ",\n";
    out += "    \"f3_pass\": " + std::string(json_bool(hyp->f3_pass)) + ",\n";
    out += "    \"sigma\": " + format_real(hyp->sigma) + ",\n";
    out += "    \"gamma\": " + format_real(hyp->gamma) + ",\n";
    out += "    \"f4_pass\": " + std::string(json_bool(hyp->f4_pass)) + ",\n";
    out += "    \"R\": " + format_real(hyp->R) + ",\n";
    out += "    \"r_fallback\": " + std::string(json_bool(r_fallback)) + "\n";
    out += "  }\n";
  } else {
    out += "  \"hypotheses\": null\n";
  }
  out += "}\n";
  return out;
}

std::string diagram_csv(const APDiagram& dia) {
  int max_count = 0;
  for (const DiagramRow& row : dia.rows) {
    max_count = std::max(max_count, row.count);
  }

  std::string out = "t,count";
  for (int k = 1; k <= max_count; ++k) {
    out += ",u_min_" + std::to_string(k) + ",u_max_" + std::to_string(k);
  }
  out += '\n';

  for (const DiagramRow& row : dia.rows) {
    out += format_real(row.t);
    out += ',';
    out += std::to_string(row.count);
    for (const auto& summary : row.summaries) {
      out += ',';
      out += format_real(summary[0]);
      out += ',';
      out += format_real(summary[1]);
    }
    for (int k = row.count; k < max_count; ++k) {
      out += ",,";
    }
    out += '\n';
  }

  for (const std::string& note : dia.diagnostics) {
    out += "# " + note + '\n';
  }
  return out;
}

namespace {

double svg_x(double t, double t_lo, double t_hi) {
  if (t_hi <= t_lo) return 330.0;
  return 60.0 + (t - t_lo) / (t_hi - t_lo) * 540.0;
}

double svg_y(double u, double u_lo, double u_hi) {
  return 340.0 - (u - u_lo) / (u_hi - u_lo) * 300.0;
}

}  // namespace

std::string diagram_svg(const APDiagram& dia) {
  double t_lo = 0.0, t_hi = 0.0, u_lo = 0.0, u_hi = 0.0;
  bool first_t = true;
  for (const DiagramRow& row : dia.rows) {
    if (first_t) {
      t_lo = t_hi = row.t;
      first_t = false;
    } else {
      t_lo = std::min(t_lo, row.t);
      t_hi = std::max(t_hi, row.t);
    }
    for (const auto& summary : row.summaries) {
      u_lo = std::min(u_lo, summary[0]);
      u_hi = std::max(u_hi, summary[1]);
    }
  }
  if (u_hi <= u_lo) {
    u_lo -= 1.0;
    u_hi += 1.0;
  }

  std::string out;
  out +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
      "height=\"400\" viewBox=\"0 0 640 400\">\n";
  out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out +=
      "<line x1=\"60\" y1=\"340\" x2=\"600\" y2=\"340\" stroke=\"black\"/>\n";
  out += "<line x1=\"60\" y1=\"40\" x2=\"60\" y2=\"340\" stroke=\"black\"/>\n";
  out +=
      "<text x=\"330\" y=\"395\" font-size=\"12\" text-anchor=\"middle\">"
      "t</text>\n";
  out +=
      "<text x=\"15\" y=\"190\" font-size=\"12\" text-anchor=\"middle\">"
      "u</text>\n";

  for (const DiagramRow& row : dia.rows) {
    const double cx = svg_x(row.t, t_lo, t_hi);
    out += "<text x=\"" + format_real(cx) +
           "\" y=\"358\" font-size=\"10\" text-anchor=\"middle\">" +
           format_real(row.t) + "</text>\n";
    out += "<text x=\"" + format_real(cx) +
           "\" y=\"372\" font-size=\"10\" text-anchor=\"middle\">n=" +
           std::to_string(row.count) + "</text>\n";
    for (const auto& summary : row.summaries) {
      out += "<circle cx=\"" + format_real(cx) + "\" cy=\"" +
             format_real(svg_y(summary[1], u_lo, u_hi)) +
             "\" r=\"4\" fill=\"#1f6fb4\"/>\n";
      out += "<circle cx=\"" + format_real(cx) + "\" cy=\"" +
             format_real(svg_y(summary[0], u_lo, u_hi)) +
             "\" r=\"2.5\" fill=\"#c23b22\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace dispersal
