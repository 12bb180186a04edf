#pragma once

#include <string>

#include <Eigen/Dense>

#include "dispersal/ap_analysis.hpp"
#include "dispersal/kernel.hpp"
#include "dispersal/nonlinearity.hpp"
#include "dispersal/operator.hpp"
#include "dispersal/solver.hpp"

namespace dispersal {

// All serialization goes through this one formatter: snprintf %.17g, which
// round-trips every double exactly and never depends on stream state, so
// repeated runs produce byte-identical files.
std::string format_real(double x);

// {"lambda1", "phi1", "residual", "nodes", "weights"}. Nodes are plain x
// values in 1D and [x, y] pairs in 2D.
std::string eigen_json(const DiscreteOperator& op, const EigenPair& eig);

// {"t", "method", "residual_inf", "u"}.
std::string solution_json(double t, const SolveReport& report);

// node_index,x(,y),u rows.
std::string solution_csv(const Grid& grid, const Eigen::VectorXd& u);

// {"t_exist", "t_fail", "m_positive", "m_all", "certificate_residual"}.
std::string threshold_json(const ThresholdBracket& bracket);

// Kernel audit plus, when the kernel passes, the spectral context and the
// hypothesis report; lambda1/hyp are null in the JSON when absent.
// r_fallback records that the a-priori radius fell back to 1 because the
// supersolution could not be built.
std::string check_json(const KernelAuditReport& kernel, double rowsum_sup,
                       const double* lambda1, const HypothesisReport* hyp,
                       bool r_fallback);

// Header t,count,u_min_1,u_max_1,... sized to the fullest row; short rows
// pad with empty fields; diagnostics trail as '#' comment lines.
std::string diagram_csv(const APDiagram& dia);

// Presentation-only picture: solution extrema over t with per-t counts.
std::string diagram_svg(const APDiagram& dia);

}  // namespace dispersal
