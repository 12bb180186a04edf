#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dispersal/domain.hpp"
#include "dispersal/kernel.hpp"
#include "dispersal/nonlinearity.hpp"
#include "dispersal/operator.hpp"

namespace dispersal {

// Parsed configuration, one struct per INI section. Doubles that accept the
// keyword `auto` hold NaN until resolved. Every default here is what an
// absent key means; config_reference() renders the same information for
// --help.
struct DomainConfig {
  int dim = 1;
  double lo = 0.0;  // 1D keys
  double hi = 1.0;
  int n = 201;
  double lo_x = 0.0;  // 2D keys
  double hi_x = 1.0;
  int n_x = 21;
  double lo_y = 0.0;
  double hi_y = 1.0;
  int n_y = 21;
  int max_nodes = 4096;
};

struct KernelConfig {
  std::string family = "constant";  // constant | gaussian | poly_rank2 | table
  double level = 1.0;               // constant family
  double amp = 1.0;                 // gaussian family
  double width = 1.0;
  std::string path;  // table family: CSV file
  double delta = std::numeric_limits<double>::quiet_NaN();  // auto = diameter
};

struct NonlinearityConfig {
  std::string family = "piecewise_linear";  // piecewise_linear | smooth_ap
  double a_neg = 0.5;                       // piecewise branch slopes
  double A_pos = 2.0;
  double a = 0.5;  // smooth_ap slopes
  double A = 2.0;
  double C = 0.0;
};

struct ForcingConfig {
  std::string mode = "eigen";  // eigen | constant
  double t = 0.0;
  std::string g1 = "zero";  // zero | linear
  double g1_c0 = 0.0;       // linear: g1(x, y) = c0 + cx x + cy y
  double g1_cx = 0.0;
  double g1_cy = 0.0;
};

struct SolverConfig {
  std::string method = "auto";  // auto | monotone | picard | newton
  double beta = std::numeric_limits<double>::quiet_NaN();  // auto
  double tol = 1e-10;
  int max_iter = 10000;
  double picard_m = std::numeric_limits<double>::quiet_NaN();  // auto = 2 Gamma
  double picard_u0 = 0.0;  // constant starting level
  int newton_max_iter = 200;
};

struct ThresholdConfig {
  double t_lo_hint = std::numeric_limits<double>::quiet_NaN();  // auto
  double tol_t = 1e-6;
  int max_bisect = 80;
  int max_doublings = 60;
  double epsilon = std::numeric_limits<double>::quiet_NaN();  // auto
};

struct DiagramConfig {
  std::vector<double> t_values;  // comma-separated list, strictly ascending
};

struct RunConfig {
  DomainConfig domain;
  KernelConfig kernel;
  NonlinearityConfig nonlinearity;
  ForcingConfig forcing;
  SolverConfig solver;
  ThresholdConfig threshold;
  DiagramConfig diagram;
};

// Strict INI reader: '#' starts a comment, keys are key = value inside
// [section] headers. Unknown sections, unknown keys, duplicate keys and
// unparsable values are ConfigErrors carrying path:line.
RunConfig load_config(const std::string& path);

// The key-by-key reference text printed by --help.
std::string config_reference();

// Everything the subcommands operate on, built from a config: grid and
// operator, principal eigenpair, nonlinearity, forcing mode and the raw
// (unprojected) g1 samples.
struct Workspace {
  DiscreteOperator op;
  EigenPair eig;
  Nonlinearity nl;
  ForcingMode mode = ForcingMode::eigen;
  Eigen::VectorXd g1_raw;
};

Domain domain_from_config(const DomainConfig& cfg);

// Resolves the kernel spec (loading table CSVs, defaulting delta to the
// domain diameter). Needs the domain for that default.
KernelSpec kernel_from_config(const KernelConfig& cfg, const Domain& domain);

Nonlinearity nonlinearity_from_config(const NonlinearityConfig& cfg);

Workspace build_workspace(const RunConfig& cfg);

}  // namespace dispersal
