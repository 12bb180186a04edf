#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "dispersal/domain.hpp"

namespace dispersal {

enum class KernelFamily { constant, gaussian, poly_rank2, table };

// A symmetric nonnegative dispersal kernel K(x,y). The analytic families are
// defined everywhere; the table family is defined only at grid nodes.
// `delta` is the radius within which the kernel claims strict positivity;
// the audit checks that claim at grid resolution.
struct KernelSpec {
  KernelFamily family = KernelFamily::constant;
  double constant_level = 1.0;
  double gaussian_amp = 1.0;
  double gaussian_width = 1.0;
  double delta = 1.0;
  Eigen::MatrixXd table;  // node-indexed values, table family only
};

// k(x_i) = sum_j w_j K(x_i, x_j), the discrete row-sum function, with its
// extremes. It bounds the principal eigenvalue from both sides and gates
// the maximum principle.
struct RowSum {
  Eigen::VectorXd values;
  double sup = 0.0;
  double inf = 0.0;
};

struct KernelAuditReport {
  double symmetry_defect = 0.0;  // max |K(x_i,x_j) - K(x_j,x_i)|
  int worst_pair_i = -1;         // located pair attaining the defect
  int worst_pair_j = -1;
  double min_within_delta = 0.0;  // min K over pairs with |x_i - x_j| <= delta
  bool connected = false;         // positivity graph spans all nodes
  bool symmetry_pass = false;
  bool positivity_pass = false;
  bool connectivity_pass = false;

  bool pass() const { return symmetry_pass && positivity_pass && connectivity_pass; }
};

// Kernel value for the analytic families; throws for the table family,
// which has no off-grid definition.
double eval_kernel(const KernelSpec& spec, const Point& x, const Point& y);

// Kernel value between grid nodes i and j, any family.
double kernel_entry(const Grid& grid, const KernelSpec& spec, int i, int j);

// Point-based evaluation that also serves the table family by locating x
// and y among the grid nodes; off-node queries throw.
double eval_kernel(const Grid& grid, const KernelSpec& spec, const Point& x,
                   const Point& y);

RowSum row_sums(const Grid& grid, const KernelSpec& spec);

// Always returns a report; flags record which checks passed. Symmetry must
// hold to 1e-12, the kernel must be strictly positive within delta, and the
// positivity graph must be connected.
KernelAuditReport audit_kernel(const Grid& grid, const KernelSpec& spec);

// Breadth-first search over the graph whose edges are the node pairs where
// `adjacent` is true. Shared by the kernel audit and the eigensolver gate.
bool positivity_connected(int n, const std::function<bool(int, int)>& adjacent);

// CSV loader for table kernels: first line `n_nodes,<count>`, then 0-based
// `i,j,value` triples; missing pairs default to 0. Rejects negative values
// and any asymmetry outright; it never repairs.
KernelSpec load_table_kernel(const std::string& path, double delta);

}  // namespace dispersal
