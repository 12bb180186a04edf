#include "dispersal/domain.hpp"

#include <cmath>
#include <string>

#include "dispersal/errors.hpp"

namespace dispersal {

void validate(const Domain& domain) {
  if (domain.dim != 1 && domain.dim != 2) {
    throw PreconditionError("domain dim must be 1 or 2, got " +
                            std::to_string(domain.dim));
  }
  for (int axis = 0; axis < domain.dim; ++axis) {
    const Interval& b = domain.bounds[axis];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw PreconditionError("domain bounds on axis " + std::to_string(axis) +
                              " must be finite");
    }
    if (!(b.lo < b.hi)) {
      throw PreconditionError("domain requires lo < hi on axis " +
                              std::to_string(axis));
    }
    if (domain.n_per_axis[axis] < 2) {
      throw PreconditionError("domain needs at least 2 nodes per axis, got " +
                              std::to_string(domain.n_per_axis[axis]) +
                              " on axis " + std::to_string(axis));
    }
  }
}

Grid build_grid(const Domain& domain) {
  validate(domain);

  Grid grid;
  grid.dim = domain.dim;

  std::array<std::vector<double>, 2> axis_nodes;
  std::array<double, 2> axis_step{1.0, 1.0};
  for (int axis = 0; axis < domain.dim; ++axis) {
    const Interval& b = domain.bounds[axis];
    const int n = domain.n_per_axis[axis];
    const double h = (b.hi - b.lo) / n;
    axis_step[axis] = h;
    axis_nodes[axis].resize(n);
    for (int i = 0; i < n; ++i) {
      axis_nodes[axis][i] = b.lo + (i + 0.5) * h;
    }
  }

  if (domain.dim == 1) {
    const int n = domain.n_per_axis[0];
    grid.nodes.reserve(n);
    for (int i = 0; i < n; ++i) {
      grid.nodes.push_back({axis_nodes[0][i], 0.0});
    }
    grid.weights = Eigen::VectorXd::Constant(n, axis_step[0]);
    grid.volume = domain.bounds[0].hi - domain.bounds[0].lo;
  } else {
    const int n0 = domain.n_per_axis[0];
    const int n1 = domain.n_per_axis[1];
    grid.nodes.reserve(static_cast<std::size_t>(n0) * n1);
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) {
        grid.nodes.push_back({axis_nodes[0][i], axis_nodes[1][j]});
      }
    }
    const double cell = axis_step[0] * axis_step[1];
    grid.weights = Eigen::VectorXd::Constant(n0 * n1, cell);
    grid.volume = (domain.bounds[0].hi - domain.bounds[0].lo) *
                  (domain.bounds[1].hi - domain.bounds[1].lo);
  }
  return grid;
}

double diameter(const Domain& domain) {
  validate(domain);
  double sq = 0.0;
  for (int axis = 0; axis < domain.dim; ++axis) {
    const double extent = domain.bounds[axis].hi - domain.bounds[axis].lo;
    sq += extent * extent;
  }
  return std::sqrt(sq);
}

}  // namespace dispersal
