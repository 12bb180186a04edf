#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace dispersal {

// Spatial points carry two coordinates; the second is fixed at zero in one
// dimension so distance and dot-product code is dimension agnostic.
using Point = std::array<double, 2>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// A box domain: an interval in 1D, a rectangle in 2D.
struct Domain {
  int dim = 1;
  std::array<Interval, 2> bounds{};
  std::array<int, 2> n_per_axis{};
};

// Tensor midpoint quadrature over the box. Weights are cell volumes, all
// equal and strictly positive; their sum reproduces |Omega| up to roundoff.
struct Grid {
  int dim = 1;
  std::vector<Point> nodes;
  Eigen::VectorXd weights;
  double volume = 0.0;

  int size() const { return static_cast<int>(nodes.size()); }
};

// Throws PreconditionError on dim outside {1,2}, lo >= hi, non-finite
// bounds, or fewer than two nodes per axis.
void validate(const Domain& domain);

// Midpoint nodes per axis, combined row-major (the last axis varies
// fastest), each weight equal to the cell volume.
Grid build_grid(const Domain& domain);

// Euclidean diameter of the box; the default positivity radius for kernels.
double diameter(const Domain& domain);

}  // namespace dispersal
