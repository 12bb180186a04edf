#pragma once

// Shared builders for the test binaries: small interval problems with the
// built-in kernels and nonlinearities, owned by value so InstanceFamily
// references stay valid for the fixture's lifetime.

#include <Eigen/Dense>

#include "dispersal/ap_analysis.hpp"
#include "dispersal/config.hpp"
#include "dispersal/domain.hpp"
#include "dispersal/kernel.hpp"
#include "dispersal/nonlinearity.hpp"
#include "dispersal/operator.hpp"
#include "dispersal/solver.hpp"

namespace testfix {

inline dispersal::Grid interval_grid(int n, double lo = 0.0, double hi = 1.0) {
  dispersal::Domain domain;
  domain.dim = 1;
  domain.bounds[0] = {lo, hi};
  domain.n_per_axis = {n, 2};
  return dispersal::build_grid(domain);
}

struct Fixture {
  dispersal::DiscreteOperator op;
  dispersal::EigenPair eig;
  dispersal::Nonlinearity nl;
  Eigen::VectorXd g1_raw;
  dispersal::ForcingMode mode = dispersal::ForcingMode::eigen;

  dispersal::InstanceFamily family() const {
    return dispersal::InstanceFamily(op, eig, nl, g1_raw, mode);
  }

  dispersal::ProblemInstance at(double t) const { return family().at(t); }
};

// Constant kernel of unit level on (0, 1): unit row sums, lambda1 = 1 and a
// constant eigenfunction, so u = c solves the problem iff c - f(c) = t.
inline Fixture rank_one(int n, dispersal::Nonlinearity nl) {
  Fixture fx;
  dispersal::KernelSpec spec;
  spec.family = dispersal::KernelFamily::constant;
  spec.constant_level = 1.0;
  spec.delta = 2.0;
  const dispersal::Grid grid = interval_grid(n);
  fx.op = dispersal::assemble(grid, spec);
  fx.eig = dispersal::principal_eigenpair(fx.op);
  fx.nl = nl;
  fx.g1_raw = Eigen::VectorXd::Zero(n);
  return fx;
}

inline Fixture gaussian_fixture(int n, dispersal::Nonlinearity nl,
                                double width = 0.3) {
  Fixture fx;
  dispersal::KernelSpec spec;
  spec.family = dispersal::KernelFamily::gaussian;
  spec.gaussian_amp = 1.0;
  spec.gaussian_width = width;
  spec.delta = 2.0;
  const dispersal::Grid grid = interval_grid(n);
  fx.op = dispersal::assemble(grid, spec);
  fx.eig = dispersal::principal_eigenpair(fx.op);
  fx.nl = nl;
  fx.g1_raw = Eigen::VectorXd::Zero(n);
  return fx;
}

}  // namespace testfix
