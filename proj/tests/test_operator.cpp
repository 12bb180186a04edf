#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dispersal/domain.hpp"
#include "dispersal/errors.hpp"
#include "dispersal/kernel.hpp"
#include "dispersal/operator.hpp"
#include "fixtures.hpp"

using namespace dispersal;

namespace {

KernelSpec constant_spec(double level) {
  KernelSpec spec;
  spec.family = KernelFamily::constant;
  spec.constant_level = level;
  spec.delta = 2.0;
  return spec;
}

}  // namespace

TEST_CASE("assembled matrix holds weighted kernel values") {
  const Grid g = testfix::interval_grid(3);
  const DiscreteOperator op = assemble(g, constant_spec(2.0));
  REQUIRE(op.matrix.rows() == 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(op.matrix(i, j) == g.weights[j] * 2.0);
    }
  }
  // Row sums come from the very same products, in the same order.
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) acc += op.matrix(i, j);
    CHECK(op.rowsum.values[i] == acc);
  }
  CHECK(op.rowsum.sup == op.rowsum.values.maxCoeff());
  CHECK(op.rowsum.inf == op.rowsum.values.minCoeff());
}

TEST_CASE("assemble guards") {
  const Grid g = testfix::interval_grid(4);

  CHECK_THROWS_AS(assemble(g, constant_spec(1.0), 3), PreconditionError);

  KernelSpec negative;
  negative.family = KernelFamily::table;
  negative.delta = 2.0;
  negative.table = Eigen::MatrixXd::Ones(4, 4);
  negative.table(1, 2) = -0.5;
  negative.table(2, 1) = -0.5;
  CHECK_THROWS_AS(assemble(g, negative), AuditError);

  KernelSpec skew;
  skew.family = KernelFamily::table;
  skew.delta = 2.0;
  skew.table = Eigen::MatrixXd::Ones(4, 4);
  skew.table(0, 3) = 1.5;
  CHECK_THROWS_AS(assemble(g, skew), AuditError);
}

TEST_CASE("apply multiplies by the Nystrom matrix") {
  const Grid g = testfix::interval_grid(5);
  const DiscreteOperator op = assemble(g, constant_spec(1.0));
  Eigen::VectorXd u(5);
  u << 1.0, -2.0, 3.0, 0.5, 0.0;
  const Eigen::VectorXd v = apply(op, u);
  for (int i = 0; i < 5; ++i) {
    CHECK(v[i] == doctest::Approx((op.matrix * u)[i]).epsilon(1e-15));
  }
  CHECK_THROWS_AS(apply(op, Eigen::VectorXd::Zero(4)), PreconditionError);
}

TEST_CASE("shifted solver factors M - beta I") {
  const Grid g = testfix::interval_grid(12);
  const DiscreteOperator op = assemble(g, constant_spec(1.0));

  CHECK_THROWS_AS(ShiftedSolver(op, op.rowsum.sup), PreconditionError);
  CHECK_THROWS_AS(ShiftedSolver(op, 0.5), PreconditionError);

  const double beta = 2.5;
  const ShiftedSolver solver(op, beta);
  CHECK(solver.beta() == beta);
  Eigen::VectorXd rhs(12);
  for (int i = 0; i < 12; ++i) rhs[i] = std::sin(i + 1.0);
  const Eigen::VectorXd x = solver.solve(rhs);
  const Eigen::VectorXd back =
      op.matrix * x - beta * x;  // should reproduce rhs
  CHECK((back - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
  // Convenience wrapper runs the same factorization.
  const Eigen::VectorXd y = shifted_solve(op, beta, rhs);
  CHECK((x - y).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK_THROWS_AS(solver.solve(Eigen::VectorXd::Zero(3)), PreconditionError);
}

TEST_CASE("shifted inverse maps nonnegative data to nonnegative solutions") {
  const Grid g = testfix::interval_grid(30);
  KernelSpec spec;
  spec.family = KernelFamily::gaussian;
  spec.gaussian_amp = 1.0;
  spec.gaussian_width = 0.2;
  spec.delta = 2.0;
  const DiscreteOperator op = assemble(g, spec);
  const double beta = op.rowsum.sup * 1.25 + 0.1;
  const ShiftedSolver solver(op, beta);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd rhs(30);
    for (int i = 0; i < 30; ++i) {
      rhs[i] = 0.1 + std::abs(std::sin(7.0 * (trial + 1) + i));
    }
    // (beta I - M)^{-1} rhs = solve of (M - beta I) x = -rhs.
    const Eigen::VectorXd u = solver.solve(-rhs);
    CHECK(u.minCoeff() > 0.0);
  }
}

TEST_CASE("principal eigenpair of the constant kernel") {
  const Grid g = testfix::interval_grid(40);
  const DiscreteOperator op = assemble(g, constant_spec(1.0));
  const EigenPair eig = principal_eigenpair(op);

  CHECK(eig.lambda1 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(eig.phi1.minCoeff() > 0.0);
  // Constant kernel, constant eigenfunction.
  CHECK(eig.phi1.maxCoeff() - eig.phi1.minCoeff() <= 1e-12);

  double mass = 0.0;
  for (int i = 0; i < 40; ++i) mass += g.weights[i] * eig.phi1[i] * eig.phi1[i];
  CHECK(std::abs(mass - 1.0) <= 1e-13);

  CHECK(eig.residual <= 1e-12 * (1.0 + eig.lambda1));
  const double slack = 1e-12 * (1.0 + std::abs(eig.lambda1));
  CHECK(eig.lambda1 >= op.rowsum.inf - slack);
  CHECK(eig.lambda1 <= op.rowsum.sup + slack);
}

TEST_CASE("principal eigenvalue of the rank-two polynomial kernel") {
  // K(x,y) = 1 + x y on (0,1) acts on span{1, x} through the moment matrix
  // [[1, 1/2], [1/2, 1/3]], whose top eigenvalue is (4 + sqrt 13) / 6.
  const double exact = (4.0 + std::sqrt(13.0)) / 6.0;

  KernelSpec spec;
  spec.family = KernelFamily::poly_rank2;
  spec.delta = 2.0;
  const Grid g = testfix::interval_grid(101);
  const DiscreteOperator op = assemble(g, spec);
  const EigenPair eig = principal_eigenpair(op);

  CHECK(std::abs(eig.lambda1 - exact) <= 4e-6);
  CHECK(eig.phi1.minCoeff() > 0.0);
  const double slack = 1e-12 * (1.0 + std::abs(eig.lambda1));
  CHECK(eig.lambda1 >= op.rowsum.inf - slack);
  CHECK(eig.lambda1 <= op.rowsum.sup + slack);
}

TEST_CASE("eigen solver refuses disconnected kernels") {
  const Grid g = testfix::interval_grid(4);
  KernelSpec spec;
  spec.family = KernelFamily::table;
  spec.delta = 2.0;
  spec.table = Eigen::MatrixXd::Zero(4, 4);
  spec.table.topLeftCorner(2, 2).setOnes();
  spec.table.bottomRightCorner(2, 2).setOnes();
  const DiscreteOperator op = assemble(g, spec);
  CHECK_THROWS_AS(principal_eigenpair(op), AuditError);
}

TEST_CASE("forcing decomposition in eigen mode") {
  const Grid g = testfix::interval_grid(25);
  const DiscreteOperator op = assemble(g, constant_spec(1.0));
  const EigenPair eig = principal_eigenpair(op);

  Eigen::VectorXd raw(25);
  for (int i = 0; i < 25; ++i) raw[i] = 3.0 * (g.nodes[i][0] - 0.2);

  const ForcingDecomposition fd =
      compose_forcing(op, &eig, 0.7, raw, ForcingMode::eigen);
  CHECK(fd.t == 0.7);
  CHECK(fd.mode == ForcingMode::eigen);

  // g1 is orthogonal to phi1 in the weighted inner product.
  double dot = 0.0;
  for (int i = 0; i < 25; ++i) dot += g.weights[i] * fd.g1[i] * eig.phi1[i];
  CHECK(std::abs(dot) <= 1e-13);

  // g recombines the parts.
  const Eigen::VectorXd recon = 0.7 * eig.phi1 + fd.g1;
  CHECK((fd.g - recon).lpNorm<Eigen::Infinity>() <= 1e-13);

  // Splitting g recovers t and g1.
  const ForcingDecomposition back =
      decompose_forcing(op, &eig, fd.g, ForcingMode::eigen);
  CHECK(back.t == doctest::Approx(0.7).epsilon(1e-12));
  CHECK((back.g1 - fd.g1).lpNorm<Eigen::Infinity>() <= 1e-12);

  CHECK_THROWS_AS(decompose_forcing(op, nullptr, fd.g, ForcingMode::eigen),
                  PreconditionError);
}

TEST_CASE("forcing decomposition in constant mode") {
  const Grid g = testfix::interval_grid(16);
  const DiscreteOperator op = assemble(g, constant_spec(1.0));

  Eigen::VectorXd raw(16);
  for (int i = 0; i < 16; ++i) raw[i] = g.nodes[i][0];

  const ForcingDecomposition fd =
      compose_forcing(op, nullptr, -0.3, raw, ForcingMode::constant);
  CHECK(fd.t == -0.3);
  // g1 is mean-free against the weights.
  double mean = 0.0;
  for (int i = 0; i < 16; ++i) mean += g.weights[i] * fd.g1[i];
  CHECK(std::abs(mean) <= 1e-13);

  const ForcingDecomposition back =
      decompose_forcing(op, nullptr, fd.g, ForcingMode::constant);
  CHECK(back.t == doctest::Approx(-0.3).epsilon(1e-12));
}
