#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "dispersal/domain.hpp"
#include "dispersal/errors.hpp"
#include "dispersal/kernel.hpp"

using namespace dispersal;

namespace {

Domain interval(double lo, double hi, int n) {
  Domain d;
  d.dim = 1;
  d.bounds[0] = {lo, hi};
  d.n_per_axis = {n, 2};
  return d;
}

Domain box(double lx, double hx, int nx, double ly, double hy, int ny) {
  Domain d;
  d.dim = 2;
  d.bounds[0] = {lx, hx};
  d.bounds[1] = {ly, hy};
  d.n_per_axis = {nx, ny};
  return d;
}

// Writes `content` to a fresh file in the system temp directory and removes
// it on scope exit.
struct TempFile {
  std::filesystem::path path;

  TempFile(const std::string& stem, const std::string& content) {
    path = std::filesystem::temp_directory_path() / ("dk_" + stem + ".csv");
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

}  // namespace

TEST_CASE("grid midpoints and weights in one dimension") {
  const Grid g = build_grid(interval(0.0, 1.0, 4));
  REQUIRE(g.size() == 4);
  CHECK(g.dim == 1);
  CHECK(g.nodes[0][0] == 0.125);
  CHECK(g.nodes[1][0] == 0.375);
  CHECK(g.nodes[2][0] == 0.625);
  CHECK(g.nodes[3][0] == 0.875);
  for (int i = 0; i < 4; ++i) {
    CHECK(g.nodes[i][1] == 0.0);
    CHECK(g.weights[i] == 0.25);
  }
  CHECK(g.volume == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(g.weights.sum() - g.volume) <= 1e-12);
}

TEST_CASE("grid ordering in two dimensions is row-major with y fastest") {
  const Grid g = build_grid(box(0.0, 1.0, 2, 0.0, 2.0, 3));
  REQUIRE(g.size() == 6);
  CHECK(g.dim == 2);
  // First block shares x = 0.25 and walks y upward.
  CHECK(g.nodes[0][0] == 0.25);
  CHECK(g.nodes[1][0] == 0.25);
  CHECK(g.nodes[2][0] == 0.25);
  CHECK(g.nodes[3][0] == 0.75);
  CHECK(g.nodes[0][1] < g.nodes[1][1]);
  CHECK(g.nodes[1][1] < g.nodes[2][1]);
  CHECK(g.nodes[3][1] == g.nodes[0][1]);
  CHECK(g.nodes[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (int i = 0; i < 6; ++i) {
    CHECK(g.weights[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  CHECK(g.volume == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(g.weights.sum() - g.volume) <= 1e-12);
}

TEST_CASE("domain validation rejects malformed boxes") {
  Domain d = interval(0.0, 1.0, 10);
  d.dim = 3;
  CHECK_THROWS_AS(validate(d), PreconditionError);
  CHECK_THROWS_AS(build_grid(interval(1.0, 0.0, 10)), PreconditionError);
  CHECK_THROWS_AS(build_grid(interval(0.0, 0.0, 10)), PreconditionError);
  CHECK_THROWS_AS(build_grid(interval(0.0, 1.0, 1)), PreconditionError);
  Domain inf_hi = interval(0.0, 1.0, 10);
  inf_hi.bounds[0].hi = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate(inf_hi), PreconditionError);
}

TEST_CASE("domain diameter") {
  CHECK(diameter(interval(0.0, 1.0, 4)) == doctest::Approx(1.0));
  CHECK(diameter(box(0.0, 1.0, 2, 0.0, 2.0, 2)) ==
        doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("analytic kernel values") {
  KernelSpec constant;
  constant.family = KernelFamily::constant;
  constant.constant_level = 1.75;
  CHECK(eval_kernel(constant, {0.1, 0.0}, {0.9, 0.0}) == 1.75);

  KernelSpec gauss;
  gauss.family = KernelFamily::gaussian;
  gauss.gaussian_amp = 2.0;
  gauss.gaussian_width = 0.25;
  const double expected = 2.0 * std::exp(-0.25 / (2.0 * 0.0625));
  CHECK(eval_kernel(gauss, {0.0, 0.0}, {0.5, 0.0}) ==
        doctest::Approx(expected).epsilon(1e-14));
  // Symmetric by construction.
  CHECK(eval_kernel(gauss, {0.5, 0.0}, {0.0, 0.0}) ==
        eval_kernel(gauss, {0.0, 0.0}, {0.5, 0.0}));

  KernelSpec poly;
  poly.family = KernelFamily::poly_rank2;
  CHECK(eval_kernel(poly, {0.3, 0.0}, {0.5, 0.0}) ==
        doctest::Approx(1.0 + 0.15).epsilon(1e-15));
  CHECK(eval_kernel(poly, {0.3, 0.2}, {0.5, 0.4}) ==
        doctest::Approx(1.0 + 0.15 + 0.08).epsilon(1e-15));
}

TEST_CASE("table kernels evaluate at nodes only") {
  const Grid g = build_grid(interval(0.0, 1.0, 3));
  KernelSpec spec;
  spec.family = KernelFamily::table;
  spec.delta = 2.0;
  spec.table = Eigen::MatrixXd::Zero(3, 3);
  spec.table << 1.0, 0.5, 0.25, 0.5, 2.0, 0.75, 0.25, 0.75, 1.5;

  CHECK(kernel_entry(g, spec, 1, 2) == 0.75);
  CHECK(eval_kernel(g, spec, g.nodes[1], g.nodes[2]) == 0.75);
  CHECK(eval_kernel(g, spec, g.nodes[0], g.nodes[0]) == 1.0);
  // Off-node coordinates have no table value.
  CHECK_THROWS_AS(eval_kernel(g, spec, {0.123, 0.0}, g.nodes[0]),
                  PreconditionError);
  // The point-only overload cannot serve tables at all.
  CHECK_THROWS_AS(eval_kernel(spec, g.nodes[0], g.nodes[1]), PreconditionError);
}

TEST_CASE("row sums of the constant kernel") {
  const Grid g = build_grid(interval(0.0, 1.0, 20));
  KernelSpec spec;
  spec.family = KernelFamily::constant;
  spec.constant_level = 1.0;
  const RowSum rs = row_sums(g, spec);
  REQUIRE(rs.values.size() == 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(rs.values[i] == rs.values[0]);  // identical accumulation per row
    CHECK(rs.values[i] == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(rs.sup == rs.values.maxCoeff());
  CHECK(rs.inf == rs.values.minCoeff());
}

TEST_CASE("gaussian row sums match the error-function antiderivative") {
  KernelSpec spec;
  spec.family = KernelFamily::gaussian;
  spec.gaussian_amp = 1.3;
  spec.gaussian_width = 0.3;

  const auto exact = [&](double x) {
    const double s = spec.gaussian_width;
    const double r = s * std::sqrt(2.0);
    return spec.gaussian_amp * s * std::sqrt(std::acos(-1.0) / 2.0) *
           (std::erf((1.0 - x) / r) + std::erf(x / r));
  };
  const auto max_error = [&](int n) {
    const Grid g = build_grid(interval(0.0, 1.0, n));
    const RowSum rs = row_sums(g, spec);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(rs.values[i] - exact(g.nodes[i][0])));
    }
    return worst;
  };

  const double e40 = max_error(40);
  const double e80 = max_error(80);
  CHECK(e80 <= 5e-5);
  // Midpoint quadrature converges at second order.
  CHECK(e40 / e80 >= 3.3);
  CHECK(e40 / e80 <= 4.7);
}

TEST_CASE("kernel audit flags") {
  const Grid g = build_grid(interval(0.0, 1.0, 4));

  SUBCASE("constant kernel passes everything") {
    KernelSpec spec;
    spec.family = KernelFamily::constant;
    spec.constant_level = 0.7;
    spec.delta = 2.0;
    const KernelAuditReport rep = audit_kernel(g, spec);
    CHECK(rep.symmetry_defect == 0.0);
    CHECK(rep.min_within_delta == 0.7);
    CHECK(rep.symmetry_pass);
    CHECK(rep.positivity_pass);
    CHECK(rep.connectivity_pass);
    CHECK(rep.pass());
  }

  SUBCASE("asymmetry is located") {
    KernelSpec spec;
    spec.family = KernelFamily::table;
    spec.delta = 2.0;
    spec.table = Eigen::MatrixXd::Ones(4, 4);
    spec.table(0, 2) = 2.0;  // mirror left at 1
    const KernelAuditReport rep = audit_kernel(g, spec);
    CHECK(rep.symmetry_defect == doctest::Approx(1.0));
    CHECK(rep.worst_pair_i == 0);
    CHECK(rep.worst_pair_j == 2);
    CHECK_FALSE(rep.symmetry_pass);
    CHECK_FALSE(rep.pass());
  }

  SUBCASE("disconnected support fails connectivity, not positivity") {
    KernelSpec spec;
    spec.family = KernelFamily::table;
    spec.table = Eigen::MatrixXd::Zero(4, 4);
    spec.table.topLeftCorner(2, 2).setOnes();
    spec.table.bottomRightCorner(2, 2).setOnes();
    // Node spacing is 0.25, so delta = 0.1 only inspects diagonal pairs.
    spec.delta = 0.1;
    const KernelAuditReport rep = audit_kernel(g, spec);
    CHECK(rep.symmetry_pass);
    CHECK(rep.positivity_pass);
    CHECK_FALSE(rep.connectivity_pass);
    CHECK_FALSE(rep.pass());

    // Widening delta drags the zero blocks into the positivity check.
    spec.delta = 2.0;
    const KernelAuditReport wide = audit_kernel(g, spec);
    CHECK(wide.min_within_delta == 0.0);
    CHECK_FALSE(wide.positivity_pass);
  }
}

TEST_CASE("positivity graph connectivity helper") {
  const auto chain = [](int i, int j) { return std::abs(i - j) == 1; };
  CHECK(positivity_connected(5, chain));
  const auto split = [](int i, int j) { return (i < 2) == (j < 2); };
  CHECK_FALSE(positivity_connected(4, split));
}

TEST_CASE("table kernel loader round-trip") {
  TempFile file("ok",
                "n_nodes,3\n"
                "0,0,1.0\n"
                "1,1,2.0\n"
                "2,2,1.5\n"
                "0,1,0.5\n"
                "1,0,0.5\n"
                "# a comment-free format: blank lines are fine\n"
                "\n"
                "0,2,0.25\n"
                "2,0,0.25\n"
                "1,2,0.75\n"
                "2,1,0.75\n");
  // The loader has no comment syntax; the '#' line must fail parsing.
  CHECK_THROWS_AS(load_table_kernel(file.path.string(), 1.0), ConfigError);

  TempFile clean("clean",
                 "n_nodes,3\n"
                 "0,0,1.0\n"
                 "1,1,2.0\n"
                 "2,2,1.5\n"
                 "0,1,0.5\n"
                 "1,0,0.5\n"
                 "\n"
                 "0,2,0.25\n"
                 "2,0,0.25\n"
                 "1,2,0.75\n"
                 "2,1,0.75\n");
  const KernelSpec spec = load_table_kernel(clean.path.string(), 1.25);
  CHECK(spec.family == KernelFamily::table);
  CHECK(spec.delta == 1.25);
  REQUIRE(spec.table.rows() == 3);
  CHECK(spec.table(0, 1) == 0.5);
  CHECK(spec.table(2, 1) == 0.75);
  CHECK(spec.table(2, 2) == 1.5);

  // Omitted pairs default to zero (symmetrically omitted, so it loads).
  TempFile sparse("sparse",
                  "n_nodes,2\n"
                  "0,0,1.0\n"
                  "1,1,1.0\n");
  const KernelSpec sp = load_table_kernel(sparse.path.string(), 1.0);
  CHECK(sp.table(0, 1) == 0.0);
  CHECK(sp.table(1, 0) == 0.0);
}

TEST_CASE("table kernel loader error matrix") {
  CHECK_THROWS_AS(load_table_kernel("/no/such/dir/table.csv", 1.0), ConfigError);

  const auto expect_config_error = [](const std::string& stem,
                                      const std::string& content) {
    TempFile f(stem, content);
    CHECK_THROWS_AS(load_table_kernel(f.path.string(), 1.0), ConfigError);
  };
  const auto expect_audit_error = [](const std::string& stem,
                                     const std::string& content) {
    TempFile f(stem, content);
    CHECK_THROWS_AS(load_table_kernel(f.path.string(), 1.0), AuditError);
  };

  expect_config_error("empty", "");
  expect_config_error("badtag", "nodes,3\n");
  expect_config_error("badcount", "n_nodes,zero\n");
  expect_config_error("zerocount", "n_nodes,0\n");
  expect_config_error("negcount", "n_nodes,-2\n");
  expect_config_error("fourfields", "n_nodes,2\n0,1,2,3\n");
  expect_config_error("twofields", "n_nodes,2\n0,1\n");
  expect_config_error("range", "n_nodes,2\n2,0,1.0\n");
  expect_config_error("negindex", "n_nodes,2\n-1,0,1.0\n");
  expect_config_error("nonfinite", "n_nodes,2\n0,0,inf\n");
  expect_config_error("nanvalue", "n_nodes,2\n0,0,nan\n");
  expect_config_error("dup", "n_nodes,2\n0,1,0.5\n0,1,0.5\n");
  expect_config_error("badvalue", "n_nodes,2\n0,0,abc\n");

  expect_audit_error("negative", "n_nodes,2\n0,1,-1.0\n1,0,-1.0\n");
  expect_audit_error("asym", "n_nodes,2\n0,1,5.0\n");

  // Errors carry the file location.
  TempFile located("located", "n_nodes,2\n0,0,1.0\n0,0,2.0\n");
  try {
    load_table_kernel(located.path.string(), 1.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}
