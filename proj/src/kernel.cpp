#include "dispersal/kernel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "dispersal/errors.hpp"

namespace dispersal {

namespace {

double squared_distance(const Point& x, const Point& y) {
  const double d0 = x[0] - y[0];
  const double d1 = x[1] - y[1];
  return d0 * d0 + d1 * d1;
}

// Locates a point among the grid nodes; the table family is defined nowhere
// else.
int locate_node(const Grid& grid, const Point& x) {
  for (int i = 0; i < grid.size(); ++i) {
    const double tol = 1e-12 * (1.0 + std::abs(x[0]) + std::abs(x[1]));
    if (std::abs(grid.nodes[i][0] - x[0]) <= tol &&
        std::abs(grid.nodes[i][1] - x[1]) <= tol) {
      return i;
    }
  }
  throw PreconditionError("table kernel queried off-node");
}

struct CsvCursor {
  const std::string& line;
  std::size_t pos = 0;
};

std::string next_field(CsvCursor& cur) {
  const std::size_t comma = cur.line.find(',', cur.pos);
  std::string field = comma == std::string::npos
                          ? cur.line.substr(cur.pos)
                          : cur.line.substr(cur.pos, comma - cur.pos);
  cur.pos = comma == std::string::npos ? cur.line.size() : comma + 1;
  // Trim surrounding blanks so "0, 1, 2.5" parses like "0,1,2.5".
  const std::size_t first = field.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = field.find_last_not_of(" \t\r");
  return field.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& field, const std::string& where) {
  T value{};
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end || field.empty()) {
    throw ConfigError(where + ": cannot parse '" + field + "' as a number");
  }
  return value;
}

}  // namespace

double eval_kernel(const KernelSpec& spec, const Point& x, const Point& y) {
  switch (spec.family) {
    case KernelFamily::constant:
      return spec.constant_level;
    case KernelFamily::gaussian: {
      const double w = spec.gaussian_width;
      return spec.gaussian_amp * std::exp(-squared_distance(x, y) / (2.0 * w * w));
    }
    case KernelFamily::poly_rank2:
      return 1.0 + (x[0] * y[0] + x[1] * y[1]);
    case KernelFamily::table:
      throw PreconditionError(
          "table kernels are defined only at grid nodes; evaluate through a grid");
  }
  throw PreconditionError("unknown kernel family");
}

double kernel_entry(const Grid& grid, const KernelSpec& spec, int i, int j) {
  if (i < 0 || j < 0 || i >= grid.size() || j >= grid.size()) {
    throw PreconditionError("kernel_entry index out of range");
  }
  if (spec.family == KernelFamily::table) {
    if (spec.table.rows() != grid.size() || spec.table.cols() != grid.size()) {
      throw PreconditionError("table kernel size does not match the grid");
    }
    return spec.table(i, j);
  }
  return eval_kernel(spec, grid.nodes[i], grid.nodes[j]);
}

double eval_kernel(const Grid& grid, const KernelSpec& spec, const Point& x,
                   const Point& y) {
  if (spec.family == KernelFamily::table) {
    return kernel_entry(grid, spec, locate_node(grid, x), locate_node(grid, y));
  }
  return eval_kernel(spec, x, y);
}

RowSum row_sums(const Grid& grid, const KernelSpec& spec) {
  const int n = grid.size();
  RowSum rs;
  rs.values.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      s += grid.weights(j) * kernel_entry(grid, spec, i, j);
    }
    rs.values(i) = s;
  }
  rs.sup = rs.values.maxCoeff();
  rs.inf = rs.values.minCoeff();
  return rs;
}

bool positivity_connected(int n, const std::function<bool(int, int)>& adjacent) {
  if (n <= 0) return false;
  std::vector<char> visited(n, 0);
  std::vector<int> stack{0};
  visited[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (!visited[j] && adjacent(i, j)) {
        visited[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == n;
}

KernelAuditReport audit_kernel(const Grid& grid, const KernelSpec& spec) {
  const int n = grid.size();
  KernelAuditReport report;

  double worst = 0.0;
  double min_near = std::numeric_limits<double>::infinity();
  const double delta_sq = spec.delta * spec.delta;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double kij = kernel_entry(grid, spec, i, j);
      const double kji = kernel_entry(grid, spec, j, i);
      const double defect = std::abs(kij - kji);
      if (defect > worst) {
        worst = defect;
        report.worst_pair_i = i;
        report.worst_pair_j = j;
      }
      if (squared_distance(grid.nodes[i], grid.nodes[j]) <= delta_sq) {
        min_near = std::min(min_near, std::min(kij, kji));
      }
    }
  }
  report.symmetry_defect = worst;
  // The diagonal pair is always within delta, so min_near is finite.
  report.min_within_delta = min_near;
  report.connected = positivity_connected(n, [&](int i, int j) {
    return i != j && kernel_entry(grid, spec, i, j) > 0.0;
  });

  report.symmetry_pass = report.symmetry_defect <= 1e-12;
  report.positivity_pass = report.min_within_delta > 0.0;
  report.connectivity_pass = report.connected;
  return report;
}

KernelSpec load_table_kernel(const std::string& path, double delta) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path + ": cannot open table kernel file");
  }

  std::string line;
  int line_no = 0;

  // Header: n_nodes,<count>
  if (!std::getline(in, line)) {
    throw ConfigError(path + ":1: empty table kernel file");
  }
  ++line_no;
  CsvCursor header{line};
  const std::string tag = next_field(header);
  if (tag != "n_nodes") {
    throw ConfigError(path + ":1: expected header 'n_nodes,<count>', got '" +
                      line + "'");
  }
  const int n = parse_number<int>(next_field(header), path + ":1");
  if (n < 1) {
    throw ConfigError(path + ":1: node count must be positive");
  }

  KernelSpec spec;
  spec.family = KernelFamily::table;
  spec.delta = delta;
  spec.table = Eigen::MatrixXd::Zero(n, n);
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    CsvCursor cur{line};
    const int i = parse_number<int>(next_field(cur), where);
    const int j = parse_number<int>(next_field(cur), where);
    const double value = parse_number<double>(next_field(cur), where);
    if (cur.pos < line.size()) {
      throw ConfigError(where + ": expected exactly three fields 'i,j,value'");
    }
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw ConfigError(where + ": index (" + std::to_string(i) + "," +
                        std::to_string(j) + ") outside 0.." + std::to_string(n - 1));
    }
    if (!std::isfinite(value)) {
      throw ConfigError(where + ": value must be finite");
    }
    if (value < 0.0) {
      throw AuditError(where + ": negative kernel entry at (" + std::to_string(i) +
                       "," + std::to_string(j) + ")");
    }
    const std::size_t flat = static_cast<std::size_t>(i) * n + j;
    if (seen[flat]) {
      throw ConfigError(where + ": duplicate entry for (" + std::to_string(i) +
                        "," + std::to_string(j) + ")");
    }
    seen[flat] = 1;
    spec.table(i, j) = value;
  }

  // Reject asymmetry instead of repairing it; missing mirror entries count
  // as zeros and therefore as asymmetry whenever the given value is nonzero.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (spec.table(i, j) != spec.table(j, i)) {
        throw AuditError(path + ": asymmetric table kernel at pair (" +
                         std::to_string(i) + "," + std::to_string(j) + "): " +
                         std::to_string(spec.table(i, j)) + " vs " +
                         std::to_string(spec.table(j, i)));
      }
    }
  }
  return spec;
}

}  // namespace dispersal
