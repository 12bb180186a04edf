#include "dispersal/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "dispersal/errors.hpp"

namespace dispersal {

namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

class Ini {
 public:
  explicit Ini(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) {
      throw ConfigError("cannot open config file '" + path + "'");
    }
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      const std::size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const std::string line = trim(raw);
      if (line.empty()) continue;

      if (line.front() == '[') {
        if (line.back() != ']') {
          throw ConfigError(where(lineno) + ": section header missing ']'");
        }
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) {
          throw ConfigError(where(lineno) + ": empty section name");
        }
        const auto prior = section_lines_.find(section);
        if (prior != section_lines_.end()) {
          throw ConfigError(where(lineno) + ": section [" + section +
                            "] already opened at line " +
                            std::to_string(prior->second));
        }
        section_lines_[section] = lineno;
        sections_[section];
        continue;
      }

      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(where(lineno) + ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(where(lineno) + ": empty key");
      }
      if (section.empty()) {
        throw ConfigError(where(lineno) + ": key '" + key +
                          "' appears before any [section]");
      }
      auto& sec = sections_[section];
      const auto prior = sec.find(key);
      if (prior != sec.end()) {
        throw ConfigError(where(lineno) + ": duplicate key '" + key +
                          "' (first at line " +
                          std::to_string(prior->second.line) + ")");
      }
      sec[key] = Entry{value, lineno, false};
    }
  }

  std::string where(int line) const {
    return path_ + ":" + std::to_string(line);
  }

  Entry* find(const std::string& section, const std::string& key) {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.consumed = true;
    return &k->second;
  }

  double real(const std::string& section, const std::string& key, double def) {
    Entry* e = find(section, key);
    if (e == nullptr) return def;
    return parse_real(*e, key);
  }

  // `auto` (or an absent key) keeps NaN so the consumer resolves it.
  double real_or_auto(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (e == nullptr || e->value == "auto") {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return parse_real(*e, key);
  }

  int integer(const std::string& section, const std::string& key, int def) {
    Entry* e = find(section, key);
    if (e == nullptr) return def;
    int out = 0;
    const char* begin = e->value.data();
    const char* end = begin + e->value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
      throw ConfigError(where(e->line) + ": key '" + key +
                        "' expects an integer, got '" + e->value + "'");
    }
    return out;
  }

  std::string choice(const std::string& section, const std::string& key,
                     const std::string& def,
                     std::initializer_list<const char*> allowed) {
    Entry* e = find(section, key);
    const std::string value = e == nullptr ? def : e->value;
    for (const char* option : allowed) {
      if (value == option) return value;
    }
    std::string expect;
    for (const char* option : allowed) {
      if (!expect.empty()) expect += " | ";
      expect += option;
    }
    const std::string loc = e == nullptr ? path_ : where(e->line);
    throw ConfigError(loc + ": key '" + key + "' must be one of " + expect +
                      ", got '" + value + "'");
  }

  std::string text(const std::string& section, const std::string& key,
                   const std::string& def) {
    Entry* e = find(section, key);
    return e == nullptr ? def : e->value;
  }

  std::vector<double> real_list(const std::string& section,
                                const std::string& key) {
    Entry* e = find(section, key);
    std::vector<double> out;
    if (e == nullptr) return out;
    std::size_t pos = 0;
    const std::string& v = e->value;
    while (pos <= v.size()) {
      const std::size_t comma = v.find(',', pos);
      const std::size_t stop = comma == std::string::npos ? v.size() : comma;
      Entry item{trim(v.substr(pos, stop - pos)), e->line, true};
      if (item.value.empty()) {
        throw ConfigError(where(e->line) + ": key '" + key +
                          "' has an empty list entry");
      }
      out.push_back(parse_real(item, key));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  // Every key must have been consumed by the schema walk; the first leftover
  // (in file order) is reported.
  void finish(std::initializer_list<const char*> known_sections) const {
    for (const auto& [name, line] : section_lines_) {
      bool known = false;
      for (const char* s : known_sections) {
        if (name == s) known = true;
      }
      if (!known) {
        throw ConfigError(where(line) + ": unknown section [" + name + "]");
      }
    }
    const Entry* worst = nullptr;
    std::string worst_msg;
    for (const auto& [sname, entries] : sections_) {
      for (const auto& [key, entry] : entries) {
        if (entry.consumed) continue;
        if (worst == nullptr || entry.line < worst->line) {
          worst = &entry;
          worst_msg = where(entry.line) + ": key '" + key + "' in section [" +
                      sname + "] is not recognized for this configuration";
        }
      }
    }
    if (worst != nullptr) throw ConfigError(worst_msg);
  }

 private:
  double parse_real(const Entry& e, const std::string& key) const {
    double out = 0.0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
      throw ConfigError(where(e.line) + ": key '" + key +
                        "' expects a number, got '" + e.value + "'");
    }
    return out;
  }

  std::string path_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

}  // namespace

RunConfig load_config(const std::string& path) {
  Ini ini(path);
  RunConfig cfg;

  {
    Entry* dim = ini.find("domain", "dim");
    if (dim != nullptr) {
      if (dim->value == "1") {
        cfg.domain.dim = 1;
      } else if (dim->value == "2") {
        cfg.domain.dim = 2;
      } else {
        throw ConfigError(ini.where(dim->line) +
                          ": key 'dim' must be 1 or 2, got '" + dim->value +
                          "'");
      }
    }
    if (cfg.domain.dim == 1) {
      cfg.domain.lo = ini.real("domain", "lo", cfg.domain.lo);
      cfg.domain.hi = ini.real("domain", "hi", cfg.domain.hi);
      cfg.domain.n = ini.integer("domain", "n", cfg.domain.n);
    } else {
      cfg.domain.lo_x = ini.real("domain", "lo_x", cfg.domain.lo_x);
      cfg.domain.hi_x = ini.real("domain", "hi_x", cfg.domain.hi_x);
      cfg.domain.n_x = ini.integer("domain", "n_x", cfg.domain.n_x);
      cfg.domain.lo_y = ini.real("domain", "lo_y", cfg.domain.lo_y);
      cfg.domain.hi_y = ini.real("domain", "hi_y", cfg.domain.hi_y);
      cfg.domain.n_y = ini.integer("domain", "n_y", cfg.domain.n_y);
    }
    cfg.domain.max_nodes =
        ini.integer("domain", "max_nodes", cfg.domain.max_nodes);
  }

  {
    cfg.kernel.family =
        ini.choice("kernel", "family", cfg.kernel.family,
                   {"constant", "gaussian", "poly_rank2", "table"});
    if (cfg.kernel.family == "constant") {
      cfg.kernel.level = ini.real("kernel", "level", cfg.kernel.level);
    } else if (cfg.kernel.family == "gaussian") {
      cfg.kernel.amp = ini.real("kernel", "amp", cfg.kernel.amp);
      cfg.kernel.width = ini.real("kernel", "width", cfg.kernel.width);
      if (!(cfg.kernel.width > 0.0)) {
        throw ConfigError("config " + path +
                          ": [kernel] width must be positive");
      }
    } else if (cfg.kernel.family == "table") {
      cfg.kernel.path = ini.text("kernel", "path", "");
      if (cfg.kernel.path.empty()) {
        throw ConfigError("config " + path +
                          ": [kernel] family = table requires key 'path'");
      }
    }
    cfg.kernel.delta = ini.real_or_auto("kernel", "delta");
  }

  {
    cfg.nonlinearity.family =
        ini.choice("nonlinearity", "family", cfg.nonlinearity.family,
                   {"piecewise_linear", "smooth_ap"});
    if (cfg.nonlinearity.family == "piecewise_linear") {
      cfg.nonlinearity.a_neg =
          ini.real("nonlinearity", "a_neg", cfg.nonlinearity.a_neg);
      cfg.nonlinearity.A_pos =
          ini.real("nonlinearity", "A_pos", cfg.nonlinearity.A_pos);
    } else {
      cfg.nonlinearity.a = ini.real("nonlinearity", "a", cfg.nonlinearity.a);
      cfg.nonlinearity.A = ini.real("nonlinearity", "A", cfg.nonlinearity.A);
    }
    cfg.nonlinearity.C = ini.real("nonlinearity", "C", cfg.nonlinearity.C);
  }

  {
    cfg.forcing.mode =
        ini.choice("forcing", "mode", cfg.forcing.mode, {"eigen", "constant"});
    cfg.forcing.t = ini.real("forcing", "t", cfg.forcing.t);
    cfg.forcing.g1 =
        ini.choice("forcing", "g1", cfg.forcing.g1, {"zero", "linear"});
    if (cfg.forcing.g1 == "linear") {
      cfg.forcing.g1_c0 = ini.real("forcing", "g1_c0", cfg.forcing.g1_c0);
      cfg.forcing.g1_cx = ini.real("forcing", "g1_cx", cfg.forcing.g1_cx);
      cfg.forcing.g1_cy = ini.real("forcing", "g1_cy", cfg.forcing.g1_cy);
    }
  }

  {
    cfg.solver.method = ini.choice("solver", "method", cfg.solver.method,
                                   {"auto", "monotone", "picard", "newton"});
    cfg.solver.beta = ini.real_or_auto("solver", "beta");
    cfg.solver.tol = ini.real("solver", "tol", cfg.solver.tol);
    cfg.solver.max_iter = ini.integer("solver", "max_iter", cfg.solver.max_iter);
    cfg.solver.picard_m = ini.real_or_auto("solver", "picard_m");
    cfg.solver.picard_u0 =
        ini.real("solver", "picard_u0", cfg.solver.picard_u0);
    cfg.solver.newton_max_iter =
        ini.integer("solver", "newton_max_iter", cfg.solver.newton_max_iter);
  }

  {
    cfg.threshold.t_lo_hint = ini.real_or_auto("threshold", "t_lo_hint");
    cfg.threshold.tol_t = ini.real("threshold", "tol_t", cfg.threshold.tol_t);
    cfg.threshold.max_bisect =
        ini.integer("threshold", "max_bisect", cfg.threshold.max_bisect);
    cfg.threshold.max_doublings =
        ini.integer("threshold", "max_doublings", cfg.threshold.max_doublings);
    cfg.threshold.epsilon = ini.real_or_auto("threshold", "epsilon");
  }

  cfg.diagram.t_values = ini.real_list("diagram", "t_values");

  ini.finish({"domain", "kernel", "nonlinearity", "forcing", "solver",
              "threshold", "diagram"});
  return cfg;
}

std::string config_reference() {
  return
      "Configuration file reference (INI; '#' starts a comment; every key\n"
      "is optional and shown with its default):\n"
      "\n"
      "[domain]\n"
      "  dim = 1              # 1 | 2\n"
      "  lo = 0               # dim = 1: interval endpoints and node count\n"
      "  hi = 1\n"
      "  n = 201\n"
      "  lo_x = 0             # dim = 2: per-axis endpoints and node counts\n"
      "  hi_x = 1\n"
      "  n_x = 21\n"
      "  lo_y = 0\n"
      "  hi_y = 1\n"
      "  n_y = 21\n"
      "  max_nodes = 4096     # dense-assembly guard\n"
      "\n"
      "[kernel]\n"
      "  family = constant    # constant | gaussian | poly_rank2 | table\n"
      "  level = 1            # constant: K(x, y) = level\n"
      "  amp = 1              # gaussian: amp exp(-|x-y|^2 / (2 width^2))\n"
      "  width = 1\n"
      "  path =               # table: CSV of node-indexed entries (required)\n"
      "  delta = auto         # positivity radius; auto = domain diameter\n"
      "\n"
      "[nonlinearity]\n"
      "  family = piecewise_linear   # piecewise_linear | smooth_ap\n"
      "  a_neg = 0.5          # piecewise: slope on s <= 0\n"
      "  A_pos = 2            # piecewise: slope on s > 0\n"
      "  a = 0.5              # smooth_ap: a s + (A - a) log(1 + e^s)\n"
      "  A = 2\n"
      "  C = 0                # declared offset in f(s) >= A s - C\n"
      "\n"
      "[forcing]\n"
      "  mode = eigen         # eigen: g = t phi1 + g1 | constant: g = t + g1\n"
      "  t = 0\n"
      "  g1 = zero            # zero | linear\n"
      "  g1_c0 = 0            # linear: g1(x, y) = c0 + cx x + cy y,\n"
      "  g1_cx = 0            # projected to the complement of the forcing\n"
      "  g1_cy = 0            # direction before use\n"
      "\n"
      "[solver]\n"
      "  method = auto        # auto | monotone | picard | newton\n"
      "  beta = auto          # monotone shift; auto clears the row-sum sup\n"
      "  tol = 1e-10          # step tolerance for the iterations\n"
      "  max_iter = 10000     # monotone / picard budget\n"
      "  picard_m = auto      # contraction constant; auto = 2x slope bound\n"
      "  picard_u0 = 0        # constant starting level for picard\n"
      "  newton_max_iter = 200\n"
      "\n"
      "[threshold]\n"
      "  t_lo_hint = auto     # first existence probe; auto = m_all - 1\n"
      "  tol_t = 1e-6         # bracket width target\n"
      "  max_bisect = 80\n"
      "  max_doublings = 60\n"
      "  epsilon = auto       # envelope slope offset; auto = (lambda1 - a)/2\n"
      "\n"
      "[diagram]\n"
      "  t_values =           # comma-separated, strictly ascending\n";
}

Domain domain_from_config(const DomainConfig& cfg) {
  Domain domain;
  domain.dim = cfg.dim;
  if (cfg.dim == 1) {
    domain.bounds[0] = {cfg.lo, cfg.hi};
    domain.bounds[1] = {0.0, 1.0};
    domain.n_per_axis = {cfg.n, 2};
  } else {
    domain.bounds[0] = {cfg.lo_x, cfg.hi_x};
    domain.bounds[1] = {cfg.lo_y, cfg.hi_y};
    domain.n_per_axis = {cfg.n_x, cfg.n_y};
  }
  return domain;
}

KernelSpec kernel_from_config(const KernelConfig& cfg, const Domain& domain) {
  const double delta = std::isnan(cfg.delta) ? diameter(domain) : cfg.delta;
  if (!(delta > 0.0)) {
    throw ConfigError("[kernel] delta must be positive");
  }

  KernelSpec spec;
  spec.delta = delta;
  if (cfg.family == "constant") {
    spec.family = KernelFamily::constant;
    spec.constant_level = cfg.level;
  } else if (cfg.family == "gaussian") {
    spec.family = KernelFamily::gaussian;
    spec.gaussian_amp = cfg.amp;
    spec.gaussian_width = cfg.width;
  } else if (cfg.family == "poly_rank2") {
    spec.family = KernelFamily::poly_rank2;
  } else if (cfg.family == "table") {
    spec = load_table_kernel(cfg.path, delta);
    const int expected = domain.dim == 1
                             ? domain.n_per_axis[0]
                             : domain.n_per_axis[0] * domain.n_per_axis[1];
    if (spec.table.rows() != expected) {
      throw ConfigError("table kernel '" + cfg.path + "' holds " +
                        std::to_string(spec.table.rows()) +
                        " nodes but the grid has " + std::to_string(expected));
    }
  } else {
    throw ConfigError("unknown kernel family '" + cfg.family + "'");
  }
  return spec;
}

Nonlinearity nonlinearity_from_config(const NonlinearityConfig& cfg) {
  if (cfg.family == "piecewise_linear") {
    return Nonlinearity::piecewise_linear(cfg.a_neg, cfg.A_pos, cfg.C);
  }
  if (cfg.family == "smooth_ap") {
    return Nonlinearity::smooth_ap(cfg.a, cfg.A, cfg.C);
  }
  throw ConfigError("unknown nonlinearity family '" + cfg.family + "'");
}

Workspace build_workspace(const RunConfig& cfg) {
  const Domain domain = domain_from_config(cfg.domain);
  validate(domain);
  const Grid grid = build_grid(domain);
  const KernelSpec spec = kernel_from_config(cfg.kernel, domain);

  Workspace ws;
  ws.op = assemble(grid, spec, cfg.domain.max_nodes);
  ws.eig = principal_eigenpair(ws.op);
  ws.nl = nonlinearity_from_config(cfg.nonlinearity);
  ws.mode = cfg.forcing.mode == "constant" ? ForcingMode::constant
                                           : ForcingMode::eigen;

  const int n = grid.size();
  ws.g1_raw = Eigen::VectorXd::Zero(n);
  if (cfg.forcing.g1 == "linear") {
    for (int i = 0; i < n; ++i) {
      ws.g1_raw[i] = cfg.forcing.g1_c0 + cfg.forcing.g1_cx * grid.nodes[i][0] +
                     cfg.forcing.g1_cy * grid.nodes[i][1];
    }
  }
  return ws;
}

}  // namespace dispersal
