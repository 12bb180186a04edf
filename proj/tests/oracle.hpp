#pragma once

// Library-independent scalar reference. On a constant kernel with unit row
// sum and g1 = 0, constant functions u = c solve the problem exactly when
// c - f(c) = t, so the full solution set is recoverable by a 1D root scan.
// Nothing here touches the code under test.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline std::vector<double> constant_roots(
    const std::function<double(double)>& f, double t, double lo = -1e3,
    double hi = 1e3, int cells = 400000) {
  auto h = [&](double c) { return c - f(c) - t; };
  std::vector<double> found;
  double prev_c = lo;
  double prev_h = h(lo);
  for (int k = 1; k <= cells; ++k) {
    const double c = lo + (hi - lo) * k / cells;
    const double hc = h(c);
    if (prev_h == 0.0) {
      found.push_back(prev_c);
    } else if ((prev_h < 0.0) != (hc < 0.0)) {
      double a = prev_c, b = c;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        ((h(a) < 0.0) != (h(mid) < 0.0) ? b : a) = mid;
      }
      found.push_back(0.5 * (a + b));
    }
    prev_c = c;
    prev_h = hc;
  }
  if (prev_h == 0.0) found.push_back(prev_c);

  std::vector<double> roots;
  for (double r : found) {
    if (roots.empty() || std::fabs(r - roots.back()) > 1e-9) roots.push_back(r);
  }
  return roots;
}

}  // namespace oracle
