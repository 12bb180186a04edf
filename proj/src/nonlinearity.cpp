#include "dispersal/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dispersal/errors.hpp"

namespace dispersal {

namespace {

// Overflow-safe log(1 + e^s).
double softplus(double s) {
  if (s > 0.0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

// Deterministic sample grid: count equispaced points covering [lo, hi]
// through an exact-rational parameterization, so 0 lands on the grid
// whenever lo = -hi and count is odd.
std::vector<double> sample_grid(double lo, double hi, int count) {
  std::vector<double> s(count);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int i = 0; i < count; ++i) {
    const double u = static_cast<double>(2 * i - (count - 1)) /
                     static_cast<double>(count - 1);
    s[i] = mid + u * half;
  }
  return s;
}

}  // namespace

Nonlinearity Nonlinearity::piecewise_linear(double a_neg, double A_pos, double C) {
  if (!(a_neg > 0.0) || !(A_pos > 0.0)) {
    throw PreconditionError("piecewise_linear slopes must be positive");
  }
  if (C < 0.0) {
    throw PreconditionError("declared offset C must be nonnegative");
  }
  Nonlinearity nl;
  nl.family = NonlinearityFamily::piecewise_linear;
  nl.a_neg = a_neg;
  nl.A_pos = A_pos;
  nl.a = a_neg;
  nl.A = A_pos;
  nl.C = C;
  return nl;
}

Nonlinearity Nonlinearity::smooth_ap(double a, double A, double C) {
  if (!(0.0 < a && a < A)) {
    throw PreconditionError("smooth_ap requires 0 < a < A");
  }
  if (C < 0.0) {
    throw PreconditionError("declared offset C must be nonnegative");
  }
  Nonlinearity nl;
  nl.family = NonlinearityFamily::smooth_ap;
  nl.a = a;
  nl.A = A;
  nl.C = C;
  return nl;
}

double eval_f(const Nonlinearity& nl, const Point&, double s) {
  switch (nl.family) {
    case NonlinearityFamily::piecewise_linear:
      return s <= 0.0 ? nl.a_neg * s : nl.A_pos * s;
    case NonlinearityFamily::smooth_ap:
      return nl.a * s + (nl.A - nl.a) * softplus(s);
  }
  throw PreconditionError("unknown nonlinearity family");
}

double slope_quotient(const Nonlinearity& nl, const Point& x, double s,
                      double step) {
  if (!(step > 0.0)) {
    throw PreconditionError("slope_quotient requires a positive step");
  }
  if (nl.family == NonlinearityFamily::piecewise_linear && s == 0.0) {
    return (eval_f(nl, x, s + step) - eval_f(nl, x, s)) / step;
  }
  return (eval_f(nl, x, s + step) - eval_f(nl, x, s - step)) / (2.0 * step);
}

double max_slope_bound(const Nonlinearity& nl) {
  if (nl.family == NonlinearityFamily::piecewise_linear) {
    return std::max(nl.a_neg, nl.A_pos);
  }
  return nl.A;
}

HypothesisReport audit_hypotheses(const Nonlinearity& nl, double rowsum_sup,
                                  double lambda1, double R, int sample_count) {
  if (!(R > 0.0)) {
    throw PreconditionError("audit_hypotheses requires R > 0");
  }
  if (sample_count < 1000) {
    throw PreconditionError("audit_hypotheses requires at least 1000 samples");
  }

  const Point origin{0.0, 0.0};
  HypothesisReport report;
  report.A = nl.A;
  report.C = nl.C;
  report.a = nl.a;
  report.R = R;

  // Growth from above: f(x,s) >= A s - C on [0, 10R].
  double margin = std::numeric_limits<double>::infinity();
  for (double s : sample_grid(0.0, 10.0 * R, sample_count)) {
    margin = std::min(margin, eval_f(nl, origin, s) - (nl.A * s - nl.C));
  }
  report.f1_margin = margin;
  const double f1_tol = 1e-12 * (1.0 + std::abs(nl.A) * 10.0 * R + nl.C);
  report.f1_pass = nl.A > rowsum_sup && margin >= -f1_tol;

  // Asymptotic slope on the far left.
  const double tail_s = -1e4;
  report.f2_tail_error = std::abs(eval_f(nl, origin, tail_s) / tail_s - nl.a);
  report.f2_pass = nl.a > 0.0 && nl.a < lambda1 && report.f2_tail_error <= 1e-3;

  // Extreme difference quotients over [-R, R]: pairs at power-of-two
  // strides through the sample grid. Adjacent pairs see each branch alone,
  // so the extremes of a two-slope family are attained exactly.
  const std::vector<double> s = sample_grid(-R, R, sample_count);
  double sigma = std::numeric_limits<double>::infinity();
  double gamma = -std::numeric_limits<double>::infinity();
  for (int stride = 1; stride < sample_count; stride *= 2) {
    for (int i = 0; i + stride < sample_count; ++i) {
      const double lo = s[i];
      const double hi = s[i + stride];
      if (!(hi - lo >= 1e-9)) continue;
      const double q =
          (eval_f(nl, origin, hi) - eval_f(nl, origin, lo)) / (hi - lo);
      sigma = std::min(sigma, q);
      gamma = std::max(gamma, q);
    }
  }
  report.sigma = sigma;
  report.gamma = gamma;
  report.f3_pass = sigma > 0.0 && std::isfinite(gamma);
  report.f4_pass = sigma > rowsum_sup;
  return report;
}

double c1_offset(const Nonlinearity& nl, double epsilon, double lambda1,
                 double R, int sample_count) {
  if (!(R > 0.0)) {
    throw PreconditionError("c1_offset requires R > 0");
  }
  if (!(epsilon > 0.0) || !(epsilon < lambda1 - nl.a)) {
    throw PreconditionError("c1_offset requires 0 < epsilon < lambda1 - a");
  }
  // Tail reasoning: both envelopes s -> A s - C1 and s -> (a + epsilon) s - C1
  // fall below f eventually iff the comparison slope stays inside (a, A).
  // The first always does; the second needs a + epsilon < A.
  if (!(nl.a + epsilon < nl.A)) {
    throw PreconditionError(
        "constraint f >= (a+epsilon)s - C1 is unsatisfiable: a + epsilon >= A");
  }

  if (sample_count % 2 == 0) ++sample_count;  // keep 0 on the grid
  const Point origin{0.0, 0.0};
  double c1 = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    const double u = static_cast<double>(2 * i - (sample_count - 1)) /
                     static_cast<double>(sample_count - 1);
    const double s = u * 10.0 * R;
    const double f = eval_f(nl, origin, s);
    c1 = std::max(c1, nl.A * s - f);
    c1 = std::max(c1, (nl.a + epsilon) * s - f);
  }
  return c1;
}

}  // namespace dispersal
