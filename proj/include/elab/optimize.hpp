#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

namespace elab {

struct ScalarMin {
  double x = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

/// Golden-section minimization on [a,b]; assumes unimodality on the bracket.
template <typename F>
ScalarMin golden_min(F&& f, double a, double b, double xtol = 1e-10) {
  constexpr double gr = 0.6180339887498949;
  if (!(b > a)) return {a, f(a)};
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  double v = f(x);
  if (fc < v) { v = fc; }
  if (fd < v) { v = fd; }
  return {x, v};
}

/// Dense grid localization followed by golden-section polish of the best cell.
template <typename F>
ScalarMin grid_golden_min(F&& f, double a, double b, int npts = 2001, double xtol = 1e-10) {
  if (!(b > a)) return {a, f(a)};
  if (npts < 3) npts = 3;
  ScalarMin best;
  int best_i = 0;
  const double step = (b - a) / (npts - 1);
  for (int i = 0; i < npts; ++i) {
    const double x = a + step * i;
    const double v = f(x);
    if (v < best.value) {
      best = {x, v};
      best_i = i;
    }
  }
  if (!std::isfinite(best.value)) return best;
  const double lo = a + step * std::max(0, best_i - 1);
  const double hi = a + step * std::min(npts - 1, best_i + 1);
  ScalarMin polished = golden_min(f, lo, hi, xtol);
  return polished.value < best.value ? polished : best;
}

/// Same shape for maximization; returns the maximizing point and value.
template <typename F>
ScalarMin grid_golden_max(F&& f, double a, double b, int npts = 2001, double xtol = 1e-10) {
  auto neg = [&](double x) { return -f(x); };
  ScalarMin m = grid_golden_min(neg, a, b, npts, xtol);
  m.value = -m.value;
  return m;
}

/// Largest x in [lo,hi] with pred(x) true, assuming pred is true at lo and
/// single-crossing; bisection to xtol.
template <typename P>
double bisect_largest_true(P&& pred, double lo, double hi, double xtol = 1e-9) {
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace elab
