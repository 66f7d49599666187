#pragma once

// Internal: 2x2 transportation-polytope coordinates. For marginals (px, qy)
// the joint is
//   [ z        px0-z       ]
//   [ qy0-z    1-px0-qy0+z ],  z in [max(0, px0+qy0-1), min(px0, qy0)].

#include "elab/info_math.hpp"

#include <algorithm>
#include <cmath>

namespace elab::detail {

struct ZBox {
  double lo, hi;
  bool ok() const { return hi >= lo - 1e-15; }
};

inline ZBox zbox(double px0, double qy0) {
  return {std::max(0.0, px0 + qy0 - 1.0), std::min(px0, qy0)};
}

inline Eigen::Matrix2d joint2(double px0, double qy0, double z) {
  Eigen::Matrix2d m;
  m << z, px0 - z, qy0 - z, 1.0 - px0 - qy0 + z;
  m = m.cwiseMax(0.0);
  m /= m.sum();
  return m;
}

inline double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

inline double mutual_info2(double px0, double qy0, double z) {
  const double a = z, b = px0 - z, c = qy0 - z, d = 1.0 - px0 - qy0 + z;
  double v = xlogx(a) + xlogx(b) + xlogx(c) + xlogx(d);
  v -= xlogx(px0) + xlogx(1.0 - px0) + xlogx(qy0) + xlogx(1.0 - qy0);
  return std::max(0.0, v);
}

inline double div2(double px0, double qy0, double z, const Dmc& w) {
  const double cells[4] = {z, px0 - z, qy0 - z, 1.0 - px0 - qy0 + z};
  const double refs[4] = {px0 * w.w(0, 0), px0 * w.w(0, 1), (1.0 - px0) * w.w(1, 0),
                          (1.0 - px0) * w.w(1, 1)};
  double v = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (cells[i] <= 1e-300) continue;
    if (refs[i] <= 0.0) return kInf;
    v += cells[i] * std::log(cells[i] / refs[i]);
  }
  return v;
}

inline double elogw2(double px0, double qy0, double z, const Dmc& w) {
  const double cells[4] = {z, px0 - z, qy0 - z, 1.0 - px0 - qy0 + z};
  const double ws[4] = {w.w(0, 0), w.w(0, 1), w.w(1, 0), w.w(1, 1)};
  double v = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (cells[i] <= 1e-300) continue;
    if (ws[i] <= 0.0) return -kInf;
    v += cells[i] * std::log(ws[i]);
  }
  return v;
}

/// E_Q log W as an affine function of z (finite only for positive W).
struct AffineElogw {
  double c0 = 0.0, c1 = 0.0;
  bool finite = false;
  double at(double z) const { return c0 + c1 * z; }
};

inline AffineElogw elogw_line(double px0, double qy0, const Dmc& w) {
  const double ws[4] = {w.w(0, 0), w.w(0, 1), w.w(1, 0), w.w(1, 1)};
  for (double x : ws)
    if (x <= 0.0) return {};
  const double l00 = std::log(ws[0]), l01 = std::log(ws[1]), l10 = std::log(ws[2]),
               l11 = std::log(ws[3]);
  AffineElogw out;
  out.c1 = l00 - l01 - l10 + l11;
  out.c0 = px0 * l01 + qy0 * l10 + (1.0 - px0 - qy0) * l11;
  out.finite = true;
  return out;
}

struct Interval {
  double lo = 1.0, hi = 0.0;
  bool empty() const { return hi < lo; }
};

/// {z in box : I(z) <= r}; I is convex with minimum 0 at z = px0*qy0.
inline Interval i_sublevel(double px0, double qy0, double r, const ZBox& box) {
  const double zc = std::min(std::max(px0 * qy0, box.lo), box.hi);
  if (mutual_info2(px0, qy0, zc) > r) return {1.0, 0.0};
  double lo = box.lo, hi = box.hi;
  if (mutual_info2(px0, qy0, box.lo) > r) {
    double a = box.lo, b = zc;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (a + b);
      if (mutual_info2(px0, qy0, mid) > r)
        a = mid;
      else
        b = mid;
    }
    lo = 0.5 * (a + b);
  }
  if (mutual_info2(px0, qy0, box.hi) > r) {
    double a = zc, b = box.hi;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (a + b);
      if (mutual_info2(px0, qy0, mid) <= r)
        a = mid;
      else
        b = mid;
    }
    hi = 0.5 * (a + b);
  }
  return {lo, hi};
}

/// {z in box : c0 + c1 z <= bound}.
inline Interval affine_sublevel(const AffineElogw& line, double bound, const ZBox& box) {
  if (!std::isfinite(bound)) {
    if (bound > 0) return {box.lo, box.hi};
    return {1.0, 0.0};
  }
  if (std::abs(line.c1) < 1e-15) {
    if (line.c0 <= bound + 1e-15) return {box.lo, box.hi};
    return {1.0, 0.0};
  }
  const double zstar = (bound - line.c0) / line.c1;
  if (line.c1 > 0) {
    if (zstar < box.lo) return {1.0, 0.0};
    return {box.lo, std::min(zstar, box.hi)};
  }
  if (zstar > box.hi) return {1.0, 0.0};
  return {std::max(zstar, box.lo), box.hi};
}

}  // namespace elab::detail
