#pragma once

// Test-only brute-force oracles, kept independent of the library's solver
// paths: plain nested loops over dense grids in a different parameterization.

#include "elab/info_math.hpp"
#include "elab/universal_fraction.hpp"

#include <cmath>
#include <vector>

namespace oracle {

using elab::Dmc;
using elab::JointDist;
using elab::kInf;

inline double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

// joint built from (qy0, z) with Q_X = (px0, 1-px0)
inline Eigen::Matrix2d joint(double px0, double qy0, double z) {
  Eigen::Matrix2d m;
  m << z, px0 - z, qy0 - z, 1.0 - px0 - qy0 + z;
  return m.cwiseMax(0.0);
}

inline double mutual_info(const Eigen::Matrix2d& q) {
  const double qx0 = q(0, 0) + q(0, 1), qx1 = q(1, 0) + q(1, 1);
  const double qy0 = q(0, 0) + q(1, 0), qy1 = q(0, 1) + q(1, 1);
  double v = 0.0;
  const double qxs[2] = {qx0, qx1}, qys[2] = {qy0, qy1};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      if (q(x, y) > 0.0) v += q(x, y) * std::log(q(x, y) / (qxs[x] * qys[y]));
  return std::max(0.0, v);
}

inline double divergence(const Eigen::Matrix2d& q, double px0, const Dmc& w) {
  double v = 0.0;
  const double pxs[2] = {px0, 1.0 - px0};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (q(x, y) <= 0.0) continue;
      const double ref = pxs[x] * w.w(x, y);
      if (ref <= 0.0) return kInf;
      v += q(x, y) * std::log(q(x, y) / ref);
    }
  return v;
}

inline double elogw(const Eigen::Matrix2d& q, const Dmc& w) {
  double v = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (q(x, y) <= 0.0) continue;
      if (w.w(x, y) <= 0.0) return -kInf;
      v += q(x, y) * std::log(w.w(x, y));
    }
  return v;
}

struct GridSettings {
  int n_qy = 41;
  int n_z = 41;
  int zoom_rounds = 2;  // pure grid zoom around the best cell
};

struct GridBest {
  double value = kInf;
  double qy0 = 0.5, z = 0.0, zt = 0.0;
};

// E_a by exhaustive lattice over (qy0, z, zt): hard I >= r, omega_hat <= 0.
// Multi-resolution: the lattice is re-gridded around the incumbent cell so
// constraint-boundary quantization does not bias the value.
inline double e_a_grid(double r, double t, const Dmc& w, double px0,
                       const GridSettings& gs = {}) {
  GridBest best;
  double qlo = 1e-6, qhi = 1.0 - 1e-6;
  double zwin_lo = 0.0, zwin_hi = 1.0, twin_lo = 0.0, twin_hi = 1.0;  // fractions of the box
  int nq = gs.n_qy, nz = gs.n_z;
  for (int round = 0; round <= gs.zoom_rounds; ++round) {
    for (int a = 0; a < nq; ++a) {
      const double qy0 = qlo + (qhi - qlo) * a / (nq - 1);
      const double zlo = std::max(0.0, px0 + qy0 - 1.0), zhi = std::min(px0, qy0);
      if (zhi <= zlo) continue;
      auto zval = [&](double f) { return zlo + (zhi - zlo) * f; };
      for (int i = 0; i < nz; ++i) {
        const double z = zval(zwin_lo + (zwin_hi - zwin_lo) * i / (nz - 1));
        const Eigen::Matrix2d q = joint(px0, qy0, z);
        const double iq = mutual_info(q);
        if (iq < r) continue;
        const double eq = elogw(q, w);
        for (int j = 0; j < nz; ++j) {
          const double zt = zval(twin_lo + (twin_hi - twin_lo) * j / (nz - 1));
          const Eigen::Matrix2d qt = joint(px0, qy0, zt);
          const double et = elogw(qt, w);
          if (!(et - eq - t <= 1e-12)) continue;
          const double v = divergence(qt, px0, w) + iq - r;
          if (v < best.value) best = {v, qy0, (z - zlo) / (zhi - zlo), (zt - zlo) / (zhi - zlo)};
        }
      }
    }
    if (!std::isfinite(best.value)) break;
    const double dq = (qhi - qlo) / (nq - 1);
    qlo = std::max(1e-6, best.qy0 - 2 * dq);
    qhi = std::min(1.0 - 1e-6, best.qy0 + 2 * dq);
    const double dz = (zwin_hi - zwin_lo) / (nz - 1);
    zwin_lo = std::max(0.0, best.z - 2 * dz);
    zwin_hi = std::min(1.0, best.z + 2 * dz);
    const double dt2 = (twin_hi - twin_lo) / (nz - 1);
    twin_lo = std::max(0.0, best.zt - 2 * dt2);
    twin_hi = std::min(1.0, best.zt + 2 * dt2);
    nq = 21;
    nz = 21;
  }
  return best.value;
}

// E_b by exhaustive lattice with the same zoom discipline; the bound is
// recomputed on a fine fixed grid per qy0.
inline double e_b_grid(double r, double t, const Dmc& w, double px0,
                       const GridSettings& gs = {}) {
  auto bound_at = [&](double qy0) {
    const double zlo = std::max(0.0, px0 + qy0 - 1.0), zhi = std::min(px0, qy0);
    double bound = -kInf;
    const int n_inner = 801;
    for (int i = 0; i < n_inner; ++i) {
      const double z = zlo + (zhi - zlo) * i / (n_inner - 1);
      const Eigen::Matrix2d q = joint(px0, qy0, z);
      const double iq = mutual_info(q);
      if (iq > r) continue;
      const double eq = elogw(q, w);
      if (eq == -kInf) continue;
      bound = std::max(bound, eq - iq);
    }
    return bound == -kInf ? -kInf : bound + r + t;
  };

  GridBest best;
  double qlo = 1e-6, qhi = 1.0 - 1e-6;
  double twin_lo = 0.0, twin_hi = 1.0;
  int nq = gs.n_qy, nz = gs.n_z;
  for (int round = 0; round <= gs.zoom_rounds; ++round) {
    for (int a = 0; a < nq; ++a) {
      const double qy0 = qlo + (qhi - qlo) * a / (nq - 1);
      const double zlo = std::max(0.0, px0 + qy0 - 1.0), zhi = std::min(px0, qy0);
      if (zhi <= zlo) continue;
      const double bound = bound_at(qy0);
      if (bound == -kInf) continue;
      for (int j = 0; j < nz; ++j) {
        const double zt = zlo + (zhi - zlo) * (twin_lo + (twin_hi - twin_lo) * j / (nz - 1));
        const Eigen::Matrix2d qt = joint(px0, qy0, zt);
        if (elogw(qt, w) <= bound + 1e-12) {
          const double v = divergence(qt, px0, w);
          if (v < best.value) best = {v, qy0, 0.0, (zt - zlo) / (zhi - zlo)};
        }
      }
    }
    if (!std::isfinite(best.value)) break;
    const double dq = (qhi - qlo) / (nq - 1);
    qlo = std::max(1e-6, best.qy0 - 2 * dq);
    qhi = std::min(1.0 - 1e-6, best.qy0 + 2 * dq);
    const double dt2 = (twin_hi - twin_lo) / (nz - 1);
    twin_lo = std::max(0.0, best.zt - 2 * dt2);
    twin_hi = std::min(1.0, best.zt + 2 * dt2);
    nq = 21;
    nz = 21;
  }
  return best.value;
}

// F(qy, lam, w, px0) by sweeping the conditional probability a = Q(X=0|Y=0);
// the other conditional is pinned by the X-marginal constraint.
inline double f_term_grid(double qy0, double lam, const Dmc& w, double px0, int npts = 2001) {
  const double qy1 = 1.0 - qy0;
  double best = kInf;
  for (int i = 0; i < npts; ++i) {
    const double a = static_cast<double>(i) / (npts - 1);
    if (qy1 <= 0.0) break;
    const double b = (px0 - qy0 * a) / qy1;
    if (b < -1e-12 || b > 1.0 + 1e-12) continue;
    const double bc = std::min(std::max(b, 0.0), 1.0);
    Eigen::Matrix2d m;
    m(0, 0) = qy0 * a;
    m(0, 1) = qy1 * bc;
    m(1, 0) = qy0 * (1.0 - a);
    m(1, 1) = qy1 * (1.0 - bc);
    const double e = elogw(m, w);
    if (e == -kInf && lam != 0.0) continue;
    best = std::min(best, mutual_info(m) - lam * (lam != 0.0 ? e : 0.0));
  }
  return best;
}

// E(theta, theta'', s, rho) by nesting the f_term grid over a qy grid.
inline double e_gallager_grid(const Dmc& w1, const Dmc& w2, double s, double rho, double px0,
                              int n_qy = 201, int n_cond = 801) {
  double best = kInf;
  for (int a = 1; a < n_qy; ++a) {
    const double qy0 = static_cast<double>(a) / n_qy;
    double v = f_term_grid(qy0, 1.0 - s, w1, px0, n_cond);
    if (rho > 0.0) v += rho * f_term_grid(qy0, s / rho, w2, px0, n_cond);
    v -= elab::binary_entropy(qy0);
    best = std::min(best, v);
  }
  return best;
}

}  // namespace oracle
