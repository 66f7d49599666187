#pragma once

// Internal: penalized projected-gradient descent over pairs (Q, Qt) of joint
// distributions sharing an output marginal, with the input marginals pinned
// to px. Multistart with escalating penalty weights; numerical gradients
// (dimension is tiny for the supported alphabets).

#include "elab/info_math.hpp"
#include "elab/known_exponents.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace elab::detail {

using PairFn = std::function<double(const JointDist&, const JointDist&)>;

struct PairPgdResult {
  double value = kInf;
  bool feasible = false;
  JointDist q, qt;
};

inline void project_simplex(Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + n, std::greater<double>());
  double css = 0.0, tau = 0.0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    const double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0) tau = t;
  }
  v = (v.array() - tau).cwiseMax(0.0);
  const double s = v.sum();
  if (s > 0) v /= s;
}

inline JointDist compose_joint(const Eigen::VectorXd& qy, const Eigen::MatrixXd& cond) {
  Eigen::MatrixXd m = cond * qy.asDiagonal();
  m = m.cwiseMax(0.0);
  const double s = m.sum();
  if (s > 0) m /= s;
  return JointDist(m);
}

/// Minimize objective(Q,Qt) subject to each constraint(Q,Qt) <= 0, the shared
/// output marginal by construction and X-marginals = px via penalties.
inline PairPgdResult pair_pgd_minimize(const Eigen::VectorXd& px, const Dmc& w,
                                       const PairFn& objective,
                                       const std::vector<PairFn>& constraints,
                                       const GeneralSolverOptions& opt) {
  const int nx = w.nx(), ny = w.ny();
  std::mt19937_64 rng(opt.seed);
  auto uniform = [&]() { return (rng() >> 11) * 0x1.0p-53; };

  struct Point {
    Eigen::VectorXd qy;
    Eigen::MatrixXd u, v;  // nx x ny conditionals Q_{X|Y}
  };
  auto build = [&](const Point& p) {
    return std::pair<JointDist, JointDist>{compose_joint(p.qy, p.u), compose_joint(p.qy, p.v)};
  };
  auto penalized = [&](const Point& p, double c_marg, double c_cons) {
    auto [Q, Qt] = build(p);
    const double base = objective(Q, Qt);
    if (!std::isfinite(base)) return kInf;
    double pen = c_marg * ((Q.marginal_x() - px).squaredNorm() +
                           (Qt.marginal_x() - px).squaredNorm());
    for (const auto& g : constraints) {
      const double gv = g(Q, Qt);
      if (std::isfinite(gv) && gv > 0) pen += c_cons * gv * gv;
      if (gv == kInf) return kInf;
    }
    return base + pen;
  };

  PairPgdResult out;
  for (int start = 0; start < opt.pgd_starts; ++start) {
    Point pt;
    pt.qy = Eigen::VectorXd::Constant(ny, 1.0 / ny);
    pt.u = Eigen::MatrixXd::Constant(nx, ny, 1.0 / nx);
    pt.v = pt.u;
    if (start == 0) {
      JointDist ref = product_joint(px, w);
      const Eigen::VectorXd qy = ref.marginal_y();
      for (int y = 0; y < ny; ++y) {
        pt.qy[y] = qy[y];
        if (qy[y] > 0) {
          pt.u.col(y) = ref.p.col(y) / qy[y];
          pt.v.col(y) = pt.u.col(y);
        }
      }
    } else if (start > 1) {
      for (int y = 0; y < ny; ++y) {
        pt.qy[y] = 0.2 + uniform();
        for (int x = 0; x < nx; ++x) {
          pt.u(x, y) = 0.2 + uniform();
          pt.v(x, y) = 0.2 + uniform();
        }
        pt.u.col(y) /= pt.u.col(y).sum();
        pt.v.col(y) /= pt.v.col(y).sum();
      }
      pt.qy /= pt.qy.sum();
    }

    double c_marg = 50.0, c_cons = 50.0;
    for (int round = 0; round < 4; ++round) {
      double step = 0.05;
      double f = penalized(pt, c_marg, c_cons);
      const int dim = ny + 2 * nx * ny;
      for (int it = 0; it < opt.pgd_iters; ++it) {
        Eigen::VectorXd grad(dim);
        const double h = 1e-6;
        auto eval_shift = [&](int k, double delta) {
          Point p2 = pt;
          if (k < ny)
            p2.qy[k] += delta;
          else if (k < ny + nx * ny)
            p2.u((k - ny) % nx, (k - ny) / nx) += delta;
          else
            p2.v((k - ny - nx * ny) % nx, (k - ny - nx * ny) / nx) += delta;
          return penalized(p2, c_marg, c_cons);
        };
        for (int k = 0; k < dim; ++k)
          grad[k] = (eval_shift(k, h) - eval_shift(k, -h)) / (2 * h);
        const double gn = grad.norm();
        if (!std::isfinite(gn) || gn < 1e-12) break;
        bool improved = false;
        for (int ls = 0; ls < 12; ++ls) {
          Point trial = pt;
          const double a = step / gn;
          for (int k = 0; k < ny; ++k) trial.qy[k] -= a * grad[k];
          for (int k = 0; k < nx * ny; ++k) trial.u(k % nx, k / nx) -= a * grad[ny + k];
          for (int k = 0; k < nx * ny; ++k)
            trial.v(k % nx, k / nx) -= a * grad[ny + nx * ny + k];
          project_simplex(trial.qy);
          for (int y = 0; y < ny; ++y) {
            Eigen::VectorXd cu = trial.u.col(y), cv = trial.v.col(y);
            project_simplex(cu);
            project_simplex(cv);
            trial.u.col(y) = cu;
            trial.v.col(y) = cv;
          }
          const double f2 = penalized(trial, c_marg, c_cons);
          if (f2 < f - 1e-14) {
            pt = trial;
            f = f2;
            improved = true;
            break;
          }
          step *= 0.5;
        }
        if (!improved) break;
      }
      c_marg *= 25.0;
      c_cons *= 25.0;
    }

    auto [Q, Qt] = build(pt);
    const double marg_err = (Q.marginal_x() - px).cwiseAbs().maxCoeff() +
                            (Qt.marginal_x() - px).cwiseAbs().maxCoeff();
    if (marg_err > 2e-4) continue;
    bool ok = true;
    for (const auto& g : constraints)
      if (g(Q, Qt) > 2e-4) {
        ok = false;
        break;
      }
    if (!ok) continue;
    const double v = objective(Q, Qt);
    if (v < out.value) out = {v, true, Q, Qt};
  }
  return out;
}

}  // namespace elab::detail
