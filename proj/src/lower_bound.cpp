#include "elab/lower_bound.hpp"

#include "elab/optimize.hpp"
#include "elab/threading.hpp"
#include "transport2.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace elab {

namespace {

double xi_e1(double xi, double e1) { return xi == 0.0 ? 0.0 : xi * e1; }

bool bsc_uniform(const ChannelFamily& family) {
  return family.kind == ChannelFamily::Kind::bsc_grid && family.uniform_px(1e-12);
}

// ---------------------------------------------------------------------------
// Scalar building blocks for BSC fast paths: the two separable 1-D convex
// minimizations behind min over coupled pairs of the Lagrangian.
// ---------------------------------------------------------------------------

// min over qt of D(qt || th) - lam qt  =  -log(th e^lam + 1 - th)
double tilted_div_min(double th, double lam) {
  if (lam > 700.0) return -(lam + std::log(th));  // e^lam overflow guard
  return -std::log(th * std::exp(lam) + 1.0 - th);
}

// min over q of rho (log2 - h(q)) + s bpp q
double tilted_ent_min(double s, double rho, double bpp) {
  if (rho <= 1e-15) return std::min(0.0, s * bpp);
  const double mu = (s / rho) * bpp;
  double q;
  if (mu > 700.0)
    q = 0.0;
  else if (mu < -700.0)
    q = 1.0;
  else
    q = 1.0 / (1.0 + std::exp(mu));
  return rho * (kLog2 - binary_entropy(q)) + s * bpp * q;
}

// E(theta, theta'', s, rho) for BSC pairs under the uniform composition.
double e_gallager_bsc(double th, double tdp, double s, double rho) {
  const double b1 = beta_slope(th), b2 = beta_slope(tdp);
  return tilted_div_min(th, s * b1) + tilted_ent_min(s, rho, b2) +
         s * (std::log(1.0 - th) - std::log(1.0 - tdp));
}

// Generic 2x2 inner min over coupled joints: sweep the shared output
// marginal; both coordinates separate into 1-D convex problems.
double psi_inner_min_2x2(const ChannelFamily& family, const FamilyExponents& fe, int i, int kp,
                         int j, double r, double t, double rho, double s, double xi) {
  const double px0 = family.px[0];
  const Dmc& w_i = family.channel(i);
  const Dmc& w_p = family.channel(kp);
  const Dmc& w_j = family.channel(j);
  const double const_term =
      s * (xi_e1(xi, fe.e1[kp]) - xi_e1(xi, fe.e1[j]) - t) - xi_e1(xi, fe.e1[i]);

  auto at_qy = [&](double qy0) {
    const detail::ZBox box = detail::zbox(px0, qy0);
    if (!box.ok() || box.hi - box.lo < 1e-14) return kInf;
    auto qt_obj = [&](double zt) {
      const double e = detail::elogw2(px0, qy0, zt, w_p);
      if (e == -kInf && s > 0) return kInf;
      return detail::div2(px0, qy0, zt, w_i) + s * (s > 0 ? e : 0.0);
    };
    auto q_obj = [&](double z) {
      const double e = detail::elogw2(px0, qy0, z, w_j);
      if (e == -kInf && s > 0) return kInf;
      return rho * (detail::mutual_info2(px0, qy0, z) - r) - s * (s > 0 ? e : 0.0);
    };
    const ScalarMin a = golden_min(qt_obj, box.lo, box.hi, 1e-11);
    const ScalarMin b = golden_min(q_obj, box.lo, box.hi, 1e-11);
    return a.value + b.value;
  };

  double best = kInf, best_qy = 0.5;
  double lo = 1e-9, hi = 1.0 - 1e-9;
  int n = 101;
  for (int round = 0; round < 3; ++round) {
    for (int k = 0; k < n; ++k) {
      const double qy0 = lo + (hi - lo) * k / (n - 1);
      const double v = at_qy(qy0);
      if (v < best) {
        best = v;
        best_qy = qy0;
      }
    }
    const double step = (hi - lo) / (n - 1);
    lo = std::max(1e-9, best_qy - 2 * step);
    hi = std::min(1.0 - 1e-9, best_qy + 2 * step);
    n = 33;
  }
  return best + const_term;
}

struct SaddlePoint {
  double value = -kInf;
  double s = 0.0, rho = 0.0;
  int theta_prime = -1;
};

// max over multipliers of the inner min for one ordered pair (i, j). For the
// scalar path the maximization decouples given s: the theta'-dependent part
// and the rho-dependent part are separate one-dimensional problems.
SaddlePoint pair_saddle(const ChannelFamily& family, const FamilyExponents& fe,
                        const std::vector<int>& pos, int i, int j, double r, double t,
                        double xi, bool constrained, const GridSpec& spec) {
  const bool fast = bsc_uniform(family);
  const std::vector<int> kps = constrained ? std::vector<int>{i} : pos;
  SaddlePoint best;

  if (fast) {
    const double th = family.thetas[i];
    const double tdp = family.thetas[j];
    const double b_j = beta_slope(tdp);
    double lo_s = 0.0, hi_s = constrained ? 1.0 : spec.s_max;
    int n = std::max(9, spec.srho_grid);
    for (int round = 0; round <= spec.refine_rounds; ++round) {
      SaddlePoint round_best;
      for (int b = 0; b < n; ++b) {
        const double s = lo_s + (hi_s - lo_s) * b / (n - 1);
        // theta' part: max over candidates of min_qt [D - s beta' qt] + s a'
        double qt_best = -kInf;
        int kp_best = kps.front();
        for (int kp : kps) {
          const double thp = family.thetas[kp];
          const double v = tilted_div_min(th, s * beta_slope(thp)) +
                           s * (std::log(1.0 - thp) + xi_e1(xi, fe.e1[kp]));
          if (v > qt_best) {
            qt_best = v;
            kp_best = kp;
          }
        }
        // rho part: max over rho in [0, 1] (or [s,1] when constrained)
        const double rho_lo = constrained ? s : 0.0;
        if (rho_lo > 1.0 + 1e-12) continue;
        auto qpart = [&](double rho) { return tilted_ent_min(s, rho, b_j) - rho * r; };
        const ScalarMin rho_best = grid_golden_max(qpart, rho_lo, 1.0, 201, 1e-10);
        const double v = qt_best + rho_best.value +
                         s * (-std::log(1.0 - tdp) - xi_e1(xi, fe.e1[j]) - t) -
                         xi_e1(xi, fe.e1[i]);
        if (v > round_best.value) round_best = {v, s, rho_best.x, kp_best};
      }
      if (round_best.value > best.value) best = round_best;
      const double ds = (hi_s - lo_s) / (n - 1);
      lo_s = std::max(0.0, best.s - 2 * ds);
      hi_s = std::min(constrained ? 1.0 : spec.s_max, best.s + 2 * ds);
      n = 41;
    }
    return best;
  }

  auto value_at = [&](double s, double rho, int kp) {
    return psi_inner_min_2x2(family, fe, i, kp, j, r, t, rho, s, xi);
  };
  double lo_s = 0.0, hi_s = constrained ? 1.0 : spec.s_max;
  double lo_r = 0.0, hi_r = 1.0;
  int n = 41;
  for (int round = 0; round <= spec.refine_rounds; ++round) {
    for (int a = 0; a < n; ++a) {
      const double rho = lo_r + (hi_r - lo_r) * a / (n - 1);
      for (int b = 0; b < n; ++b) {
        const double s = lo_s + (hi_s - lo_s) * b / (n - 1);
        if (constrained && s > rho + 1e-15) continue;
        for (int kp : kps) {
          const double v = value_at(s, rho, kp);
          if (v > best.value) best = {v, s, rho, kp};
        }
      }
    }
    const double ds = (hi_s - lo_s) / (n - 1), dr = (hi_r - lo_r) / (n - 1);
    lo_s = std::max(0.0, best.s - 2 * ds);
    hi_s = std::min(constrained ? 1.0 : spec.s_max, best.s + 2 * ds);
    lo_r = std::max(0.0, best.rho - 2 * dr);
    hi_r = std::min(1.0, best.rho + 2 * dr);
    n = 21;
  }
  return best;
}

std::vector<int> positive_members(const FamilyExponents& fe) {
  std::vector<int> out;
  for (std::size_t i = 0; i < fe.positive.size(); ++i)
    if (fe.positive[i]) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

double f_term(const Eigen::VectorXd& qy, double lam, const Dmc& w, const Eigen::VectorXd& px) {
  if (!is_distribution(qy, 1e-9)) throw std::invalid_argument("f_term: qy not a distribution");
  if (qy.size() != w.ny() || px.size() != w.nx())
    throw std::invalid_argument("f_term: shape mismatch");
  if (w.nx() == 2 && w.ny() == 2) {
    const double px0 = px[0], qy0 = qy[0];
    const detail::ZBox box = detail::zbox(px0, qy0);
    if (!box.ok()) throw std::runtime_error("f_term: infeasible marginals");
    auto obj = [&](double z) {
      const double e = detail::elogw2(px0, qy0, z, w);
      if (e == -kInf && lam != 0.0) return lam > 0 ? kInf : -kInf;
      return detail::mutual_info2(px0, qy0, z) - lam * (lam != 0.0 ? e : 0.0);
    };
    return grid_golden_min(obj, box.lo, box.hi, 513, 1e-11).value;
  }
  // small-alphabet fallback: coordinate descent over the transportation
  // polytope via repeated 1-D line searches on the flattened joint
  const int nx = w.nx(), ny = w.ny();
  Eigen::MatrixXd q = px * qy.transpose();  // product coupling start
  auto objective = [&](const Eigen::MatrixXd& m) {
    double iq = 0.0;
    const Eigen::VectorXd mx = m.rowwise().sum();
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y)
        if (m(x, y) > 0) {
          if (qy[y] <= 0 || mx[x] <= 0) continue;
          iq += m(x, y) * std::log(m(x, y) / (mx[x] * qy[y]));
        }
    double e = 0.0;
    if (lam != 0.0) {
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
          if (m(x, y) > 0) {
            if (w.w(x, y) <= 0) return lam > 0 ? kInf : -kInf;
            e += m(x, y) * std::log(w.w(x, y));
          }
    }
    return iq - lam * e;
  };
  // elementary moves m += eps (e_xy + e_x'y' - e_xy' - e_x'y) keep marginals
  double cur = objective(q);
  for (int pass = 0; pass < 60; ++pass) {
    double improved = 0.0;
    for (int x = 0; x < nx - 1; ++x)
      for (int xp = x + 1; xp < nx; ++xp)
        for (int y = 0; y < ny - 1; ++y)
          for (int yp = y + 1; yp < ny; ++yp) {
            const double lo = -std::min(q(x, y), q(xp, yp));
            const double hi = std::min(q(x, yp), q(xp, y));
            if (hi - lo < 1e-14) continue;
            auto line = [&](double eps) {
              Eigen::MatrixXd m = q;
              m(x, y) += eps;
              m(xp, yp) += eps;
              m(x, yp) -= eps;
              m(xp, y) -= eps;
              return objective(m.cwiseMax(0.0));
            };
            const ScalarMin mres = golden_min(line, lo, hi, 1e-12);
            if (mres.value < cur - 1e-14) {
              improved += cur - mres.value;
              q(x, y) += mres.x;
              q(xp, yp) += mres.x;
              q(x, yp) -= mres.x;
              q(xp, y) -= mres.x;
              q = q.cwiseMax(0.0);
              cur = mres.value;
            }
          }
    if (improved < 1e-13) break;
  }
  return cur;
}

double e_gallager(const Dmc& w_theta, const Dmc& w_theta_dprime, double s, double rho,
                  const Eigen::VectorXd& px, const GridSpec& spec) {
  if (s < 0.0 || rho < 0.0) throw std::domain_error("e_gallager: negative multiplier");
  if (rho == 0.0 && s > 0.0) throw std::domain_error("e_gallager: rho = 0 with s > 0");
  if (w_theta.ny() != w_theta_dprime.ny() || w_theta.nx() != w_theta_dprime.nx())
    throw std::invalid_argument("e_gallager: channel shape mismatch");
  const int ny = w_theta.ny();
  const double lam1 = 1.0 - s;
  auto value_at = [&](const Eigen::VectorXd& qy) {
    double v = f_term(qy, lam1, w_theta, px);
    if (rho > 0.0) v += rho * f_term(qy, s / rho, w_theta_dprime, px);
    return v - entropy(qy);
  };
  if (ny == 2) {
    auto at_qy0 = [&](double qy0) {
      Eigen::VectorXd qy(2);
      qy << qy0, 1.0 - qy0;
      return value_at(qy);
    };
    return grid_golden_min(at_qy0, 1e-9, 1.0 - 1e-9, std::max(33, spec.qy_grid / 4), 1e-10)
        .value;
  }

  // simplex lattice, then pairwise-transfer polish from the incumbent
  const int steps = ny == 3 ? 24 : 14;
  Eigen::VectorXd best_qy = Eigen::VectorXd::Constant(ny, 1.0 / ny);
  double best = value_at(best_qy);
  std::vector<int> comp(ny, 0);
  std::function<void(int, int)> enumerate = [&](int pos, int left) {
    if (pos == ny - 1) {
      comp[pos] = left;
      Eigen::VectorXd qy(ny);
      for (int y = 0; y < ny; ++y) qy[y] = (comp[y] + 1e-6) / (steps + ny * 1e-6);
      const double v = value_at(qy);
      if (v < best) {
        best = v;
        best_qy = qy;
      }
      return;
    }
    for (int k = 0; k <= left; ++k) {
      comp[pos] = k;
      enumerate(pos + 1, left - k);
    }
  };
  enumerate(0, steps);
  for (int pass = 0; pass < 8; ++pass) {
    double improved = 0.0;
    for (int a = 0; a < ny - 1; ++a)
      for (int b = a + 1; b < ny; ++b) {
        auto line = [&](double eps) {
          Eigen::VectorXd qy = best_qy;
          qy[a] += eps;
          qy[b] -= eps;
          if (qy[a] < 1e-9 || qy[b] < 1e-9) return kInf;
          return value_at(qy);
        };
        const double lo = -(best_qy[a] - 1e-9), hi = best_qy[b] - 1e-9;
        const ScalarMin m = golden_min(line, lo, hi, 1e-9);
        if (m.value < best - 1e-12) {
          improved += best - m.value;
          best_qy[a] += m.x;
          best_qy[b] -= m.x;
          best = m.value;
        }
      }
    if (improved < 1e-11) break;
  }
  return best;
}

LowerBoundResult xi_lower(double r, double t, const ChannelFamily& family,
                          const GridSpec& spec) {
  return xi_lower(r, t, family, compute_family_exponents(family, r, t), spec);
}

LowerBoundResult xi_lower(double r, double t, const ChannelFamily& family,
                          const FamilyExponents& fe, const GridSpec& spec) {
  LowerBoundResult out;
  const std::vector<int> pos = positive_members(fe);
  const int n = family.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!fe.positive[i] || !fe.positive[j]) out.diag.skipped_pairs.push_back({i, j});
  if (pos.empty()) {
    out.degenerate = true;
    return out;
  }

  const bool fast = bsc_uniform(family);
  struct PairBest {
    double ratio = kInf;
    double s = 0.0, rho = 0.0;
    int i = -1, j = -1;
  };

  const int np = static_cast<int>(pos.size());
  std::vector<PairBest> per_pair(static_cast<std::size_t>(np) * np);

  auto solve_pair = [&](int a, int b) {
    const int i = pos[a], j = pos[b];
    const double e1i = fe.e1[i], e1j = fe.e1[j];
    auto num_at = [&](double s, double rho) {
      if (fast)
        return e_gallager_bsc(family.thetas[i], family.thetas[j], s, rho) - rho * r - s * t;
      return e_gallager(family.channel(i), family.channel(j), s, rho, family.px, spec) -
             rho * r - s * t;
    };
    double lo_s = 0.0, hi_s = 1.0, lo_r = 0.0, hi_r = 1.0;
    PairBest best{-kInf, 0.0, 0.0, i, j};
    int grid = fast ? std::max(9, spec.srho_grid) : std::min(41, std::max(9, spec.srho_grid));
    for (int round = 0; round <= spec.refine_rounds; ++round) {
      for (int ri = 0; ri < grid; ++ri) {
        const double rho = lo_r + (hi_r - lo_r) * ri / (grid - 1);
        for (int si = 0; si < grid; ++si) {
          const double s = lo_s + (hi_s - lo_s) * si / (grid - 1);
          if (s > rho + 1e-15) continue;
          const double den = (1.0 - s) * e1i + s * e1j;
          if (den < 1e-14) continue;
          const double ratio = num_at(s, rho) / den;
          if (ratio > best.ratio) best = {ratio, s, rho, i, j};
        }
      }
      const double ds = (hi_s - lo_s) / (grid - 1), dr = (hi_r - lo_r) / (grid - 1);
      lo_s = std::max(0.0, best.s - 2 * ds);
      hi_s = std::min(1.0, best.s + 2 * ds);
      lo_r = std::max(0.0, best.rho - 2 * dr);
      hi_r = std::min(1.0, best.rho + 2 * dr);
      grid = fast ? 41 : 21;
    }
    return best;
  };

  const int threads = resolve_threads(spec.threads);
  parallel_chunks(static_cast<std::int64_t>(np) * np, threads,
                  [&](int, std::int64_t b, std::int64_t e) {
                    for (std::int64_t k = b; k < e; ++k)
                      per_pair[static_cast<std::size_t>(k)] =
                          solve_pair(static_cast<int>(k / np), static_cast<int>(k % np));
                  });

  PairBest best;
  for (const PairBest& pb : per_pair)
    if (pb.ratio < best.ratio) best = pb;  // strict: earliest pair wins ties

  out.xi = best.ratio;
  out.diag.theta_star = best.i;
  out.diag.theta_dprime_star = best.j;
  out.diag.s_star = best.s;
  out.diag.rho_star = best.rho;
  out.diag.constrained_value = best.ratio;
  return out;
}

double psi(double r, double t, int theta, int theta_prime, int theta_dprime,
           const JointDist& q, const JointDist& qt, double rho, double s, double xi,
           const ChannelFamily& family, const FamilyExponents& fe) {
  if (q.nx() != qt.nx() || q.ny() != qt.ny())
    throw std::invalid_argument("psi: pair shape mismatch");
  const double d = joint_divergence(qt, family.px, family.channel(theta));
  const double bracket = expected_log_w(qt, family.channel(theta_prime)) +
                         xi_e1(xi, fe.e1[theta_prime]) -
                         expected_log_w(q, family.channel(theta_dprime)) -
                         xi_e1(xi, fe.e1[theta_dprime]) - t;
  return d + rho * (mutual_information(q) - r) + s * bracket - xi_e1(xi, fe.e1[theta]);
}

SaddleDiagnostics gap_diagnostics(double r, double t, const ChannelFamily& family,
                                  const FamilyExponents& fe, double xi, const GridSpec& spec,
                                  bool with_xi_crit) {
  SaddleDiagnostics out;
  const std::vector<int> pos = positive_members(fe);
  const int n = family.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!fe.positive[i] || !fe.positive[j]) out.skipped_pairs.push_back({i, j});
  if (pos.empty()) return out;

  auto min_over_pairs = [&](bool constrained, double at_xi, SaddlePoint* arg, int* ti, int* tj) {
    double best = kInf;
    for (int i : pos)
      for (int j : pos) {
        const SaddlePoint sp = pair_saddle(family, fe, pos, i, j, r, t, at_xi, constrained, spec);
        if (sp.value < best) {
          best = sp.value;
          if (arg) *arg = sp;
          if (ti) *ti = i;
          if (tj) *tj = j;
        }
      }
    return best;
  };

  SaddlePoint cons, rel;
  int ci = -1, cj = -1, ri = -1, rj = -1;
  out.constrained_value = min_over_pairs(true, xi, &cons, &ci, &cj);
  out.relaxed_value = min_over_pairs(false, xi, &rel, &ri, &rj);
  out.s_star = cons.s;
  out.rho_star = cons.rho;
  out.s_star_relaxed = rel.s;
  out.rho_star_relaxed = rel.rho;
  out.theta_star = ri;
  out.theta_dprime_star = rj;
  out.theta_prime_star = rel.theta_prime;
  out.constraint_active = rel.s > rel.rho + 1e-9;
  out.theta_prime_differs = rel.theta_prime != ri;
  out.s_cap_hit = rel.s > spec.s_max - 1e-6;

  if (with_xi_crit) {
    // largest xi at which the relaxed condition still holds
    const double tol = 1e-9;
    double found = -1.0;
    for (double x = 1.0; x >= -1e-12; x -= 1e-3) {
      if (min_over_pairs(false, std::max(0.0, x), nullptr, nullptr, nullptr) >= -tol) {
        found = std::max(0.0, x);
        break;
      }
    }
    if (found >= 0.0) {
      const double hi = std::min(1.0, found + 1e-3);
      out.xi_crit_relaxed = bisect_largest_true(
          [&](double x) {
            return min_over_pairs(false, x, nullptr, nullptr, nullptr) >= -tol;
          },
          found, hi, 1e-6);
    }
  }
  return out;
}

}  // namespace elab
