#include "elab/known_exponents.hpp"

#include "elab/optimize.hpp"
#include "pair_pgd.hpp"
#include "transport2.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace elab {

namespace {

using detail::AffineElogw;
using detail::affine_sublevel;
using detail::div2;
using detail::elogw2;
using detail::elogw_line;
using detail::i_sublevel;
using detail::Interval;
using detail::joint2;
using detail::mutual_info2;
using detail::zbox;
using detail::ZBox;

struct Candidate {
  double value = kInf;
  double qy0 = 0.0, z = 0.0, zt = 0.0;
};

// min of D(Qt || px x W) for zt in [lo,hi]; D is convex in zt.
ScalarMin min_div_on(double px0, double qy0, const Dmc& w, double lo, double hi, double tol) {
  return golden_min([&](double z) { return div2(px0, qy0, z, w); }, lo, hi, tol);
}

Interval feasible_zt(double px0, double qy0, const Dmc& w, const AffineElogw& line, double bound,
                     const ZBox& box) {
  if (line.finite) return affine_sublevel(line, bound, box);
  // zero transitions: dense feasibility scan
  Interval iv{1.0, 0.0};
  const int n = 801;
  double lo = kInf, hi = -kInf;
  for (int i = 0; i < n; ++i) {
    const double zt = box.lo + (box.hi - box.lo) * i / (n - 1);
    if (elogw2(px0, qy0, zt, w) <= bound + 1e-12) {
      lo = std::min(lo, zt);
      hi = std::max(hi, zt);
    }
  }
  if (std::isfinite(lo)) iv = {lo, hi};
  return iv;
}

// E_a at a fixed shared output marginal: hard I(Q) >= r, linear omega_hat.
Candidate e_a_2x2_at_qy(double px0, double qy0, const ExponentQuery& q,
                        const GeneralSolverOptions& opt) {
  Candidate best;
  const ZBox box = zbox(px0, qy0);
  if (!box.ok() || box.hi - box.lo < 1e-14) return best;
  const AffineElogw line = elogw_line(px0, qy0, q.w);

  const Interval isub = i_sublevel(px0, qy0, q.r, box);  // {I <= r}
  std::vector<std::pair<double, double>> segs;           // {I >= r} pieces
  if (isub.empty()) {
    segs.push_back({box.lo, box.hi});
  } else {
    if (isub.lo > box.lo + 1e-15) segs.push_back({box.lo, isub.lo});
    if (isub.hi < box.hi - 1e-15) segs.push_back({isub.hi, box.hi});
    if (segs.empty()) {
      if (mutual_info2(px0, qy0, box.lo) >= q.r - 1e-12) segs.push_back({box.lo, box.lo});
      if (mutual_info2(px0, qy0, box.hi) >= q.r - 1e-12) segs.push_back({box.hi, box.hi});
    }
  }

  // unconstrained divergence minimizer; constrained minima clamp to it
  const ScalarMin dmin = min_div_on(px0, qy0, q.w, box.lo, box.hi, opt.golden_tol);
  auto eval_z = [&](double z) -> std::pair<double, double> {  // (value, zt)
    const double eq = line.finite ? line.at(z) : elogw2(px0, qy0, z, q.w);
    const Interval iv = feasible_zt(px0, qy0, q.w, line, q.t + eq, box);
    if (iv.empty()) return {kInf, 0.0};
    const double zt = std::min(std::max(dmin.x, iv.lo), iv.hi);
    const double d = zt == dmin.x ? dmin.value : div2(px0, qy0, zt, q.w);
    return {d + mutual_info2(px0, qy0, z) - q.r, zt};
  };

  for (auto [a, b] : segs) {
    const int n = std::max(3, opt.z_grid);
    double seg_best = kInf, seg_z = a;
    for (int i = 0; i < n; ++i) {
      const double z = (b > a) ? a + (b - a) * i / (n - 1) : a;
      const auto [v, zt] = eval_z(z);
      if (v < seg_best) {
        seg_best = v;
        seg_z = z;
        if (v < best.value) best = {v, qy0, z, zt};
      }
      if (b <= a) break;
    }
    if (std::isfinite(seg_best) && b > a) {
      const double step = (b - a) / (n - 1);
      const ScalarMin m = golden_min([&](double z) { return eval_z(z).first; },
                                     std::max(a, seg_z - step), std::min(b, seg_z + step), 1e-9);
      if (m.value < best.value) best = {m.value, qy0, m.x, eval_z(m.x).second};
    }
  }
  return best;
}

Candidate e_b_2x2_at_qy(double px0, double qy0, const ExponentQuery& q,
                        const GeneralSolverOptions& opt) {
  Candidate best;
  const ZBox box = zbox(px0, qy0);
  if (!box.ok() || box.hi - box.lo < 1e-14) return best;
  const AffineElogw line = elogw_line(px0, qy0, q.w);

  // inner max over {I <= r} of E_Q log W - I(Q): concave in z
  const Interval isub = i_sublevel(px0, qy0, q.r, box);
  if (isub.empty()) return best;
  auto neg_inner = [&](double z) {
    const double e = line.finite ? line.at(z) : elogw2(px0, qy0, z, q.w);
    if (!std::isfinite(e)) return kInf;
    return -(e - mutual_info2(px0, qy0, z));
  };
  const ScalarMin inner = grid_golden_min(neg_inner, isub.lo, isub.hi, 257, opt.golden_tol);
  if (!std::isfinite(inner.value)) return best;
  const double bound = q.r + q.t - inner.value;

  const Interval iv = feasible_zt(px0, qy0, q.w, line, bound, box);
  if (iv.empty()) return best;
  const ScalarMin m = min_div_on(px0, qy0, q.w, iv.lo, iv.hi, opt.golden_tol);
  best = {m.value, qy0, inner.x, m.x};
  return best;
}

template <typename PerQy>
Candidate sweep_qy(const PerQy& per_qy, const GeneralSolverOptions& opt) {
  Candidate best;
  double lo = 1e-9, hi = 1.0 - 1e-9;
  int n = std::max(9, opt.qy_grid);
  for (int round = 0; round <= opt.refine_rounds; ++round) {
    Candidate round_best;
    for (int i = 0; i < n; ++i) {
      const double qy0 = lo + (hi - lo) * i / (n - 1);
      const Candidate c = per_qy(qy0);
      if (c.value < round_best.value) round_best = c;
    }
    if (round_best.value < best.value) best = round_best;
    if (!std::isfinite(best.value)) break;
    const double step = (hi - lo) / (n - 1);
    lo = std::max(1e-9, best.qy0 - 2.0 * step);
    hi = std::min(1.0 - 1e-9, best.qy0 + 2.0 * step);
    n = 33;
  }
  return best;
}

MarginalPair pair_from(double px0, double qy0, double z, double zt) {
  return {JointDist(joint2(px0, qy0, z)), JointDist(joint2(px0, qy0, zt))};
}

void validate_query(const ExponentQuery& q) {
  if (q.r < 0) throw std::domain_error("exponent query: r < 0");
  if (!is_distribution(q.px, 1e-9)) throw std::invalid_argument("exponent query: px invalid");
  if (q.px.size() != q.w.nx()) throw std::invalid_argument("exponent query: px/W shape mismatch");
}

}  // namespace

double omega_hat(const JointDist& q, const JointDist& qt, const Dmc& w, double t) {
  const double a = expected_log_w(qt, w);
  const double b = expected_log_w(q, w);
  if (a == -kInf && b == -kInf) return -t;
  return a - b - t;
}

BranchResult e_a_general(const ExponentQuery& query, const GeneralSolverOptions& opt) {
  validate_query(query);
  if (query.w.nx() == 2 && query.w.ny() == 2) {
    const double px0 = query.px[0];
    const Candidate c =
        sweep_qy([&](double qy0) { return e_a_2x2_at_qy(px0, qy0, query, opt); }, opt);
    if (!std::isfinite(c.value)) return {};
    return {std::max(0.0, c.value), pair_from(px0, c.qy0, c.z, c.zt)};
  }
  const auto& q = query;
  auto obj = [&](const JointDist& Q, const JointDist& Qt) {
    const double d = joint_divergence(Qt, q.px, q.w);
    if (!std::isfinite(d)) return kInf;
    return d + mutual_information(Q) - q.r;
  };
  std::vector<detail::PairFn> cons = {
      [&](const JointDist& Q, const JointDist&) { return q.r - mutual_information(Q); },
      [&](const JointDist& Q, const JointDist& Qt) { return omega_hat(Q, Qt, q.w, q.t); }};
  auto res = detail::pair_pgd_minimize(q.px, q.w, obj, cons, opt);
  if (!res.feasible) return {};
  return {std::max(0.0, res.value), MarginalPair{res.q, res.qt}};
}

BranchResult e_b_general(const ExponentQuery& query, const GeneralSolverOptions& opt) {
  validate_query(query);
  if (query.w.nx() == 2 && query.w.ny() == 2) {
    const double px0 = query.px[0];
    const Candidate c =
        sweep_qy([&](double qy0) { return e_b_2x2_at_qy(px0, qy0, query, opt); }, opt);
    if (!std::isfinite(c.value)) return {};
    return {std::max(0.0, c.value), pair_from(px0, c.qy0, c.z, c.zt)};
  }
  // Q acts as a feasibility witness: Qt is in the bound set iff some Q with
  // I(Q) <= r satisfies E_Qt log W <= r + t + E_Q log W - I(Q).
  const auto& q = query;
  auto obj = [&](const JointDist&, const JointDist& Qt) {
    return joint_divergence(Qt, q.px, q.w);
  };
  std::vector<detail::PairFn> cons = {
      [&](const JointDist& Q, const JointDist&) { return mutual_information(Q) - q.r; },
      [&](const JointDist& Q, const JointDist& Qt) {
        const double et = expected_log_w(Qt, q.w);
        const double e = expected_log_w(Q, q.w);
        if (et == -kInf) return -kInf;
        if (e == -kInf) return kInf;
        return et - (q.r + q.t + e - mutual_information(Q));
      }};
  auto res = detail::pair_pgd_minimize(q.px, q.w, obj, cons, opt);
  if (!res.feasible) return {};
  return {std::max(0.0, res.value), MarginalPair{res.q, res.qt}};
}

ExponentResult e1_general(const ExponentQuery& query, const GeneralSolverOptions& opt) {
  const BranchResult a = e_a_general(query, opt);
  const BranchResult b = e_b_general(query, opt);
  ExponentResult out;
  if (a.value <= b.value) {
    out.e1 = a.value;
    out.branch = std::isfinite(a.value) ? ExponentBranch::a : ExponentBranch::none;
    out.minimizer = a.minimizer;
  } else {
    out.e1 = b.value;
    out.branch = ExponentBranch::b;
    out.minimizer = b.minimizer;
  }
  out.e2 = e2_from_e1(out.e1, query.t);
  return out;
}

// ---------------------------------------------------------------------------
// BSC specializations
// ---------------------------------------------------------------------------

double e_a_bsc(double r, double t, double theta) {
  if (theta <= 0.0 || theta >= 1.0) throw std::domain_error("e_a_bsc: theta outside (0,1)");
  if (r < 0.0 || r > kLog2) throw std::domain_error("e_a_bsc: r outside [0, log2]");
  if (theta > 0.5) theta = 1.0 - theta;  // output relabeling
  const double b = beta_slope(theta);
  if (std::abs(b) < 1e-9 && t != 0.0)
    throw std::domain_error("e_a_bsc: theta = 1/2 with nonzero threshold");
  const double shift = (t == 0.0) ? 0.0 : t / b;
  const double dgv = gv_distance(r);
  // the inner min over q <= qt + shift is empty when qt + shift < 0
  const double lo = std::max(theta, -shift);
  const double hi = dgv - shift;
  if (lo > hi) return kInf;
  auto obj = [&](double qt) {
    const double arg = std::min(0.5, std::max(0.0, qt + shift));
    return binary_divergence(qt, theta) - binary_entropy(arg) + kLog2 - r;
  };
  return std::max(0.0, grid_golden_min(obj, lo, hi, 2001, 1e-10).value);
}

double e_b_bsc(double r, double t, double theta) {
  if (theta <= 0.0 || theta >= 1.0) throw std::domain_error("e_b_bsc: theta outside (0,1)");
  if (r < 0.0 || r > kLog2) throw std::domain_error("e_b_bsc: r outside [0, log2]");
  if (theta > 0.5) theta = 1.0 - theta;
  const double b = beta_slope(theta);
  if (std::abs(b) < 1e-9) throw std::domain_error("e_b_bsc: theta = 1/2");
  const double dgv = gv_distance(r);
  // inner max over {q : h(q) >= log2 - r} of -q b + h(q): concave with
  // stationary point at q = theta, so the maximizer clamps to the interval
  const double qstar = std::min(std::max(theta, dgv), 1.0 - dgv);
  const double bound = r + t + (-qstar * b + binary_entropy(qstar) - kLog2);
  // feasible: -qt b <= bound  =>  qt >= -bound/b
  const double lo = -bound / b;
  if (lo > 1.0) return kInf;
  if (theta >= lo) return 0.0;
  return binary_divergence(lo, theta);
}

ExponentResult e1_bsc(double r, double t, double theta) {
  if (theta <= 0.0 || theta >= 1.0) throw std::domain_error("e1_bsc: theta outside (0,1)");
  const double th_eff = theta > 0.5 ? 1.0 - theta : theta;
  if (std::abs(beta_slope(th_eff)) < 1e-9) {
    // theta = 1/2: the one-dimensional form divides by beta; fall back to the
    // equivalent 2x2 DMC
    ExponentQuery q;
    q.r = r;
    q.t = t;
    q.w = Dmc::bsc(theta);
    q.px = Eigen::Vector2d(0.5, 0.5);
    return e1_general(q);
  }
  const double ea = e_a_bsc(r, t, theta);
  const double eb = e_b_bsc(r, t, theta);
  ExponentResult out;
  if (ea <= eb) {
    out.e1 = ea;
    out.branch = std::isfinite(ea) ? ExponentBranch::a : ExponentBranch::none;
  } else {
    out.e1 = eb;
    out.branch = ExponentBranch::b;
  }
  out.e2 = e2_from_e1(out.e1, t);
  if (std::isfinite(out.e1)) {
    if (out.branch == ExponentBranch::a) {
      const double b = beta_slope(th_eff);
      const double shift = (t == 0.0) ? 0.0 : t / b;
      const double dgv = gv_distance(r);
      auto obj = [&](double qt) {
        const double arg = std::min(0.5, std::max(0.0, qt + shift));
        return binary_divergence(qt, th_eff) - binary_entropy(arg) + kLog2 - r;
      };
      out.qtilde_star =
          grid_golden_min(obj, std::max(th_eff, -shift), dgv - shift, 2001, 1e-10).x;
    } else {
      const double b = beta_slope(th_eff);
      const double dgv = gv_distance(r);
      const double qstar = std::min(std::max(th_eff, dgv), 1.0 - dgv);
      const double bound = r + t + (-qstar * b + binary_entropy(qstar) - kLog2);
      out.qtilde_star = std::max(th_eff, -bound / b);
    }
  }
  return out;
}

}  // namespace elab
