#include "elab/universal_fraction.hpp"

#include "elab/optimize.hpp"
#include "pair_pgd.hpp"
#include "transport2.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace elab {

namespace {

constexpr double kPosTol = 1e-12;
constexpr double kBetaTiny = 1e-12;

std::vector<int> positive_members(const FamilyExponents& fe) {
  std::vector<int> out;
  for (std::size_t i = 0; i < fe.positive.size(); ++i)
    if (fe.positive[i]) out.push_back(static_cast<int>(i));
  return out;
}

// xi * e1 with the xi = 0 convention (unnormalized form)
double xi_e1(double xi, double e1) { return xi == 0.0 ? 0.0 : xi * e1; }

// ---------------------------------------------------------------------------
// General (joint-distribution) route for condition A, 2x2 alphabets.
// Inner problem per channel theta_i:
//   min over (Q, Qt) sharing marginals with Omega(xi, Q, Qt) <= 0 of
//   D(Qt || px x W_i) + |I(Q) - r|^+ .
// The I >= r constraint of the defining set enters through its Lagrangian
// relaxation over rho in [0,1], matching the scalar route; the
// hard-constrained variant never binds.
// ---------------------------------------------------------------------------

struct EnvelopeLines {
  // per positive member: E_Q log W_j as an affine function of z, plus weight
  std::vector<detail::AffineElogw> lines;
  std::vector<double> weights;  // xi e1_j + t
  std::vector<const Dmc*> ws;   // fallback when a line is not finite
  bool all_finite = true;
};

EnvelopeLines make_envelope(double xi, double t, const ChannelFamily& family,
                            const FamilyExponents& fe, const std::vector<int>& pos,
                            double px0, double qy0) {
  EnvelopeLines env;
  env.lines.reserve(pos.size());
  env.weights.reserve(pos.size());
  for (int j : pos) {
    env.lines.push_back(detail::elogw_line(px0, qy0, family.channel(j)));
    env.weights.push_back(xi_e1(xi, fe.e1[static_cast<std::size_t>(j)]) + t);
    env.ws.push_back(&family.channel(j));
    if (!env.lines.back().finite) env.all_finite = false;
  }
  return env;
}

double envelope_at(const EnvelopeLines& env, double px0, double qy0, double z) {
  double g = -kInf;
  for (std::size_t j = 0; j < env.lines.size(); ++j) {
    const double e = env.lines[j].finite ? env.lines[j].at(z)
                                         : detail::elogw2(px0, qy0, z, *env.ws[j]);
    if (e == -kInf) continue;
    g = std::max(g, env.weights[j] + e);
  }
  return g;
}

// {z in box : envelope(z) <= bound}; the envelope is convex in z. When every
// line is finite the set is an exact intersection of half-lines.
detail::Interval envelope_sublevel(const EnvelopeLines& env, double px0, double qy0,
                                   double bound, const detail::ZBox& box) {
  if (env.all_finite) {
    double lo = box.lo, hi = box.hi;
    for (std::size_t j = 0; j < env.lines.size(); ++j) {
      const double c1 = env.lines[j].c1;
      const double c0 = env.weights[j] + env.lines[j].c0;
      if (std::abs(c1) < 1e-15) {
        if (c0 > bound + 1e-14) return {1.0, 0.0};
        continue;
      }
      const double zc = (bound - c0) / c1;
      if (c1 > 0)
        hi = std::min(hi, zc);
      else
        lo = std::max(lo, zc);
    }
    if (hi < lo) return {1.0, 0.0};
    return {lo, hi};
  }
  auto g = [&](double z) { return envelope_at(env, px0, qy0, z); };
  const ScalarMin m = golden_min(g, box.lo, box.hi, 1e-12);
  if (m.value > bound + 1e-14) return {1.0, 0.0};
  double lo = box.lo, hi = box.hi;
  if (g(box.lo) > bound) {
    double a = box.lo, b = m.x;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      if (g(mid) > bound)
        a = mid;
      else
        b = mid;
    }
    lo = 0.5 * (a + b);
  }
  if (g(box.hi) > bound) {
    double a = m.x, b = box.hi;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      if (g(mid) <= bound)
        a = mid;
      else
        b = mid;
    }
    hi = 0.5 * (a + b);
  }
  return {lo, hi};
}

double condition_a_inner_2x2(double xi, double r, double t, const ChannelFamily& family,
                             const FamilyExponents& fe, const std::vector<int>& pos,
                             int theta_idx, const GeneralSolverOptions& opt) {
  const double px0 = family.px[0];
  const Dmc& w_i = family.channel(theta_idx);

  struct Best {
    double value = kInf;
    double qy0 = 0.5;
  } best;

  auto at_qy = [&](double qy0) {
    double local = kInf;
    const detail::ZBox box = detail::zbox(px0, qy0);
    if (!box.ok() || box.hi - box.lo < 1e-14) return local;
    const EnvelopeLines env = make_envelope(xi, t, family, fe, pos, px0, qy0);
    // unconstrained divergence minimizer; constrained minima clamp to it
    const ScalarMin dmin = golden_min(
        [&](double zt) { return detail::div2(px0, qy0, zt, w_i); }, box.lo, box.hi,
        opt.golden_tol);
    auto eval_z = [&](double z) {
      const double gq = envelope_at(env, px0, qy0, z);
      if (gq == -kInf) return kInf;
      const detail::Interval iv = envelope_sublevel(env, px0, qy0, t + gq, box);
      if (iv.empty()) return kInf;
      const double zt = std::min(std::max(dmin.x, iv.lo), iv.hi);
      const double d = zt == dmin.x ? dmin.value : detail::div2(px0, qy0, zt, w_i);
      const double pen = std::max(0.0, detail::mutual_info2(px0, qy0, z) - r);
      return d + pen;
    };
    const int n = std::max(9, opt.z_grid);
    double bz = box.lo;
    for (int i = 0; i < n; ++i) {
      const double z = box.lo + (box.hi - box.lo) * i / (n - 1);
      const double v = eval_z(z);
      if (v < local) {
        local = v;
        bz = z;
      }
    }
    if (std::isfinite(local)) {
      const double step = (box.hi - box.lo) / (n - 1);
      const ScalarMin m = golden_min(eval_z, std::max(box.lo, bz - step),
                                     std::min(box.hi, bz + step), 1e-9);
      local = std::min(local, m.value);
    }
    return local;
  };

  double lo = 1e-9, hi = 1.0 - 1e-9;
  int n = std::max(9, opt.qy_grid);
  for (int round = 0; round <= opt.refine_rounds; ++round) {
    double round_best = kInf, round_qy = 0.5;
    for (int i = 0; i < n; ++i) {
      const double qy0 = lo + (hi - lo) * i / (n - 1);
      const double v = at_qy(qy0);
      if (v < round_best) {
        round_best = v;
        round_qy = qy0;
      }
    }
    if (round_best < best.value) best = {round_best, round_qy};
    if (!std::isfinite(best.value)) break;
    const double step = (hi - lo) / (n - 1);
    lo = std::max(1e-9, best.qy0 - 2.0 * step);
    hi = std::min(1.0 - 1e-9, best.qy0 + 2.0 * step);
    n = 33;
  }
  return best.value;
}

double condition_a_inner_pgd(double xi, double r, double t, const ChannelFamily& family,
                             const FamilyExponents& fe, int theta_idx,
                             const GeneralSolverOptions& opt) {
  const Dmc& w_i = family.channel(theta_idx);
  auto obj = [&](const JointDist&, const JointDist& Qt) {
    return joint_divergence(Qt, family.px, w_i);
  };
  auto merged = [&](const JointDist& Q, const JointDist& Qt) {
    const double d = obj(Q, Qt);
    if (!std::isfinite(d)) return kInf;
    return d + std::max(0.0, mutual_information(Q) - r);
  };
  std::vector<detail::PairFn> cons = {[&](const JointDist& Q, const JointDist& Qt) {
    return omega_universal(xi, r, t, family, fe, Q, Qt);
  }};
  auto res = detail::pair_pgd_minimize(family.px, w_i, merged, cons, opt);
  return res.feasible ? res.value : kInf;
}

// ---------------------------------------------------------------------------
// BSC scalar route: crossover-parameter reduction of the conditions.
// ---------------------------------------------------------------------------

struct BscEnvelope {
  std::vector<double> a;     // xi e1_j + log(1 - theta_j), positive members
  std::vector<double> beta;  // beta(theta_j)
};

BscEnvelope bsc_envelope(double xi, const ChannelFamily& family, const FamilyExponents& fe,
                         const std::vector<int>& pos) {
  BscEnvelope env;
  env.a.reserve(pos.size());
  env.beta.reserve(pos.size());
  for (int j : pos) {
    const double th = family.thetas[static_cast<std::size_t>(j)];
    env.a.push_back(xi_e1(xi, fe.e1[static_cast<std::size_t>(j)]) + std::log(1.0 - th));
    env.beta.push_back(beta_slope(th));
  }
  return env;
}

double envelope_m(const BscEnvelope& env, double q) {
  double m = -kInf;
  for (std::size_t j = 0; j < env.a.size(); ++j) m = std::max(m, env.a[j] - env.beta[j] * q);
  return m;
}

QBoundaries boundaries_from_envelope(const BscEnvelope& env, double t, double qtilde) {
  const double m = envelope_m(env, qtilde);
  QBoundaries b;
  double q1 = -kInf, q2 = kInf;
  for (std::size_t j = 0; j < env.a.size(); ++j) {
    const double c = env.a[j] + t - m;
    if (std::abs(env.beta[j]) < kBetaTiny) {
      if (c >= 0) b.all_feasible = true;
    } else if (env.beta[j] > 0) {
      q1 = std::max(q1, c / env.beta[j]);
    } else {
      q2 = std::min(q2, c / env.beta[j]);
    }
  }
  if (q1 > -kInf) b.q1 = q1;
  if (q2 < kInf) b.q2 = q2;
  return b;
}

// |log2 - r - g(q1*, q2*)|^+ ; +inf when the feasible q set is empty.
double penalty_from_boundaries(const QBoundaries& b, double r) {
  if (b.all_feasible) return 0.0;
  double g = -kInf;
  if (b.q1 && *b.q1 >= 0.0)
    g = std::max(g, *b.q1 >= 0.5 ? kLog2 : binary_entropy(std::min(*b.q1, 1.0)));
  if (b.q2 && *b.q2 <= 1.0)
    g = std::max(g, *b.q2 <= 0.5 ? kLog2 : binary_entropy(std::max(*b.q2, 0.0)));
  if (g == -kInf) return kInf;
  return std::max(0.0, kLog2 - r - g);
}

double condition_a_lhs_bsc(double xi, double r, double t, const ChannelFamily& family,
                           const FamilyExponents& fe, double q_step, int* argmax) {
  const std::vector<int> pos = positive_members(fe);
  if (pos.empty()) return -kInf;
  const BscEnvelope env = bsc_envelope(xi, family, fe, pos);

  const int nq = std::max(3, static_cast<int>(std::lround(1.0 / q_step)) + 1);
  std::vector<double> qs(nq), pens(nq);
  for (int i = 0; i < nq; ++i) {
    qs[i] = static_cast<double>(i) / (nq - 1);
    pens[i] = penalty_from_boundaries(boundaries_from_envelope(env, t, qs[i]), r);
  }

  double lhs = -kInf;
  for (int i : pos) {
    const double th = family.thetas[static_cast<std::size_t>(i)];
    double inner = kInf;
    int best_k = 0;
    for (int k = 0; k < nq; ++k) {
      const double v = binary_divergence(qs[k], th) + pens[k];
      if (v < inner) {
        inner = v;
        best_k = k;
      }
    }
    if (std::isfinite(inner)) {
      auto objf = [&](double q) {
        return binary_divergence(q, th) +
               penalty_from_boundaries(boundaries_from_envelope(env, t, q), r);
      };
      const double lo = qs[std::max(0, best_k - 2)];
      const double hi = qs[std::min(nq - 1, best_k + 2)];
      inner = std::min(inner, golden_min(objf, lo, hi, 1e-11).value);
    }
    const double term = xi_e1(xi, fe.e1[static_cast<std::size_t>(i)]) - inner;
    if (term > lhs) {
      lhs = term;
      if (argmax) *argmax = i;
    }
  }
  return lhs;
}

// ---------------------------------------------------------------------------
// Line search shared by xi_star and xi_star_bsc.
// ---------------------------------------------------------------------------

struct ConditionEval {
  double lhs_a = 0.0, lhs_b = 0.0;
  int arg_a = -1, arg_b = -1;
};

FractionResult xi_line_search(const std::function<ConditionEval(double)>& eval,
                              const FamilyExponents& fe, const XiSearchOptions& opt) {
  FractionResult out;
  out.excluded_members = fe.excluded();
  if (fe.any_infinite) {
    out.degenerate = true;
    return out;
  }
  auto passes = [&](const ConditionEval& c) {
    return c.lhs_a <= opt.tol && c.lhs_b <= opt.tol;
  };

  const int steps = static_cast<int>(std::ceil(1.0 / opt.xi_step));
  double found = -1.0;
  ConditionEval at_found;
  for (int k = 0; k <= steps; ++k) {
    const double xi = std::max(0.0, 1.0 - k * opt.xi_step);
    const ConditionEval c = eval(xi);
    if (passes(c)) {
      found = xi;
      at_found = c;
      break;
    }
    if (xi == 0.0) break;
  }
  if (found < 0.0) {
    out.degenerate = true;
    return out;
  }

  double xi_ret = found;
  ConditionEval c_ret = at_found;
  if (found < 1.0) {
    // probe the bracketing cell for a single crossing before bisecting
    const double hi = std::min(1.0, found + opt.xi_step);
    bool single_crossing = true;
    bool seen_fail = false;
    for (int i = 1; i <= 10; ++i) {  // ascending through the cell
      const double xi = found + (hi - found) * i / 11.0;
      const bool p = passes(eval(xi));
      if (!p) seen_fail = true;
      if (p && seen_fail) {
        single_crossing = false;
        break;
      }
    }
    if (single_crossing) {
      const double refined = bisect_largest_true(
          [&](double xi) { return passes(eval(xi)); }, found, hi, opt.xi_step * 1e-3);
      xi_ret = refined;
      c_ret = eval(refined);
      if (!passes(c_ret)) {
        xi_ret = found;
        c_ret = at_found;
      }
    }
  }

  out.xi = xi_ret;
  out.slack_a = c_ret.lhs_a;
  out.slack_b = c_ret.lhs_b;
  if (c_ret.lhs_a >= c_ret.lhs_b + opt.tol) {
    out.active = ActiveCondition::a;
    out.argmax_theta = c_ret.arg_a;
  } else if (c_ret.lhs_b >= c_ret.lhs_a + opt.tol) {
    out.active = ActiveCondition::b;
    out.argmax_theta = c_ret.arg_b;
  } else {
    out.active = ActiveCondition::both;
    out.argmax_theta = c_ret.arg_a >= 0 ? c_ret.arg_a : c_ret.arg_b;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

bool ChannelFamily::uniform_px(double tol) const {
  if (px.size() == 0) return false;
  const double u = 1.0 / px.size();
  return (px.array() - u).abs().maxCoeff() <= tol;
}

ChannelFamily ChannelFamily::bsc_family(std::vector<double> thetas, Eigen::VectorXd px) {
  if (thetas.empty()) throw std::invalid_argument("family: empty theta grid");
  if (!is_distribution(px, 1e-9) || px.size() != 2)
    throw std::invalid_argument("family: px must be a binary distribution");
  ChannelFamily f;
  f.kind = Kind::bsc_grid;
  for (double th : thetas) {
    if (th <= 0.0 || th >= 1.0)
      throw std::invalid_argument("family: bsc theta outside (0,1); clamp before building");
    f.channels.push_back(Dmc::bsc(th));
  }
  f.thetas = std::move(thetas);
  f.px = std::move(px);
  return f;
}

ChannelFamily ChannelFamily::dmc_family(std::vector<Dmc> channels, Eigen::VectorXd px) {
  if (channels.empty()) throw std::invalid_argument("family: empty channel set");
  const int nx = channels.front().nx(), ny = channels.front().ny();
  for (const Dmc& w : channels)
    if (w.nx() != nx || w.ny() != ny)
      throw std::invalid_argument("family: members must share alphabets");
  if (!is_distribution(px, 1e-9) || px.size() != nx)
    throw std::invalid_argument("family: px invalid");
  ChannelFamily f;
  f.kind = Kind::dmc_set;
  f.channels = std::move(channels);
  f.px = std::move(px);
  return f;
}

int FamilyExponents::positive_count() const {
  int n = 0;
  for (char c : positive) n += c ? 1 : 0;
  return n;
}

std::vector<int> FamilyExponents::excluded() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < positive.size(); ++i)
    if (!positive[i]) out.push_back(static_cast<int>(i));
  return out;
}

FamilyExponents compute_family_exponents(const ChannelFamily& family, double r, double t,
                                         const GeneralSolverOptions& opt) {
  FamilyExponents fe;
  fe.r = r;
  fe.t = t;
  const int n = family.size();
  fe.e1.resize(n);
  fe.e_b.resize(n);
  fe.positive.resize(n);
  for (int i = 0; i < n; ++i) {
    if (family.kind == ChannelFamily::Kind::bsc_grid && family.uniform_px()) {
      const double th = family.thetas[static_cast<std::size_t>(i)];
      const ExponentResult res = e1_bsc(r, t, th);
      fe.e1[i] = res.e1;
      if (std::abs(beta_slope(std::min(th, 1.0 - th))) < 1e-9) {
        ExponentQuery q{r, t, family.channel(i), family.px};
        fe.e_b[i] = e_b_general(q, opt).value;
      } else {
        fe.e_b[i] = e_b_bsc(r, t, th);
      }
    } else {
      ExponentQuery q{r, t, family.channel(i), family.px};
      const ExponentResult res = e1_general(q, opt);
      fe.e1[i] = res.e1;
      fe.e_b[i] = e_b_general(q, opt).value;
    }
    fe.positive[i] = std::isfinite(fe.e1[i]) && fe.e1[i] > kPosTol;
    if (fe.e1[i] == kInf) fe.any_infinite = true;
  }
  return fe;
}

double g_value(double xi, double r, double t, const ChannelFamily& family,
               const FamilyExponents& fe, const JointDist& qt) {
  (void)r;
  double g = -kInf;
  for (int i = 0; i < family.size(); ++i) {
    const double e = expected_log_w(qt, family.channel(i));
    if (e == -kInf) continue;
    g = std::max(g, xi_e1(xi, fe.e1[static_cast<std::size_t>(i)]) + t + e);
  }
  return g;
}

double omega_universal(double xi, double r, double t, const ChannelFamily& family,
                       const FamilyExponents& fe, const JointDist& q, const JointDist& qt) {
  const double gt = g_value(xi, r, t, family, fe, qt);
  const double gq = g_value(xi, r, t, family, fe, q);
  if (gt == -kInf && gq == -kInf) return -t;
  return gt - gq - t;
}

double condition_a_lhs(double xi, double r, double t, const ChannelFamily& family,
                       const FamilyExponents& fe, const GeneralSolverOptions& opt) {
  const std::vector<int> pos = positive_members(fe);
  if (pos.empty()) return -kInf;
  double lhs = -kInf;
  for (int i : pos) {
    double inner;
    if (family.px.size() == 2 && family.channel(i).ny() == 2)
      inner = condition_a_inner_2x2(xi, r, t, family, fe, pos, i, opt);
    else
      inner = condition_a_inner_pgd(xi, r, t, family, fe, i, opt);
    lhs = std::max(lhs, xi_e1(xi, fe.e1[static_cast<std::size_t>(i)]) - inner);
  }
  return lhs;
}

double condition_b_lhs(double xi, double r, double t, const ChannelFamily& family,
                       const FamilyExponents& fe) {
  (void)r;
  (void)t;
  double lhs = -kInf;
  for (int i = 0; i < family.size(); ++i) {
    const double term =
        xi_e1(xi, fe.e1[static_cast<std::size_t>(i)]) - fe.e_b[static_cast<std::size_t>(i)];
    lhs = std::max(lhs, term);
  }
  return lhs;
}

FractionResult xi_star(double r, double t, const ChannelFamily& family,
                       const XiSearchOptions& opt) {
  return xi_star(r, t, family, compute_family_exponents(family, r, t, opt.solver), opt);
}

FractionResult xi_star(double r, double t, const ChannelFamily& family,
                       const FamilyExponents& fe, const XiSearchOptions& opt) {
  auto eval = [&](double xi) {
    ConditionEval c;
    const std::vector<int> pos = positive_members(fe);
    c.lhs_a = -kInf;
    for (int i : pos) {
      double inner;
      if (family.px.size() == 2 && family.channel(i).ny() == 2)
        inner = condition_a_inner_2x2(xi, r, t, family, fe, pos, i, opt.solver);
      else
        inner = condition_a_inner_pgd(xi, r, t, family, fe, i, opt.solver);
      const double term = xi_e1(xi, fe.e1[static_cast<std::size_t>(i)]) - inner;
      if (term > c.lhs_a) {
        c.lhs_a = term;
        c.arg_a = i;
      }
    }
    c.lhs_b = -kInf;
    for (int i = 0; i < family.size(); ++i) {
      const double term =
          xi_e1(xi, fe.e1[static_cast<std::size_t>(i)]) - fe.e_b[static_cast<std::size_t>(i)];
      if (term > c.lhs_b) {
        c.lhs_b = term;
        c.arg_b = i;
      }
    }
    return c;
  };
  return xi_line_search(eval, fe, opt);
}

QBoundaries bsc_feasible_q_set(double xi, double r, double t, const ChannelFamily& family,
                               const FamilyExponents& fe, double qtilde, int q_grid) {
  (void)r;
  if (family.kind != ChannelFamily::Kind::bsc_grid)
    throw std::invalid_argument("bsc_feasible_q_set: needs a bsc_grid family");
  const std::vector<int> pos = positive_members(fe);
  const BscEnvelope env = bsc_envelope(xi, family, fe, pos);
  const double m = envelope_m(env, qtilde);

  // membership by the direct inequality on a q grid (no division by beta)
  QBoundaries out;
  bool prev_feasible = false;
  double largest_low = -kInf, smallest_high = kInf;
  bool any_feasible = false, all_feasible = true;
  for (int k = 0; k < q_grid; ++k) {
    const double q = static_cast<double>(k) / (q_grid - 1);
    bool feasible = false;
    for (std::size_t j = 0; j < env.a.size(); ++j) {
      if (env.beta[j] * q <= env.a[j] + t - m + 1e-14) {
        feasible = true;
        break;
      }
    }
    any_feasible |= feasible;
    all_feasible &= feasible;
    if (feasible && q <= 0.5) largest_low = std::max(largest_low, q);
    if (feasible && q > 0.5 && smallest_high == kInf) {
      // the upper region is an up-set; its first feasible point is the boundary
      if (!prev_feasible || q > 0.5) smallest_high = std::min(smallest_high, q);
    }
    prev_feasible = feasible;
  }
  if (!any_feasible) return out;
  if (all_feasible) {
    out.all_feasible = true;
    return out;
  }
  // refine against the division form where it is well defined
  const QBoundaries exact = boundaries_from_envelope(env, t, qtilde);
  if (exact.all_feasible) {
    out.all_feasible = true;
    return out;
  }
  if (largest_low > -kInf) out.q1 = exact.q1 ? *exact.q1 : largest_low;
  if (smallest_high < kInf) out.q2 = exact.q2 ? *exact.q2 : smallest_high;
  if (!out.q1 && exact.q1 && *exact.q1 >= 0.0) out.q1 = exact.q1;
  if (!out.q2 && exact.q2 && *exact.q2 <= 1.0) out.q2 = exact.q2;
  return out;
}

double g_of_boundaries(const QBoundaries& b) {
  if (b.all_feasible) return kLog2;
  double g = -kInf;
  if (b.q1) {
    if (*b.q1 > 0.5) return kLog2;
    if (*b.q1 >= 0.0) g = std::max(g, binary_entropy(*b.q1));
  }
  if (b.q2) {
    if (*b.q2 < 0.5) return kLog2;
    if (*b.q2 <= 1.0) g = std::max(g, binary_entropy(*b.q2));
  }
  return g;  // -inf when both regions are empty
}

double g_of_boundaries(double q1, double q2) {
  QBoundaries b;
  b.q1 = q1;
  b.q2 = q2;
  return g_of_boundaries(b);
}

FractionResult xi_star_bsc(double r, double t, const ChannelFamily& family,
                           const XiSearchOptions& opt) {
  return xi_star_bsc(r, t, family, compute_family_exponents(family, r, t, opt.solver), opt);
}

FractionResult xi_star_bsc(double r, double t, const ChannelFamily& family,
                           const FamilyExponents& fe, const XiSearchOptions& opt) {
  if (family.kind != ChannelFamily::Kind::bsc_grid)
    throw std::invalid_argument("xi_star_bsc: needs a bsc_grid family");
  if (!family.uniform_px(1e-9))
    throw std::invalid_argument("xi_star_bsc: composition must be (1/2,1/2); use xi_star");

  auto eval = [&](double xi) {
    ConditionEval c;
    c.lhs_a = condition_a_lhs_bsc(xi, r, t, family, fe, opt.q_step, &c.arg_a);
    c.lhs_b = -kInf;
    for (int i = 0; i < family.size(); ++i) {
      const double term =
          xi_e1(xi, fe.e1[static_cast<std::size_t>(i)]) - fe.e_b[static_cast<std::size_t>(i)];
      if (term > c.lhs_b) {
        c.lhs_b = term;
        c.arg_b = i;
      }
    }
    return c;
  };
  return xi_line_search(eval, fe, opt);
}

}  // namespace elab
