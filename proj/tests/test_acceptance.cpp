// End-to-end acceptance suite. Each case prints one PASS/FAIL line so the
// ctest log shows the criterion outcomes at a glance.

#include "elab/lower_bound.hpp"
#include "elab/simulator.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <random>

using namespace elab;

namespace {

const Eigen::VectorXd kUniform = Eigen::Vector2d(0.5, 0.5);

ChannelFamily grid_family() {
  std::vector<double> thetas;
  for (int k = 0; k <= 100; ++k)
    thetas.push_back(std::min(std::max(k / 100.0, 1e-4), 1.0 - 1e-4));
  return ChannelFamily::bsc_family(std::move(thetas), kUniform);
}

ChannelFamily two_family() { return ChannelFamily::bsc_family({0.1, 0.15}, kUniform); }

void report(int criterion, bool ok, const char* detail) {
  std::printf("[ACCEPT] criterion %d: %s — %s\n", criterion, ok ? "PASS" : "FAIL", detail);
  std::fflush(stdout);
}

}  // namespace

TEST_CASE("criterion 1: erasure-mode grid family reproduction") {
  const ChannelFamily fam = grid_family();
  const double r = 0.05, t = 0.15;
  const FamilyExponents fe = compute_family_exponents(fam, r, t);
  const LowerBoundResult lb = xi_lower(r, t, fam, fe);
  const FractionResult fr = xi_star_bsc(r, t, fam, fe);

  const double th_star = fam.thetas[lb.diag.theta_star];
  const double th_dp = fam.thetas[lb.diag.theta_dprime_star];
  const bool ok = std::abs(lb.xi - 0.495) <= 0.005 && std::abs(fr.xi - 0.495) <= 0.005 &&
                  std::abs(th_star - 0.18) <= 0.01 && std::abs(th_dp - 0.22) <= 0.01 &&
                  std::abs(lb.diag.rho_star - 0.36) <= 0.01 &&
                  std::abs(lb.diag.s_star - 0.185) <= 0.01 &&
                  lb.diag.s_star < lb.diag.rho_star;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "xi_lower=%.4f xi_star_bsc=%.4f theta*=%.2f theta''*=%.2f rho*=%.3f s*=%.3f",
                lb.xi, fr.xi, th_star, th_dp, lb.diag.rho_star, lb.diag.s_star);
  report(1, ok, buf);
  CHECK(std::abs(lb.xi - 0.495) <= 0.005);
  CHECK(std::abs(fr.xi - 0.495) <= 0.005);
  CHECK(std::abs(th_star - 0.18) <= 0.01);
  CHECK(std::abs(th_dp - 0.22) <= 0.01);
  CHECK(std::abs(lb.diag.rho_star - 0.36) <= 0.01);
  CHECK(std::abs(lb.diag.s_star - 0.185) <= 0.01);
  CHECK(lb.diag.s_star < lb.diag.rho_star);
}

TEST_CASE("criterion 2: list-mode two-channel reproduction with gap diagnostics") {
  const ChannelFamily fam = two_family();
  const double r = 0.4, t = -0.25;
  const FamilyExponents fe = compute_family_exponents(fam, r, t);
  const LowerBoundResult lb = xi_lower(r, t, fam, fe);
  const FractionResult fr = xi_star(r, t, fam, fe);
  const SaddleDiagnostics gd = gap_diagnostics(r, t, fam, fe, 0.727);

  const bool ok = std::abs(lb.xi - 0.716) <= 0.005 && std::abs(fr.xi - 0.727) <= 0.005 &&
                  std::abs(gd.s_star - 0.231) <= 0.005 &&
                  std::abs(gd.rho_star - 0.231) <= 0.005 &&
                  std::abs(gd.s_star_relaxed - 0.231) <= 0.005 &&
                  std::abs(gd.rho_star_relaxed - 0.217) <= 0.005 &&
                  std::abs(gd.xi_crit_relaxed - 0.727) <= 0.005;
  char buf[280];
  std::snprintf(buf, sizeof buf,
                "xi_lower=%.4f xi_star=%.4f constrained (s,rho)=(%.3f,%.3f) relaxed "
                "(s,rho)=(%.3f,%.3f) relaxed-critical=%.4f",
                lb.xi, fr.xi, gd.s_star, gd.rho_star, gd.s_star_relaxed, gd.rho_star_relaxed,
                gd.xi_crit_relaxed);
  report(2, ok, buf);
  CHECK(std::abs(lb.xi - 0.716) <= 0.005);
  CHECK(std::abs(fr.xi - 0.727) <= 0.005);
  CHECK(std::abs(gd.s_star - 0.231) <= 0.005);
  CHECK(std::abs(gd.rho_star - 0.231) <= 0.005);
  CHECK(std::abs(gd.s_star_relaxed - 0.231) <= 0.005);
  CHECK(std::abs(gd.rho_star_relaxed - 0.217) <= 0.005);
  CHECK(std::abs(gd.xi_crit_relaxed - 0.727) <= 0.005);
}

TEST_CASE("criterion 3: threshold balance of the fitted error slopes") {
  SimConfig cfg;
  cfg.r = 0.15;
  cfg.t = 0.1;
  cfg.true_channel = Dmc::bsc(0.25);
  cfg.px = kUniform;
  cfg.method = SimMethod::exhaustive;
  cfg.codebooks = 400;
  cfg.seed = 17;
  std::vector<std::pair<int, double>> p1, p2;
  for (int n : {8, 10, 12, 14, 16}) {
    cfg.n = n;
    const SimReport rep = estimate(cfg);
    p1.push_back({n, rep.p_e1.p});
    p2.push_back({n, rep.p_e2.p});
  }
  const SlopeFit f1 = slope_fit(p1), f2 = slope_fit(p2);
  const double diff = f2.slope - f1.slope;
  const bool ok = std::abs(diff - 0.1) <= 0.05;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "e2_hat - e1_hat = %.4f, required 0.1 +- 0.05 (e1_hat=%.4f, e2_hat=%.4f; "
                "see README, Known limitations)",
                diff, f1.slope, f2.slope);
  report(3, ok, buf);
  // the individual slopes do track the theory at the documented +-0.1
  const double e1_theory = e1_bsc(0.15, 0.1, 0.25).e1;
  CHECK(std::abs(f1.slope - e1_theory) <= 0.1);
  CHECK(std::abs(f2.slope - (e1_theory + 0.1)) <= 0.1);
  CHECK(std::abs(diff - 0.1) <= 0.05);
}

TEST_CASE("criterion 4: singleton families are fully achievable and decoders coincide") {
  bool frac_ok = true;
  for (double th : {0.1, 0.2, 0.3}) {
    const ChannelFamily fam = ChannelFamily::bsc_family({th}, kUniform);
    const FractionResult res = xi_star(0.2, 0.1, fam);
    frac_ok &= res.xi == 1.0;
    CHECK(res.xi == 1.0);
  }

  const ChannelFamily fam = ChannelFamily::bsc_family({0.2}, kUniform);
  long mismatches = 0, instances = 0;
  for (double t : {-0.2, 0.0, 0.1}) {
    for (double xi : {0.0, 0.5, 1.0}) {
      const FamilyExponents fe = compute_family_exponents(fam, 0.18, t);
      Rng rng(123);
      for (int rep = 0; rep < 1200; ++rep) {
        const auto book = sample_codebook(8, 0.18, kUniform, rng);
        Codeword y(8);
        for (int i = 0; i < 8; ++i) y[i] = static_cast<int>(rng.below(2));
        const Decision a = forney_decode(y, book, fam.channel(0), t);
        const Decision b = universal_decode(y, book, fam, fe, xi, t);
        mismatches += a.accepted != b.accepted;
        ++instances;
      }
    }
  }
  const bool ok = frac_ok && mismatches == 0 && instances >= 10000;
  char buf[160];
  std::snprintf(buf, sizeof buf, "xi*=1 on singletons; %ld/%ld decision mismatches",
                mismatches, instances);
  report(4, ok, buf);
  CHECK(mismatches == 0);
  CHECK(instances >= 10000);
}

TEST_CASE("criterion 5: oracle equivalence suite") {
  std::mt19937_64 rng(515);
  auto u = [&]() { return (rng() >> 11) * 0x1.0p-53; };
  double worst_branch = 0.0, worst_f = 0.0, worst_g = 0.0;

  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd w(2, 2);
    w << 0.05 + 0.9 * u(), 0, 0.05 + 0.9 * u(), 0;
    w(0, 1) = 1 - w(0, 0);
    w(1, 1) = 1 - w(1, 0);
    const Dmc dmc(w);
    const double r = 0.05 + 0.3 * u();
    const double t = -0.2 + 0.4 * u();
    ExponentQuery q{r, t, dmc, kUniform};
    const double oa = oracle::e_a_grid(r, t, dmc, 0.5);
    const double ob = oracle::e_b_grid(r, t, dmc, 0.5);
    if (std::isfinite(oa))
      worst_branch = std::max(worst_branch, std::abs(e_a_general(q).value - oa));
    if (std::isfinite(ob))
      worst_branch = std::max(worst_branch, std::abs(e_b_general(q).value - ob));

    const double th1 = 0.05 + 0.4 * u(), th2 = 0.05 + 0.4 * u();
    const double qy0 = 0.1 + 0.8 * u();
    Eigen::VectorXd qy(2);
    qy << qy0, 1 - qy0;
    const double lam = 2.0 * u();
    worst_f = std::max(worst_f, std::abs(f_term(qy, lam, Dmc::bsc(th1), kUniform) -
                                         oracle::f_term_grid(qy0, lam, Dmc::bsc(th1), 0.5)));
    const double rho = 0.05 + 0.95 * u();
    const double s = rho * u();
    worst_g = std::max(
        worst_g, std::abs(e_gallager(Dmc::bsc(th1), Dmc::bsc(th2), s, rho, kUniform) -
                          oracle::e_gallager_grid(Dmc::bsc(th1), Dmc::bsc(th2), s, rho, 0.5)));
  }

  double worst_e1 = 0.0;
  for (double th : {0.1, 0.2, 0.3})
    for (double r : {0.1, 0.2, 0.3})
      for (double t : {-0.1, 0.05, 0.15}) {
        const double bsc = e1_bsc(r, t, th).e1;
        ExponentQuery q{r, t, Dmc::bsc(th), kUniform};
        const double gen = e1_general(q).e1;
        if (std::isfinite(bsc) && std::isfinite(gen))
          worst_e1 = std::max(worst_e1, std::abs(bsc - gen));
      }

  const bool ok = worst_branch <= 2e-3 && worst_f <= 2e-3 && worst_g <= 2e-3 &&
                  worst_e1 <= 1e-3;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "max |solver - oracle|: branches %.2e, f %.2e, gallager %.2e; "
                "|e1_bsc - e1_general| %.2e",
                worst_branch, worst_f, worst_g, worst_e1);
  report(5, ok, buf);
  CHECK(worst_branch <= 2e-3);
  CHECK(worst_f <= 2e-3);
  CHECK(worst_g <= 2e-3);
  CHECK(worst_e1 <= 1e-3);
}

TEST_CASE("criterion 6: fixed-codebook exhaustive run equals the hand enumeration") {
  SimConfig cfg;
  cfg.n = 4;
  cfg.r = 0.18;  // M = 2
  cfg.t = 0.0;
  cfg.true_channel = Dmc::bsc(0.25);
  cfg.px = kUniform;
  cfg.method = SimMethod::exhaustive;
  cfg.fixed_codebook = std::vector<Codeword>{{0, 0, 1, 1}, {1, 1, 0, 0}};
  const SimReport rep = estimate(cfg);

  // independent 16-term enumeration in linear probability space
  const auto& book = *cfg.fixed_codebook;
  auto wp = [&](const Codeword& x, const Codeword& y) {
    int d = 0;
    for (int i = 0; i < 4; ++i) d += x[i] != y[i];
    return std::pow(0.25, d) * std::pow(0.75, 4 - d);
  };
  double e1 = 0.0, e2 = 0.0;
  for (int v = 0; v < 16; ++v) {
    Codeword y(4);
    for (int i = 0; i < 4; ++i) y[i] = (v >> i) & 1;
    const double w0 = wp(book[0], y), w1 = wp(book[1], y);
    const bool acc0 = w0 >= w1;  // T = 0: closed ratio test
    const bool acc1 = w1 >= w0;
    if (!acc0) e1 += w0;
    if (!acc1) e1 += w1;
    if (acc0) e2 += w1;
    if (acc1) e2 += w0;
  }
  e1 /= 2.0;
  e2 /= 2.0;
  const bool ok = std::abs(rep.p_e1.p - e1) <= 1e-15 && std::abs(rep.p_e2.p - e2) <= 1e-15;
  char buf[160];
  std::snprintf(buf, sizeof buf, "p_e1 err %.2e, p_e2 err %.2e", rep.p_e1.p - e1,
                rep.p_e2.p - e2);
  report(6, ok, buf);
  CHECK(std::abs(rep.p_e1.p - e1) <= 1e-15);
  CHECK(std::abs(rep.p_e2.p - e2) <= 1e-15);
}

TEST_CASE("criterion 7: invariant suites") {
  bool ok = true;

  // entropy / gv round trips and divergence nonnegativity
  for (int i = 0; i <= 50; ++i) {
    const double r = kLog2 * i / 50.0;
    ok &= std::abs(binary_entropy(gv_distance(r)) - (kLog2 - r)) <= 1e-10;
  }
  for (int i = 0; i <= 100 && ok; ++i)
    for (int j = 1; j < 100; ++j)
      ok &= binary_divergence(i / 100.0, j / 100.0) >= 0.0;
  CHECK(ok);

  // lower bound below the exact fraction on every tested configuration
  bool order_ok = true;
  {
    const ChannelFamily fam = two_family();
    for (auto [r, t] : std::vector<std::pair<double, double>>{
             {0.4, -0.25}, {0.2, 0.1}, {0.3, 0.0}, {0.15, 0.05}}) {
      const FamilyExponents fe = compute_family_exponents(fam, r, t);
      const double lo = xi_lower(r, t, fam, fe).xi;
      const double hi = xi_star_bsc(r, t, fam, fe).xi;
      order_ok &= lo <= hi + 0.002;
    }
  }
  CHECK(order_ok);

  // family monotonicity of the achievable fraction
  const double x1 = xi_star_bsc(0.4, -0.25, ChannelFamily::bsc_family({0.1}, kUniform)).xi;
  const double x2 = xi_star_bsc(0.4, -0.25, two_family()).xi;
  const double x3 =
      xi_star_bsc(0.4, -0.25, ChannelFamily::bsc_family({0.1, 0.15, 0.3}, kUniform)).xi;
  const bool mono_ok = x1 >= x2 - 1e-9 && x2 >= x3 - 1e-9;
  CHECK(mono_ok);

  // report identities and determinism
  SimConfig cfg;
  cfg.n = 8;
  cfg.r = 0.15;
  cfg.t = 0.1;
  cfg.true_channel = Dmc::bsc(0.25);
  cfg.px = kUniform;
  cfg.trials = 50000;
  cfg.seed = 99;
  const SimReport a = estimate(cfg);
  const SimReport b = estimate(cfg);
  const bool det_ok = a.p_e1.p == b.p_e1.p && a.p_e2.p == b.p_e2.p &&
                      a.gamma_hat == b.gamma_hat;
  const bool gamma_ok =
      a.gamma_hat == a.p_e2.p + std::exp(-0.8) * a.p_e1.p;
  cfg.method = SimMethod::exhaustive;
  cfg.codebooks = 32;
  const SimReport ex = estimate(cfg);
  const bool erasure_ok = std::abs(ex.p_erasure.p - (ex.p_e1.p - ex.p_e2.p)) <= 1e-12;
  CHECK(det_ok);
  CHECK(gamma_ok);
  CHECK(erasure_ok);

  const bool all = ok && order_ok && mono_ok && det_ok && gamma_ok && erasure_ok;
  report(7, all, "round trips, bound ordering, monotonicity, report identities, determinism");
}
