#include "elab/cli.hpp"

#include "elab/family_io.hpp"
#include "elab/lower_bound.hpp"
#include "elab/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace elab::cli {

namespace {

struct OutputSink {
  std::string path;  // empty -> stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("output: cannot open " + path);
    out << text;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(9);
  if (std::isinf(v))
    os << (v > 0 ? "inf" : "-inf");
  else
    os << v;
  return os.str();
}

// Rows render to CSV or a JSON array of objects with the same field names.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i)
      os << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
      for (std::size_t i = 0; i < row.size(); ++i)
        os << row[i] << (i + 1 < row.size() ? "," : "\n");
    return os.str();
  }

  std::string json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj;
      for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& cell = row[i];
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end && *end == '\0' && !cell.empty())
          obj[header[i]] = v;
        else if (cell == "inf")
          obj[header[i]] = "inf";
        else
          obj[header[i]] = cell;
      }
      arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
  }

  std::string render(const std::string& format) const {
    return format == "json" ? json() : csv();
  }
};

std::string theta_label(const ChannelFamily& family, int index) {
  if (index < 0) return "";
  if (family.kind == ChannelFamily::Kind::bsc_grid)
    return fmt(family.thetas[static_cast<std::size_t>(index)]);
  return std::to_string(index);
}

std::string active_label(ActiveCondition a) {
  switch (a) {
    case ActiveCondition::a:
      return "A";
    case ActiveCondition::b:
      return "B";
    default:
      return "both";
  }
}

struct CommonOpts {
  double r = 0.0, t = 0.0;
  std::string family_spec;
  std::string output;
  std::string format = "csv";
  bool bits = false;
  int threads = 0;
  double xi_step = 1e-3, q_step = 5e-4, tol = 1e-6;

  double rate_in(double v) const { return bits ? v * kLog2 : v; }
  double rate_out(double v) const { return bits ? v / kLog2 : v; }
};

LoadedFamily load_with_warnings(const std::string& spec) {
  LoadedFamily lf = load_family(spec);
  for (const std::string& w : lf.warnings) std::cerr << "warning: " << w << "\n";
  return lf;
}

int run_exponent(const CommonOpts& o) {
  const LoadedFamily lf = load_with_warnings(o.family_spec);
  const double r = o.rate_in(o.r), t = o.rate_in(o.t);
  Table tab;
  tab.header = {"index", "theta", "r", "t", "e1", "e2", "branch"};
  bool any_finite = false;
  for (int i = 0; i < lf.family.size(); ++i) {
    ExponentResult res;
    if (lf.family.kind == ChannelFamily::Kind::bsc_grid && lf.family.uniform_px()) {
      res = e1_bsc(r, t, lf.family.thetas[static_cast<std::size_t>(i)]);
    } else {
      ExponentQuery q{r, t, lf.family.channel(i), lf.family.px};
      res = e1_general(q);
    }
    any_finite |= std::isfinite(res.e1);
    const char* branch = res.branch == ExponentBranch::a
                             ? "a"
                             : (res.branch == ExponentBranch::b ? "b" : "none");
    tab.rows.push_back({std::to_string(i), theta_label(lf.family, i), fmt(o.rate_out(r)),
                        fmt(o.rate_out(t)), fmt(o.rate_out(res.e1)), fmt(o.rate_out(res.e2)),
                        branch});
  }
  OutputSink{o.output}.write(tab.render(o.format));
  return any_finite ? 0 : 2;
}

int run_xistar(const CommonOpts& o, const std::string& route) {
  const LoadedFamily lf = load_with_warnings(o.family_spec);
  const double r = o.rate_in(o.r), t = o.rate_in(o.t);
  XiSearchOptions opt;
  opt.xi_step = o.xi_step;
  opt.q_step = o.q_step;
  opt.tol = o.tol;
  const FamilyExponents fe = compute_family_exponents(lf.family, r, t, opt.solver);
  const bool bsc_route =
      route == "bsc" || (route == "auto" && lf.family.kind == ChannelFamily::Kind::bsc_grid &&
                         lf.family.uniform_px());
  const FractionResult res = bsc_route ? xi_star_bsc(r, t, lf.family, fe, opt)
                                       : xi_star(r, t, lf.family, fe, opt);
  Table tab;
  tab.header = {"r", "t", "xi_star", "active_condition", "argmax_theta", "slack_a", "slack_b"};
  tab.rows.push_back({fmt(o.rate_out(r)), fmt(o.rate_out(t)), fmt(res.xi),
                      active_label(res.active), theta_label(lf.family, res.argmax_theta),
                      fmt(res.slack_a), fmt(res.slack_b)});
  OutputSink{o.output}.write(tab.render(o.format));
  return res.degenerate ? 2 : 0;
}

int run_xilower(const CommonOpts& o, int srho_grid) {
  const LoadedFamily lf = load_with_warnings(o.family_spec);
  const double r = o.rate_in(o.r), t = o.rate_in(o.t);
  GridSpec spec;
  spec.srho_grid = srho_grid;
  spec.threads = o.threads;
  const LowerBoundResult res = xi_lower(r, t, lf.family, spec);
  Table tab;
  tab.header = {"r", "t", "xi_lower", "theta_star", "theta_dprime_star", "s_star", "rho_star"};
  tab.rows.push_back({fmt(o.rate_out(r)), fmt(o.rate_out(t)), fmt(res.xi),
                      theta_label(lf.family, res.diag.theta_star),
                      theta_label(lf.family, res.diag.theta_dprime_star),
                      fmt(res.diag.s_star), fmt(res.diag.rho_star)});
  OutputSink{o.output}.write(tab.render(o.format));
  return res.degenerate ? 2 : 0;
}

int run_gap(const CommonOpts& o, double xi, bool with_crit) {
  const LoadedFamily lf = load_with_warnings(o.family_spec);
  const double r = o.rate_in(o.r), t = o.rate_in(o.t);
  GridSpec spec;
  spec.threads = o.threads;
  const FamilyExponents fe = compute_family_exponents(lf.family, r, t);
  const SaddleDiagnostics d = gap_diagnostics(r, t, lf.family, fe, xi, spec, with_crit);
  Table tab;
  tab.header = {"r",          "t",           "xi",          "constrained_value",
                "relaxed_value", "s_star",   "rho_star",    "s_star_relaxed",
                "rho_star_relaxed", "theta_star", "theta_dprime_star", "theta_prime_star",
                "constraint_active", "xi_crit_relaxed"};
  tab.rows.push_back(
      {fmt(o.rate_out(r)), fmt(o.rate_out(t)), fmt(xi), fmt(d.constrained_value),
       fmt(d.relaxed_value), fmt(d.s_star), fmt(d.rho_star), fmt(d.s_star_relaxed),
       fmt(d.rho_star_relaxed), theta_label(lf.family, d.theta_star),
       theta_label(lf.family, d.theta_dprime_star), theta_label(lf.family, d.theta_prime_star),
       d.constraint_active ? "1" : "0", fmt(d.xi_crit_relaxed)});
  OutputSink{o.output}.write(tab.render(o.format));
  return 0;
}

int run_simulate(const CommonOpts& o, int n, long trials, std::uint64_t seed, double xi,
                 const std::string& mode, const std::string& method, int codebooks,
                 int true_index) {
  const LoadedFamily lf = load_with_warnings(o.family_spec);
  SimConfig cfg;
  cfg.n = n;
  cfg.r = o.rate_in(o.r);
  cfg.t = o.rate_in(o.t);
  cfg.px = lf.family.px;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.xi = xi;
  cfg.codebooks = codebooks;
  cfg.threads = o.threads;
  if (true_index < 0 || true_index >= lf.family.size())
    throw std::invalid_argument("simulate: --true-index out of range");
  cfg.true_channel = lf.family.channel(true_index);
  cfg.mode = mode == "universal" ? SimMode::universal : SimMode::forney;
  cfg.method = method == "exhaustive" ? SimMethod::exhaustive : SimMethod::monte_carlo;
  if (cfg.mode == SimMode::universal) cfg.family = lf.family;

  const SimReport rep = estimate(cfg);
  Table tab;
  tab.header = {"n",    "trials", "p_e1",      "p_e1_lo",       "p_e1_hi",  "p_e2",
                "p_e2_lo", "p_e2_hi", "p_erasure", "avg_list_size", "gamma_hat"};
  tab.rows.push_back({std::to_string(rep.n), std::to_string(rep.trials), fmt(rep.p_e1.p),
                      fmt(rep.p_e1.lo), fmt(rep.p_e1.hi), fmt(rep.p_e2.p), fmt(rep.p_e2.lo),
                      fmt(rep.p_e2.hi), fmt(rep.p_erasure.p), fmt(rep.avg_list_size),
                      fmt(rep.gamma_hat)});
  OutputSink{o.output}.write(tab.render(o.format));
  return 0;
}

int run_reproduce(const CommonOpts& o) {
  Table tab;
  tab.header = {"example", "r", "t", "xi_lower", "xi_star"};

  // erasure-mode grid family
  {
    std::vector<double> thetas;
    for (int k = 0; k <= 100; ++k)
      thetas.push_back(std::min(std::max(k / 100.0, 1e-4), 1.0 - 1e-4));
    const ChannelFamily family =
        ChannelFamily::bsc_family(std::move(thetas), Eigen::Vector2d(0.5, 0.5));
    const double r = 0.05, t = 0.15;
    const FamilyExponents fe = compute_family_exponents(family, r, t);
    GridSpec spec;
    spec.threads = o.threads;
    const LowerBoundResult lb = xi_lower(r, t, family, fe, spec);
    XiSearchOptions xopt;
    xopt.xi_step = o.xi_step;
    xopt.q_step = o.q_step;
    xopt.tol = o.tol;
    const FractionResult fr = xi_star_bsc(r, t, family, fe, xopt);
    tab.rows.push_back({"1", fmt(o.rate_out(r)), fmt(o.rate_out(t)), fmt(lb.xi), fmt(fr.xi)});
  }

  // list-mode two-channel family
  {
    const ChannelFamily family =
        ChannelFamily::bsc_family({0.1, 0.15}, Eigen::Vector2d(0.5, 0.5));
    const double r = 0.4, t = -0.25;
    const FamilyExponents fe = compute_family_exponents(family, r, t);
    GridSpec spec;
    spec.threads = o.threads;
    const LowerBoundResult lb = xi_lower(r, t, family, fe, spec);
    XiSearchOptions xopt;
    xopt.xi_step = o.xi_step;
    xopt.q_step = o.q_step;
    xopt.tol = o.tol;
    const FractionResult fr = xi_star(r, t, family, fe, xopt);
    tab.rows.push_back({"2", fmt(o.rate_out(r)), fmt(o.rate_out(t)), fmt(lb.xi), fmt(fr.xi)});
  }

  OutputSink{o.output}.write(tab.render(o.format));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"erasure_lab: exact erasure/list error exponents, universal decoding "
               "fractions, and small-blocklength decoder simulation"};
  app.require_subcommand(1);

  CommonOpts o;
  auto add_common = [&](CLI::App* sub, bool needs_family) {
    sub->add_option("--r", o.r, "coding rate (nats; bits with --bits)");
    sub->add_option("--t", o.t, "threshold (nats; bits with --bits)");
    if (needs_family)
      sub->add_option("--family", o.family_spec,
                      "family file (JSON) or inline bsc:t1,t2,...")->required();
    sub->add_option("--output", o.output, "output path (default stdout)");
    sub->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--bits", o.bits, "rates given and printed in bits");
    sub->add_option("--threads", o.threads, "worker threads (0 = auto)");
    sub->add_option("--xi-step", o.xi_step, "xi line-search step")
        ->check(CLI::Range(1e-6, 0.01));
    sub->add_option("--q-step", o.q_step, "crossover grid step");
    sub->add_option("--tol", o.tol, "condition tolerance");
  };

  auto* c_exp = app.add_subcommand("exponent", "exact E1/E2 per family member");
  add_common(c_exp, true);

  auto* c_xs = app.add_subcommand("xistar", "maximal universally achievable fraction");
  add_common(c_xs, true);
  std::string route = "auto";
  c_xs->add_option("--route", route, "auto, general, or bsc")
      ->check(CLI::IsMember({"auto", "general", "bsc"}));

  auto* c_xl = app.add_subcommand("xilower", "competitive-minimax lower bound");
  add_common(c_xl, true);
  int srho_grid = 201;
  c_xl->add_option("--srho-grid", srho_grid, "multiplier grid resolution");

  auto* c_gap = app.add_subcommand("gap", "constrained vs relaxed saddle diagnostics");
  add_common(c_gap, true);
  double gap_xi = 0.5;
  bool no_crit = false;
  c_gap->add_option("--xi", gap_xi, "fraction at which to evaluate")->required();
  c_gap->add_flag("--no-xi-crit", no_crit, "skip the relaxed critical-fraction search");

  auto* c_sim = app.add_subcommand("simulate", "decoder simulation");
  add_common(c_sim, true);
  int n = 8, codebooks = 64, true_index = 0;
  long trials = 100000;
  std::uint64_t seed = 1;
  double xi = 1.0;
  std::string mode = "forney", method = "monte_carlo";
  c_sim->add_option("--n", n, "blocklength")->required();
  c_sim->add_option("--trials", trials, "Monte-Carlo trials");
  c_sim->add_option("--seed", seed, "RNG seed");
  c_sim->add_option("--xi", xi, "fraction used by the universal metric");
  c_sim->add_option("--mode", mode, "forney or universal")
      ->check(CLI::IsMember({"forney", "universal"}));
  c_sim->add_option("--method", method, "monte_carlo or exhaustive")
      ->check(CLI::IsMember({"monte_carlo", "exhaustive"}));
  c_sim->add_option("--codebooks", codebooks, "exhaustive: sampled codebooks");
  c_sim->add_option("--true-index", true_index, "family index of the actual channel");

  auto* c_rep = app.add_subcommand("reproduce-examples",
                                   "run the two reference configurations end to end");
  add_common(c_rep, false);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (c_exp->parsed()) return run_exponent(o);
    if (c_xs->parsed()) return run_xistar(o, route);
    if (c_xl->parsed()) return run_xilower(o, srho_grid);
    if (c_gap->parsed()) return run_gap(o, gap_xi, !no_crit);
    if (c_sim->parsed())
      return run_simulate(o, n, trials, seed, xi, mode, method, codebooks, true_index);
    if (c_rep->parsed()) return run_reproduce(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace elab::cli
