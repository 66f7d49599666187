#include "elab/cli.hpp"

#include "elab/family_io.hpp"
#include "elab/known_exponents.hpp"
#include "elab/threading.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace elab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp_path(const std::string& name) {
  return std::string("cli_test_") + name;
}

int run_cli(std::initializer_list<std::string> args) {
  return cli::run(std::vector<std::string>(args));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

TEST_CASE("family parsing") {
  const LoadedFamily ok = parse_family_json(
      R"({"type":"bsc_grid","thetas":[0.1,0.15],"px":[0.5,0.5]})");
  CHECK(ok.family.size() == 2);
  CHECK(ok.warnings.empty());

  const LoadedFamily clamped = parse_family_json(
      R"({"type":"bsc_grid","thetas":[0.0,0.5,1.0],"px":[0.5,0.5]})");
  CHECK(clamped.family.thetas.front() == doctest::Approx(1e-4));
  CHECK(clamped.family.thetas.back() == doctest::Approx(1.0 - 1e-4));
  CHECK(clamped.warnings.size() == 2);

  CHECK_THROWS_WITH_AS(
      parse_family_json(
          R"({"type":"dmc_set","channels":[[[0.9,0.2],[0.3,0.7]]],"px":[0.5,0.5]})"),
      doctest::Contains("row 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_family_json(R"({"type":"mystery","px":[1.0]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_family_json(R"({"type":"bsc_grid","thetas":[0.1],"px":[0.9,0.3]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_family_json("not json"), std::invalid_argument);

  const LoadedFamily inline_spec = load_family("bsc:0.1,0.25");
  CHECK(inline_spec.family.size() == 2);
  CHECK(inline_spec.family.thetas[1] == 0.25);

  // round trip through the emitter
  const LoadedFamily again = parse_family_json(family_to_json(ok.family));
  CHECK(again.family.size() == 2);
  CHECK(again.family.thetas == ok.family.thetas);

  const std::string dmc_json =
      R"({"type":"dmc_set","channels":[[[0.8,0.2],[0.3,0.7]]],"px":[0.5,0.5]})";
  const LoadedFamily dmc = parse_family_json(dmc_json);
  const LoadedFamily dmc2 = parse_family_json(family_to_json(dmc.family));
  CHECK(dmc2.family.channel(0).w(0, 1) == doctest::Approx(0.2));
}

TEST_CASE("exponent command emits a consistent table") {
  const std::string out = tmp_path("exp.csv");
  const int rc = run_cli({"exponent", "--r", "0.2", "--t", "0.1", "--family", "bsc:0.2",
                          "--output", out});
  CHECK(rc == 0);
  const auto lines = split(slurp(out), '\n');
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "index,theta,r,t,e1,e2,branch");
  const auto cells = split(lines[1], ',');
  REQUIRE(cells.size() == 7);
  const double e1 = std::stod(cells[4]);
  const double e2 = std::stod(cells[5]);
  CHECK(e2 == doctest::Approx(e1 + 0.1).epsilon(1e-9));
  CHECK(e1 == doctest::Approx(e1_bsc(0.2, 0.1, 0.2).e1).epsilon(1e-6));
  std::remove(out.c_str());
}

TEST_CASE("bits flag rescales rates on input and output") {
  const std::string nats = tmp_path("nats.csv"), bits = tmp_path("bits.csv");
  CHECK(run_cli({"exponent", "--r", "0.2", "--t", "0.1", "--family", "bsc:0.2", "--output",
                 nats}) == 0);
  CHECK(run_cli({"exponent", "--r", std::to_string(0.2 / kLog2), "--t",
                 std::to_string(0.1 / kLog2), "--family", "bsc:0.2", "--bits", "--output",
                 bits}) == 0);
  const auto a = split(split(slurp(nats), '\n')[1], ',');
  const auto b = split(split(slurp(bits), '\n')[1], ',');
  CHECK(std::stod(b[4]) == doctest::Approx(std::stod(a[4]) / kLog2).epsilon(1e-6));
  std::remove(nats.c_str());
  std::remove(bits.c_str());
}

TEST_CASE("xistar on a singleton family reports the full fraction") {
  const std::string out = tmp_path("xistar.csv");
  const int rc = run_cli({"xistar", "--r", "0.2", "--t", "0.1", "--family", "bsc:0.2",
                          "--output", out});
  CHECK(rc == 0);
  const auto lines = split(slurp(out), '\n');
  CHECK(lines[0] == "r,t,xi_star,active_condition,argmax_theta,slack_a,slack_b");
  CHECK(std::stod(split(lines[1], ',')[2]) == 1.0);
  std::remove(out.c_str());
}

TEST_CASE("xilower emits the documented columns") {
  const std::string out = tmp_path("xilower.csv");
  const int rc = run_cli({"xilower", "--r", "0.4", "--t", "-0.25", "--family",
                          "bsc:0.1,0.15", "--output", out});
  CHECK(rc == 0);
  const auto lines = split(slurp(out), '\n');
  CHECK(lines[0] == "r,t,xi_lower,theta_star,theta_dprime_star,s_star,rho_star");
  CHECK(std::stod(split(lines[1], ',')[2]) == doctest::Approx(0.716).epsilon(0.01));
  std::remove(out.c_str());
}

TEST_CASE("simulate runs are byte-identical under a fixed seed") {
  const std::string o1 = tmp_path("sim1.csv"), o2 = tmp_path("sim2.csv");
  const std::vector<std::string> base = {
      "simulate", "--n", "8",     "--r",      "0.15", "--t",    "0.1",
      "--family", "bsc:0.25",     "--mode",   "forney", "--trials", "20000",
      "--seed",   "7"};
  auto with_out = [&](const std::string& o) {
    std::vector<std::string> v = base;
    v.push_back("--output");
    v.push_back(o);
    return v;
  };
  CHECK(cli::run(with_out(o1)) == 0);
  CHECK(cli::run(with_out(o2)) == 0);
  CHECK(slurp(o1) == slurp(o2));
  const auto lines = split(slurp(o1), '\n');
  CHECK(lines[0] ==
        "n,trials,p_e1,p_e1_lo,p_e1_hi,p_e2,p_e2_lo,p_e2_hi,p_erasure,avg_list_size,gamma_hat");
  std::remove(o1.c_str());
  std::remove(o2.c_str());
}

TEST_CASE("json output re-parses and revalidates") {
  const std::string out = tmp_path("sim.json");
  CHECK(run_cli({"simulate", "--n", "8", "--r", "0.15", "--t", "0.1", "--family", "bsc:0.25",
                 "--trials", "5000", "--seed", "3", "--format", "json", "--output", out}) ==
        0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  for (const char* key : {"n", "trials", "p_e1", "p_e1_lo", "p_e1_hi", "p_e2", "p_e2_lo",
                          "p_e2_hi", "p_erasure", "avg_list_size", "gamma_hat"}) {
    CHECK(j[0].contains(key));
    CHECK(j[0][key].is_number());
  }
  const double p1 = j[0]["p_e1"].get<double>();
  CHECK(p1 >= 0.0);
  CHECK(p1 <= 1.0);
  CHECK(j[0]["gamma_hat"].get<double>() ==
        doctest::Approx(j[0]["p_e2"].get<double>() +
                        std::exp(-0.8) * p1)
            .epsilon(1e-9));
  std::remove(out.c_str());
}

TEST_CASE("gap command emits diagnostics") {
  const std::string out = tmp_path("gap.csv");
  const int rc = run_cli({"gap", "--r", "0.4", "--t", "-0.25", "--family", "bsc:0.1,0.15",
                          "--xi", "0.727", "--no-xi-crit", "--output", out});
  CHECK(rc == 0);
  const auto lines = split(slurp(out), '\n');
  const auto hdr = split(lines[0], ',');
  CHECK(hdr[3] == "constrained_value");
  CHECK(hdr[4] == "relaxed_value");
  const auto cells = split(lines[1], ',');
  CHECK(std::stod(cells[5]) == doctest::Approx(0.231).epsilon(0.03));  // s_star
  std::remove(out.c_str());
}

TEST_CASE("reproduce-examples matches the golden file") {
  const std::string out = tmp_path("repro.csv");
  REQUIRE(run_cli({"reproduce-examples", "--output", out}) == 0);
  const auto got = split(slurp(out), '\n');
  const auto want = split(slurp(std::string(GOLDEN_DIR) + "/reproduce_examples.csv"), '\n');
  REQUIRE(got.size() >= 3);
  REQUIRE(want.size() >= 3);
  CHECK(got[0] == want[0]);
  for (int row = 1; row <= 2; ++row) {
    const auto g = split(got[row], ','), w = split(want[row], ',');
    REQUIRE(g.size() == w.size());
    CHECK(g[0] == w[0]);
    for (std::size_t col = 1; col < g.size(); ++col)
      CHECK(std::stod(g[col]) == doctest::Approx(std::stod(w[col])).epsilon(5e-3));
  }
  std::remove(out.c_str());
}

TEST_CASE("input errors exit with code 1") {
  CHECK(run_cli({"exponent", "--r", "0.2", "--t", "0.1", "--family", "missing_file.json"}) ==
        1);
  CHECK(run_cli({"simulate", "--n", "7", "--r", "0.2", "--t", "0.0", "--family",
                 "bsc:0.25"}) == 1);  // non-integral composition
  CHECK(run_cli({"bogus-subcommand"}) == 1);
}

TEST_CASE("degenerate outcomes exit with code 2") {
  // deep list threshold at the zero-capacity channel: every branch infeasible
  const std::string out = tmp_path("degenerate.csv");
  CHECK(run_cli({"exponent", "--r", "0.2", "--t", "-3", "--family", "bsc:0.5", "--output",
                 out}) == 2);
  std::remove(out.c_str());
}

TEST_CASE("worker count falls back to the environment variable") {
  setenv("ERASURE_LAB_THREADS", "3", 1);
  CHECK(resolve_threads(0) == 3);
  CHECK(resolve_threads(2) == 2);  // explicit request wins
  unsetenv("ERASURE_LAB_THREADS");
  CHECK(resolve_threads(0) >= 1);
}
