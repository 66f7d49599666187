#pragma once

#include "elab/universal_fraction.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace elab {

/// Deterministic RNG wrapper; all sampling goes through these two primitives
/// so results are reproducible across platforms and thread counts.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform() { return (gen() >> 11) * 0x1.0p-53; }  // [0,1)
  std::uint64_t below(std::uint64_t bound) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
      v = gen();
    } while (v >= limit);
    return v % bound;
  }
};

/// Stream derivation (splitmix64 over the pair) for per-chunk generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

using Codeword = std::vector<int>;

enum class SimMode { forney, universal };
enum class SimMethod { monte_carlo, exhaustive };

struct SimConfig {
  int n = 8;
  double r = 0.1;
  double t = 0.0;
  Dmc true_channel;
  Eigen::VectorXd px;
  SimMode mode = SimMode::forney;
  SimMethod method = SimMethod::monte_carlo;
  long trials = 100000;
  std::uint64_t seed = 1;
  int codebooks = 64;  // exhaustive: number of sampled codebooks
  std::optional<std::vector<Codeword>> fixed_codebook;
  // universal mode
  std::optional<ChannelFamily> family;
  std::optional<FamilyExponents> family_exponents;
  double xi = 1.0;
  int threads = 0;
};

struct Interval {
  double p = 0.0, lo = 0.0, hi = 0.0;
};

struct SimReport {
  int n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
  int m = 0;
  double effective_rate = 0.0;
  Interval p_e1, p_e2, p_erasure;
  double avg_list_size = 0.0;
  double gamma_hat = 0.0;
};

/// M = ceil(e^{nR}); throws when M < 2.
int codebook_size(int n, double r);

/// M codewords drawn uniformly from the type class of px (n px integral).
std::vector<Codeword> sample_codebook(int n, double r, const Eigen::VectorXd& px, Rng& rng);

struct Decision {
  std::vector<int> accepted;
  bool erasure() const { return accepted.empty(); }
};

/// Ratio test against the true channel likelihoods; ties pass (the region
/// definition is closed).
Decision forney_decode(const Codeword& y, const std::vector<Codeword>& codebook, const Dmc& w,
                       double t);

/// log f(x, y): the weighted generalized-likelihood metric over the family.
double universal_metric(const Codeword& x, const Codeword& y, const ChannelFamily& family,
                        const FamilyExponents& fe, double xi, double t);

Decision universal_decode(const Codeword& y, const std::vector<Codeword>& codebook,
                          const ChannelFamily& family, const FamilyExponents& fe, double xi,
                          double t);

SimReport estimate(const SimConfig& cfg);

/// Exact ensemble estimates of the two competitive-minimax cost terms
/// (universal mode, exhaustive scale).
std::pair<double, double> estimate_a_terms(const SimConfig& cfg);

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double intercept = 0.0;
  std::vector<int> excluded;  // indices with p <= 0
};

/// Least-squares fit of -log p against n.
SlopeFit slope_fit(const std::vector<std::pair<int, double>>& points);

}  // namespace elab
