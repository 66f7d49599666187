#include "elab/simulator.hpp"

#include "elab/threading.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace elab {

namespace {

constexpr double kZ95 = 1.959963984540054;

Interval wilson(long k, long n) {
  if (n <= 0) return {};
  const double p = static_cast<double>(k) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

Interval exact_interval(double p) { return {p, p, p}; }

Interval mean_ci(const std::vector<double>& xs) {
  const int k = static_cast<int>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= k;
  if (k < 2) return {mean, mean, mean};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (k - 1) / k);
  return {mean, mean - kZ95 * se, mean + kZ95 * se};
}

std::vector<int> type_counts(int n, const Eigen::VectorXd& px) {
  std::vector<int> counts(px.size());
  int total = 0;
  for (int x = 0; x < px.size(); ++x) {
    const double exact = n * px[x];
    const int k = static_cast<int>(std::lround(exact));
    if (std::abs(exact - k) > 1e-9)
      throw std::invalid_argument("composition: n * px(x) must be integral");
    counts[x] = k;
    total += k;
  }
  if (total != n) throw std::invalid_argument("composition: counts do not sum to n");
  return counts;
}

// Per-symbol log-likelihood table; for binary symmetric channels the whole
// codeword likelihood reduces to a function of the Hamming distance, which
// keeps exact ties exactly tied.
struct Likelihood {
  const Dmc* w;
  bool binary_symmetric = false;
  double log_theta = 0.0, log_1m = 0.0;

  explicit Likelihood(const Dmc& channel) : w(&channel) {
    if (channel.nx() == 2 && channel.ny() == 2 && channel.w(0, 1) == channel.w(1, 0) &&
        channel.w(0, 0) == channel.w(1, 1) && channel.w(0, 1) > 0.0 && channel.w(0, 0) > 0.0) {
      binary_symmetric = true;
      log_theta = std::log(channel.w(0, 1));
      log_1m = std::log(channel.w(0, 0));
    }
  }

  double log_w(const Codeword& x, const Codeword& y) const {
    const int n = static_cast<int>(x.size());
    if (binary_symmetric) {
      int d = 0;
      for (int i = 0; i < n; ++i) d += x[i] != y[i];
      return d * log_theta + (n - d) * log_1m;
    }
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = w->w(x[i], y[i]);
      if (p <= 0.0) return -kInf;
      v += std::log(p);
    }
    return v;
  }
};

// Decision from per-message log metrics: accept m iff
// metric_m - log sum_{m' != m} exp(metric_m') >= n t.
Decision decide(const std::vector<double>& lm, double nt) {
  const int mcount = static_cast<int>(lm.size());
  Decision out;
  if (mcount == 2) {
    // no log-sum-exp needed; exact ties stay exact
    if (lm[0] > -kInf && lm[0] - lm[1] >= nt) out.accepted.push_back(0);
    if (lm[1] > -kInf && lm[1] - lm[0] >= nt) out.accepted.push_back(1);
    return out;
  }
  double mx = -kInf;
  for (double v : lm) mx = std::max(mx, v);
  if (mx == -kInf) return out;
  double total = 0.0;
  std::vector<double> es(lm.size());
  for (int i = 0; i < mcount; ++i) {
    es[i] = lm[i] > -kInf ? std::exp(lm[i] - mx) : 0.0;
    total += es[i];
  }
  for (int i = 0; i < mcount; ++i) {
    if (lm[i] == -kInf) continue;
    double rest = total - es[i];
    if (rest <= 1e-12 * total) {
      rest = 0.0;
      for (int j = 0; j < mcount; ++j)
        if (j != i && lm[j] > -kInf) rest += std::exp(lm[j] - mx);
    }
    if (rest <= 0.0) {
      out.accepted.push_back(i);  // no competitor mass at all
      continue;
    }
    if (lm[i] - (mx + std::log(rest)) >= nt) out.accepted.push_back(i);
  }
  return out;
}

// Universal metric as a function of Hamming distance for BSC families.
struct UniversalTable {
  std::vector<double> by_distance;  // size n+1, or empty when not applicable
};

UniversalTable universal_table(int n, const ChannelFamily& family, const FamilyExponents& fe,
                               double xi, double t) {
  UniversalTable tab;
  if (family.kind != ChannelFamily::Kind::bsc_grid) return tab;
  tab.by_distance.assign(n + 1, -kInf);
  for (int d = 0; d <= n; ++d) {
    double best = -kInf;
    for (int j = 0; j < family.size(); ++j) {
      const double th = family.thetas[j];
      const double e1 = fe.e1[j];
      const double v = n * ((xi == 0.0 ? 0.0 : xi * e1) + t) + d * std::log(th) +
                       (n - d) * std::log(1.0 - th);
      best = std::max(best, v);
    }
    tab.by_distance[d] = best;
  }
  return tab;
}

struct Tally {
  long e1 = 0, e2 = 0, erasure = 0;
  long wrong_total = 0;
  long trials = 0;

  void operator+=(const Tally& o) {
    e1 += o.e1;
    e2 += o.e2;
    erasure += o.erasure;
    wrong_total += o.wrong_total;
    trials += o.trials;
  }
};

void validate(const SimConfig& cfg) {
  if (cfg.n <= 0) throw std::invalid_argument("simulate: n must be positive");
  if (!is_distribution(cfg.px, 1e-9)) throw std::invalid_argument("simulate: px invalid");
  if (cfg.px.size() != cfg.true_channel.nx())
    throw std::invalid_argument("simulate: px/channel shape mismatch");
  type_counts(cfg.n, cfg.px);
  if (cfg.mode == SimMode::universal) {
    if (!cfg.family)
      throw std::invalid_argument("simulate: universal mode needs a channel family");
    if (cfg.family->channel(0).nx() != cfg.true_channel.nx() ||
        cfg.family->channel(0).ny() != cfg.true_channel.ny())
      throw std::invalid_argument("simulate: family/channel alphabet mismatch");
  }
  if (cfg.fixed_codebook) {
    if (cfg.fixed_codebook->size() < 2)
      throw std::invalid_argument("simulate: fixed codebook needs at least two codewords");
    for (const Codeword& c : *cfg.fixed_codebook)
      if (static_cast<int>(c.size()) != cfg.n)
        throw std::invalid_argument("simulate: fixed codeword length differs from n");
  }
  if (cfg.method == SimMethod::exhaustive) {
    const double space = std::pow(static_cast<double>(cfg.true_channel.ny()), cfg.n);
    if (space > double(1 << 22)) throw std::invalid_argument("simulate: exhaustive scale exceeded");
  }
}

FamilyExponents ensure_exponents(const SimConfig& cfg) {
  if (cfg.family_exponents) return *cfg.family_exponents;
  return compute_family_exponents(*cfg.family, cfg.r, cfg.t);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 on the combined word
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int codebook_size(int n, double r) {
  if (r < 0) throw std::domain_error("codebook_size: negative rate");
  const double raw = std::exp(n * r);
  double c = std::ceil(raw);
  if (c - raw > 1.0 - 1e-9) c -= 1.0;  // raw was integral up to fp noise
  const double m = std::max(std::ceil(raw - 1e-9), c);
  if (m < 2.0) throw std::invalid_argument("codebook_size: M < 2, raise n or r");
  if (m > 1e7) throw std::invalid_argument("codebook_size: M too large for simulation");
  return static_cast<int>(m);
}

std::vector<Codeword> sample_codebook(int n, double r, const Eigen::VectorXd& px, Rng& rng) {
  const std::vector<int> counts = type_counts(n, px);
  Codeword base;
  base.reserve(n);
  for (std::size_t x = 0; x < counts.size(); ++x)
    base.insert(base.end(), counts[x], static_cast<int>(x));
  const int m = codebook_size(n, r);
  std::vector<Codeword> book(m, base);
  for (Codeword& cw : book) {
    for (int i = n - 1; i > 0; --i) {  // Fisher-Yates
      const int j = static_cast<int>(rng.below(i + 1));
      std::swap(cw[i], cw[j]);
    }
  }
  return book;
}

Decision forney_decode(const Codeword& y, const std::vector<Codeword>& codebook, const Dmc& w,
                       double t) {
  const Likelihood lik(w);
  std::vector<double> lm(codebook.size());
  for (std::size_t m = 0; m < codebook.size(); ++m) lm[m] = lik.log_w(codebook[m], y);
  return decide(lm, static_cast<double>(y.size()) * t);
}

double universal_metric(const Codeword& x, const Codeword& y, const ChannelFamily& family,
                        const FamilyExponents& fe, double xi, double t) {
  const int n = static_cast<int>(x.size());
  double best = -kInf;
  for (int j = 0; j < family.size(); ++j) {
    const Likelihood lik(family.channel(j));
    const double lw = lik.log_w(x, y);
    if (lw == -kInf) continue;
    best = std::max(best, n * ((xi == 0.0 ? 0.0 : xi * fe.e1[j]) + t) + lw);
  }
  return best;
}

Decision universal_decode(const Codeword& y, const std::vector<Codeword>& codebook,
                          const ChannelFamily& family, const FamilyExponents& fe, double xi,
                          double t) {
  const int n = static_cast<int>(y.size());
  const UniversalTable tab = universal_table(n, family, fe, xi, t);
  std::vector<double> lm(codebook.size());
  for (std::size_t m = 0; m < codebook.size(); ++m) {
    if (!tab.by_distance.empty()) {
      int d = 0;
      for (int i = 0; i < n; ++i) d += codebook[m][i] != y[i];
      lm[m] = tab.by_distance[d];
    } else {
      lm[m] = universal_metric(codebook[m], y, family, fe, xi, t);
    }
  }
  return decide(lm, n * t);
}

namespace {

SimReport estimate_monte_carlo(const SimConfig& cfg, const FamilyExponents* fe) {
  const int n = cfg.n;
  const int m_count = cfg.fixed_codebook ? static_cast<int>(cfg.fixed_codebook->size())
                                         : codebook_size(n, cfg.r);
  const int ny = cfg.true_channel.ny();
  const UniversalTable tab =
      cfg.mode == SimMode::universal ? universal_table(n, *cfg.family, *fe, cfg.xi, cfg.t)
                                     : UniversalTable{};
  const Likelihood true_lik(cfg.true_channel);

  // fixed-size chunks with per-chunk derived streams keep the result
  // independent of the worker count
  constexpr long kChunk = 1024;
  const long chunks = (cfg.trials + kChunk - 1) / kChunk;
  std::vector<Tally> partial(static_cast<std::size_t>(chunks));

  auto run_chunk = [&](long c) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(c)));
    Tally tally;
    const long begin = c * kChunk;
    const long end = std::min<long>(cfg.trials, begin + kChunk);
    Codeword y(n);
    std::vector<double> lm(m_count);
    for (long trial = begin; trial < end; ++trial) {
      const std::vector<Codeword> book = cfg.fixed_codebook
                                             ? *cfg.fixed_codebook
                                             : sample_codebook(n, cfg.r, cfg.px, rng);
      const int sent = static_cast<int>(rng.below(book.size()));
      for (int i = 0; i < n; ++i) {
        const int x = book[sent][i];
        const double u = rng.uniform();
        double acc = 0.0;
        int sym = ny - 1;
        for (int yy = 0; yy < ny; ++yy) {
          acc += cfg.true_channel.w(x, yy);
          if (u < acc) {
            sym = yy;
            break;
          }
        }
        y[i] = sym;
      }
      for (std::size_t m = 0; m < book.size(); ++m) {
        if (cfg.mode == SimMode::forney) {
          lm[m] = true_lik.log_w(book[m], y);
        } else if (!tab.by_distance.empty()) {
          int d = 0;
          for (int i = 0; i < n; ++i) d += book[m][i] != y[i];
          lm[m] = tab.by_distance[d];
        } else {
          lm[m] = universal_metric(book[m], y, *cfg.family, *fe, cfg.xi, cfg.t);
        }
      }
      const Decision dec = decide(lm, n * cfg.t);
      bool sent_in = false;
      int wrong = 0;
      for (int a : dec.accepted) {
        if (a == sent)
          sent_in = true;
        else
          ++wrong;
      }
      tally.trials += 1;
      if (!sent_in) tally.e1 += 1;
      if (wrong > 0) tally.e2 += 1;
      if (dec.erasure()) tally.erasure += 1;
      tally.wrong_total += wrong;
    }
    partial[static_cast<std::size_t>(c)] = tally;
  };

  parallel_chunks(chunks, resolve_threads(cfg.threads),
                  [&](int, std::int64_t b, std::int64_t e) {
                    for (std::int64_t c = b; c < e; ++c) run_chunk(static_cast<long>(c));
                  });

  Tally total;
  for (const Tally& p : partial) total += p;

  SimReport rep;
  rep.n = n;
  rep.trials = total.trials;
  rep.seed = cfg.seed;
  rep.m = m_count;
  rep.effective_rate = std::log(static_cast<double>(m_count)) / n;
  rep.p_e1 = wilson(total.e1, total.trials);
  rep.p_e2 = wilson(total.e2, total.trials);
  rep.p_erasure = wilson(total.erasure, total.trials);
  rep.avg_list_size = static_cast<double>(total.wrong_total) / total.trials;
  rep.gamma_hat = rep.p_e2.p + std::exp(-n * cfg.t) * rep.p_e1.p;
  return rep;
}

struct ExactProbs {
  double e1 = 0.0, e2 = 0.0, erasure = 0.0;
};

template <typename MetricFn>
ExactProbs exact_for_codebook(const SimConfig& cfg, const std::vector<Codeword>& book,
                              const MetricFn& metric) {
  const int n = cfg.n;
  const int ny = cfg.true_channel.ny();
  const int m_count = static_cast<int>(book.size());
  const Likelihood true_lik(cfg.true_channel);
  long space = 1;
  for (int i = 0; i < n; ++i) space *= ny;

  ExactProbs out;
  Codeword y(n);
  std::vector<double> lm(m_count), wm(m_count);
  for (long idx = 0; idx < space; ++idx) {
    long v = idx;
    for (int i = 0; i < n; ++i) {
      y[i] = static_cast<int>(v % ny);
      v /= ny;
    }
    double total_w = 0.0;
    for (int m = 0; m < m_count; ++m) {
      wm[m] = std::exp(true_lik.log_w(book[m], y));
      total_w += wm[m];
      lm[m] = metric(book[m], y);
    }
    const Decision dec = decide(lm, n * cfg.t);
    std::vector<char> in_region(m_count, 0);
    for (int a : dec.accepted) in_region[a] = 1;
    for (int m = 0; m < m_count; ++m) {
      if (!in_region[m]) out.e1 += wm[m];          // transmitted m, y outside its region
      if (in_region[m]) out.e2 += total_w - wm[m];  // decoded m, transmitted elsewhere
    }
    if (dec.erasure()) out.erasure += total_w;
  }
  out.e1 /= m_count;
  out.e2 /= m_count;
  out.erasure /= m_count;
  return out;
}

SimReport estimate_exhaustive(const SimConfig& cfg, const FamilyExponents* fe) {
  const int n = cfg.n;
  const int m_count = cfg.fixed_codebook ? static_cast<int>(cfg.fixed_codebook->size())
                                         : codebook_size(n, cfg.r);
  const UniversalTable tab =
      cfg.mode == SimMode::universal ? universal_table(n, *cfg.family, *fe, cfg.xi, cfg.t)
                                     : UniversalTable{};
  const Likelihood true_lik(cfg.true_channel);

  auto metric = [&](const Codeword& x, const Codeword& y) {
    if (cfg.mode == SimMode::forney) return true_lik.log_w(x, y);
    if (!tab.by_distance.empty()) {
      int d = 0;
      for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
      return tab.by_distance[d];
    }
    return universal_metric(x, y, *cfg.family, *fe, cfg.xi, cfg.t);
  };

  std::vector<ExactProbs> runs;
  if (cfg.fixed_codebook) {
    runs.push_back(exact_for_codebook(cfg, *cfg.fixed_codebook, metric));
  } else {
    const int k = std::max(1, cfg.codebooks);
    runs.resize(k);
    parallel_chunks(k, resolve_threads(cfg.threads), [&](int, std::int64_t b, std::int64_t e) {
      for (std::int64_t c = b; c < e; ++c) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(c)));
        const std::vector<Codeword> book = sample_codebook(n, cfg.r, cfg.px, rng);
        runs[static_cast<std::size_t>(c)] = exact_for_codebook(cfg, book, metric);
      }
    });
  }

  std::vector<double> e1s, e2s, ers;
  for (const ExactProbs& p : runs) {
    e1s.push_back(p.e1);
    e2s.push_back(p.e2);
    ers.push_back(p.erasure);
  }

  SimReport rep;
  rep.n = n;
  rep.trials = static_cast<long>(runs.size());
  rep.seed = cfg.seed;
  rep.m = m_count;
  rep.effective_rate = std::log(static_cast<double>(m_count)) / n;
  rep.p_e1 = runs.size() == 1 ? exact_interval(e1s[0]) : mean_ci(e1s);
  rep.p_e2 = runs.size() == 1 ? exact_interval(e2s[0]) : mean_ci(e2s);
  rep.p_erasure = runs.size() == 1 ? exact_interval(ers[0]) : mean_ci(ers);
  rep.avg_list_size = rep.p_e2.p;  // multiplicity-counting definition
  rep.gamma_hat = rep.p_e2.p + std::exp(-n * cfg.t) * rep.p_e1.p;
  return rep;
}

}  // namespace

SimReport estimate(const SimConfig& cfg) {
  validate(cfg);
  std::optional<FamilyExponents> fe;
  if (cfg.mode == SimMode::universal) fe = ensure_exponents(cfg);
  if (cfg.method == SimMethod::monte_carlo)
    return estimate_monte_carlo(cfg, fe ? &*fe : nullptr);
  return estimate_exhaustive(cfg, fe ? &*fe : nullptr);
}

std::pair<double, double> estimate_a_terms(const SimConfig& cfg) {
  validate(cfg);
  if (cfg.mode != SimMode::universal)
    throw std::invalid_argument("estimate_a_terms: universal mode only");
  const FamilyExponents fe = ensure_exponents(cfg);
  const int n = cfg.n;
  const int ny = cfg.true_channel.ny();
  const UniversalTable tab = universal_table(n, *cfg.family, fe, cfg.xi, cfg.t);
  long space = 1;
  for (int i = 0; i < n; ++i) space *= ny;

  auto metric = [&](const Codeword& x, const Codeword& y) {
    if (!tab.by_distance.empty()) {
      int d = 0;
      for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
      return tab.by_distance[d];
    }
    return universal_metric(x, y, *cfg.family, fe, cfg.xi, cfg.t);
  };

  // stable shift: log f <= n (xi max e1 + |t|)
  double e1max = 0.0;
  for (double e : fe.e1)
    if (std::isfinite(e)) e1max = std::max(e1max, e);
  const double shift = n * (cfg.xi * e1max + std::abs(cfg.t)) + 1.0;

  const int kbooks = cfg.fixed_codebook ? 1 : std::max(1, cfg.codebooks);
  std::vector<double> a1s(kbooks), a2s(kbooks);
  parallel_chunks(kbooks, resolve_threads(cfg.threads), [&](int, std::int64_t b, std::int64_t e) {
    for (std::int64_t c = b; c < e; ++c) {
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(c)));
      const std::vector<Codeword> book =
          cfg.fixed_codebook ? *cfg.fixed_codebook : sample_codebook(n, cfg.r, cfg.px, rng);
      const int m_count = static_cast<int>(book.size());
      Codeword y(n);
      std::vector<double> lm(m_count);
      double sum1 = 0.0, sum2 = 0.0;
      for (long idx = 0; idx < space; ++idx) {
        long v = idx;
        for (int i = 0; i < n; ++i) {
          y[i] = static_cast<int>(v % ny);
          v /= ny;
        }
        for (int m = 0; m < m_count; ++m) lm[m] = metric(book[m], y);
        const Decision dec = decide(lm, n * cfg.t);
        std::vector<char> in_region(m_count, 0);
        for (int a : dec.accepted) in_region[a] = 1;
        double fsum = 0.0;
        for (int m = 0; m < m_count; ++m) fsum += std::exp(lm[m] - shift);
        for (int m = 0; m < m_count; ++m) {
          const double fm = std::exp(lm[m] - shift);
          if (!in_region[m]) sum1 += fm;
          if (in_region[m]) sum2 += fsum - fm;
        }
      }
      a1s[static_cast<std::size_t>(c)] =
          std::exp(shift - n * cfg.t) * sum1 / m_count;
      a2s[static_cast<std::size_t>(c)] = std::exp(shift) * sum2 / m_count;
    }
  });

  double a1 = 0.0, a2 = 0.0;
  for (int c = 0; c < kbooks; ++c) {
    a1 += a1s[c];
    a2 += a2s[c];
  }
  return {a1 / kbooks, a2 / kbooks};
}

SlopeFit slope_fit(const std::vector<std::pair<int, double>>& points) {
  SlopeFit fit;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].second <= 0.0) {
      fit.excluded.push_back(static_cast<int>(i));
      continue;
    }
    xs.push_back(points[i].first);
    ys.push_back(-std::log(points[i].second));
  }
  const int k = static_cast<int>(xs.size());
  if (k < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < k; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (k > 2) {
    double ss = 0.0;
    for (int i = 0; i < k; ++i) {
      const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss += resid * resid;
    }
    fit.se = std::sqrt(ss / (k - 2) / sxx);
  }
  return fit;
}

}  // namespace elab
