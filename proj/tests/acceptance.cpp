// Acceptance criteria: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pcshift/bench.hpp"
#include "pcshift/environments.hpp"
#include "pcshift/mixture_sampler.hpp"

using namespace pcshift;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::vector<int> failed;
std::vector<int> known;

void criterion(int id, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = o.passed && secs <= budget_seconds;
  if (!ok) failed.push_back(id);
  const bool expected = std::find(known.begin(), known.end(), id) != known.end();
  std::printf("%s criterion %d: %s (%.2fs, limit %.0fs)%s\n", ok ? "PASS" : "FAIL", id,
              o.detail.c_str(), secs, budget_seconds,
              expected && !ok ? " [known failure]" : "");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Expected payoffs of one forecaster over the stream.
std::vector<double> play_expected(ForecasterKind kind, const ForecasterConfig& c,
                                  const UtilityStream& s, Rng& restart) {
  auto f = make_forecaster(kind, c, s.horizon());
  std::vector<double> out;
  out.reserve(s.horizon());
  for (const auto& u : s.functions) {
    out.push_back(f->expected_payoff(u));
    f->observe(u, restart);
  }
  return out;
}

double total(const std::vector<double>& xs) {
  double t = 0.0;
  for (double x : xs) t += x;
  return t;
}

ForecasterConfig shifted_config(std::size_t T, std::size_t s, double beta, bool explore = true) {
  const auto p = default_params_shifted(T, s, beta);
  ForecasterConfig c;
  c.lambda = p.lambda;
  c.alpha = explore ? p.alpha : 0.0;
  c.beta = beta;
  return c;
}

double worst_relative_gap(const LogDensity& a, const LogDensity& b) {
  const auto grid = merge(a.breakpoints(), b.breakpoints());
  const auto va = values_on(a, grid);
  const auto vb = values_on(b, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    worst = std::max(worst, std::abs(std::expm1(va[i] - vb[i])));
  }
  return worst;
}

constexpr std::size_t kReplicates = 20;
const std::vector<std::size_t> kSweep{50, 100, 200, 400};

}  // namespace

int main(int argc, char** argv) {
  // --known-failure N: criterion N is reported but does not fail the run.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--known-failure") known.push_back(std::atoi(argv[++i]));
  }

  criterion(1, 60, [] {
    std::vector<Aggregate> fs;
    Aggregate ef400;
    for (std::size_t T : kSweep) {
      const auto s = counterexample_stream(T);
      const double opt = shifted_opt(s.view(), 2).value;
      std::vector<double> ef_avg, fs_avg;
      for (std::size_t r = 0; r < kReplicates; ++r) {
        Rng z(derive_seed(1, {T, r}));
        ef_avg.push_back((opt - total(play_expected(ForecasterKind::exponential,
                                                    shifted_config(T, 2, 0.5, false), s, z))) /
                         static_cast<double>(T));
        fs_avg.push_back((opt - total(play_expected(ForecasterKind::fixed_share,
                                                    shifted_config(T, 2, 0.5), s, z))) /
                         static_cast<double>(T));
      }
      fs.push_back(aggregate(fs_avg));
      if (T == 400) ef400 = aggregate(ef_avg);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < fs.size(); ++i) {
      monotone = monotone && fs[i].mean <= fs[i - 1].mean + fs[i].standard_error +
                                               fs[i - 1].standard_error + 1e-12;
    }
    const bool ok = ef400.mean >= 0.20 && fs.back().mean <= 0.15 && monotone;
    return Outcome{ok, fmt("EF avg 2-shifted regret %.4f (>= 0.20); FS %.4f/%.4f/%.4f/%.4f at "
                           "T=50..400 (<= 0.15 at 400, decreasing: %s)",
                           ef400.mean, fs[0].mean, fs[1].mean, fs[2].mean, fs[3].mean,
                           monotone ? "yes" : "no")};
  });

  criterion(2, 60, [] {
    std::vector<double> means;
    for (std::size_t T : kSweep) {
      const auto s = counterexample_stream(T);
      const double opt = shifted_opt(s.view(), 2).value;
      std::vector<double> avg;
      for (std::size_t r = 0; r < kReplicates; ++r) {
        Rng z(derive_seed(2, {T, r}));
        avg.push_back((opt - total(play_expected(ForecasterKind::random_restart,
                                                 shifted_config(T, 2, 0.5), s, z))) /
                      static_cast<double>(T));
      }
      means.push_back(aggregate(avg).mean);
    }
    const double floor = *std::min_element(means.begin(), means.end());
    return Outcome{floor >= 0.04,
                   fmt("RR avg 2-shifted regret %.4f/%.4f/%.4f/%.4f at T=50..400 (all >= 0.04)",
                       means[0], means[1], means[2], means[3])};
  });

  criterion(3, 30, [] {
    Rng gen(3);
    double worst = 0.0;
    double worst_sum = 0.0;
    for (int c = 0; c < 100; ++c) {
      const std::size_t T = 1 + gen.below(50);
      const auto s = random_stream(T, 5, 1.0, gen);
      ForecasterConfig conf;
      conf.lambda = 0.05 + 0.95 * gen.uniform();
      conf.alpha = 0.01 + 0.98 * gen.uniform();
      FixedShareForecaster fs(conf);
      MixtureSampler m(conf.lambda, conf.alpha);
      for (const auto& u : s.functions) {
        fs.observe(u);
        m.observe(u);
        worst = std::max(worst, worst_relative_gap(m.mixture_density(), *fs.density()));
        double sum = 0.0;
        for (double lc : m.log_C()) sum += std::exp(lc);
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      }
    }
    return Outcome{worst <= 1e-9 && worst_sum <= 1e-9,
                   fmt("mixture vs direct density rel. error %.3g, |sum C - 1| %.3g (<= 1e-9)",
                       worst, worst_sum)};
  });

  criterion(4, 10, [] {
    Rng gen(4);
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
      const std::size_t T = 1 + gen.below(6);
      const auto s = random_stream(T, 4, 1.0, gen);
      const double lambda = 0.1 + 0.9 * gen.uniform();
      const double alpha = 0.02 + 0.96 * gen.uniform();
      ForecasterConfig conf;
      conf.lambda = lambda;
      conf.alpha = alpha;
      FixedShareForecaster fs(conf);
      for (const auto& u : s.functions) fs.observe(u);
      const double brute = oracle::partition_sum(s.view(), lambda, alpha);
      worst = std::max(worst, std::abs(std::exp(log_integral(fs.weight())) / brute - 1.0));
    }
    return Outcome{worst <= 1e-9, fmt("normalizer vs restart-pattern sum rel. error %.3g (<= 1e-9)", worst)};
  });

  criterion(5, 60, [] {
    Rng gen(5);
    double worst_z = 0.0;
    std::size_t cells = 0;
    for (int c = 0; c < 10; ++c) {
      const std::size_t T = 1 + gen.below(8);
      const auto s = random_stream(T, 3, 1.0, gen);
      ForecasterConfig conf;
      conf.lambda = 0.2 + 0.8 * gen.uniform();
      conf.alpha = 0.05 + 0.9 * gen.uniform();
      FixedShareForecaster fs(conf);
      for (const auto& u : s.functions) fs.observe(u);
      const auto mids = oracle::cell_midpoints(s.view());
      const int runs = 10000;
      std::vector<double> sum(mids.size(), 0.0), sq(mids.size(), 0.0);
      for (int r = 0; r < runs; ++r) {
        RandomRestartForecaster rr(conf);
        Rng z(derive_seed(5, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(r)}));
        for (const auto& u : s.functions) rr.observe(u, z);
        for (std::size_t i = 0; i < mids.size(); ++i) {
          const double w = std::exp(rr.weight()(mids[i]));
          sum[i] += w;
          sq[i] += w * w;
        }
      }
      for (std::size_t i = 0; i < mids.size(); ++i) {
        const double mean = sum[i] / runs;
        const double se = std::sqrt(std::max(0.0, sq[i] / runs - mean * mean) / runs);
        const double gap = std::abs(mean - std::exp(fs.weight()(mids[i])));
        const double z = se > 0.0 ? gap / se : (gap <= 1e-12 ? 0.0 : INFINITY);
        worst_z = std::max(worst_z, z);
        ++cells;
      }
    }
    return Outcome{worst_z <= 4.0, fmt("RR mean weight vs FS weight, worst |z| %.2f over %zu cells (<= 4)",
                                       worst_z, cells)};
  });

  criterion(6, 120, [] {
    const std::size_t T = 1024;
    std::string detail;
    bool ok = true;
    for (std::size_t s : {1u, 4u}) {
      std::vector<double> excess;
      for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(derive_seed(6, {s, seed}));
        const auto st = two_expert_stream(T, s, rng);
        excess.push_back(shifted_opt(st.view(), s).value - 0.5 * static_cast<double>(T));
      }
      const auto a = aggregate(excess);
      const double bound = std::sqrt(static_cast<double>(s * T) / 8.0);
      ok = ok && a.mean >= bound - 3.0 * a.standard_error;
      detail += fmt("s=%zu: E[OPT]-T/2 = %.2f +- %.2f vs sqrt(sT/8) = %.2f; ", s, a.mean,
                    a.standard_error, bound);
    }
    return Outcome{ok, detail};
  });

  criterion(7, 300, [] {
    const std::size_t T = 2048;
    const std::size_t s = 4;
    const double beta = 0.6;
    const double floor = 0.1 * std::sqrt(static_cast<double>(s * T));
    struct Alg {
      const char* name;
      ForecasterKind kind;
      ForecasterConfig config;
    };
    std::vector<Alg> algs;
    algs.push_back({"EF", ForecasterKind::exponential, shifted_config(T, s, beta, false)});
    algs.push_back({"FS", ForecasterKind::fixed_share, shifted_config(T, s, beta)});
    {
      const auto p = default_params_sparse(T, s, s, beta);
      ForecasterConfig c;
      c.lambda = p.lambda;
      c.alpha = p.alpha;
      c.gamma = p.gamma;
      c.beta = beta;
      algs.push_back({"GS", ForecasterKind::generalized_share, c});
    }
    algs.push_back({"RR", ForecasterKind::random_restart, shifted_config(T, s, beta)});
    algs.push_back({"DFS", ForecasterKind::discrete_fixed_share, shifted_config(T, s, beta)});
    std::vector<std::vector<double>> regrets(algs.size());
    double worst_constant = 0.0;
    const double eps = std::pow(static_cast<double>(T), -beta);
    const double scale = std::pow(static_cast<double>(T), 1.0 - beta) * std::log(static_cast<double>(T));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(derive_seed(7, {seed}));
      const auto st = lower_bound_stream(T, s, beta, rng);
      const double opt = shifted_opt(st.view(), s).value;
      for (std::size_t a = 0; a < algs.size(); ++a) {
        Rng z(derive_seed(7, {seed, a}));
        regrets[a].push_back(opt - total(play_expected(algs[a].kind, algs[a].config, st, z)));
      }
      const std::vector<double> e{eps};
      worst_constant = std::max(
          worst_constant, static_cast<double>(dispersion_profile(st.view(), e)[0]) / scale);
    }
    bool ok = worst_constant <= 10.0;
    std::string detail;
    for (std::size_t a = 0; a < algs.size(); ++a) {
      const double m = aggregate(regrets[a]).mean;
      ok = ok && m >= floor;
      detail += fmt("%s %.1f, ", algs[a].name, m);
    }
    detail += fmt("4-shifted regret vs 0.1 sqrt(sT) = %.2f; dispersion constant %.2f (<= 10)",
                  floor, worst_constant);
    return Outcome{ok, detail};
  });

  criterion(8, 30, [] {
    Rng gen(8);
    std::size_t mismatches = 0;
    for (int c = 0; c < 100; ++c) {
      const std::size_t T = 1 + gen.below(8);
      const auto s = random_stream(T, 2, 1.0, gen, 1.0 / 256.0);
      const std::size_t sh = 1 + gen.below(4);
      const std::size_t m = 1 + gen.below(std::min<std::size_t>(3, sh));
      const PayoffTable table(s.view());
      if (shifted_opt(table, sh).value != oracle::best_segmentation(s.view(), sh, sh)) ++mismatches;
      if (sparse_shifted_opt(table, sh, m).value != oracle::best_segmentation(s.view(), sh, m)) {
        ++mismatches;
      }
    }
    return Outcome{mismatches == 0,
                   fmt("%zu of 200 oracle values differ from enumeration (exact)", mismatches)};
  });

  criterion(9, 600, [] {
    const std::size_t T = 400;
    const std::size_t block = 50;
    const std::size_t s = T / block;
    const std::size_t m = 2;
    const auto st = alternating_stream(T, block);
    const double opt = sparse_shifted_opt(st.view(), s, m).value;
    const auto sp = default_params_sparse(T, s, m, 0.5);
    ForecasterConfig gs;
    gs.lambda = sp.lambda;
    gs.alpha = sp.alpha;
    gs.gamma = sp.gamma;
    std::vector<double> diff, g, f;
    for (std::size_t r = 0; r < kReplicates; ++r) {
      Rng z(derive_seed(9, {r}));
      const double rg = (opt - total(play_expected(ForecasterKind::generalized_share, gs, st, z))) / T;
      const double rf =
          (opt - total(play_expected(ForecasterKind::fixed_share, shifted_config(T, s, 0.5), st, z))) / T;
      g.push_back(rg);
      f.push_back(rf);
      diff.push_back(rg - rf);
    }
    const auto d = aggregate(diff);
    return Outcome{d.mean <= d.standard_error,
                   fmt("avg (2-sparse, 8-shifted) regret GS %.4f vs FS %.4f, paired diff %.4f +- %.4f "
                       "(<= stderr)",
                       aggregate(g).mean, aggregate(f).mean, d.mean, d.standard_error)};
  });

  criterion(10, 600, [] {
    const std::size_t T = 60;
    std::vector<double> diff, e, f;
    for (std::size_t r = 0; r < kReplicates; ++r) {
      const auto st = generate("clustering", {{"scenario", "two_phase"}, {"T", T}},
                               derive_seed(10, {r}));
      const double opt = shifted_opt(st.view(), 2).value;
      Rng z(0);
      const double re =
          (opt - total(play_expected(ForecasterKind::exponential, shifted_config(T, 2, 0.5, false), st, z))) / T;
      const double rf =
          (opt - total(play_expected(ForecasterKind::fixed_share, shifted_config(T, 2, 0.5), st, z))) / T;
      e.push_back(re);
      f.push_back(rf);
      diff.push_back(re - rf);
    }
    const auto d = aggregate(diff);
    return Outcome{d.mean > d.standard_error,
                   fmt("avg 2-shifted regret EF %.4f vs FS %.4f, paired EF - FS %.4f +- %.4f (> stderr)",
                       aggregate(e).mean, aggregate(f).mean, d.mean, d.standard_error)};
  });

  int unexpected = 0;
  for (int id : failed) {
    if (std::find(known.begin(), known.end(), id) == known.end()) ++unexpected;
  }
  for (int id : known) {
    if (std::find(failed.begin(), failed.end(), id) == failed.end()) {
      std::printf("note: criterion %d was listed as a known failure but passed\n", id);
    }
  }
  std::printf("%zu of 10 criteria passed\n", 10 - failed.size());
  return unexpected == 0 ? 0 : 1;
}
