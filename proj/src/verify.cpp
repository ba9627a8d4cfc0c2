#include "pcshift/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "pcshift/environments.hpp"
#include "pcshift/forecasters.hpp"
#include "pcshift/mixture_sampler.hpp"
#include "pcshift/regret.hpp"

namespace pcshift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Worst |p/q - 1| over the merged pieces of two log densities.
double relative_gap(const LogDensity& a, const LogDensity& b) {
  const auto grid = merge(a.breakpoints(), b.breakpoints());
  const auto va = values_on(a, grid);
  const auto vb = values_on(b, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(std::expm1(va[i] - vb[i])));
  return worst;
}

// log of int exp(lambda * sum_{t in [from, to)} u_t) * exp(prior).
double log_restarted_integral(std::span<const PiecewiseConstant> u, std::size_t from,
                              std::size_t to, double lambda, const LogDensity& prior) {
  LogDensity acc = prior;
  for (std::size_t t = from; t < to; ++t) acc = accumulate(acc, u[t - 1], lambda);
  return log_integral(acc);
}

struct Tracker {
  CheckResult r;
  Tracker(std::string name, double tol) {
    r.name = std::move(name);
    r.tolerance = tol;
  }
  void add(double deviation) {
    r.deviation = std::max(r.deviation, deviation);
    ++r.cases;
  }
  CheckResult done() {
    r.passed = r.deviation <= r.tolerance;
    return r;
  }
};

SuiteReport identities() {
  SuiteReport rep{"identities", {}};
  Rng rng(20240601);

  Tracker normalizer("fs_gs_normalizer_relative", 1e-9);
  Tracker zero_alpha("alpha_zero_bitwise_mismatches", 0.0);
  Tracker pi_norm("gs_prior_integral_abs", 1e-9);
  for (int c = 0; c < 40; ++c) {
    const auto s = random_stream(20, 4, 1.0, rng);
    ForecasterConfig cfg;
    cfg.lambda = 0.2 + 0.8 * rng.uniform();
    cfg.alpha = rng.uniform();
    cfg.gamma = rng.uniform();
    FixedShareForecaster fs(cfg);
    GeneralizedShareForecaster gs(cfg);
    ForecasterConfig off = cfg;
    off.alpha = 0.0;
    ExponentialForecaster ef(off);
    FixedShareForecaster fs0(off);
    GeneralizedShareForecaster gs0(off);
    RandomRestartForecaster rr0(off);
    Rng dummy(1);
    double mismatches = 0.0;
    for (const auto& u : s.functions) {
      const double fs_expect = log_integral(accumulate(fs.weight(), u, cfg.lambda));
      const double gs_expect = log_integral(accumulate(gs.weight(), u, cfg.lambda));
      fs.observe(u);
      gs.observe(u);
      normalizer.add(std::abs(std::expm1(log_integral(fs.weight()) - fs_expect)));
      normalizer.add(std::abs(std::expm1(log_integral(gs.weight()) - gs_expect)));
      pi_norm.add(std::abs(std::expm1(log_integral(gs.last_prior()))));
      ef.observe(u, dummy);
      fs0.observe(u);
      gs0.observe(u);
      rr0.observe(u, dummy);
      mismatches += !(fs0.weight() == ef.weight()) + !(gs0.weight() == ef.weight()) +
                    !(rr0.weight() == ef.weight());
    }
    zero_alpha.add(mismatches);
  }
  rep.checks.push_back(normalizer.done());
  rep.checks.push_back(zero_alpha.done());
  rep.checks.push_back(pi_norm.done());

  // W_{T+1} as a sum over restart patterns.
  Tracker partition("partition_sum_relative", 1e-9);
  for (int c = 0; c < 50; ++c) {
    const std::size_t T = 1 + rng.below(6);
    const auto s = random_stream(T, 3, 1.0, rng);
    ForecasterConfig cfg;
    cfg.lambda = 0.1 + 0.9 * rng.uniform();
    cfg.alpha = rng.uniform();
    FixedShareForecaster fs(cfg);
    for (const auto& u : s.functions) fs.observe(u);
    const auto u = s.view();
    double total = kNegInf;
    for (std::size_t mask = 0; mask < (std::size_t{1} << (T - 1)); ++mask) {
      std::vector<std::size_t> cuts{1};
      for (std::size_t b = 0; b + 1 < T; ++b) {
        if (mask >> b & 1) cuts.push_back(b + 2);
      }
      cuts.push_back(T + 1);
      const double segs = static_cast<double>(cuts.size() - 1);
      double term = (segs - 1.0) * std::log(cfg.alpha) +
                    (static_cast<double>(T) - segs) * std::log1p(-cfg.alpha);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        term += log_restarted_integral(u, cuts[i], cuts[i + 1], cfg.lambda, LogDensity(0.0));
      }
      total = log_add_exp(total, term);
    }
    partition.add(std::abs(std::expm1(log_integral(fs.weight()) - total)));
  }
  rep.checks.push_back(partition.done());

  // W_T >= alpha (1-alpha)^{T-t} W~(pi; t, T) W_t with pi the prior that formed w_t.
  Tracker lower("gs_lower_bound_violation_log", 1e-12);
  for (int c = 0; c < 30; ++c) {
    const std::size_t T = 2 + rng.below(12);
    const auto s = random_stream(T, 3, 1.0, rng);
    ForecasterConfig cfg;
    cfg.lambda = 0.1 + 0.9 * rng.uniform();
    cfg.alpha = 0.01 + 0.98 * rng.uniform();
    cfg.gamma = rng.uniform();
    GeneralizedShareForecaster gs(cfg);
    std::vector<double> log_W{0.0};
    std::vector<LogDensity> priors{LogDensity(0.0)};
    for (std::size_t t = 1; t < T; ++t) {
      gs.observe(s.functions[t - 1]);
      log_W.push_back(log_integral(gs.weight()));
      priors.push_back(gs.last_prior());
    }
    for (std::size_t t = 1; t < T; ++t) {
      const double rhs = std::log(cfg.alpha) + static_cast<double>(T - t) * std::log1p(-cfg.alpha) +
                         log_restarted_integral(s.view(), t, T, cfg.lambda, priors[t - 1]) +
                         log_W[t - 1];
      lower.add(std::max(0.0, rhs - log_W[T - 1]));
    }
  }
  rep.checks.push_back(lower.done());
  return rep;
}

SuiteReport sampler() {
  SuiteReport rep{"sampler", {}};
  Rng rng(777);
  Tracker density("mixture_vs_direct_density_relative", 1e-9);
  Tracker simplex("coefficient_simplex_abs", 1e-9);
  Tracker wcons("log_W_vs_direct_relative", 1e-9);
  for (int c = 0; c < 100; ++c) {
    const std::size_t T = 1 + rng.below(50);
    const auto s = random_stream(T, 5, 1.0, rng);
    ForecasterConfig cfg;
    cfg.lambda = 0.05 + 0.95 * rng.uniform();
    cfg.alpha = 0.01 + 0.98 * rng.uniform();
    FixedShareForecaster fs(cfg);
    MixtureSampler mix(cfg.lambda, cfg.alpha);
    for (const auto& u : s.functions) {
      fs.observe(u);
      mix.observe(u);
      density.add(relative_gap(mix.mixture_density(), *fs.density()));
      const double log_sum = log_sum_exp(mix.log_C());
      simplex.add(std::abs(std::expm1(log_sum)));
      wcons.add(std::abs(std::expm1(mix.log_W().back() - log_integral(fs.weight()))));
    }
  }
  rep.checks.push_back(density.done());
  rep.checks.push_back(simplex.done());
  rep.checks.push_back(wcons.done());
  return rep;
}

// Exhaustive search over segmentations (<= s segments) and candidate experts
// (midpoints of the global merged grid), allowing at most m distinct experts.
double brute_sparse(std::span<const PiecewiseConstant> u, std::size_t s, std::size_t m) {
  std::vector<std::vector<double>> lists;
  for (const auto& f : u) lists.push_back(f.breakpoints());
  const auto grid = merge(lists);
  std::vector<double> cand;
  for (std::size_t i = 0; i <= grid.size(); ++i) {
    cand.push_back(0.5 * ((i == 0 ? 0.0 : grid[i - 1]) + (i == grid.size() ? 1.0 : grid[i])));
  }
  const std::size_t T = u.size();
  double best = kNegInf;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t start,
                                                                   std::size_t segs, double acc) {
    if (start > T) {
      best = std::max(best, acc);
      return;
    }
    if (segs == s) return;
    for (std::size_t end = start; end <= T; ++end) {
      for (std::size_t c = 0; c < cand.size(); ++c) {
        std::vector<std::size_t> used = pick;
        used.push_back(c);
        std::sort(used.begin(), used.end());
        if (std::unique(used.begin(), used.end()) - used.begin() > static_cast<long>(m)) continue;
        double v = 0.0;
        for (std::size_t t = start; t <= end; ++t) v += u[t - 1](cand[c]);
        pick.push_back(c);
        rec(end + 1, segs + 1, acc + v);
        pick.pop_back();
      }
    }
  };
  rec(1, 0, 0.0);
  return best;
}

SuiteReport oracles() {
  SuiteReport rep{"oracles", {}};
  Rng rng(4242);
  Tracker shifted("shifted_vs_enumeration_abs", 0.0);
  Tracker sparse("sparse_vs_enumeration_abs", 0.0);
  Tracker sandwich("sparse_le_shifted_violation", 0.0);
  for (int c = 0; c < 30; ++c) {
    const std::size_t T = 1 + rng.below(6);
    const auto st = random_stream(T, 2, 1.0, rng, 1.0 / 256.0);
    const std::size_t s = 1 + rng.below(std::min<std::size_t>(3, T));
    const std::size_t m = 1 + rng.below(s);
    const PayoffTable table(st.view());
    const double opt = shifted_opt(table, s).value;
    const double sp = sparse_shifted_opt(table, s, m).value;
    shifted.add(std::abs(opt - brute_sparse(st.view(), s, s)));
    sparse.add(std::abs(sp - brute_sparse(st.view(), s, m)));
    sandwich.add(std::max(0.0, sp - opt));
  }
  rep.checks.push_back(shifted.done());
  rep.checks.push_back(sparse.done());
  rep.checks.push_back(sandwich.done());

  Tracker monotone("shifted_monotone_in_s_violation", 0.0);
  Tracker adaptive_mono("adaptive_monotone_in_tau_violation", 0.0);
  for (int c = 0; c < 20; ++c) {
    const auto st = random_stream(24, 3, 1.0, rng);
    const PayoffTable table(st.view());
    double prev = kNegInf;
    for (std::size_t s = 1; s <= 24; s += 3) {
      const double v = shifted_opt(table, s).value;
      monotone.add(std::max(0.0, prev - v));
      prev = v;
    }
    std::vector<double> payoff(24);
    for (double& p : payoff) p = rng.uniform();
    double prev_a = kNegInf;
    for (std::size_t tau = 1; tau <= 24; tau += 4) {
      const double v = adaptive_regret(table, payoff, tau);
      adaptive_mono.add(std::max(0.0, prev_a - v));
      prev_a = v;
    }
  }
  rep.checks.push_back(monotone.done());
  rep.checks.push_back(adaptive_mono.done());
  return rep;
}

SuiteReport lowerbound() {
  SuiteReport rep{"lowerbound", {}};
  const std::size_t T = 512;
  const std::size_t s = 4;
  const double beta = 0.6;
  Rng rng(99);
  const auto st = lower_bound_stream(T, s, beta, rng);

  Tracker count("function_count_abs", 0.0);
  count.add(std::abs(static_cast<double>(st.horizon()) - static_cast<double>(T)));
  rep.checks.push_back(count.done());

  Tracker spacing("point_spacing_abs", 1e-12);
  const double delta = std::pow(static_cast<double>(T), -beta);
  for (const auto& phase : st.provenance.at("phases")) {
    const auto pts = phase.at("points").get<std::vector<double>>();
    for (std::size_t i = 1; i < pts.size(); ++i) spacing.add(std::abs(pts[i] - pts[i - 1] - delta));
  }
  rep.checks.push_back(spacing.done());

  Tracker disp("dispersion_fitted_constant", 10.0);
  const std::vector<double> eps{delta};
  const double worst = static_cast<double>(dispersion_profile(st.view(), eps)[0]);
  disp.add(worst / (std::pow(static_cast<double>(T), 1.0 - beta) * std::log(static_cast<double>(T))));
  rep.checks.push_back(disp.done());

  Tracker strict("critical_beta_accepted", 0.0);
  const double critical = std::log(3.0 * static_cast<double>(s)) / std::log(static_cast<double>(T));
  double accepted = 0.0;
  try {
    Rng r2(1);
    (void)lower_bound_stream(T, s, critical, r2);
    accepted = 1.0;
  } catch (const ParameterError&) {
  }
  strict.add(accepted);
  rep.checks.push_back(strict.done());
  return rep;
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name},
                  {"passed", c.passed},
                  {"deviation", c.deviation},
                  {"tolerance", c.tolerance},
                  {"cases", c.cases}});
  }
  return {{"suite", suite}, {"passed", passed()}, {"checks", cs}};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "sampler", "oracles", "lowerbound"};
  return names;
}

std::vector<SuiteReport> verify(std::string_view suite) {
  static const std::map<std::string, std::function<SuiteReport()>, std::less<>> table{
      {"identities", identities},
      {"sampler", sampler},
      {"oracles", oracles},
      {"lowerbound", lowerbound}};
  std::vector<SuiteReport> out;
  if (suite == "all") {
    for (const auto& name : suite_names()) out.push_back(table.at(name)());
    return out;
  }
  const auto it = table.find(suite);
  if (it == table.end()) throw ValidationError("unknown suite '" + std::string(suite) + "'");
  out.push_back(it->second());
  return out;
}

}  // namespace pcshift
