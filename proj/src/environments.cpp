#include "pcshift/environments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pcshift {

PiecewiseConstant left_step() { return PiecewiseConstant({0.5}, {1.0, 0.0}); }
PiecewiseConstant right_step() { return PiecewiseConstant({0.5}, {0.0, 1.0}); }

PiecewiseConstant box(double lo, double hi) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) {
    throw ParameterError("box needs 0 <= lo < hi <= 1");
  }
  std::vector<double> bp;
  std::vector<double> v;
  if (lo > 0.0) {
    bp.push_back(lo);
    v.push_back(0.0);
  }
  v.push_back(1.0);
  if (hi < 1.0) {
    bp.push_back(hi);
    v.push_back(0.0);
  }
  return PiecewiseConstant(std::move(bp), std::move(v));
}

UtilityStream counterexample_stream(std::size_t T) {
  if (T == 0 || T % 2 != 0) throw ParameterError("counterexample stream needs a positive even T");
  UtilityStream out;
  out.functions.assign(T / 2, left_step());
  out.functions.insert(out.functions.end(), T / 2, right_step());
  out.provenance = {{"generator", "counterexample"}, {"params", {{"T", T}}}};
  return out;
}

UtilityStream alternating_stream(std::size_t T, std::size_t block) {
  if (T == 0 || block == 0) throw ParameterError("alternating stream needs T, block >= 1");
  UtilityStream out;
  for (std::size_t t = 0; t < T; ++t) {
    out.functions.push_back((t / block) % 2 == 0 ? left_step() : right_step());
  }
  out.provenance = {{"generator", "alternating"}, {"params", {{"T", T}, {"block", block}}}};
  return out;
}

UtilityStream two_expert_stream(std::size_t T, std::size_t s, Rng& rng) {
  if (T == 0 || s == 0 || T % s != 0) {
    throw ParameterError("two-expert stream needs s >= 1 dividing T");
  }
  UtilityStream out;
  for (std::size_t t = 0; t < T; ++t) {
    out.functions.push_back(rng.coin() ? left_step() : right_step());
  }
  out.provenance = {{"generator", "two_expert"}, {"params", {{"T", T}, {"s", s}}}};
  return out;
}

UtilityStream random_stream(std::size_t T, std::size_t K, double H, Rng& rng, double quantum) {
  if (!(H > 0.0)) throw ParameterError("payoff bound H must be positive");
  if (quantum < 0.0) throw ParameterError("quantum must be nonnegative");
  UtilityStream out;
  out.H = H;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t k = rng.below(K + 1);
    std::vector<double> bp;
    for (std::size_t i = 0; i < k; ++i) {
      const double b = rng.uniform();
      if (b > 0.0) bp.push_back(b);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<double> v(bp.size() + 1);
    for (double& x : v) {
      x = rng.uniform() * H;
      if (quantum > 0.0) x = std::min(H, std::floor(x / quantum) * quantum);
    }
    out.functions.emplace_back(std::move(bp), std::move(v));
  }
  out.provenance = {{"generator", "random"},
                    {"params", {{"T", T}, {"K", K}, {"H", H}, {"quantum", quantum}}}};
  return out;
}

UtilityStream lower_bound_stream(std::size_t T, std::size_t s, double beta, Rng& rng) {
  if (T < 2 || s < 1) throw ParameterError("lower-bound stream needs T >= 2 and s >= 1");
  const double Td = static_cast<double>(T);
  const double critical = std::log(3.0 * static_cast<double>(s)) / std::log(Td);
  if (!(beta > critical) || !(beta < 1.0)) {
    throw ParameterError("lower-bound stream needs log(3s)/log(T) = " + std::to_string(critical) +
                         " < beta < 1, got " + std::to_string(beta));
  }
  const double delta = std::pow(Td, -beta);
  const double tail = std::pow(Td, 1.0 - beta);
  const auto rep = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(3.0 * tail)));
  const auto halving = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(tail)));
  const std::size_t per_phase = T / s;
  if (per_phase <= halving) {
    throw ParameterError("lower-bound phases of " + std::to_string(per_phase) +
                         " rounds cannot hold a halving block of " + std::to_string(halving));
  }

  UtilityStream out;
  out.declared_beta = beta;
  std::vector<double> cuts{0.0, 1.0};
  nlohmann::json phases = nlohmann::json::array();

  for (std::size_t k = 0; k < s; ++k) {
    // Widest gap between emitted discontinuities; leftmost on ties.
    std::size_t g = 0;
    for (std::size_t i = 1; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] - cuts[i] > cuts[g + 1] - cuts[g]) g = i;
    }
    const double lo = cuts[g];
    const double hi = cuts[g + 1];
    const std::size_t budget = k + 1 == s ? T - out.functions.size() : per_phase;
    const std::size_t main = budget - halving;

    const double band = std::min(1.0 / (3.0 * static_cast<double>(s)), (hi - lo) / 3.0);
    const auto fit = static_cast<std::size_t>(std::floor(band / delta)) + 1;
    const std::size_t points = std::clamp<std::size_t>(main / rep, 1, fit);
    const double first = 0.5 * (lo + hi) - 0.5 * static_cast<double>(points - 1) * delta;
    if (!(first > lo)) throw ParameterError("lower-bound phase interval too narrow for T^-beta");

    std::vector<double> pts(points);
    std::vector<double> score(points + 1, 0.0);  // payoff on each sub-interval of [lo, hi)
    for (std::size_t j = 0; j < points; ++j) {
      pts[j] = first + static_cast<double>(j) * delta;
      const std::size_t count = main / points + (j < main % points ? 1 : 0);
      for (std::size_t c = 0; c < count; ++c) {
        if (rng.coin()) {
          out.functions.push_back(box(lo, pts[j]));
          for (std::size_t a = 0; a <= j; ++a) score[a] += 1.0;
        } else {
          out.functions.push_back(box(pts[j], hi));
          for (std::size_t a = j + 1; a <= points; ++a) score[a] += 1.0;
        }
      }
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(score.begin(), score.end()) - score.begin());
    double a = best == 0 ? lo : pts[best - 1];
    double b = best == points ? hi : pts[best];
    for (std::size_t h = 0; h < halving; ++h) {
      const double m = 0.5 * (a + b);
      if (!(a < m && m < b)) throw ParameterError("halving block exhausted double resolution");
      if (rng.coin()) {
        out.functions.push_back(box(a, m));
        b = m;
      } else {
        out.functions.push_back(box(m, b));
        a = m;
      }
      cuts.push_back(m);
    }

    cuts.insert(cuts.end(), pts.begin(), pts.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    phases.push_back({{"interval", {lo, hi}},
                      {"points", pts},
                      {"main_functions", main},
                      {"halving_functions", halving},
                      {"final_interval", {a, b}}});
  }

  out.provenance = {{"generator", "lower_bound"},
                    {"params", {{"T", T}, {"s", s}, {"beta", beta}}},
                    {"spacing", delta},
                    {"functions_per_point", rep},
                    {"phases", phases}};
  return out;
}

std::vector<std::size_t> dispersion_profile(std::span<const PiecewiseConstant> stream,
                                            std::span<const double> epsilons) {
  if (stream.empty()) throw ParameterError("dispersion profile needs a nonempty stream");
  std::vector<std::pair<double, std::size_t>> events;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const auto& f = stream[t];
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
      if (f.values()[i] != f.values()[i + 1]) events.emplace_back(f.breakpoints()[i], t);
    }
  }
  std::sort(events.begin(), events.end());

  std::vector<std::size_t> out;
  for (double eps : epsilons) {
    std::map<std::size_t, std::size_t> live;
    std::size_t best = 0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < events.size(); ++hi) {
      ++live[events[hi].second];
      while (events[hi].first - events[lo].first >= 2.0 * eps) {
        auto it = live.find(events[lo].second);
        if (--it->second == 0) live.erase(it);
        ++lo;
      }
      best = std::max(best, live.size());
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace pcshift
