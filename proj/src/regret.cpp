#include "pcshift/regret.hpp"

#include <deque>
#include <numeric>
#include <ostream>

namespace pcshift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_interval(std::size_t r, std::size_t q, std::size_t T) {
  if (!(r >= 1 && r <= q && q <= T)) {
    throw std::out_of_range("interval [" + std::to_string(r) + ", " + std::to_string(q) +
                            "] not inside [1, " + std::to_string(T) + "]");
  }
}

double piece_mid(const std::vector<double>& grid, std::size_t i) {
  const double left = i == 0 ? 0.0 : grid[i - 1];
  const double right = i == grid.size() ? 1.0 : grid[i];
  return 0.5 * (left + right);
}

// Segment DP restricted to the given payoff columns. B[j][q] is the best
// payoff of rounds 1..q split into exactly j segments; the running maximum
// M[c] = max_{r <= q} B[j-1][r-1] - S[r-1][c] makes each layer O(T |cols|).
struct DpResult {
  Segmentation seg;
  std::vector<double> prefix;
};

DpResult segment_dp(const PayoffTable& table, std::span<const std::size_t> cols, std::size_t s) {
  const std::size_t T = table.horizon();
  const std::size_t layers = std::min(s, T);
  const auto& S = table.prefix();
  const std::size_t n = cols.size();

  std::vector<std::vector<double>> B(layers + 1, std::vector<double>(T + 1, kNegInf));
  std::vector<std::vector<std::size_t>> back_r(layers + 1, std::vector<std::size_t>(T + 1, 0));
  std::vector<std::vector<std::size_t>> back_c(layers + 1, std::vector<std::size_t>(T + 1, 0));
  B[0][0] = 0.0;

  std::vector<double> M(n);
  std::vector<std::size_t> Mr(n);
  for (std::size_t j = 1; j <= layers; ++j) {
    std::fill(M.begin(), M.end(), kNegInf);
    std::fill(Mr.begin(), Mr.end(), 0);
    for (std::size_t q = 1; q <= T; ++q) {
      const double prev = B[j - 1][q - 1];
      if (prev != kNegInf) {
        for (std::size_t c = 0; c < n; ++c) {
          const double cand = prev - S(static_cast<Eigen::Index>(q - 1),
                                       static_cast<Eigen::Index>(cols[c]));
          if (cand > M[c]) {
            M[c] = cand;
            Mr[c] = q;
          }
        }
      }
      double best = kNegInf;
      std::size_t bc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (M[c] == kNegInf) continue;
        const double v =
            S(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(cols[c])) + M[c];
        if (v > best) {
          best = v;
          bc = c;
        }
      }
      B[j][q] = best;
      back_r[j][q] = Mr[bc];
      back_c[j][q] = cols[bc];
    }
  }

  DpResult out;
  out.prefix.resize(T);
  for (std::size_t q = 1; q <= T; ++q) {
    double v = kNegInf;
    for (std::size_t j = 1; j <= layers; ++j) v = std::max(v, B[j][q]);
    out.prefix[q - 1] = v;
  }

  std::size_t jbest = 1;
  for (std::size_t j = 2; j <= layers; ++j) {
    if (B[j][T] > B[jbest][T]) jbest = j;
  }
  out.seg.value = B[jbest][T];

  std::vector<std::size_t> starts;
  std::vector<double> experts;
  std::size_t q = T;
  for (std::size_t j = jbest; j >= 1; --j) {
    const std::size_t r = back_r[j][q];
    starts.push_back(r);
    experts.push_back(table.midpoint(back_c[j][q]));
    q = r - 1;
  }
  out.seg.segment_starts.assign(starts.rbegin(), starts.rend());
  out.seg.experts.assign(experts.rbegin(), experts.rend());
  return out;
}

// Overflow-safe binomial coefficient, saturating above `cap`.
std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(c + 0.5L);
}

}  // namespace

IntervalBest interval_best(std::span<const PiecewiseConstant> stream, std::size_t r,
                           std::size_t q) {
  check_interval(r, q, stream.size());
  std::vector<std::vector<double>> lists;
  for (std::size_t t = r; t <= q; ++t) lists.push_back(stream[t - 1].breakpoints());
  const auto grid = merge(lists);
  std::vector<double> sums(grid.size() + 1, 0.0);
  for (std::size_t t = r; t <= q; ++t) {
    const auto v = values_on(stream[t - 1], grid);
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += v[i];
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i < sums.size(); ++i) {
    if (sums[i] > sums[arg]) arg = i;
  }
  return {sums[arg], piece_mid(grid, arg)};
}

PayoffTable::PayoffTable(std::span<const PiecewiseConstant> stream) {
  std::vector<std::vector<double>> lists;
  lists.reserve(stream.size());
  for (const auto& u : stream) lists.push_back(u.breakpoints());
  grid_ = merge(lists);
  const auto T = static_cast<Eigen::Index>(stream.size());
  const auto P = static_cast<Eigen::Index>(grid_.size() + 1);
  prefix_ = PrefixMatrix::Zero(T + 1, P);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto v = values_on(stream[static_cast<std::size_t>(t)], grid_);
    prefix_.row(t + 1) = prefix_.row(t) + Eigen::Map<const Eigen::RowVectorXd>(v.data(), P);
  }
}

double PayoffTable::midpoint(std::size_t piece) const { return piece_mid(grid_, piece); }

IntervalBest PayoffTable::best(std::size_t r, std::size_t q) const {
  check_interval(r, q, horizon());
  const Eigen::RowVectorXd sums = prefix_.row(static_cast<Eigen::Index>(q)) -
                                  prefix_.row(static_cast<Eigen::Index>(r - 1));
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < sums.size(); ++i) {
    if (sums[i] > sums[arg]) arg = i;
  }
  return {sums[arg], midpoint(static_cast<std::size_t>(arg))};
}

std::vector<std::size_t> PayoffTable::distinct_columns() const {
  std::vector<std::size_t> keep;
  for (Eigen::Index c = 0; c < prefix_.cols(); ++c) {
    bool duplicate = false;
    for (std::size_t k : keep) {
      if (prefix_.col(c) == prefix_.col(static_cast<Eigen::Index>(k))) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) keep.push_back(static_cast<std::size_t>(c));
  }
  return keep;
}

Segmentation shifted_opt(std::span<const PiecewiseConstant> stream, std::size_t s) {
  return shifted_opt(PayoffTable(stream), s);
}

Segmentation shifted_opt(const PayoffTable& table, std::size_t s) {
  if (s < 1) throw ParameterError("shifted oracle needs s >= 1");
  if (table.horizon() == 0) throw ParameterError("shifted oracle needs a nonempty stream");
  std::vector<std::size_t> cols(table.pieces());
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  auto r = segment_dp(table, cols, s);
  r.seg.prefix_values = std::move(r.prefix);
  return r.seg;
}

Segmentation sparse_shifted_opt(std::span<const PiecewiseConstant> stream, std::size_t s,
                                std::size_t m, std::size_t budget) {
  return sparse_shifted_opt(PayoffTable(stream), s, m, budget);
}

Segmentation sparse_shifted_opt(const PayoffTable& table, std::size_t s, std::size_t m,
                                std::size_t budget) {
  if (!(m >= 1 && m <= s)) throw ParameterError("sparse oracle needs 1 <= m <= s");
  if (table.horizon() == 0) throw ParameterError("sparse oracle needs a nonempty stream");
  const auto distinct = table.distinct_columns();
  const std::size_t k = std::min(m, distinct.size());
  const std::size_t subsets = binomial_capped(distinct.size(), k, budget);
  if (subsets > budget) {
    throw ResourceError("sparse oracle needs C(" + std::to_string(distinct.size()) + ", " +
                        std::to_string(k) + ") > " + std::to_string(budget) +
                        " expert subsets; shrink the instance");
  }

  Segmentation best;
  best.value = kNegInf;
  std::vector<double> prefix(table.horizon(), kNegInf);
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<std::size_t> cols(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) cols[i] = distinct[idx[i]];
    auto r = segment_dp(table, cols, s);
    if (r.seg.value > best.value) best = std::move(r.seg);
    for (std::size_t q = 0; q < prefix.size(); ++q) prefix[q] = std::max(prefix[q], r.prefix[q]);

    // Next k-combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == distinct.size() - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  best.prefix_values = std::move(prefix);
  return best;
}

double adaptive_regret(std::span<const PiecewiseConstant> stream, std::span<const double> payoff,
                       std::size_t tau) {
  return adaptive_regret(PayoffTable(stream), payoff, tau);
}

double adaptive_regret(const PayoffTable& table, std::span<const double> payoff,
                       std::size_t tau) {
  if (tau < 1) throw ParameterError("adaptive regret needs tau >= 1");
  const std::size_t T = table.horizon();
  if (payoff.size() != T) throw ValidationError("payoff length does not match the stream");
  std::vector<double> A(T + 1, 0.0);
  for (std::size_t t = 1; t <= T; ++t) A[t] = A[t - 1] + payoff[t - 1];

  // For each piece, max over q of f(q) - min_{k in [q-1-tau, q-1]} f(k),
  // f(k) = S[k][p] - A[k], via a monotone deque.
  const auto& S = table.prefix();
  double best = kNegInf;
  std::vector<double> f(T + 1);
  std::deque<std::size_t> window;
  for (Eigen::Index p = 0; p < S.cols(); ++p) {
    for (std::size_t k = 0; k <= T; ++k) f[k] = S(static_cast<Eigen::Index>(k), p) - A[k];
    window.clear();
    for (std::size_t q = 1; q <= T; ++q) {
      const std::size_t k_new = q - 1;
      while (!window.empty() && f[window.back()] >= f[k_new]) window.pop_back();
      window.push_back(k_new);
      while (window.front() + 1 + tau < q) window.pop_front();
      best = std::max(best, f[q] - f[window.front()]);
    }
  }
  return best;
}

double expected_round_payoff(const Forecaster& forecaster, const PiecewiseConstant& u) {
  return forecaster.expected_payoff(u);
}

RecurrenceHistogram top_decile_recurrence(std::span<const LogDensity> densities,
                                          double decile) {
  if (!(decile > 0.0 && decile <= 1.0)) throw ParameterError("decile must lie in (0,1]");
  std::vector<std::vector<double>> lists;
  for (const auto& d : densities) lists.push_back(d.breakpoints());
  RecurrenceHistogram out;
  out.breakpoints = merge(lists);
  const std::size_t P = out.breakpoints.size() + 1;
  out.counts.assign(P, 0);
  std::vector<double> width(P);
  for (std::size_t i = 0; i < P; ++i) {
    width[i] = (i == P - 1 ? 1.0 : out.breakpoints[i]) - (i == 0 ? 0.0 : out.breakpoints[i - 1]);
  }
  std::vector<std::size_t> order(P);
  for (const auto& d : densities) {
    const auto v = values_on(d, out.breakpoints);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&v](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    double covered = 0.0;
    for (std::size_t i : order) {
      ++out.counts[i];
      covered += width[i];
      if (covered >= decile) break;
    }
  }
  return out;
}

double RegretReport::total_expected() const {
  return std::accumulate(expected_payoff.begin(), expected_payoff.end(), 0.0);
}

double RegretReport::total_realized() const {
  return std::accumulate(realized_payoff.begin(), realized_payoff.end(), 0.0);
}

double RegretReport::shifted_regret(std::size_t index) const {
  return shifted.at(index).opt.value - total_expected();
}

double RegretReport::sparse_regret(std::size_t index) const {
  return sparse.at(index).opt.value - total_expected();
}

double RegretReport::average_shifted_regret(std::size_t index) const {
  return shifted_regret(index) / static_cast<double>(horizon);
}

nlohmann::json to_json(const RegretReport& r) {
  using nlohmann::json;
  const double expected = r.total_expected();
  const double realized = r.total_realized();
  const double T = static_cast<double>(r.horizon);
  json shifted = json::array();
  for (const auto& b : r.shifted) {
    shifted.push_back({{"s", b.s},
                       {"opt", b.opt.value},
                       {"segment_starts", b.opt.segment_starts},
                       {"experts", b.opt.experts},
                       {"regret", b.opt.value - expected},
                       {"average_regret", (b.opt.value - expected) / T},
                       {"realized_regret", b.opt.value - realized}});
  }
  json sparse = json::array();
  for (const auto& b : r.sparse) {
    sparse.push_back({{"s", b.s},
                      {"m", b.m},
                      {"opt", b.opt.value},
                      {"segment_starts", b.opt.segment_starts},
                      {"experts", b.opt.experts},
                      {"regret", b.opt.value - expected},
                      {"average_regret", (b.opt.value - expected) / T},
                      {"realized_regret", b.opt.value - realized}});
  }
  json adaptive = json::array();
  for (const auto& b : r.adaptive) {
    adaptive.push_back({{"tau", b.tau},
                        {"regret", b.expected_regret},
                        {"realized_regret", b.realized_regret}});
  }
  return {{"algorithm", r.algorithm},
          {"T", r.horizon},
          {"total_expected_payoff", expected},
          {"total_realized_payoff", realized},
          {"shifted", shifted},
          {"sparse", sparse},
          {"adaptive", adaptive}};
}

void write_curve_csv(std::ostream& out, const RegretReport& r) {
  out << "t,payoff,cum_payoff,opt_prefix,avg_regret\n";
  double cum = 0.0;
  for (std::size_t t = 1; t <= r.horizon; ++t) {
    cum += r.expected_payoff[t - 1];
    const double opt = r.shifted.empty() ? 0.0 : r.shifted.front().opt.prefix_values[t - 1];
    out << t << ',' << r.expected_payoff[t - 1] << ',' << cum << ',' << opt << ','
        << (opt - cum) / static_cast<double>(t) << '\n';
  }
}

}  // namespace pcshift
