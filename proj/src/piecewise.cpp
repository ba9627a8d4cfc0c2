#include "pcshift/piecewise.hpp"

#include <numeric>

namespace pcshift {

void validate_utility(const PiecewiseConstant& u, double H) {
  for (double v : u.values()) {
    if (!(v >= 0.0 && v <= H)) {
      throw ValidationError("utility value " + std::to_string(v) + " outside [0, " +
                            std::to_string(H) + "]");
    }
  }
}

std::vector<double> merge(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> merge(std::span<const std::vector<double>> lists) {
  std::vector<double> out;
  for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double log_sum_exp(std::span<const double> xs) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_integral(const LogDensity& w) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const auto& v = w.values();
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w.piece_width(i) * std::exp(v[i] - m);
  return m + std::log(s);
}

LogDensity accumulate(const LogDensity& acc, const PiecewiseConstant& u, double lambda,
                      double H) {
  if (!(lambda > 0.0 && lambda * H <= 1.0)) {
    throw ParameterError("step size must lie in (0, 1/H]");
  }
  return combine<LogDensity>(acc, u, [lambda](double a, double x) { return a + lambda * x; });
}

LogDensity normalized(const LogDensity& w) {
  const double z = log_integral(w);
  std::vector<double> v = w.values();
  for (double& x : v) x -= z;
  return LogDensity(w.breakpoints(), std::move(v));
}

std::vector<double> piece_masses(const LogDensity& w) {
  const double z = log_integral(w);
  std::vector<double> out(w.pieces());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = w.piece_width(i) * std::exp(w.values()[i] - z);
  }
  return out;
}

double sample(const LogDensity& w, Rng& rng) {
  const auto masses = piece_masses(w);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  const double target = rng.uniform() * total;
  std::size_t i = 0;
  double cum = masses[0];
  while (cum <= target && i + 1 < masses.size()) cum += masses[++i];
  // Skip zero-mass pieces that only match through round-off.
  while (masses[i] == 0.0 && i > 0) --i;
  return w.piece_left(i) + rng.uniform() * w.piece_width(i);
}

double expectation(const LogDensity& w, const PiecewiseConstant& u) {
  const double z = log_integral(w);
  auto grid = merge(w.breakpoints(), u.breakpoints());
  const auto wv = values_on(w, grid);
  const auto uv = values_on(u, grid);
  double total = 0.0;
  for (std::size_t i = 0; i < wv.size(); ++i) {
    const double left = i == 0 ? 0.0 : grid[i - 1];
    const double right = i == grid.size() ? 1.0 : grid[i];
    total += (right - left) * std::exp(wv[i] - z) * uv[i];
  }
  return total;
}

}  // namespace pcshift
