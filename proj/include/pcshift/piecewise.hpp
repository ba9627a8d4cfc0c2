#pragma once

// Step functions on [0,1]: the representation of every utility and every
// (log-scale) weight density in the library.
//
// A function with breakpoints b_1 < ... < b_{n} has n+1 pieces; piece i
// covers [b_{i-1}, b_i) with b_0 = 0 and b_{n+1} = 1, and the final piece is
// closed at 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcshift/errors.hpp"
#include "pcshift/rng.hpp"

namespace pcshift {

namespace detail {
struct UtilityTag {};
struct LogTag {};
}  // namespace detail

template <class Tag>
class StepFunction {
 public:
  StepFunction() : values_{0.0} {}
  explicit StepFunction(double constant) : values_{constant} { check(); }
  StepFunction(std::vector<double> breakpoints, std::vector<double> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    check();
  }

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t pieces() const noexcept { return values_.size(); }

  double piece_left(std::size_t i) const { return i == 0 ? 0.0 : breakpoints_[i - 1]; }
  double piece_right(std::size_t i) const {
    return i == breakpoints_.size() ? 1.0 : breakpoints_[i];
  }
  double piece_width(std::size_t i) const { return piece_right(i) - piece_left(i); }
  double piece_midpoint(std::size_t i) const {
    return 0.5 * (piece_left(i) + piece_right(i));
  }

  /// Index of the piece containing rho; rho = 1 maps to the last piece.
  std::size_t piece_index(double rho) const {
    if (!(rho >= 0.0 && rho <= 1.0)) {
      throw DomainError("point " + std::to_string(rho) + " outside [0,1]");
    }
    return static_cast<std::size_t>(
        std::upper_bound(breakpoints_.begin(), breakpoints_.end(), rho) -
        breakpoints_.begin());
  }

  double operator()(double rho) const { return values_[piece_index(rho)]; }

  double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
  double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  void check() const {
    if (values_.size() != breakpoints_.size() + 1) {
      throw ValidationError("step function needs len(values) == len(breakpoints) + 1");
    }
    double prev = 0.0;
    for (double b : breakpoints_) {
      if (!(b > prev && b < 1.0)) {
        throw ValidationError("breakpoints must be strictly increasing inside (0,1)");
      }
      prev = b;
    }
    for (double v : values_) {
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw ValidationError("step function value is NaN or +inf");
      }
      if constexpr (std::is_same_v<Tag, detail::UtilityTag>) {
        if (!std::isfinite(v)) throw ValidationError("utility value is not finite");
      }
    }
  }

  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// A utility u_t: [0,1] -> [0,H].
using PiecewiseConstant = StepFunction<detail::UtilityTag>;

/// Unnormalized weight in natural-log scale: w(rho) = exp(values on rho's piece).
using LogDensity = StepFunction<detail::LogTag>;

template <class Tag>
double eval(const StepFunction<Tag>& f, double rho) {
  return f(rho);
}

/// Throws ValidationError unless every value of u lies in [0, H].
void validate_utility(const PiecewiseConstant& u, double H);

/// Sorted union of breakpoint lists, exact duplicates removed.
std::vector<double> merge(std::span<const std::vector<double>> lists);
std::vector<double> merge(const std::vector<double>& a, const std::vector<double>& b);

/// Values of f on each piece of grid, which must refine f's breakpoints.
template <class Tag>
std::vector<double> values_on(const StepFunction<Tag>& f, const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(grid.size() + 1);
  const auto& bp = f.breakpoints();
  std::size_t j = 0;
  for (std::size_t i = 0; i <= grid.size(); ++i) {
    const double left = i == 0 ? 0.0 : grid[i - 1];
    while (j < bp.size() && bp[j] <= left) ++j;
    out.push_back(f.values()[j]);
  }
  return out;
}

template <class Tag>
StepFunction<Tag> refine(const StepFunction<Tag>& f, const std::vector<double>& grid) {
  return StepFunction<Tag>(grid, values_on(f, grid));
}

/// Drops breakpoints separating equal-valued neighbours.
template <class Tag>
StepFunction<Tag> compact(const StepFunction<Tag>& f) {
  std::vector<double> bp;
  std::vector<double> vals{f.values().front()};
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    const double v = f.values()[i + 1];
    if (v != vals.back()) {
      bp.push_back(f.breakpoints()[i]);
      vals.push_back(v);
    }
  }
  return StepFunction<Tag>(std::move(bp), std::move(vals));
}

/// Pointwise op(f, g) on the merged grid of f and g.
template <class Result, class TagF, class TagG, class Op>
Result combine(const StepFunction<TagF>& f, const StepFunction<TagG>& g, Op op) {
  auto grid = merge(f.breakpoints(), g.breakpoints());
  const auto fv = values_on(f, grid);
  const auto gv = values_on(g, grid);
  std::vector<double> out(fv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(fv[i], gv[i]);
  return Result(std::move(grid), std::move(out));
}

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log_sum_exp(std::span<const double> xs);

/// log of the integral of exp(f) dx for a step function f given per-piece
/// log values and widths.
double log_integral(const LogDensity& w);

/// acc + lambda * u on the merged grid. Requires lambda in (0, 1/H].
LogDensity accumulate(const LogDensity& acc, const PiecewiseConstant& u, double lambda,
                      double H = 1.0);

/// w shifted so that its integral is one.
LogDensity normalized(const LogDensity& w);

/// Probability mass of each piece under the density proportional to exp(w).
std::vector<double> piece_masses(const LogDensity& w);

/// Draws rho with density proportional to exp(w).
double sample(const LogDensity& w, Rng& rng);

/// Integral of p(rho) u(rho), p the normalized density of w.
double expectation(const LogDensity& w, const PiecewiseConstant& u);

}  // namespace pcshift
