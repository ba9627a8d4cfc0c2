#pragma once

// Exact one-dimensional fixed share via its mixture form: p_t is a convex
// combination of exponential forecasters restarted at rounds 1..t,
//
//   p_t(rho) = sum_i C_{t,i} w~(rho; i, t) / W~(i, t),
//   w~(rho; i, j) = exp(lambda * sum_{tau=i}^{j-1} u_tau(rho)),
//
// where W_t and C_{t,i} follow closed recursions in the W~(i, j).

#include <vector>

#include <json.hpp>

#include "pcshift/forecasters.hpp"
#include "pcshift/piecewise.hpp"

namespace pcshift {

class MixtureSampler {
 public:
  MixtureSampler(double lambda, double alpha, double H = 1.0);

  /// Absorbs u_t, then advances W (wt_step) and the coefficient row (ct_step).
  void observe(const PiecewiseConstant& u);

  /// Draws component i with probability C_{t,i}, then rho ~ w~(.; i, t).
  double sample(Rng& rng) const;

  /// The mixture density p_t, normalized, on the finest accumulated grid.
  LogDensity mixture_density() const;

  /// Current round t; the sampler is ready to draw from p_t.
  std::size_t round() const noexcept { return log_C_.size(); }

  /// log W_1 .. log W_t (log W_1 = 0).
  const std::vector<double>& log_W() const noexcept { return log_W_; }
  /// log C_{t,1} .. log C_{t,t}.
  const std::vector<double>& log_C() const noexcept { return log_C_; }
  /// log W~(i, t) for i = 1..t.
  const std::vector<double>& log_W_tilde() const noexcept { return log_W_tilde_; }
  /// w~(.; i, t) in log scale, i = 1..t.
  const LogDensity& component(std::size_t i) const { return components_.at(i - 1); }

  /// Rounds on which the coefficient row drifted off the simplex by more
  /// than 1e-12 and was renormalized.
  std::size_t drift_count() const noexcept { return drift_count_; }
  /// Largest |sum C - 1| seen before renormalization.
  double max_drift() const noexcept { return max_drift_; }

  nlohmann::json diagnostics() const;

  double lambda() const noexcept { return lambda_; }
  double alpha() const noexcept { return alpha_; }

 private:
  double wt_step(const std::vector<double>& log_W_tilde_next) const;
  std::vector<double> ct_step(const std::vector<double>& log_W_tilde_next,
                              double log_W_next) const;

  double lambda_;
  double alpha_;
  double H_;
  std::vector<double> log_W_;
  std::vector<double> log_C_;
  std::vector<double> log_W_tilde_;
  std::vector<LogDensity> components_;
  std::size_t drift_count_ = 0;
  double max_drift_ = 0.0;
};

/// Fixed share driven through MixtureSampler instead of a direct density.
class MixtureFixedShareForecaster : public Forecaster {
 public:
  explicit MixtureFixedShareForecaster(ForecasterConfig config);

  std::string_view name() const override { return "mixture_fixed_share"; }
  double act(Rng& rng) const override { return sampler_.sample(rng); }
  void observe(const PiecewiseConstant& u, Rng& rng) override;
  double expected_payoff(const PiecewiseConstant& u) const override;
  std::optional<LogDensity> density() const override { return sampler_.mixture_density(); }

  const MixtureSampler& sampler() const noexcept { return sampler_; }

 private:
  MixtureSampler sampler_;
};

}  // namespace pcshift
