#pragma once

// Online forecasters over [0,1]. Each exposes the same round protocol:
//   rho = f.act(rng);        // sample from p_t
//   f.observe(u_t, rng);     // update weights to w_{t+1}
// The rng passed to observe() is only consumed by the random-restart variant.

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcshift/piecewise.hpp"

namespace pcshift {

struct ForecasterConfig {
  double lambda = 1.0;  ///< step size, lambda * H <= 1
  double alpha = 0.0;   ///< exploration
  double gamma = 0.0;   ///< discount rate (generalized share)
  double H = 1.0;
  double beta = 0.5;  ///< declared dispersion, sizes the discrete grid
  std::uint64_t seed = 0;
  /// Generalized share: mix the current round's density p_t into the prior
  /// (sum of beta_{i,t} p_i over i <= t). When false the prior only covers
  /// i <= t-1, falling back to p_1 at the first round.
  bool mix_current_density = true;
};

/// Throws ParameterError on lambda outside (0, 1/H] or alpha, gamma outside [0,1].
void validate(const ForecasterConfig& config);

class Forecaster {
 public:
  explicit Forecaster(ForecasterConfig config);
  virtual ~Forecaster() = default;

  virtual std::string_view name() const = 0;
  virtual double act(Rng& rng) const = 0;
  virtual void observe(const PiecewiseConstant& u, Rng& rng) = 0;

  /// Exact E_{rho ~ p_t}[u(rho)].
  virtual double expected_payoff(const PiecewiseConstant& u) const = 0;

  /// Current sampling density p_t (normalized, log scale) if it is a
  /// density on [0,1]; the discrete forecaster returns nullopt.
  virtual std::optional<LogDensity> density() const = 0;

  const ForecasterConfig& config() const noexcept { return config_; }
  /// Rounds observed so far; the next act() samples from p_{round()+1}.
  std::size_t rounds_observed() const noexcept { return rounds_; }

 protected:
  void check_utility(const PiecewiseConstant& u) const;

  ForecasterConfig config_;
  std::size_t rounds_ = 0;
};

/// Continuous exponential weights: w_{t+1} = exp(lambda u_t) w_t.
class ExponentialForecaster : public Forecaster {
 public:
  explicit ExponentialForecaster(ForecasterConfig config);

  std::string_view name() const override { return "exponential"; }
  double act(Rng& rng) const override { return sample(weight_, rng); }
  void observe(const PiecewiseConstant& u, Rng& rng) override;
  double expected_payoff(const PiecewiseConstant& u) const override;
  std::optional<LogDensity> density() const override { return normalized(weight_); }

  const LogDensity& weight() const noexcept { return weight_; }

 private:
  LogDensity weight_;
};

/// Fixed share: w_{t+1} = (1-a) e_t + a * int e_t, e_t = exp(lambda u_t) w_t.
class FixedShareForecaster : public Forecaster {
 public:
  explicit FixedShareForecaster(ForecasterConfig config);

  std::string_view name() const override { return "fixed_share"; }
  double act(Rng& rng) const override { return sample(weight_, rng); }
  void observe(const PiecewiseConstant& u, Rng& rng) override;
  void observe(const PiecewiseConstant& u);
  double expected_payoff(const PiecewiseConstant& u) const override;
  std::optional<LogDensity> density() const override { return normalized(weight_); }

  const LogDensity& weight() const noexcept { return weight_; }

 private:
  LogDensity weight_;
};

/// Generalized share: the uniform boost of fixed share is replaced by an
/// exponentially discounted mixture of past sampling densities.
class GeneralizedShareForecaster : public Forecaster {
 public:
  explicit GeneralizedShareForecaster(ForecasterConfig config);

  std::string_view name() const override { return "generalized_share"; }
  double act(Rng& rng) const override { return sample(weight_, rng); }
  void observe(const PiecewiseConstant& u, Rng& rng) override;
  void observe(const PiecewiseConstant& u);
  double expected_payoff(const PiecewiseConstant& u) const override;
  std::optional<LogDensity> density() const override { return normalized(weight_); }

  const LogDensity& weight() const noexcept { return weight_; }
  /// Discounted mixture S_t = sum_i e^{-gamma (t-i)} p_i, log scale.
  const LogDensity& mixture_accumulator() const noexcept { return mixture_; }
  /// log n_t with n_t = sum_i e^{-gamma (t-i)}.
  double log_mixture_normalizer() const noexcept { return log_norm_; }
  /// The normalized prior that was mixed into the latest weight, i.e. the
  /// density w_{t+1} was formed against. Uniform before the first update.
  const LogDensity& last_prior() const noexcept { return last_prior_; }

 private:
  LogDensity weight_;
  LogDensity mixture_;
  double log_norm_ = -std::numeric_limits<double>::infinity();
  LogDensity last_prior_;
};

/// Random restarts: with probability alpha the weight is reset to the
/// constant int exp(lambda u_t) w_t, otherwise a pure exponential update.
class RandomRestartForecaster : public Forecaster {
 public:
  explicit RandomRestartForecaster(ForecasterConfig config);

  std::string_view name() const override { return "random_restart"; }
  double act(Rng& rng) const override { return sample(weight_, rng); }
  void observe(const PiecewiseConstant& u, Rng& rng) override;
  double expected_payoff(const PiecewiseConstant& u) const override;
  std::optional<LogDensity> density() const override { return normalized(weight_); }

  const LogDensity& weight() const noexcept { return weight_; }
  /// Per-round outcome: true when the round restarted.
  const std::vector<bool>& restart_log() const noexcept { return restarts_; }

 private:
  LogDensity weight_;
  std::vector<bool> restarts_;
};

/// Fixed share over a uniform midpoint grid x_i = (i - 1/2)/N.
class DiscreteFixedShareForecaster : public Forecaster {
 public:
  DiscreteFixedShareForecaster(ForecasterConfig config, std::size_t grid_size);

  std::string_view name() const override { return "discrete_fixed_share"; }
  double act(Rng& rng) const override;
  void observe(const PiecewiseConstant& u, Rng& rng) override;
  void observe(const PiecewiseConstant& u);
  double expected_payoff(const PiecewiseConstant& u) const override;
  std::optional<LogDensity> density() const override { return std::nullopt; }

  const Eigen::ArrayXd& grid() const noexcept { return grid_; }
  const Eigen::ArrayXd& log_weights() const noexcept { return log_weights_; }
  /// Normalized probability of each grid point.
  Eigen::ArrayXd probabilities() const;

  /// N = ceil(T^beta), the size of a T^{-beta}-cover of [0,1] by midpoints.
  static std::size_t grid_size_for(std::size_t horizon, double beta);

 private:
  Eigen::ArrayXd grid_;
  Eigen::ArrayXd log_weights_;
};

enum class ForecasterKind {
  exponential,
  fixed_share,
  generalized_share,
  random_restart,
  discrete_fixed_share,
  mixture_fixed_share,
};

ForecasterKind parse_forecaster_kind(std::string_view name);
std::string_view to_string(ForecasterKind kind);

/// horizon sizes the discrete grid; ignored by the other kinds.
std::unique_ptr<Forecaster> make_forecaster(ForecasterKind kind, const ForecasterConfig& config,
                                            std::size_t horizon);

struct ShiftedParams {
  double lambda;
  double alpha;
};
struct SparseParams {
  double lambda;
  double alpha;
  double gamma;
};

/// Tuning for s-shifted regret: alpha = s/T,
/// lambda = sqrt(s(log(R T^beta) + log(T/s))/T)/H with d = 1, R = 1/2.
ShiftedParams default_params_shifted(std::size_t T, std::size_t s, double beta, double H = 1.0);

/// Tuning for (m-sparse, s-shifted) regret: alpha = s/T, gamma = s/(mT),
/// lambda = sqrt((m log(R T^beta) + s log(T/s))/T)/H.
SparseParams default_params_sparse(std::size_t T, std::size_t s, std::size_t m, double beta,
                                   double H = 1.0);

/// Tuning for tau-adaptive regret: alpha = 1/tau,
/// lambda = sqrt((log(R tau^beta) + log tau)/tau)/H.
ShiftedParams default_params_adaptive(std::size_t tau, double beta, double H = 1.0);

/// sqrt(radicand)/H clamped into (0, 1/H]; a non-positive radicand maps to 1/H.
double clamp_step_size(double radicand, double H);

}  // namespace pcshift
