#include "pcshift/forecasters.hpp"

#include <cmath>

#include "pcshift/mixture_sampler.hpp"

namespace pcshift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// e_t = w_t + lambda u on the merged grid, log scale.
LogDensity exponentiate(const LogDensity& w, const PiecewiseConstant& u, double lambda) {
  return combine<LogDensity>(w, u, [lambda](double a, double x) { return a + lambda * x; });
}

}  // namespace

void validate(const ForecasterConfig& c) {
  if (!(c.H > 0.0)) throw ParameterError("payoff bound H must be positive");
  if (!(c.lambda > 0.0 && c.lambda * c.H <= 1.0)) {
    throw ParameterError("step size lambda must lie in (0, 1/H], got " +
                         std::to_string(c.lambda));
  }
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
    throw ParameterError("exploration alpha must lie in [0,1], got " + std::to_string(c.alpha));
  }
  if (!(c.gamma >= 0.0 && std::isfinite(c.gamma))) {
    throw ParameterError("discount gamma must be finite and nonnegative, got " + std::to_string(c.gamma));
  }
}

Forecaster::Forecaster(ForecasterConfig config) : config_(config) { validate(config_); }

void Forecaster::check_utility(const PiecewiseConstant& u) const {
  validate_utility(u, config_.H);
}

// --- exponential -----------------------------------------------------------

ExponentialForecaster::ExponentialForecaster(ForecasterConfig config)
    : Forecaster(config), weight_(0.0) {}

void ExponentialForecaster::observe(const PiecewiseConstant& u, Rng&) {
  check_utility(u);
  weight_ = exponentiate(weight_, u, config_.lambda);
  ++rounds_;
}

double ExponentialForecaster::expected_payoff(const PiecewiseConstant& u) const {
  return expectation(weight_, u);
}

// --- fixed share -----------------------------------------------------------

FixedShareForecaster::FixedShareForecaster(ForecasterConfig config)
    : Forecaster(config), weight_(0.0) {}

void FixedShareForecaster::observe(const PiecewiseConstant& u, Rng&) { observe(u); }

void FixedShareForecaster::observe(const PiecewiseConstant& u) {
  check_utility(u);
  const LogDensity e = exponentiate(weight_, u, config_.lambda);
  const double log_total = log_integral(e);
  const double keep = std::log1p(-config_.alpha);
  const double boost = std::log(config_.alpha) + log_total;
  std::vector<double> v = e.values();
  for (double& x : v) x = log_add_exp(keep + x, boost);
  weight_ = LogDensity(e.breakpoints(), std::move(v));
  ++rounds_;
}

double FixedShareForecaster::expected_payoff(const PiecewiseConstant& u) const {
  return expectation(weight_, u);
}

// --- generalized share -----------------------------------------------------

GeneralizedShareForecaster::GeneralizedShareForecaster(ForecasterConfig config)
    : Forecaster(config), weight_(0.0), mixture_(kNegInf), last_prior_(0.0) {}

void GeneralizedShareForecaster::observe(const PiecewiseConstant& u, Rng&) { observe(u); }

void GeneralizedShareForecaster::observe(const PiecewiseConstant& u) {
  check_utility(u);
  const LogDensity p = normalized(weight_);
  const double decay = -config_.gamma;

  auto fold_in = [&] {
    mixture_ = combine<LogDensity>(mixture_, p, [decay](double s, double pi) {
      return log_add_exp(s + decay, pi);
    });
    log_norm_ = log_add_exp(log_norm_ + decay, 0.0);
  };
  auto current_prior = [&] {
    std::vector<double> v = mixture_.values();
    for (double& x : v) x -= log_norm_;
    return LogDensity(mixture_.breakpoints(), std::move(v));
  };

  LogDensity prior;
  if (config_.mix_current_density) {
    fold_in();
    prior = current_prior();
  } else {
    prior = rounds_ == 0 ? p : current_prior();
    fold_in();
  }

  const LogDensity e = exponentiate(weight_, u, config_.lambda);
  const double log_total = log_integral(e);
  const double keep = std::log1p(-config_.alpha);
  const double boost = std::log(config_.alpha) + log_total;
  weight_ = combine<LogDensity>(e, prior, [keep, boost](double x, double pi) {
    return log_add_exp(keep + x, boost + pi);
  });
  last_prior_ = std::move(prior);
  ++rounds_;
}

double GeneralizedShareForecaster::expected_payoff(const PiecewiseConstant& u) const {
  return expectation(weight_, u);
}

// --- random restarts -------------------------------------------------------

RandomRestartForecaster::RandomRestartForecaster(ForecasterConfig config)
    : Forecaster(config), weight_(0.0) {}

void RandomRestartForecaster::observe(const PiecewiseConstant& u, Rng& rng) {
  check_utility(u);
  LogDensity e = exponentiate(weight_, u, config_.lambda);
  const double z = rng.uniform();
  const bool restart = !(z < 1.0 - config_.alpha);
  if (restart) {
    weight_ = LogDensity(log_integral(e));
  } else {
    weight_ = std::move(e);
  }
  restarts_.push_back(restart);
  ++rounds_;
}

double RandomRestartForecaster::expected_payoff(const PiecewiseConstant& u) const {
  return expectation(weight_, u);
}

// --- discrete fixed share --------------------------------------------------

std::size_t DiscreteFixedShareForecaster::grid_size_for(std::size_t horizon, double beta) {
  if (horizon == 0) throw ParameterError("horizon must be positive");
  const double n = std::ceil(std::pow(static_cast<double>(horizon), beta) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

DiscreteFixedShareForecaster::DiscreteFixedShareForecaster(ForecasterConfig config,
                                                           std::size_t grid_size)
    : Forecaster(config) {
  if (grid_size == 0) throw ParameterError("discrete grid needs at least one point");
  const auto n = static_cast<Eigen::Index>(grid_size);
  grid_ = (Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) + 0.5) /
          static_cast<double>(n);
  log_weights_ = Eigen::ArrayXd::Zero(n);
}

Eigen::ArrayXd DiscreteFixedShareForecaster::probabilities() const {
  const double m = log_weights_.maxCoeff();
  Eigen::ArrayXd p = (log_weights_ - m).exp();
  return p / p.sum();
}

double DiscreteFixedShareForecaster::act(Rng& rng) const {
  const Eigen::ArrayXd p = probabilities();
  const double target = rng.uniform();
  double cum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    cum += p[i];
    if (target < cum) return grid_[i];
  }
  return grid_[p.size() - 1];
}

void DiscreteFixedShareForecaster::observe(const PiecewiseConstant& u, Rng&) { observe(u); }

void DiscreteFixedShareForecaster::observe(const PiecewiseConstant& u) {
  check_utility(u);
  const auto n = grid_.size();
  Eigen::ArrayXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e[i] = log_weights_[i] + config_.lambda * u(grid_[i]);
  const double log_total = log_sum_exp(std::span<const double>(e.data(), e.size()));
  const double keep = std::log1p(-config_.alpha);
  const double boost = std::log(config_.alpha) + log_total - std::log(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) log_weights_[i] = log_add_exp(keep + e[i], boost);
  ++rounds_;
}

double DiscreteFixedShareForecaster::expected_payoff(const PiecewiseConstant& u) const {
  const Eigen::ArrayXd p = probabilities();
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) total += p[i] * u(grid_[i]);
  return total;
}

// --- factory and tuning ----------------------------------------------------

ForecasterKind parse_forecaster_kind(std::string_view name) {
  if (name == "exponential" || name == "EF") return ForecasterKind::exponential;
  if (name == "fixed_share" || name == "FS") return ForecasterKind::fixed_share;
  if (name == "generalized_share" || name == "GS") return ForecasterKind::generalized_share;
  if (name == "random_restart" || name == "RR") return ForecasterKind::random_restart;
  if (name == "discrete_fixed_share" || name == "DFS") {
    return ForecasterKind::discrete_fixed_share;
  }
  if (name == "mixture_fixed_share" || name == "MFS") return ForecasterKind::mixture_fixed_share;
  throw ValidationError("unknown forecaster '" + std::string(name) + "'");
}

std::string_view to_string(ForecasterKind kind) {
  switch (kind) {
    case ForecasterKind::exponential: return "exponential";
    case ForecasterKind::fixed_share: return "fixed_share";
    case ForecasterKind::generalized_share: return "generalized_share";
    case ForecasterKind::random_restart: return "random_restart";
    case ForecasterKind::discrete_fixed_share: return "discrete_fixed_share";
    case ForecasterKind::mixture_fixed_share: return "mixture_fixed_share";
  }
  return "unknown";
}

std::unique_ptr<Forecaster> make_forecaster(ForecasterKind kind, const ForecasterConfig& config,
                                            std::size_t horizon) {
  switch (kind) {
    case ForecasterKind::exponential: return std::make_unique<ExponentialForecaster>(config);
    case ForecasterKind::fixed_share: return std::make_unique<FixedShareForecaster>(config);
    case ForecasterKind::generalized_share:
      return std::make_unique<GeneralizedShareForecaster>(config);
    case ForecasterKind::random_restart: return std::make_unique<RandomRestartForecaster>(config);
    case ForecasterKind::discrete_fixed_share:
      return std::make_unique<DiscreteFixedShareForecaster>(
          config, DiscreteFixedShareForecaster::grid_size_for(horizon, config.beta));
    case ForecasterKind::mixture_fixed_share:
      return std::make_unique<MixtureFixedShareForecaster>(config);
  }
  throw ValidationError("unknown forecaster kind");
}

double clamp_step_size(double radicand, double H) {
  if (!(radicand > 0.0) || !std::isfinite(radicand)) return 1.0 / H;
  return std::min(1.0, std::sqrt(radicand)) / H;
}

namespace {
// log(R T^beta) with d = 1 and R = 1/2.
double log_cover(double T, double beta) { return std::log(0.5) + beta * std::log(T); }
}  // namespace

ShiftedParams default_params_shifted(std::size_t T, std::size_t s, double beta, double H) {
  if (s < 1 || s > T) throw ParameterError("shifted tuning needs 1 <= s <= T");
  const double t = static_cast<double>(T);
  const double sd = static_cast<double>(s);
  const double radicand = sd * (log_cover(t, beta) + std::log(t / sd)) / t;
  return {clamp_step_size(radicand, H), sd / t};
}

SparseParams default_params_sparse(std::size_t T, std::size_t s, std::size_t m, double beta,
                                   double H) {
  if (m < 1 || m > s || s > T) throw ParameterError("sparse tuning needs 1 <= m <= s <= T");
  const double t = static_cast<double>(T);
  const double sd = static_cast<double>(s);
  const double md = static_cast<double>(m);
  const double radicand = (md * log_cover(t, beta) + sd * std::log(t / sd)) / t;
  return {clamp_step_size(radicand, H), sd / t, sd / (md * t)};
}

ShiftedParams default_params_adaptive(std::size_t tau, double beta, double H) {
  if (tau < 1) throw ParameterError("adaptive tuning needs tau >= 1");
  const double t = static_cast<double>(tau);
  const double radicand = (log_cover(t, beta) + std::log(t)) / t;
  return {clamp_step_size(radicand, H), 1.0 / t};
}

}  // namespace pcshift
