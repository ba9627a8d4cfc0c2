#include "pcshift/mixture_sampler.hpp"

#include <cmath>

namespace pcshift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kDriftRenormalize = 1e-12;
constexpr double kDriftAbort = 1e-9;

// k * log_base, with the convention 0^0 = 1 when log_base = -inf.
double log_pow(double log_base, std::size_t k) {
  return k == 0 ? 0.0 : static_cast<double>(k) * log_base;
}

}  // namespace

MixtureSampler::MixtureSampler(double lambda, double alpha, double H)
    : lambda_(lambda), alpha_(alpha), H_(H) {
  ForecasterConfig probe;
  probe.lambda = lambda;
  probe.alpha = alpha;
  probe.H = H;
  validate(probe);
  log_W_ = {0.0};
  log_C_ = {0.0};
  log_W_tilde_ = {0.0};
  components_.emplace_back(0.0);
}

double MixtureSampler::wt_step(const std::vector<double>& next) const {
  const std::size_t t = round();
  const double log_keep = std::log1p(-alpha_);
  const double log_alpha = std::log(alpha_);
  std::vector<double> terms;
  terms.reserve(t);
  terms.push_back(log_pow(log_keep, t - 1) + next[0]);
  for (std::size_t i = 2; i <= t; ++i) {
    terms.push_back(log_alpha + log_pow(log_keep, t - i) + log_W_[i - 1] + next[i - 1]);
  }
  return log_sum_exp(terms);
}

std::vector<double> MixtureSampler::ct_step(const std::vector<double>& next,
                                            double log_W_next) const {
  const std::size_t t = round();
  const double log_keep = std::log1p(-alpha_);
  std::vector<double> row(t + 1);
  const double base = log_keep + log_W_[t - 1] - log_W_next;
  for (std::size_t i = 1; i <= t; ++i) {
    row[i - 1] = log_C_[i - 1] == kNegInf
                     ? kNegInf
                     : base + next[i - 1] - log_W_tilde_[i - 1] + log_C_[i - 1];
  }
  row[t] = std::log(alpha_);
  return row;
}

void MixtureSampler::observe(const PiecewiseConstant& u) {
  validate_utility(u, H_);
  const std::size_t t = round();
  std::vector<double> next(t);
  for (std::size_t i = 0; i < t; ++i) {
    components_[i] = accumulate(components_[i], u, lambda_, H_);
    next[i] = log_integral(components_[i]);
  }

  const double log_W_next = wt_step(next);
  std::vector<double> row = ct_step(next, log_W_next);

  const double log_total = log_sum_exp(row);
  const double drift = std::abs(std::expm1(log_total));
  max_drift_ = std::max(max_drift_, drift);
  if (drift > kDriftAbort) {
    throw std::runtime_error("mixture coefficients left the simplex (drift " +
                             std::to_string(drift) + ")");
  }
  if (drift > kDriftRenormalize) {
    for (double& c : row) c -= log_total;
    ++drift_count_;
  }

  log_W_.push_back(log_W_next);
  log_C_ = std::move(row);
  log_W_tilde_ = std::move(next);
  log_W_tilde_.push_back(0.0);
  components_.emplace_back(0.0);
}

double MixtureSampler::sample(Rng& rng) const {
  const double target = rng.uniform();
  double cum = 0.0;
  std::size_t pick = log_C_.size() - 1;
  for (std::size_t i = 0; i < log_C_.size(); ++i) {
    cum += std::exp(log_C_[i]);
    if (target < cum) {
      pick = i;
      break;
    }
  }
  while (log_C_[pick] == kNegInf && pick > 0) --pick;
  return pcshift::sample(components_[pick], rng);
}

LogDensity MixtureSampler::mixture_density() const {
  // Component 1 has absorbed every utility, so its grid refines all others.
  const std::vector<double>& grid = components_.front().breakpoints();
  std::vector<double> out(grid.size() + 1, kNegInf);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (log_C_[i] == kNegInf) continue;
    const auto vals = values_on(components_[i], grid);
    const double shift = log_C_[i] - log_W_tilde_[i];
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = log_add_exp(out[k], vals[k] + shift);
  }
  return LogDensity(grid, std::move(out));
}

nlohmann::json MixtureSampler::diagnostics() const {
  std::vector<double> c(log_C_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::exp(log_C_[i]);
  return {{"t", round()},
          {"log_W", log_W_},
          {"C", c},
          {"drift_counter", drift_count_},
          {"max_drift", max_drift_}};
}

MixtureFixedShareForecaster::MixtureFixedShareForecaster(ForecasterConfig config)
    : Forecaster(config), sampler_(config.lambda, config.alpha, config.H) {}

void MixtureFixedShareForecaster::observe(const PiecewiseConstant& u, Rng&) {
  sampler_.observe(u);
  ++rounds_;
}

double MixtureFixedShareForecaster::expected_payoff(const PiecewiseConstant& u) const {
  return expectation(sampler_.mixture_density(), u);
}

}  // namespace pcshift
