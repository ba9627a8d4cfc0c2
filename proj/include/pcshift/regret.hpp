#pragma once

// Offline baselines and regret accounting. Rounds are numbered 1..T and
// intervals [r, q] are inclusive, matching the usual regret definitions.

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcshift/forecasters.hpp"
#include "pcshift/piecewise.hpp"

namespace pcshift {

struct IntervalBest {
  double value = 0.0;
  double representative = 0.5;  ///< midpoint of the leftmost maximizing piece
};

/// max_rho sum_{t=r}^{q} u_t(rho), exact over the merged pieces of u_r..u_q.
IntervalBest interval_best(std::span<const PiecewiseConstant> stream, std::size_t r,
                           std::size_t q);

using PrefixMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-piece prefix sums of a stream over its merged grid. Row k holds
/// sum_{t <= k} u_t on every merged piece (row 0 is zero).
class PayoffTable {
 public:
  explicit PayoffTable(std::span<const PiecewiseConstant> stream);

  std::size_t horizon() const noexcept { return static_cast<std::size_t>(prefix_.rows() - 1); }
  std::size_t pieces() const noexcept { return static_cast<std::size_t>(prefix_.cols()); }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const PrefixMatrix& prefix() const noexcept { return prefix_; }
  double midpoint(std::size_t piece) const;

  IntervalBest best(std::size_t r, std::size_t q) const;

  /// Pieces whose payoff column differs from every piece to its left.
  std::vector<std::size_t> distinct_columns() const;

 private:
  std::vector<double> grid_;
  PrefixMatrix prefix_;
};

/// A segmentation of 1..T into consecutive segments, one expert each.
struct Segmentation {
  double value = 0.0;
  std::vector<std::size_t> segment_starts;  ///< t_0 = 1 < t_1 < ... (1-based)
  std::vector<double> experts;              ///< representative point per segment
  /// prefix_values[q-1]: the same oracle restricted to rounds 1..q.
  std::vector<double> prefix_values;
};

/// Best payoff of an offline sequence with at most s segments (s - 1 shifts).
/// Ties prefer fewer segments, then the latest-found earliest segment start
/// during backtracking, then the leftmost expert.
Segmentation shifted_opt(std::span<const PiecewiseConstant> stream, std::size_t s);
Segmentation shifted_opt(const PayoffTable& table, std::size_t s);

/// As shifted_opt, but the segments may use at most m distinct experts.
/// Enumerates m-subsets of distinct payoff columns; throws ResourceError
/// when more than `budget` subsets would be needed.
Segmentation sparse_shifted_opt(std::span<const PiecewiseConstant> stream, std::size_t s,
                                std::size_t m, std::size_t budget = 1'000'000);
Segmentation sparse_shifted_opt(const PayoffTable& table, std::size_t s, std::size_t m,
                                std::size_t budget = 1'000'000);

/// max over 1 <= r <= q <= T with q - r <= tau of
/// interval_best(r, q) - sum_{t=r}^{q} payoff_t.
double adaptive_regret(std::span<const PiecewiseConstant> stream, std::span<const double> payoff,
                       std::size_t tau);
double adaptive_regret(const PayoffTable& table, std::span<const double> payoff,
                       std::size_t tau);

/// Exact expected payoff of the forecaster's next action against u.
double expected_round_payoff(const Forecaster& forecaster, const PiecewiseConstant& u);

struct RecurrenceHistogram {
  std::vector<double> breakpoints;
  std::vector<std::size_t> counts;  ///< one per merged piece
};

/// For each density, marks the smallest set of highest-density pieces whose
/// total length reaches `decile`; ties go to the leftmost piece.
RecurrenceHistogram top_decile_recurrence(std::span<const LogDensity> densities,
                                          double decile = 0.1);

struct ShiftedBaseline {
  std::size_t s = 1;
  Segmentation opt;
};

struct SparseBaseline {
  std::size_t s = 1;
  std::size_t m = 1;
  Segmentation opt;
};

struct AdaptiveBaseline {
  std::size_t tau = 1;
  double expected_regret = 0.0;
  double realized_regret = 0.0;
};

/// One algorithm on one stream: per-round payoffs and every requested oracle.
struct RegretReport {
  std::string algorithm;
  std::size_t horizon = 0;
  std::vector<double> expected_payoff;  ///< E[u_t(rho_t)] under p_t
  std::vector<double> realized_payoff;  ///< u_t(rho_t) of the sampled action
  std::vector<double> actions;
  std::vector<ShiftedBaseline> shifted;
  std::vector<SparseBaseline> sparse;
  std::vector<AdaptiveBaseline> adaptive;

  double total_expected() const;
  double total_realized() const;
  double shifted_regret(std::size_t index = 0) const;
  double sparse_regret(std::size_t index = 0) const;
  double average_shifted_regret(std::size_t index = 0) const;
};

nlohmann::json to_json(const RegretReport& report);

/// Per-round curve against the first shifted baseline:
/// t,payoff,cum_payoff,opt_prefix,avg_regret.
void write_curve_csv(std::ostream& out, const RegretReport& report);

}  // namespace pcshift
