#pragma once

// Synthetic (alpha-bar, 2)-Lloyd's++ configuration streams. Each round is a
// fresh point set; the utility of rho in [0,1] is one minus the Hamming cost
// of clustering with seeding exponent alpha-bar = 10 rho.

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "pcshift/rng.hpp"
#include "pcshift/stream.hpp"

namespace pcshift {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

struct ClusteringInstance {
  PointMatrix points;
  std::vector<int> labels;  ///< target cluster ids in 0..k-1
  std::size_t k = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
  /// Throws ValidationError unless sizes agree, 2 <= k <= n and labels lie in 0..k-1.
  void validate() const;
  /// Number of distinct point locations.
  std::size_t distinct_points() const;
};

enum class ClusteringScenario { two_phase, k_shift, static_mix };

ClusteringScenario parse_clustering_scenario(std::string_view name);
std::string_view to_string(ClusteringScenario scenario);

/// Geometry of the synthetic mixtures. Components alternate between two
/// shapes: even ones are tight with unequal sizes, odd ones have equal sizes
/// and a fraction of far outliers. The two shapes favour different seeding
/// exponents, so moving between them moves the best alpha-bar.
struct MixtureOptions {
  std::size_t points_per_round = 100;
  double separation = 6.0;     ///< minimum distance between active centers
  double spread = 0.6;         ///< per-axis standard deviation
  double outlier_rate = 0.15;  ///< odd components only
  double outlier_distance = 20.0;
  std::size_t classes = 8;     ///< two_phase/static draw from these; k_shift uses 5
};

/// One round's point set drawn from the listed components.
ClusteringInstance sample_mixture(std::span<const std::size_t> components,
                                  const MixtureOptions& options, Rng& rng);

/// Components active at round t (1-based) of a T-round scenario.
std::vector<std::size_t> active_components(ClusteringScenario scenario, std::size_t t,
                                           std::size_t T, const MixtureOptions& options);

/// Reads rows x,y,label; a non-numeric first row is treated as a header.
ClusteringInstance load_points_csv(const std::filesystem::path& path);

/// Fraction of points whose predicted cluster differs from the target under
/// the best matching of predicted to target labels.
double hamming_cost(std::span<const int> predicted, std::span<const int> target, std::size_t k);

/// Maximum-weight perfect matching on a square score matrix; returns the
/// column assigned to each row.
std::vector<std::size_t> max_assignment(const Eigen::MatrixXd& score);

/// Payoff 1 - Hamming cost of (a, 2)-Lloyd's++ for every a in alpha_bars,
/// sharing one set of uniforms across all exponents.
std::vector<double> lloyds_payoffs(const ClusteringInstance& instance,
                                   std::span<const double> alpha_bars, Rng& rng);

/// Cell i of an n-cell grid covers [i/n, (i+1)/n); equal neighbours merge.
PiecewiseConstant grid_step_function(std::span<const double> cell_values);

/// alpha-bar_i = 10 i / n for the n grid cells.
std::vector<double> alpha_grid(std::size_t grid_n);

UtilityStream clustering_stream(ClusteringScenario scenario, std::size_t T, std::size_t grid_n,
                                Rng& rng, const MixtureOptions& options = {});

/// Same protocol on a fixed pool: each round subsamples points_per_round
/// points (without replacement) from `pool`.
UtilityStream clustering_stream(const ClusteringInstance& pool, std::size_t T,
                                std::size_t grid_n, Rng& rng, std::size_t points_per_round);

}  // namespace pcshift
