#pragma once

// Seeded experiment runner: streams x algorithms x horizons x replicates,
// scored against offline oracles.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcshift/forecasters.hpp"
#include "pcshift/regret.hpp"
#include "pcshift/stream.hpp"

namespace pcshift {

struct AlgorithmSpec {
  std::string label;
  ForecasterKind kind = ForecasterKind::exponential;
  /// "shifted", "sparse", "adaptive", "experiment" or "explicit".
  std::string preset = "shifted";
  /// Preset arguments (s, m, tau, beta) and explicit overrides
  /// (lambda, alpha, gamma, mix_current_density).
  nlohmann::json params = nlohmann::json::object();
};

struct SparseSpec {
  std::size_t s = 1;
  std::size_t m = 1;
};

struct BaselineSpec {
  std::vector<std::size_t> shifted;
  std::vector<SparseSpec> sparse;
  std::vector<std::size_t> adaptive;
  std::size_t subset_budget = 1'000'000;
};

struct RunConfig {
  /// {"generator": name, "params": {...}} or {"file": path}.
  nlohmann::json stream;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::size_t> horizons;
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "out";
  BaselineSpec baselines;
  bool write_rounds = true;
  /// Relative stream and point files resolve against this directory.
  std::filesystem::path base_dir = ".";
};

/// Field-level validation; throws ValidationError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// Preset parameters for horizon T after clamping. beta falls back to the
/// stream's declared value, then 1/2.
ForecasterConfig resolve_forecaster(const AlgorithmSpec& spec, std::size_t T,
                                    std::optional<double> declared_beta);

using GeneratorFn = std::function<UtilityStream(const nlohmann::json& params, Rng& rng)>;

/// Registered generators: counterexample, alternating, two_expert, random,
/// lower_bound, clustering, clustering_points.
const std::map<std::string, GeneratorFn>& generators();

/// Runs a generator; params["T"] is required by every generator.
UtilityStream generate(const std::string& name, const nlohmann::json& params,
                       std::uint64_t seed);

/// Oracle values shared by every algorithm on one stream.
struct OracleSet {
  PayoffTable table;
  std::vector<ShiftedBaseline> shifted;
  std::vector<SparseBaseline> sparse;
  std::vector<std::size_t> adaptive_taus;
};

OracleSet compute_oracles(const UtilityStream& stream, const BaselineSpec& baselines);

/// Plays one forecaster through the stream. Actions draw from action_rng;
/// observe() draws (restarts only) from restart_rng.
RegretReport play(Forecaster& forecaster, const UtilityStream& stream, const OracleSet& oracles,
                  Rng& action_rng, Rng& restart_rng);

struct TaskResult {
  std::size_t horizon = 0;
  std::size_t replicate = 0;
  std::string label;
  ForecasterConfig config;
  RegretReport report;
};

struct RunArtifact {
  nlohmann::json config;
  std::vector<TaskResult> results;  ///< sorted by (horizon, replicate, algorithm order)
  nlohmann::json provenance = nlohmann::json::array();  ///< one entry per (horizon, replicate)
  nlohmann::json summary() const;
};

/// Deterministic in master_seed regardless of `jobs`.
RunArtifact run(const RunConfig& config, std::size_t jobs = 1);

/// rounds.csv (long form) and summary.json under dir.
void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir,
                    bool write_rounds = true);

struct Aggregate {
  double mean = 0.0;
  double standard_error = 0.0;  ///< sample sd / sqrt(n); 0 when n = 1
};
Aggregate aggregate(const std::vector<double>& xs);

}  // namespace pcshift
