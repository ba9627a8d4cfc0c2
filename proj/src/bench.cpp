#include "pcshift/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "pcshift/clustering.hpp"
#include "pcshift/environments.hpp"

namespace pcshift {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + "." + key + " is required");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T field_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

std::size_t positive(const json& j, const std::string& key, const std::string& where) {
  const auto v = field<long long>(j, key, where);
  if (v < 1) throw ValidationError(where + "." + key + " must be >= 1");
  return static_cast<std::size_t>(v);
}

AlgorithmSpec parse_algorithm(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  AlgorithmSpec a;
  const auto kind = field<std::string>(j, "kind", where);
  try {
    a.kind = parse_forecaster_kind(kind);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ".kind: " + e.what());
  }
  a.label = field_or<std::string>(j, "label", std::string(to_string(a.kind)), where);
  a.preset = field_or<std::string>(j, "preset", "shifted", where);
  a.params = j.value("params", json::object());
  static const std::vector<std::string> presets{"shifted", "sparse", "adaptive", "experiment",
                                                "explicit"};
  if (std::find(presets.begin(), presets.end(), a.preset) == presets.end()) {
    throw ValidationError(where + ".preset: unknown preset '" + a.preset + "'");
  }
  return a;
}

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json aggregate_json(const std::vector<double>& xs) {
  const auto a = aggregate(xs);
  return {{"mean", a.mean}, {"stderr", a.standard_error}};
}

}  // namespace

Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  if (xs.empty()) return a;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) a.mean += x;
  a.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - a.mean) * (x - a.mean);
    a.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return a;
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  c.base_dir = base_dir;
  c.stream = field<json>(j, "stream", "config");
  if (!c.stream.is_object() || (!c.stream.contains("generator") && !c.stream.contains("file"))) {
    throw ValidationError("config.stream needs a generator or a file");
  }
  if (c.stream.contains("generator")) {
    const auto g = field<std::string>(c.stream, "generator", "config.stream");
    if (!generators().contains(g)) {
      throw ValidationError("config.stream.generator: unknown generator '" + g + "'");
    }
  } else {
    const auto file = base_dir / field<std::string>(c.stream, "file", "config.stream");
    if (!std::filesystem::exists(file)) {
      throw ValidationError("config.stream.file: " + file.string() + " does not exist");
    }
  }

  const auto algs = field<json>(j, "algorithms", "config");
  if (!algs.is_array() || algs.empty()) {
    throw ValidationError("config.algorithms must be a nonempty array");
  }
  for (std::size_t i = 0; i < algs.size(); ++i) {
    c.algorithms.push_back(parse_algorithm(algs[i], "config.algorithms[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < c.algorithms.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (c.algorithms[i].label == c.algorithms[k].label) {
        throw ValidationError("config.algorithms: duplicate label '" + c.algorithms[i].label + "'");
      }
    }
  }

  const auto hs = field<json>(j, "horizons", "config");
  if (!hs.is_array() || hs.empty()) throw ValidationError("config.horizons must be nonempty");
  for (const auto& h : hs) {
    if (!h.is_number_integer() || h.get<long long>() < 1) {
      throw ValidationError("config.horizons entries must be positive integers");
    }
    c.horizons.push_back(h.get<std::size_t>());
  }
  c.replicates = j.contains("replicates") ? positive(j, "replicates", "config") : 1;
  c.master_seed = field_or<std::uint64_t>(j, "master_seed", 0, "config");
  c.output_dir = field_or<std::string>(j, "output_dir", "out", "config");
  c.write_rounds = field_or<bool>(j, "write_rounds", true, "config");

  const json b = j.value("baselines", json::object());
  for (const auto& s : b.value("shifted", json::array())) c.baselines.shifted.push_back(s.get<std::size_t>());
  for (const auto& sp : b.value("sparse", json::array())) {
    c.baselines.sparse.push_back({positive(sp, "s", "config.baselines.sparse[]"),
                                  positive(sp, "m", "config.baselines.sparse[]")});
    if (c.baselines.sparse.back().m > c.baselines.sparse.back().s) {
      throw ValidationError("config.baselines.sparse[]: need m <= s");
    }
  }
  for (const auto& t : b.value("adaptive", json::array())) c.baselines.adaptive.push_back(t.get<std::size_t>());
  c.baselines.subset_budget =
      field_or<std::size_t>(b, "subset_budget", c.baselines.subset_budget, "config.baselines");
  for (std::size_t s : c.baselines.shifted) {
    if (s < 1) throw ValidationError("config.baselines.shifted entries must be >= 1");
  }
  for (std::size_t t : c.baselines.adaptive) {
    if (t < 1) throw ValidationError("config.baselines.adaptive entries must be >= 1");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

json to_json(const RunConfig& c) {
  json algs = json::array();
  for (const auto& a : c.algorithms) {
    algs.push_back({{"label", a.label},
                    {"kind", to_string(a.kind)},
                    {"preset", a.preset},
                    {"params", a.params}});
  }
  json sparse = json::array();
  for (const auto& s : c.baselines.sparse) sparse.push_back({{"s", s.s}, {"m", s.m}});
  return {{"stream", c.stream},
          {"algorithms", algs},
          {"horizons", c.horizons},
          {"replicates", c.replicates},
          {"master_seed", c.master_seed},
          {"baselines",
           {{"shifted", c.baselines.shifted},
            {"sparse", sparse},
            {"adaptive", c.baselines.adaptive},
            {"subset_budget", c.baselines.subset_budget}}}};
}

ForecasterConfig resolve_forecaster(const AlgorithmSpec& spec, std::size_t T,
                                    std::optional<double> declared_beta) {
  const std::string where = "algorithm '" + spec.label + "'";
  const json& p = spec.params;
  ForecasterConfig c;
  c.H = field_or<double>(p, "H", 1.0, where);
  c.beta = field_or<double>(p, "beta", declared_beta.value_or(0.5), where);

  if (spec.preset == "shifted") {
    const auto r = default_params_shifted(T, std::min(T, field_or<std::size_t>(p, "s", 1, where)),
                                          c.beta, c.H);
    c.lambda = r.lambda;
    c.alpha = r.alpha;
  } else if (spec.preset == "sparse") {
    const std::size_t s = std::min(T, field_or<std::size_t>(p, "s", 1, where));
    const std::size_t m = std::min(s, field_or<std::size_t>(p, "m", 1, where));
    const auto r = default_params_sparse(T, s, m, c.beta, c.H);
    c.lambda = r.lambda;
    c.alpha = r.alpha;
    c.gamma = r.gamma;
  } else if (spec.preset == "adaptive") {
    const auto r = default_params_adaptive(field<std::size_t>(p, "tau", where), c.beta, c.H);
    c.lambda = r.lambda;
    c.alpha = r.alpha;
  } else if (spec.preset == "experiment") {
    const auto r = default_params_shifted(T, std::min(T, field_or<std::size_t>(p, "s", 2, where)),
                                          c.beta, c.H);
    c.lambda = r.lambda;
    c.alpha = 1.0 / static_cast<double>(T);
    c.gamma = 1.0 / static_cast<double>(T);
  } else {
    c.lambda = field<double>(p, "lambda", where);
  }
  c.lambda = field_or<double>(p, "lambda", c.lambda, where);
  c.alpha = field_or<double>(p, "alpha", c.alpha, where);
  c.gamma = field_or<double>(p, "gamma", c.gamma, where);
  c.mix_current_density = field_or<bool>(p, "mix_current_density", true, where);

  // Record only the parameters the algorithm actually uses.
  if (spec.kind == ForecasterKind::exponential) c.alpha = 0.0;
  if (spec.kind != ForecasterKind::generalized_share) c.gamma = 0.0;
  validate(c);
  return c;
}

const std::map<std::string, GeneratorFn>& generators() {
  static const std::map<std::string, GeneratorFn> registry{
      {"counterexample",
       [](const json& p, Rng&) { return counterexample_stream(positive(p, "T", "params")); }},
      {"alternating",
       [](const json& p, Rng&) {
         return alternating_stream(positive(p, "T", "params"), positive(p, "block", "params"));
       }},
      {"two_expert",
       [](const json& p, Rng& rng) {
         return two_expert_stream(positive(p, "T", "params"),
                                  p.contains("s") ? positive(p, "s", "params") : 1, rng);
       }},
      {"random",
       [](const json& p, Rng& rng) {
         return random_stream(positive(p, "T", "params"),
                              field_or<std::size_t>(p, "K", 3, "params"),
                              field_or<double>(p, "H", 1.0, "params"), rng,
                              field_or<double>(p, "quantum", 0.0, "params"));
       }},
      {"lower_bound",
       [](const json& p, Rng& rng) {
         return lower_bound_stream(positive(p, "T", "params"), positive(p, "s", "params"),
                                   field<double>(p, "beta", "params"), rng);
       }},
      {"clustering",
       [](const json& p, Rng& rng) {
         MixtureOptions o;
         o.points_per_round = field_or(p, "points_per_round", o.points_per_round, "params");
         o.separation = field_or(p, "separation", o.separation, "params");
         o.spread = field_or(p, "spread", o.spread, "params");
         o.outlier_rate = field_or(p, "outlier_rate", o.outlier_rate, "params");
         o.outlier_distance = field_or(p, "outlier_distance", o.outlier_distance, "params");
         o.classes = field_or(p, "classes", o.classes, "params");
         return clustering_stream(
             parse_clustering_scenario(field_or<std::string>(p, "scenario", "two_phase", "params")),
             positive(p, "T", "params"), field_or<std::size_t>(p, "grid_n", 256, "params"), rng, o);
       }},
      {"clustering_points",
       [](const json& p, Rng& rng) {
         const auto pool = load_points_csv(field<std::string>(p, "path", "params"));
         return clustering_stream(pool, positive(p, "T", "params"),
                                  field_or<std::size_t>(p, "grid_n", 256, "params"), rng,
                                  field_or<std::size_t>(p, "points_per_round", 100, "params"));
       }},
  };
  return registry;
}

UtilityStream generate(const std::string& name, const json& params, std::uint64_t seed) {
  const auto& reg = generators();
  const auto it = reg.find(name);
  if (it == reg.end()) throw ValidationError("unknown generator '" + name + "'");
  if (!params.is_object()) throw ValidationError("generator params must be an object");
  Rng rng(seed);
  UtilityStream s = it->second(params, rng);
  s.provenance["seed"] = seed;
  s.provenance["params"] = params;
  s.validate();
  return s;
}

OracleSet compute_oracles(const UtilityStream& stream, const BaselineSpec& baselines) {
  OracleSet o{PayoffTable(stream.view()), {}, {}, baselines.adaptive};
  const std::size_t T = stream.horizon();
  for (std::size_t s : baselines.shifted) o.shifted.push_back({s, shifted_opt(o.table, std::min(s, T))});
  for (const auto& sp : baselines.sparse) {
    const std::size_t s = std::min(sp.s, T);
    o.sparse.push_back(
        {sp.s, sp.m, sparse_shifted_opt(o.table, s, std::min(sp.m, s), baselines.subset_budget)});
  }
  return o;
}

RegretReport play(Forecaster& forecaster, const UtilityStream& stream, const OracleSet& oracles,
                  Rng& action_rng, Rng& restart_rng) {
  RegretReport r;
  r.algorithm = std::string(forecaster.name());
  r.horizon = stream.horizon();
  r.expected_payoff.reserve(r.horizon);
  for (const auto& u : stream.functions) {
    const double rho = forecaster.act(action_rng);
    r.actions.push_back(rho);
    r.expected_payoff.push_back(forecaster.expected_payoff(u));
    r.realized_payoff.push_back(u(rho));
    forecaster.observe(u, restart_rng);
  }
  r.shifted = oracles.shifted;
  r.sparse = oracles.sparse;
  for (std::size_t tau : oracles.adaptive_taus) {
    r.adaptive.push_back({tau, adaptive_regret(oracles.table, r.expected_payoff, tau),
                          adaptive_regret(oracles.table, r.realized_payoff, tau)});
  }
  return r;
}

RunArtifact run(const RunConfig& config, std::size_t jobs) {
  std::optional<UtilityStream> file_stream;
  if (config.stream.contains("file")) {
    file_stream = load_stream(config.base_dir / config.stream.at("file").get<std::string>());
  }
  const std::size_t A = config.algorithms.size();
  const std::size_t tasks = config.horizons.size() * config.replicates;
  std::vector<std::vector<TaskResult>> slots(tasks);
  std::vector<json> provenance(tasks);
  std::vector<std::exception_ptr> errors(tasks);

  auto work = [&](std::size_t task) {
    const std::size_t T = config.horizons[task / config.replicates];
    const std::size_t rep = task % config.replicates;
    UtilityStream stream;
    if (file_stream) {
      if (T > file_stream->horizon()) {
        throw ValidationError("horizon " + std::to_string(T) + " exceeds the stream file length");
      }
      stream = file_stream->truncated(T);
    } else {
      json params = config.stream.value("params", json::object());
      params["T"] = T;
      stream = generate(config.stream.at("generator").get<std::string>(), params,
                        derive_seed(config.master_seed, {T, rep, hash_label("stream")}));
    }
    const OracleSet oracles = compute_oracles(stream, config.baselines);
    provenance[task] = {{"T", T}, {"replicate", rep}, {"stream", stream.provenance}};
    for (const auto& spec : config.algorithms) {
      ForecasterConfig fc = resolve_forecaster(spec, T, stream.declared_beta);
      const std::uint64_t key = hash_label(spec.label);
      fc.seed = derive_seed(config.master_seed, {T, rep, key, hash_label("action")});
      Rng action(fc.seed);
      Rng restart(derive_seed(config.master_seed, {T, rep, key, hash_label("restart")}));
      auto f = make_forecaster(spec.kind, fc, T);
      RegretReport report = play(*f, stream, oracles, action, restart);
      report.algorithm = spec.label;
      slots[task].push_back({T, rep, spec.label, fc, std::move(report)});
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task; (task = next++) < tasks;) {
      try {
        work(task);
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(jobs, tasks));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RunArtifact out;
  out.config = to_json(config);
  out.results.reserve(tasks * A);
  for (std::size_t task = 0; task < tasks; ++task) {
    for (auto& r : slots[task]) out.results.push_back(std::move(r));
    out.provenance.push_back(std::move(provenance[task]));
  }
  return out;
}

json RunArtifact::summary() const {
  // Group by (label, T) in first-seen order; results are already sorted.
  std::vector<std::pair<std::string, std::size_t>> keys;
  std::map<std::pair<std::string, std::size_t>, std::vector<const TaskResult*>> groups;
  for (const auto& r : results) {
    auto key = std::make_pair(r.label, r.horizon);
    if (!groups.contains(key)) keys.push_back(key);
    groups[key].push_back(&r);
  }
  json aggregates = json::array();
  for (const auto& key : keys) {
    const auto& g = groups.at(key);
    const TaskResult& first = *g.front();
    const double T = static_cast<double>(key.second);
    std::vector<double> payoff;
    for (const auto* r : g) payoff.push_back(r->report.total_expected());
    json shifted = json::array();
    for (std::size_t i = 0; i < first.report.shifted.size(); ++i) {
      std::vector<double> reg, avg, real;
      for (const auto* r : g) {
        reg.push_back(r->report.shifted_regret(i));
        avg.push_back(r->report.shifted_regret(i) / T);
        real.push_back(r->report.shifted[i].opt.value - r->report.total_realized());
      }
      shifted.push_back({{"s", first.report.shifted[i].s},
                         {"regret", aggregate_json(reg)},
                         {"average_regret", aggregate_json(avg)},
                         {"realized_regret", aggregate_json(real)}});
    }
    json sparse = json::array();
    for (std::size_t i = 0; i < first.report.sparse.size(); ++i) {
      std::vector<double> reg, avg;
      for (const auto* r : g) {
        reg.push_back(r->report.sparse_regret(i));
        avg.push_back(r->report.sparse_regret(i) / T);
      }
      sparse.push_back({{"s", first.report.sparse[i].s},
                        {"m", first.report.sparse[i].m},
                        {"regret", aggregate_json(reg)},
                        {"average_regret", aggregate_json(avg)}});
    }
    json adaptive = json::array();
    for (std::size_t i = 0; i < first.report.adaptive.size(); ++i) {
      std::vector<double> reg;
      for (const auto* r : g) reg.push_back(r->report.adaptive[i].expected_regret);
      adaptive.push_back({{"tau", first.report.adaptive[i].tau}, {"regret", aggregate_json(reg)}});
    }
    json per_rep = json::array();
    for (const auto* r : g) {
      json j = to_json(r->report);
      j["replicate"] = r->replicate;
      j["seed"] = r->config.seed;
      per_rep.push_back(std::move(j));
    }
    aggregates.push_back({{"algorithm", key.first},
                          {"T", key.second},
                          {"replicates", g.size()},
                          {"params",
                           {{"lambda", first.config.lambda},
                            {"alpha", first.config.alpha},
                            {"gamma", first.config.gamma},
                            {"H", first.config.H},
                            {"beta", first.config.beta},
                            {"mix_current_density", first.config.mix_current_density}}},
                          {"total_expected_payoff", aggregate_json(payoff)},
                          {"shifted", shifted},
                          {"sparse", sparse},
                          {"adaptive", adaptive},
                          {"per_replicate", per_rep}});
  }
  return {{"config", config}, {"streams", provenance}, {"aggregates", aggregates}};
}

void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir,
                    bool write_rounds) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "summary.json");
    if (!out) throw ValidationError("cannot write " + (dir / "summary.json").string());
    out << artifact.summary().dump(2) << '\n';
  }
  if (!write_rounds) return;
  std::ofstream out(dir / "rounds.csv");
  if (!out) throw ValidationError("cannot write " + (dir / "rounds.csv").string());
  out << "algorithm,T,replicate,t,action,expected_payoff,realized_payoff,cum_payoff,opt_prefix,"
         "avg_regret\n";
  for (const auto& r : artifact.results) {
    const auto& rep = r.report;
    double cum = 0.0;
    for (std::size_t t = 1; t <= rep.horizon; ++t) {
      cum += rep.expected_payoff[t - 1];
      out << r.label << ',' << r.horizon << ',' << r.replicate << ',' << t << ','
          << csv_number(rep.actions[t - 1]) << ',' << csv_number(rep.expected_payoff[t - 1]) << ','
          << csv_number(rep.realized_payoff[t - 1]) << ',' << csv_number(cum) << ',';
      if (!rep.shifted.empty()) {
        const double opt = rep.shifted.front().opt.prefix_values[t - 1];
        out << csv_number(opt) << ',' << csv_number((opt - cum) / static_cast<double>(t));
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
}

}  // namespace pcshift
