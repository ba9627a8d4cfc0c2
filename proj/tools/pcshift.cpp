// pcshift: run experiments, generate streams, verify invariants.
//
//   pcshift run --config cfg.json [--out dir] [--seed n] [--jobs n]
//   pcshift gen <generator> [--param k=v ...] --out stream.json
//   pcshift verify <identities|sampler|oracles|lowerbound|all>
//
// Exit codes: 0 ok, 1 validation or usage error, 2 failed check, 3 budget.

#include <CLI11.hpp>
#include <iostream>

#include "pcshift/bench.hpp"
#include "pcshift/verify.hpp"

namespace {

// "3" -> 3, "0.5" -> 0.5, "true" -> true, otherwise the raw string.
nlohmann::json parse_value(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    if (j.is_primitive()) return j;
  } catch (const nlohmann::json::exception&) {
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online optimization of piecewise-constant utilities under shifting environments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  run->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides the config)");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "Write a generated utility stream");
  std::string generator;
  std::vector<std::string> params;
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  gen->add_option("generator", generator, "Generator name")->required();
  gen->add_option("--param", params, "Generator parameter k=v (repeatable)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output stream file")->required();

  auto* ver = app.add_subcommand("verify", "Run invariant suites with fixed seeds");
  std::string suite;
  ver->add_option("suite", suite, "identities, sampler, oracles, lowerbound or all")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      auto config = pcshift::load_run_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (*seed_opt) config.master_seed = seed;
      const auto artifact = pcshift::run(config, jobs);
      pcshift::write_artifact(artifact, config.output_dir, config.write_rounds);
      std::cout << "wrote " << config.output_dir.string() << '\n';
    } else if (*gen) {
      nlohmann::json p = nlohmann::json::object();
      for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw pcshift::ValidationError("--param expects k=v, got '" + kv + "'");
        }
        p[kv.substr(0, eq)] = parse_value(kv.substr(eq + 1));
      }
      const auto stream = pcshift::generate(generator, p, gen_seed);
      pcshift::save_stream(stream, gen_out);
      std::cout << "wrote " << stream.horizon() << " functions to " << gen_out << '\n';
    } else if (*ver) {
      if (suite != "all" && std::find(pcshift::suite_names().begin(), pcshift::suite_names().end(),
                                      suite) == pcshift::suite_names().end()) {
        std::cerr << "unknown suite '" << suite << "'\n";
        return 1;
      }
      bool ok = true;
      nlohmann::json report = nlohmann::json::array();
      for (const auto& r : pcshift::verify(suite)) {
        ok = ok && r.passed();
        report.push_back(r.to_json());
      }
      std::cout << report.dump(2) << '\n';
      return ok ? 0 : 2;
    }
  } catch (const pcshift::ResourceError& e) {
    std::cerr << "resource budget: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
