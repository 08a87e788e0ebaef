#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "csmsim/channel.hpp"
#include "csmsim/explorer.hpp"
#include "csmsim/scenario.hpp"

namespace {

using namespace csmsim;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

int report_run(const Scenario& scenario, const std::optional<std::uint64_t>& seed, const std::string& trace_path) {
  const RunResult result = run_scenario(scenario, RunConfig{seed});
  if (!trace_path.empty()) {
    if (trace_path == "-") {
      for (const auto& line : result.trace) std::cout << line << '\n';
    } else {
      std::ofstream out(trace_path, std::ios::binary | std::ios::trunc);
      if (!out) {
        std::cerr << "cannot write " << trace_path << '\n';
        return kExitUsage;
      }
      for (const auto& line : result.trace) out << line << '\n';
    }
  }
  for (const auto& f : result.failures) std::cerr << scenario.name << ": " << f << '\n';
  std::cerr << scenario.name << ": " << scenario.steps.size() << " steps, " << result.failures.size()
            << " failures, " << result.violations << " invariant violations -> "
            << (result.exit_code == 0 ? "ok" : "FAILED") << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csmsim: granule isolation and confidential shared memory simulator"};
  app.require_subcommand(1);

  std::string file, trace, builtin_name, csv;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("file", file, "Scenario JSON")->required();
  run->add_option("--trace", trace, "Write the JSONL trace here ('-' for stdout)");
  run->add_option("--seed", seed, "Override the scenario seed");

  bool list = false, dump = false;
  auto* builtin = app.add_subcommand("builtin", "Run or print a builtin scenario");
  builtin->add_option("name", builtin_name, "Builtin name");
  builtin->add_flag("--list", list, "List builtin names");
  builtin->add_flag("--dump", dump, "Print the scenario JSON instead of running it");
  builtin->add_option("--trace", trace, "Write the JSONL trace here ('-' for stdout)");
  builtin->add_option("--seed", seed, "Override the scenario seed");

  ExplorationConfig ec;
  bool no_oracle = false;
  auto* explore_cmd = app.add_subcommand("explore", "Exhaustively explore a small configuration");
  explore_cmd->add_option("--realms", ec.realm_count, "Realms")->capture_default_str()->check(CLI::Range(1u, 4u));
  explore_cmd->add_option("--granules", ec.granule_count, "Host data granules")->capture_default_str();
  explore_cmd->add_option("--depth", ec.depth, "Command depth")->capture_default_str();
  explore_cmd->add_option("--csm-max-size", ec.csm_max_size, "Largest CSM size tried")->capture_default_str();
  explore_cmd->add_option("--ipa-window", ec.ipa_window, "Candidate IPA granules per realm")->capture_default_str();
  explore_cmd->add_option("--workers", ec.workers, "Expansion threads")->capture_default_str();
  explore_cmd->add_option("--state-cap", ec.state_cap, "Stop after this many states")->capture_default_str();
  explore_cmd->add_flag("--from-empty", ec.from_empty, "Start without realms and include initialization commands");
  explore_cmd->add_flag("--stop-on-violation", ec.stop_on_violation, "Stop once a counterexample is found");
  explore_cmd->add_flag("--no-oracle", no_oracle, "Skip the access oracle comparison");

  std::string mode = "all";
  std::size_t size = 0, iters = kBenchMinIters;
  auto* bench = app.add_subcommand("bench", "Channel micro-benchmark");
  bench->add_option("--mode", mode, "plaintext, aead, csm or all")->capture_default_str();
  bench->add_option("--size", size, "Message bytes (default: sweep 64 B .. 4 MiB)");
  bench->add_option("--iters", iters, "Messages per point")->capture_default_str();
  bench->add_option("--csv", csv, "Append rows to this CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*run) {
    auto scenario = load_scenario(file);
    if (!scenario) {
      std::cerr << scenario.error().message << '\n';
      return kExitUsage;
    }
    return report_run(*scenario, seed, trace);
  }

  if (*builtin) {
    if (list) {
      for (const auto& [name, _] : builtin_scenarios()) std::cout << name << '\n';
      return kExitOk;
    }
    if (builtin_name.empty()) {
      std::cerr << "builtin: a name or --list is required\n";
      return kExitUsage;
    }
    if (dump) {
      auto it = builtin_scenarios().find(builtin_name);
      if (it == builtin_scenarios().end()) {
        std::cerr << "unknown builtin scenario '" << builtin_name << "'\n";
        return kExitUsage;
      }
      std::cout << it->second << '\n';
      return kExitOk;
    }
    auto scenario = builtin_scenario(builtin_name);
    if (!scenario) {
      std::cerr << scenario.error().message << '\n';
      return kExitUsage;
    }
    return report_run(*scenario, seed, trace);
  }

  if (*explore_cmd) {
    ec.check_oracle = !no_oracle;
    const ExplorationReport report = explore(ec);
    nlohmann::ordered_json out;
    out["config"] = to_json(ec);
    out["report"] = to_json(report);
    std::cout << out.dump(2) << '\n';
    return report.clean() && !report.budget_exceeded ? kExitOk : kExitFailed;
  }

  // bench
  std::vector<ChannelMode> modes;
  if (mode == "all") {
    modes = {ChannelMode::Plaintext, ChannelMode::Csm, ChannelMode::Aead};
  } else if (auto m = channel_mode_from_string(mode)) {
    modes = {*m};
  } else {
    std::cerr << "bench: unknown mode '" << mode << "'\n";
    return kExitUsage;
  }
  const std::vector<std::size_t> sizes = size == 0 ? bench_default_sizes() : std::vector<std::size_t>{size};

  std::ofstream csv_out;
  if (!csv.empty()) {
    const bool fresh = !std::filesystem::exists(csv) || std::filesystem::file_size(csv) == 0;
    csv_out.open(csv, std::ios::app);
    if (!csv_out) {
      std::cerr << "cannot write " << csv << '\n';
      return kExitUsage;
    }
    if (fresh) csv_out << bench_csv_header() << '\n';
  }
  std::cout << bench_csv_header() << '\n';
  for (std::size_t s : sizes) {
    for (ChannelMode m : modes) {
      auto r = bench_run(m, s, iters);
      if (!r) {
        std::cerr << "bench: " << to_string(r.error()) << " (size " << s << ", iters " << iters
                  << "; sizes must lie in [" << kBenchMinSize << ", " << kBenchMaxSize << "], iters >= "
                  << kBenchMinIters << ")\n";
        return kExitUsage;
      }
      const std::string row = bench_csv_row(*r);
      std::cout << row << std::endl;
      if (csv_out) csv_out << row << '\n';
    }
  }
  return kExitOk;
}
