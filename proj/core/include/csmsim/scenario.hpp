#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csmsim/host.hpp"
#include "csmsim/image.hpp"
#include "csmsim/json_codec.hpp"
#include "csmsim/result.hpp"
#include "csmsim/world.hpp"

namespace csmsim {

inline constexpr int kScenarioSchema = 1;

enum class ActorKind : std::uint8_t { Host, Realm, Owner };

struct Actor {
  ActorKind kind = ActorKind::Host;
  std::string alias;  // realm or owner alias; empty for the host

  std::string label() const;
};

// {"ok": true, "value": <subset>} | {"error": "Name"} | {"exit": "Reason"}.
// A missing expectation accepts any outcome.
struct Expectation {
  enum class Kind : std::uint8_t { Any, Ok, Error, Exit } kind = Kind::Any;
  std::optional<Json> value;
  std::string name;  // error or exit reason
};

struct ScenarioStep {
  Actor actor;
  std::string op;
  Json args = Json::object();
  Expectation expect;
  std::string save;  // variable receiving the result value
};

struct ScenarioRealm {
  std::string alias;
  std::string image;
  std::string owner;
};

struct Scenario {
  int schema = kScenarioSchema;
  std::string name;
  std::uint64_t seed = 0;
  std::size_t granules = 64;
  HostPolicy host_policy = HostPolicy::Cooperative;
  std::map<std::string, RealmImage> images;
  std::vector<ScenarioRealm> realms;
  std::vector<std::string> owners;
  std::vector<ScenarioStep> steps;
};

struct ParseError {
  std::string message;
};

Expected<Scenario, ParseError> parse_scenario(std::string_view text);
Expected<Scenario, ParseError> load_scenario(const std::filesystem::path& path);

// Public operation names per actor, as accepted in scenario files.
const std::vector<std::string_view>& scenario_ops(ActorKind actor);

struct RunConfig {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
};

struct RunResult {
  int exit_code = 0;                // 0 ok, 1 expectation or invariant failure
  std::vector<std::string> trace;   // JSON lines
  std::vector<std::string> failures;
  std::size_t violations = 0;
  std::map<std::string, Json> vars;
  World world;
};

RunResult run_scenario(const Scenario& scenario, const RunConfig& config = {});

// Builtin registry: name -> scenario JSON text.
const std::map<std::string, std::string>& builtin_scenarios();
Expected<Scenario, ParseError> builtin_scenario(const std::string& name);

}  // namespace csmsim
