#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csmsim/invariants.hpp"
#include "csmsim/world.hpp"

namespace csmsim {

enum class CommandKind : std::uint8_t {
  // realm RSIs and accesses
  CsmCreate,
  CsmShare,
  CsmReserve,
  CsmAttach,
  CsmRevoke,
  CsmDestroy,
  CsmDetach,
  RealmWrite,
  AttestationToken,
  // host
  HostDelegate,
  HostUndelegate,
  DataCreateUnknown,
  DataDestroy,
  Service,
  RecEnter,
  HostProbe,
  RealmDestroy,
  // initialization, enabled when starting from an empty world
  RealmCreate,
  AptCreate,
  RecCreate,
  RttCreate,
  DataCreate,
  Activate,
};

std::string_view to_string(CommandKind k) noexcept;
std::optional<CommandKind> command_kind_from_string(std::string_view name) noexcept;

// One explorer transition. Fields are interpreted per kind; realm ids and
// granule indices are small in every supported configuration.
struct Command {
  CommandKind kind = CommandKind::HostProbe;
  std::uint8_t realm = 0;    // RealmId value
  std::uint8_t granule = 0;  // physical granule
  std::uint8_t ipa = 0;      // IPA granule number
  std::uint8_t size = 0;
  std::uint8_t perm = 0;     // Permission
  std::uint8_t csm = 0;      // CsmId value, or peer RealmId for shares
  std::uint8_t sid_p = 0;
  std::uint8_t sid_c = 0;
  std::uint8_t sid_n = 0;

  SharingId sharing_id() const { return SharingId{RealmId{sid_p}, RealmId{sid_c}, sid_n}; }
  friend bool operator==(const Command&, const Command&) = default;
};

std::string to_string(const Command& c);

struct ExplorationConfig {
  unsigned realm_count = 2;
  unsigned granule_count = 8;  // host data pool; realm metadata comes on top
  unsigned csm_max_size = 2;
  unsigned depth = 6;
  unsigned ipa_window = 3;     // candidate IPA granules per realm
  bool from_empty = false;     // start with no realms and enable initialization commands
  std::set<CommandKind> enabled;  // empty: every command valid for the mode
  std::size_t state_cap = 20'000'000;
  unsigned workers = 1;
  bool check_oracle = true;
  bool stop_on_violation = false;  // finish early once a counterexample is known
  std::uint64_t seed = 0;
};

struct Counterexample {
  std::string invariant;
  std::string detail;
  std::vector<std::string> path;
};

struct ExplorationReport {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  unsigned depth_reached = 0;
  bool budget_exceeded = false;
  std::uint64_t violation_count = 0;
  std::vector<Counterexample> violations;  // shortest first, capped
  std::uint64_t oracle_checks = 0;
  std::uint64_t oracle_mismatches = 0;
  std::vector<Counterexample> oracle_examples;
  std::chrono::milliseconds wall{0};

  bool clean() const noexcept { return violation_count == 0 && oracle_mismatches == 0; }
};

nlohmann::ordered_json to_json(const ExplorationConfig& config);
nlohmann::ordered_json to_json(const ExplorationReport& report);

struct StepOutcome {
  bool ok = false;
  std::string error;  // error name when !ok
};

// Called for every explored edge (serialized when workers > 1).
using TransitionObserver =
    std::function<void(const World& before, const Command& cmd, const StepOutcome& outcome, const World& after)>;

// Starting state: in the default mode every realm is launched and Active
// with private data (realm 1 at IPA granules 0 and 1, others at 0), one RTT
// block covering its protected half, and peer ids provisioned both ways.
World initial_world(const ExplorationConfig& config);

std::vector<Command> enumerate_commands(const World& world, const ExplorationConfig& config);
StepOutcome apply_command(World& world, const Command& cmd);

// Canonical structural encoding: granules relabelled by first reference,
// untouched granules counted per state, content by digest.
std::string canonical_encoding(const World& world);

ExplorationReport explore(const ExplorationConfig& config, const TransitionObserver& observer = {});

}  // namespace csmsim
