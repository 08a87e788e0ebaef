#include <map>

#include "csmsim/explorer.hpp"
#include "helpers.hpp"

using namespace csmsim;
using namespace csmsim::test;

namespace {

const Realm* realm_of(const World& w, std::uint8_t id) {
  auto it = w.rmm.realms().find(RealmId{id});
  return it == w.rmm.realms().end() ? nullptr : &it->second;
}

// Initialization-only exploration from an empty machine.
ExplorationConfig init_config() {
  ExplorationConfig cfg;
  cfg.from_empty = true;
  cfg.realm_count = 1;
  cfg.granule_count = 5;
  cfg.depth = 10;
  cfg.enabled = {CommandKind::HostDelegate, CommandKind::RealmCreate, CommandKind::AptCreate,
                 CommandKind::RecCreate,    CommandKind::RttCreate,   CommandKind::DataCreate,
                 CommandKind::Activate,     CommandKind::AttestationToken};
  return cfg;
}

}  // namespace

TEST_CASE("depth 0 visits exactly the initial state") {
  ExplorationConfig cfg;
  cfg.depth = 0;
  const auto r = explore(cfg);
  CHECK(r.states == 1);
  CHECK(r.violation_count == 0);
}

TEST_CASE("small exhaustive run is clean and deterministic") {
  ExplorationConfig cfg;
  cfg.granule_count = 4;
  cfg.depth = 3;
  const auto a = explore(cfg);
  CHECK(a.clean());
  CHECK_FALSE(a.budget_exceeded);
  CHECK(a.depth_reached == 3);
  CHECK(a.oracle_checks == a.states);
  cfg.workers = 2;
  const auto b = explore(cfg);
  CHECK(b.states == a.states);
  CHECK(b.transitions == a.transitions);
}

TEST_CASE("state cap is reported, not fatal") {
  ExplorationConfig cfg;
  cfg.depth = 4;
  cfg.state_cap = 50;
  const auto r = explore(cfg);
  CHECK(r.budget_exceeded);
  CHECK(r.states <= 50 + 1);
}

TEST_CASE("canonical encoding ignores which pristine granule was used") {
  ExplorationConfig cfg;
  World a = initial_world(cfg);
  World b = initial_world(cfg);
  CHECK(canonical_encoding(a) == canonical_encoding(b));
  GranuleIndex u1 = 0, u2 = 0;
  int seen = 0;
  for (GranuleIndex g = 0; g < a.rmm.granules().size(); ++g) {
    if (a.rmm.granules().at(g).state != GranuleState::Undelegated) continue;
    if (seen++ == 0) {
      u1 = g;
    } else {
      u2 = g;
      break;
    }
  }
  REQUIRE(a.rmm.granule_delegate(u1));
  REQUIRE(b.rmm.granule_delegate(u2));
  CHECK(canonical_encoding(a) == canonical_encoding(b));
  REQUIRE(a.rmm.physical_write(SecurityState::Normal, u2, 0, bytes("x")));
  CHECK(canonical_encoding(a) != canonical_encoding(b));
}

TEST_CASE("command names round trip") {
  for (int k = 0; k <= static_cast<int>(CommandKind::Activate); ++k) {
    const auto kind = static_cast<CommandKind>(k);
    CHECK(command_kind_from_string(to_string(kind)) == kind);
  }
}

// The explorer is the oracle for these initialization-order facts; the
// observer sees every transition of the exhaustive run.
TEST_CASE("init ordering facts hold on every explored transition") {
  std::map<std::string, int> seen;
  std::string bad;
  auto observer = [&](const World& before, const Command& cmd, const StepOutcome& out, const World&) {
    const Realm* r = realm_of(before, cmd.realm);
    const bool active = r && r->lifecycle == RealmLifecycle::Active;
    switch (cmd.kind) {
      case CommandKind::AptCreate:
        if (active) {
          ++seen["apt_after_active"];
          if (out.error != "BadState") bad = "apt_create on Active gave " + out.error;
        }
        break;
      case CommandKind::DataCreate:
        if (active) {
          ++seen["data_after_active"];
          if (out.error != "BadState") bad = "data_create on Active gave " + out.error;
        }
        break;
      case CommandKind::Activate:
        if (r && r->lifecycle == RealmLifecycle::New && r->rec && !r->apt_granule) {
          ++seen["activate_no_apt"];
          if (out.error != "MissingApt") bad = "activate without APT gave " + (out.ok ? "ok" : out.error);
        }
        if (out.ok && !(r && r->apt_granule)) bad = "activation without an APT";
        break;
      case CommandKind::AttestationToken:
        if (r && !active) {
          ++seen["token_before_active"];
          if (out.error != "BadState") bad = "token before activation gave " + (out.ok ? "ok" : out.error);
        }
        break;
      default: break;
    }
  };
  const auto report = explore(init_config(), observer);
  INFO(bad);
  CHECK(bad.empty());
  CHECK(report.clean());
  CHECK_FALSE(report.budget_exceeded);
  CHECK(seen["apt_after_active"] > 0);
  CHECK(seen["data_after_active"] > 0);
  CHECK(seen["activate_no_apt"] > 0);
  CHECK(seen["token_before_active"] > 0);
}

TEST_CASE("CSM facts hold on every explored transition") {
  ExplorationConfig cfg;
  cfg.realm_count = 3;
  cfg.granule_count = 6;
  cfg.csm_max_size = 1;
  cfg.ipa_window = 2;
  cfg.depth = 4;
  std::map<std::string, int> seen;
  std::string bad;
  auto observer = [&](const World& before, const Command& cmd, const StepOutcome& out, const World& after) {
    // Data never returns to the delegated pool except through destroy paths.
    for (GranuleIndex g = 0; g < before.rmm.granules().size(); ++g) {
      if (before.rmm.granules().at(g).state != GranuleState::Data) continue;
      const auto now = after.rmm.granules().at(g).state;
      if (now == GranuleState::Delegated || now == GranuleState::Undelegated) {
        ++seen["data_released"];
        if (cmd.kind != CommandKind::DataDestroy && cmd.kind != CommandKind::RealmDestroy &&
            cmd.kind != CommandKind::Service) {
          bad = "Data released by " + to_string(cmd);
        }
      }
    }
    if (cmd.kind == CommandKind::CsmShare && out.ok) {
      // A second share of the same CSM to the same peer must be refused.
      World again = after;
      const StepOutcome twice = apply_command(again, cmd);
      ++seen["share_twice"];
      if (twice.error != "AlreadyShared") bad = "second share gave " + (twice.ok ? "ok" : twice.error);
    }
    if (cmd.kind == CommandKind::CsmReserve && cmd.realm != cmd.sid_c) {
      ++seen["wrong_consumer"];
      if (out.error != "WrongConsumer") bad = "foreign reserve gave " + (out.ok ? "ok" : out.error);
    }
    if (cmd.kind == CommandKind::DataCreateUnknown) {
      const Realm* r = realm_of(before, cmd.realm);
      if (r && r->lifecycle == RealmLifecycle::Active && !r->rtt.backed(Ipa::from_granule(cmd.ipa))) {
        ++seen["table_miss"];
        if (out.error != "TableMiss") bad = "unbacked map gave " + (out.ok ? "ok" : out.error);
      }
    }
    if (cmd.kind == CommandKind::HostDelegate && !out.ok) bad = "pristine delegate failed: " + out.error;
  };
  const auto report = explore(cfg, observer);
  INFO(bad);
  CHECK(bad.empty());
  CHECK(report.clean());
  CHECK(seen["data_released"] > 0);
  CHECK(seen["share_twice"] > 0);
  CHECK(seen["wrong_consumer"] > 0);
}
