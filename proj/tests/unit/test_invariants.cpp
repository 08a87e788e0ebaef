#include <algorithm>
#include <random>

#include "csmsim/access_oracle.hpp"
#include "csmsim/explorer.hpp"
#include "helpers.hpp"

using namespace csmsim;
using namespace csmsim::test;

namespace {

bool has(const std::vector<Violation>& v, std::string_view inv) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.invariant == inv; });
}

}  // namespace

TEST_CASE("post-attach and post-revoke states are clean") {
  Duo d;
  const SharingId sid = d.share_and_attach(2);
  CHECK(check_invariants(d.w).empty());
  const auto before = snapshot(d.rmm());
  const auto mark = d.rmm().events().size();
  REQUIRE(d.rmm().rsi_csm_revoke(d.p.id, sid));
  const auto delta = d.rmm().events().since(mark);
  CHECK(check_transition(before, snapshot(d.rmm()), delta).empty());
  CHECK(std::count_if(delta.begin(), delta.end(), [](const Event& e) {
          return std::holds_alternative<TlbFlushEvent>(e);
        }) == 2);
  CHECK(check_invariants(d.w).empty());
}

TEST_CASE("backdoor mapping of a provider-private granule trips I1 and I5") {
  Duo d;
  const GranuleIndex pa = d.rmm().realm_by_rd(d.p.rd)->rtt.find(Ipa{0})->pa;
  RmmTestAccess::realm(d.rmm(), d.c.id).rtt.install(Ipa{0x1000}, RttEntry{pa, Permission::ReadOnly});
  const auto v = check_invariants(d.rmm());
  CHECK(has(v, "I1"));
  CHECK(has(v, "I5"));
}

TEST_CASE("backdoor PA divergence in an attached window trips I2") {
  Duo d;
  d.share_and_attach(2);
  Realm& c = RmmTestAccess::realm(d.rmm(), d.c.id);
  const GranuleIndex a = c.rtt.find(kCBase)->pa;
  const GranuleIndex b = c.rtt.find(at(kCBase, 1))->pa;
  c.rtt.install(kCBase, RttEntry{b, Permission::ReadWrite});
  c.rtt.install(at(kCBase, 1), RttEntry{a, Permission::ReadWrite});
  CHECK(has(check_invariants(d.rmm()), "I2"));
}

TEST_CASE("unmapping without a flush trips I4") {
  Duo d;
  const auto before = snapshot(d.rmm());
  RmmTestAccess::realm(d.rmm(), d.p.id).rtt.remove(Ipa{0});
  CHECK(has(check_transition(before, snapshot(d.rmm()), {}), "I4"));
}

TEST_CASE("a recorded host hit on realm PAS trips I3") {
  Duo d;
  CHECK_FALSE(has(check_invariants(d.rmm()), "I3"));
  RmmTestAccess::host_hit(d.rmm());
  CHECK(has(check_invariants(d.rmm()), "I3"));
}

TEST_CASE("a Data granule back in the normal world trips I6") {
  Duo d;
  const GranuleIndex pa = d.rmm().realm_by_rd(d.p.rd)->rtt.find(Ipa{0})->pa;
  auto& gs = RmmTestAccess::granules(d.rmm());
  REQUIRE(gs.transition(pa, GranuleState::Data, GranuleState::Delegated));
  REQUIRE(gs.undelegate(pa));
  CHECK(has(check_invariants(d.rmm()), "I6"));
}

TEST_CASE("oracle: fresh world and post-attach rows") {
  Rmm fresh(Rmm::Config{8, 0});
  const AccessMatrix m0 = access_oracle(fresh);
  for (GranuleIndex g = 0; g < 8; ++g) {
    CHECK(m0.world(SecurityState::Normal, g) == Reach::ReadWrite);
    CHECK(m0.world(SecurityState::Root, g) == Reach::ReadWrite);
  }
  CHECK(m0.realms.empty());

  Duo d;
  const AccessMatrix before = access_oracle(d.rmm());
  auto row_count = [](const AccessMatrix& m, RealmId id, Reach want) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.realms.size(); ++i) {
      if (m.realms[i] != id) continue;
      for (Reach r : m.realm_rows[i]) n += r == want ? 1 : 0;
    }
    return n;
  };
  d.share_and_attach(2, Permission::ReadOnly);
  const AccessMatrix after = access_oracle(d.rmm());
  CHECK(row_count(after, d.c.id, Reach::Read) == row_count(before, d.c.id, Reach::Read) + 2);
  CHECK(row_count(after, d.c.id, Reach::ReadWrite) == row_count(before, d.c.id, Reach::ReadWrite));
  CHECK(oracle_equivalence(d.rmm()).empty());
}

TEST_CASE("property: random command walks keep I1-I7 and oracle equivalence") {
  ExplorationConfig cfg;
  cfg.realm_count = 3;
  cfg.granule_count = 12;
  cfg.csm_max_size = 2;
  cfg.ipa_window = 3;
  std::size_t steps = 0, oks = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::mt19937_64 rng(seed);
    World w = initial_world(cfg);
    for (int i = 0; i < 60; ++i) {
      const auto cmds = enumerate_commands(w, cfg);
      REQUIRE_FALSE(cmds.empty());
      const Command cmd = cmds[rng() % cmds.size()];
      const auto before = snapshot(w.rmm);
      const auto mark = w.rmm.events().size();
      const StepOutcome out = apply_command(w, cmd);
      oks += out.ok ? 1 : 0;
      ++steps;
      auto v = check_transition(before, snapshot(w.rmm), w.rmm.events().since(mark));
      for (auto& x : check_invariants(w)) v.push_back(x);
      if (!v.empty()) {
        FAIL_CHECK("seed " << seed << " step " << i << " " << to_string(cmd) << ": " << v[0].invariant << " "
                            << v[0].detail);
        break;
      }
      REQUIRE(oracle_equivalence(w.rmm).empty());
    }
  }
  CHECK(oks > steps / 10);
}
