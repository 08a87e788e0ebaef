#include <algorithm>

#include "csmsim/granule_space.hpp"
#include "helpers.hpp"

using namespace csmsim;
using namespace csmsim::test;

namespace {

constexpr SecurityState kStates[] = {SecurityState::Normal, SecurityState::Secure, SecurityState::Realm,
                                     SecurityState::Root};
constexpr PasTag kTags[] = {PasTag::Normal, PasTag::Secure, PasTag::Realm, PasTag::Root};

// Rows: Normal, Secure, Realm, Root. Columns: Normal, Secure, Realm, Root PAS.
constexpr bool kTable1[4][4] = {
    {true, false, false, false},
    {true, true, false, false},
    {true, false, true, false},
    {true, true, true, true},
};

bool all_zero(std::span<const std::byte> b) {
  return std::all_of(b.begin(), b.end(), [](std::byte x) { return x == std::byte{0}; });
}

}  // namespace

TEST_CASE("gpc_check matches the access table for all 16 cells") {
  for (int s = 0; s < 4; ++s) {
    for (int t = 0; t < 4; ++t) {
      CAPTURE(s);
      CAPTURE(t);
      CHECK(gpc_check(kStates[s], kTags[t]) == kTable1[s][t]);
    }
  }
}

TEST_CASE("gpc_check spot values") {
  CHECK_FALSE(gpc_check(SecurityState::Normal, PasTag::Realm));
  CHECK(gpc_check(SecurityState::Root, PasTag::Secure));
  CHECK(gpc_check(SecurityState::Realm, PasTag::Normal));
  CHECK_FALSE(gpc_check(SecurityState::Realm, PasTag::Secure));
}

TEST_CASE("physical access composes the GPT with the check") {
  GranuleSpace gs(8);
  CHECK(gs.read(SecurityState::Normal, 0, 0, 16));
  REQUIRE(gs.delegate(1));
  REQUIRE(gs.transition(1, GranuleState::Delegated, GranuleState::Data));
  CHECK(is_error(gs.read(SecurityState::Normal, 1, 0, 1), Error::Fault));
  CHECK(is_error(gs.write(SecurityState::Normal, 1, 0, bytes("x")), Error::Fault));
  CHECK(gs.write(SecurityState::Root, 1, 0, bytes("root")));
  CHECK(gs.write(SecurityState::Root, 0, 0, bytes("root")));
  CHECK(is_error(gs.read(SecurityState::Normal, 8, 0, 1), Error::OutOfRange));
}

TEST_CASE("faulting write leaves content untouched and is traced by the RMM") {
  Rmm rmm(Rmm::Config{8, 0});
  REQUIRE(rmm.granule_delegate(2));
  const auto before = rmm.granules().at(2).content.digest();
  const auto mark = rmm.events().size();
  CHECK(is_error(rmm.physical_write(SecurityState::Normal, 2, 0, bytes("evil")), Error::Fault));
  CHECK(rmm.granules().at(2).content.digest() == before);
  const auto delta = rmm.events().since(mark);
  REQUIRE(delta.size() == 1);
  CHECK(std::holds_alternative<FaultEvent>(delta[0]));
  CHECK(rmm.host_realm_pas_hits() == 0);
}

TEST_CASE("delegate wipes and retags; bad states are rejected") {
  GranuleSpace gs(4);
  REQUIRE(gs.write(SecurityState::Normal, 3, 0, bytes("host data")));
  REQUIRE(gs.delegate(3));
  CHECK(gs.at(3).state == GranuleState::Delegated);
  CHECK(gs.at(3).pas == PasTag::Realm);
  CHECK(gs.gpt()[3] == PasTag::Realm);
  CHECK(all_zero(gs.at(3).content.bytes()));
  CHECK(is_error(gs.delegate(3), Error::BadState));
  REQUIRE(gs.transition(3, GranuleState::Delegated, GranuleState::Data));
  CHECK(is_error(gs.delegate(3), Error::BadState));
  CHECK(is_error(gs.undelegate(3), Error::BadState));
}

TEST_CASE("undelegate wipes and the round trip restores the GPT") {
  GranuleSpace gs(4);
  const std::vector<PasTag> initial(gs.gpt().begin(), gs.gpt().end());
  REQUIRE(gs.delegate(1));
  REQUIRE(gs.write(SecurityState::Root, 1, 10, bytes("secret")));
  REQUIRE(gs.undelegate(1));
  CHECK(gs.at(1).state == GranuleState::Undelegated);
  CHECK(gs.at(1).pas == PasTag::Normal);
  CHECK(all_zero(gs.at(1).content.bytes()));
  CHECK(std::equal(initial.begin(), initial.end(), gs.gpt().begin()));
}

TEST_CASE("realm bytes never reach the normal world after reclaim") {
  Duo d;
  const CsmId csm = d.create(d.p, kPBase, 1);
  (void)csm;
  REQUIRE(d.rmm().realm_write(d.p.id, kPBase, bytes("realm secret")));
  auto pa = d.rmm().rmi_data_destroy(d.p.rd, kPBase);
  REQUIRE(pa);
  REQUIRE(d.rmm().granule_undelegate(*pa));
  auto r = d.rmm().physical_read(SecurityState::Normal, *pa, 0, kGranuleSize);
  REQUIRE(r);
  CHECK(all_zero(*r));
}

TEST_CASE("state counts always sum to the granule count") {
  GranuleSpace gs(16);
  for (GranuleIndex g = 0; g < 16; g += 3) REQUIRE(gs.delegate(g));
  REQUIRE(gs.transition(0, GranuleState::Delegated, GranuleState::RD));
  std::size_t total = 0;
  for (auto s : {GranuleState::Undelegated, GranuleState::Delegated, GranuleState::RD, GranuleState::REC,
                 GranuleState::RTT, GranuleState::Data, GranuleState::APT}) {
    total += gs.count(s);
  }
  CHECK(total == 16);
  for (GranuleIndex g = 0; g < 16; ++g) {
    const auto& gr = gs.at(g);
    CHECK((gr.state == GranuleState::Undelegated) == (gr.pas == PasTag::Normal));
    CHECK(gr.index == g);
  }
}

TEST_CASE("content digest tracks writes and resets on wipe") {
  GranuleContent c;
  const Digest zero = c.digest();
  c.write(5, bytes("abc"));
  const Digest one = c.digest();
  CHECK(one != zero);
  GranuleContent copy = c;
  copy.write(5, bytes("abd"));
  CHECK(copy.digest() != one);
  CHECK(c.digest() == one);
  c.wipe();
  CHECK(c.digest() == zero);
  CHECK(c.is_zero());
}
