#include "csmsim/digest.hpp"
#include "csmsim/rmm.hpp"
#include "helpers.hpp"

using namespace csmsim;
using namespace csmsim::test;

namespace {

// Hand-driven realm: RD at g, APT g+1, REC g+2, RTT g+3.
struct Manual {
  Rmm rmm{Rmm::Config{32, 0}};

  RealmId create(GranuleIndex rd) {
    REQUIRE(rmm.granule_delegate(rd));
    auto id = rmm.rmi_realm_create(rd, 32);
    REQUIRE(id);
    return *id;
  }

  void full_init(GranuleIndex rd) {
    for (GranuleIndex g = rd + 1; g <= rd + 3; ++g) REQUIRE(rmm.granule_delegate(g));
    REQUIRE(rmm.rmi_apt_create(rd, rd + 1));
    REQUIRE(rmm.rmi_rec_create(rd, rd + 2));
    REQUIRE(rmm.rmi_rtt_create(rd, rd + 3, Ipa{0}));
  }
};

}  // namespace

TEST_CASE("realm ids start at 1 and are never reused at the same RD") {
  Manual m;
  CHECK(m.create(0) == RealmId{1});
  REQUIRE(m.rmm.rmi_realm_destroy(0));
  CHECK(m.rmm.granules().at(0).state == GranuleState::Delegated);
  auto second = m.rmm.rmi_realm_create(0, 32);
  REQUIRE(second);
  CHECK(*second == RealmId{2});
  CHECK(is_error(m.rmm.registry_lookup(RealmId{1}), Error::NoSuchRealm));
  CHECK(is_error(m.rmm.registry_lookup(RealmId{0}), Error::NoSuchRealm));
  CHECK(m.rmm.registry_lookup(RealmId{2}));
}

TEST_CASE("realm_create needs a delegated granule") {
  Rmm rmm(Rmm::Config{8, 0});
  CHECK(is_error(rmm.rmi_realm_create(0, 32), Error::BadState));
}

TEST_CASE("APT lifecycle") {
  Manual m;
  m.create(0);
  REQUIRE(m.rmm.granule_delegate(1));
  REQUIRE(m.rmm.granule_delegate(5));
  REQUIRE(m.rmm.rmi_apt_create(0, 1));
  CHECK(m.rmm.realm_by_rd(0)->apt.empty());
  CHECK(is_error(m.rmm.rmi_apt_create(0, 5), Error::AlreadyExists));
  REQUIRE(m.rmm.granule_delegate(2));
  REQUIRE(m.rmm.rmi_rec_create(0, 2));
  REQUIRE(m.rmm.rmi_realm_activate(0));
  CHECK(is_error(m.rmm.rmi_apt_create(0, 5), Error::BadState));
  CHECK(is_error(m.rmm.rmi_apt_destroy(0, 1), Error::BadState));
}

TEST_CASE("activation gates") {
  Manual m;
  m.create(0);
  REQUIRE(m.rmm.granule_delegate(2));
  REQUIRE(m.rmm.rmi_rec_create(0, 2));
  CHECK(is_error(m.rmm.rmi_realm_activate(0), Error::MissingApt));
  REQUIRE(m.rmm.granule_delegate(1));
  REQUIRE(m.rmm.rmi_apt_create(0, 1));
  REQUIRE(m.rmm.rmi_realm_activate(0));
  CHECK(m.rmm.realm_by_rd(0)->lifecycle == RealmLifecycle::Active);
  CHECK(is_error(m.rmm.rmi_realm_activate(0), Error::BadState));
}

TEST_CASE("RIM is deterministic and order sensitive") {
  const auto a = bytes("page a"), b = bytes("page b");
  auto measure = [&](bool swap, const std::vector<std::byte>& first) {
    Manual m;
    m.create(0);
    m.full_init(0);
    REQUIRE(m.rmm.granule_delegate(10));
    REQUIRE(m.rmm.granule_delegate(11));
    REQUIRE(m.rmm.rmi_data_create(0, 10, swap ? Ipa{0x1000} : Ipa{0}, first));
    REQUIRE(m.rmm.rmi_data_create(0, 11, swap ? Ipa{0} : Ipa{0x1000}, b));
    return m.rmm.realm_by_rd(0)->rim;
  };
  CHECK(measure(false, a) == measure(false, a));
  CHECK(measure(false, a) != measure(true, a));
  auto a2 = a;
  a2[0] ^= std::byte{1};
  CHECK(measure(false, a) != measure(false, a2));
}

TEST_CASE("data_create only before activation and only on delegated granules") {
  Manual m;
  m.create(0);
  m.full_init(0);
  CHECK(is_error(m.rmm.rmi_data_create(0, 10, Ipa{0}, bytes("x")), Error::NotDelegated));
  REQUIRE(m.rmm.granule_delegate(10));
  CHECK(is_error(m.rmm.rmi_data_create(0, 10, Ipa{0x10}, bytes("x")), Error::Unaligned));
  REQUIRE(m.rmm.rmi_data_create(0, 10, Ipa{0}, bytes("x")));
  REQUIRE(m.rmm.granule_delegate(11));
  CHECK(is_error(m.rmm.rmi_data_create(0, 11, Ipa{0}, bytes("y")), Error::AlreadyMapped));
  const Digest rim = m.rmm.realm_by_rd(0)->rim;
  REQUIRE(m.rmm.rmi_realm_activate(0));
  CHECK(is_error(m.rmm.rmi_data_create(0, 11, Ipa{0x1000}, bytes("y")), Error::BadState));
  REQUIRE(m.rmm.rmi_data_create_unknown(0, 11, Ipa{0x1000}));
  CHECK(m.rmm.realm_by_rd(0)->rim == rim);
}

TEST_CASE("rtt_create, read_entry and table misses") {
  Manual m;
  m.create(0);
  for (GranuleIndex g = 1; g <= 2; ++g) REQUIRE(m.rmm.granule_delegate(g));
  REQUIRE(m.rmm.rmi_apt_create(0, 1));
  REQUIRE(m.rmm.rmi_rec_create(0, 2));
  REQUIRE(m.rmm.rmi_realm_activate(0));
  REQUIRE(m.rmm.granule_delegate(10));
  CHECK(is_error(m.rmm.rmi_data_create_unknown(0, 10, Ipa{0}), Error::TableMiss));
  auto fresh = m.rmm.rmi_rtt_read_entry(0, Ipa{0x5000});
  REQUIRE(fresh);
  CHECK(fresh->state == RttEntryState::Unassigned);
  REQUIRE(m.rmm.granule_delegate(3));
  REQUIRE(m.rmm.granule_delegate(4));
  REQUIRE(m.rmm.rmi_rtt_create(0, 3, Ipa{0}));
  CHECK(is_error(m.rmm.rmi_rtt_create(0, 4, Ipa{0}), Error::AlreadyExists));
  CHECK(is_error(m.rmm.rmi_rtt_create(0, 4, Ipa{0x1000}), Error::Unaligned));
  CHECK(m.rmm.realm_by_rd(0)->rtt.table_budget() == 1);
  REQUIRE(m.rmm.rmi_data_create_unknown(0, 10, Ipa{0x5000}));
  auto e = m.rmm.rmi_rtt_read_entry(0, Ipa{0x5000});
  REQUIRE(e);
  CHECK(e->state == RttEntryState::Assigned);
  CHECK(e->pa == GranuleIndex{10});
  auto pa = m.rmm.rmi_data_destroy(0, Ipa{0x5000});
  REQUIRE(pa);
  CHECK(*pa == 10);
  CHECK(m.rmm.rmi_rtt_read_entry(0, Ipa{0x5000})->state == RttEntryState::Unassigned);
  CHECK(is_error(m.rmm.rmi_data_destroy(0, Ipa{0x5000}), Error::NotMapped));
  // The next block needs its own table.
  REQUIRE(m.rmm.granule_delegate(11));
  CHECK(is_error(m.rmm.rmi_data_create_unknown(0, 11, Ipa{kRttEntriesPerTable * kGranuleSize}), Error::TableMiss));
}

TEST_CASE("unmapping emits a TLB flush") {
  Duo d;
  const auto mark = d.rmm().events().size();
  REQUIRE(d.rmm().rmi_data_destroy(d.p.rd, Ipa{0}));
  const auto delta = d.rmm().events().since(mark);
  REQUIRE(delta.size() == 1);
  const auto* f = std::get_if<TlbFlushEvent>(&delta[0]);
  REQUIRE(f);
  CHECK(f->realm == d.p.id);
  CHECK(f->ipa == Ipa{0});
}

TEST_CASE("host cannot map another realm's granule") {
  Duo d;
  const GranuleIndex victim = d.rmm().realm_by_rd(d.p.rd)->rtt.entries().begin()->second.pa;
  CHECK(is_error(d.rmm().rmi_data_create_unknown(d.c.rd, victim, Ipa{0x1000}), Error::AlreadyMapped));
  d.require_clean();
}

TEST_CASE("realm_access: own data, unmapped and read-only") {
  Duo d;
  auto own = d.rmm().realm_read(d.p.id, Ipa{0}, 8);
  REQUIRE(own);
  CHECK(text(*own) == "provider");
  CHECK(is_error(d.rmm().realm_read(d.p.id, Ipa{0x7000}, 1), Error::Fault));
  d.share_and_attach(1, Permission::ReadOnly);
  CHECK(d.rmm().realm_read(d.c.id, kCBase, 1));
  CHECK(is_error(d.rmm().realm_write(d.c.id, kCBase, bytes("w")), Error::Fault));
  CHECK(d.rmm().realm_write(d.p.id, kPBase, bytes("w")));
}

TEST_CASE("destroying an isolated realm returns every granule wiped") {
  Duo d;
  const Realm& r = *d.rmm().realm_by_rd(d.c.rd);
  std::vector<GranuleIndex> owned{r.rd, *r.apt_granule, r.rec->granule};
  for (auto g : r.rtt.table_granules()) owned.push_back(g);
  for (const auto& [_, e] : r.rtt.entries()) owned.push_back(e.pa);
  const RealmId id = d.c.id;
  REQUIRE(d.rmm().rmi_realm_destroy(d.c.rd));
  for (auto g : owned) {
    CAPTURE(g);
    CHECK(d.rmm().granules().at(g).state == GranuleState::Delegated);
    CHECK(d.rmm().granules().at(g).content.is_zero());
  }
  CHECK(is_error(d.rmm().registry_lookup(id), Error::NoSuchRealm));
  d.require_clean();
}

TEST_CASE("destroying a provider unmaps its attached consumer") {
  Duo d;
  d.share_and_attach(2);
  const auto mark = d.rmm().events().size();
  REQUIRE(d.rmm().rmi_realm_destroy(d.p.rd));
  std::size_t removes = 0;
  for (const auto& e : d.rmm().events().since(mark)) {
    if (const auto* x = std::get_if<ExitEvent>(&e); x && x->exit.reason == ExitReason::RemoveCsm) {
      if (x->exit.realm == d.c.id) ++removes;
    }
  }
  CHECK(removes == 1);
  CHECK(is_error(d.rmm().realm_read(d.c.id, kCBase, 1), Error::Fault));
  CHECK(d.rmm().realm_by_rd(d.c.rd)->apt.empty());
  d.require_clean();
}

TEST_CASE("unprotected IPAs are rejected for protected operations") {
  Duo d;
  CHECK(is_error(d.rmm().rsi_csm_create(d.p.id, Ipa{0x80000000}, 1), Error::BadState));
}

TEST_CASE("apt_destroy only in teardown and only when empty") {
  Duo d;
  const GranuleIndex apt = *RmmTestAccess::realm(d.rmm(), d.p.id).apt_granule;
  CHECK(is_error(d.rmm().rmi_apt_destroy(d.p.rd, apt), Error::BadState));
  d.create(d.p, kPBase, 1);
  Realm& p = RmmTestAccess::realm(d.rmm(), d.p.id);
  p.lifecycle = RealmLifecycle::Destroying;
  CHECK(is_error(d.rmm().rmi_apt_destroy(d.p.rd, apt + 1), Error::BadState));
  CHECK(is_error(d.rmm().rmi_apt_destroy(d.p.rd, apt), Error::NotEmpty));
  p.apt.clear();
  REQUIRE(d.rmm().rmi_apt_destroy(d.p.rd, apt));
  CHECK(d.rmm().granules().at(apt).state == GranuleState::Delegated);
  CHECK_FALSE(RmmTestAccess::realm(d.rmm(), d.p.id).apt_granule);
}
