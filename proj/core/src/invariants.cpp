#include "csmsim/invariants.hpp"

#include <algorithm>
#include <sstream>

namespace csmsim {
namespace {

struct Mapper {
  const Realm* realm;
  Ipa ipa;
  const RttEntry* entry;
};

class Checker {
 public:
  explicit Checker(const Rmm& rmm) : rmm_(rmm) {}

  std::vector<Violation> run() {
    collect();
    disjointness();
    view_consistency();
    host_exclusion();
    revocation();
    consent();
    conservation();
    identifiers();
    return std::move(out_);
  }

 private:
  template <class... Parts>
  void fail(const char* inv, Parts&&... parts) {
    std::ostringstream s;
    (s << ... << parts);
    out_.push_back(Violation{inv, s.str()});
  }

  const Realm* realm(RealmId id) const {
    auto it = rmm_.realms().find(id);
    return it == rmm_.realms().end() ? nullptr : &it->second;
  }

  void collect() {
    for (const auto& [id, r] : rmm_.realms()) {
      for (const auto& [g, e] : r.rtt.entries()) by_pa_[e.pa].push_back(Mapper{&r, Ipa::from_granule(g), &e});
    }
  }

  // A mapping is legitimately shared when it sits in an attached consumer
  // window whose provider maps the same PA at the same offset of a CSM
  // that records this sharing.
  bool consented_share(const Mapper& c, const Mapper& owner) const {
    const ConsumerEntry* ce = attached_window(c);
    if (!ce) return false;
    if (ce->sharing_id.p_id != owner.realm->id || ce->sharing_id.c_id != c.realm->id) return false;
    const ProviderEntry* pe = owner.realm->apt.provider_covering(owner.ipa);
    if (!pe || !pe->ready()) return false;
    const ShareRecord* s = pe->share(ce->sharing_id);
    if (!s || !s->attached || s->c_id != c.realm->id) return false;
    return c.ipa.granule() - ce->base.granule() == owner.ipa.granule() - pe->base.granule();
  }

  // Only attached windows hold shared mappings. A window whose reserve is
  // still pending may hold the consumer's own private granules until the
  // host reclaims them.
  static const ConsumerEntry* attached_window(const Mapper& m) {
    const ConsumerEntry* ce = m.realm->apt.consumer_covering(m.ipa);
    return ce && ce->state == ConsumerState::Attached ? ce : nullptr;
  }
  static bool in_consumer_window(const Mapper& m) { return attached_window(m) != nullptr; }

  void disjointness() {
    for (const auto& [pa, mappers] : by_pa_) {
      if (mappers.size() < 2) continue;
      std::vector<const Mapper*> owners;
      for (const auto& m : mappers) {
        if (!in_consumer_window(m)) owners.push_back(&m);
      }
      if (owners.size() != 1) {
        fail("I1", "granule ", pa, " mapped by ", mappers.size(), " realms with ", owners.size(),
             " non-consumer mappings");
        continue;
      }
      const Mapper& owner = *owners.front();
      if (!owner.realm->apt.provider_covering(owner.ipa)) {
        fail("I1", "granule ", pa, " shared from private ipa ", hex_ipa(owner.ipa), " of realm ",
             owner.realm->id.value);
        continue;
      }
      for (const auto& m : mappers) {
        if (&m == &owner) continue;
        if (!consented_share(m, owner)) {
          fail("I1", "granule ", pa, " mapped by realm ", m.realm->id.value, " at ", hex_ipa(m.ipa),
               " without matching APT records");
        }
      }
    }
  }

  void view_consistency() {
    for (const auto& [id, r] : rmm_.realms()) {
      for (const auto& e : r.apt.entries()) {
        const auto* c = std::get_if<ConsumerEntry>(&e);
        if (!c || c->state != ConsumerState::Attached) continue;
        const Realm* p = realm(c->sharing_id.p_id);
        const ProviderEntry* pe = p ? p->apt.provider_with_share(c->sharing_id) : nullptr;
        if (!pe || !pe->ready()) {
          fail("I2", "realm ", id.value, " attached to ", to_string(c->sharing_id), " with no provider region");
          continue;
        }
        const ShareRecord* s = pe->share(c->sharing_id);
        if (c->size != pe->size) {
          fail("I2", "window ", hex_ipa(c->base), "+", c->size, " of realm ", id.value, " differs from region size ",
               pe->size);
        }
        for (std::uint64_t k = 0; k < c->size; ++k) {
          const RttEntry* ce = r.rtt.find(Ipa::from_granule(c->base.granule() + k));
          const RttEntry* pe_k =
              k < pe->size ? p->rtt.find(Ipa::from_granule(pe->base.granule() + k)) : nullptr;
          const bool same = (!ce && !pe_k) || (ce && pe_k && ce->pa == pe_k->pa);
          if (!same) {
            fail("I2", "realm ", id.value, " offset ", k, " of ", to_string(c->sharing_id),
                 " does not match the provider view");
          } else if (ce && ce->perm != s->perm) {
            fail("I2", "realm ", id.value, " offset ", k, " permission ", to_string(ce->perm), " != share ",
                 to_string(s->perm));
          }
        }
      }
      for (const auto& e : r.apt.entries()) {
        const auto* pe = std::get_if<ProviderEntry>(&e);
        if (!pe) continue;
        for (std::uint64_t k = 0; k < pe->size; ++k) {
          const RttEntry* own = r.rtt.find(Ipa::from_granule(pe->base.granule() + k));
          if (own && own->perm != Permission::ReadWrite) {
            fail("I2", "provider realm ", id.value, " holds a read-only view of its own region");
          }
        }
      }
    }
  }

  void host_exclusion() {
    if (rmm_.host_realm_pas_hits() != 0) {
      fail("I3", rmm_.host_realm_pas_hits(), " Normal-world accesses reached Realm PAS");
    }
  }

  void revocation() {
    for (const auto& [id, r] : rmm_.realms()) {
      for (const auto& e : r.apt.entries()) {
        if (const auto* pe = std::get_if<ProviderEntry>(&e)) {
          for (const auto& s : pe->shares) {
            if (!s.attached) continue;
            const Realm* c = realm(s.c_id);
            const ConsumerEntry* ce = c ? c->apt.consumer(s.sharing_id) : nullptr;
            if (!ce || ce->state != ConsumerState::Attached) {
              fail("I4", "share ", to_string(s.sharing_id), " marked attached without an attached consumer");
            }
          }
        } else {
          const auto& ce = std::get<ConsumerEntry>(e);
          if (ce.state != ConsumerState::Reserved) continue;
          for (std::uint64_t k = 0; k < ce.size; ++k) {
            if (r.rtt.find(Ipa::from_granule(ce.base.granule() + k))) {
              fail("I4", "realm ", id.value, " maps ipa inside unattached window of ", to_string(ce.sharing_id));
              break;
            }
          }
        }
      }
    }
  }

  void consent() {
    for (const auto& [pa, mappers] : by_pa_) {
      for (const auto& m : mappers) {
        const ConsumerEntry* ce = attached_window(m);
        const bool foreign = std::any_of(mappers.begin(), mappers.end(),
                                         [&](const Mapper& o) { return o.realm != m.realm && !in_consumer_window(o); });
        if (!ce && !foreign) continue;
        bool ok = false;
        for (const auto& o : mappers) {
          if (o.realm != m.realm && !in_consumer_window(o) && consented_share(m, o)) ok = true;
        }
        if (!ok) {
          fail("I5", "realm ", m.realm->id.value, " maps granule ", pa, " at ", hex_ipa(m.ipa),
               " without both consents");
        }
      }
    }
  }

  void conservation() {
    const GranuleSpace& gs = rmm_.granules();
    std::map<GranuleIndex, int> meta_owner;
    auto claim = [&](GranuleIndex g, GranuleState expected, const Realm& r) {
      if (g >= gs.size() || gs.at(g).state != expected) {
        fail("I6", "realm ", r.id.value, " metadata granule ", g, " is not ", to_string(expected));
      }
      if (++meta_owner[g] > 1) fail("I6", "metadata granule ", g, " claimed twice");
    };
    for (const auto& [id, r] : rmm_.realms()) {
      claim(r.rd, GranuleState::RD, r);
      if (r.apt_granule) claim(*r.apt_granule, GranuleState::APT, r);
      if (r.rec) claim(r.rec->granule, GranuleState::REC, r);
      for (GranuleIndex t : r.rtt.table_granules()) claim(t, GranuleState::RTT, r);
      for (const auto& [g, e] : r.rtt.entries()) {
        if (e.pa >= gs.size() || gs.at(e.pa).state != GranuleState::Data || gs.gpt()[e.pa] != PasTag::Realm) {
          fail("I6", "realm ", id.value, " maps ipa ", hex_ipa(Ipa::from_granule(g)), " to non-Data granule ", e.pa);
        }
      }
      for (const auto& [g, pa] : r.rtt.unprotected()) {
        if (pa >= gs.size() || gs.at(pa).state != GranuleState::Undelegated) {
          fail("I6", "realm ", id.value, " unprotected mapping to non-host granule ", pa);
        }
      }
    }
    for (GranuleIndex g = 0; g < gs.size(); ++g) {
      const GranuleState st = gs.at(g).state;
      const bool meta = st == GranuleState::RD || st == GranuleState::REC || st == GranuleState::RTT ||
                        st == GranuleState::APT;
      if (meta && !meta_owner.count(g)) fail("I6", "orphan ", to_string(st), " granule ", g);
      if (st == GranuleState::Data && !by_pa_.count(g)) fail("I6", "Data granule ", g, " mapped by no realm");
      const bool realm_pas = gs.gpt()[g] == PasTag::Realm;
      if (realm_pas != (st != GranuleState::Undelegated)) fail("I6", "granule ", g, " PAS disagrees with state");
    }
  }

  void identifiers() {
    std::set<std::uint64_t> csm_ids;
    std::set<SharingId> sids;
    for (const auto& [id, r] : rmm_.realms()) {
      if (!id.valid() || id.value >= rmm_.next_realm_id()) fail("I7", "realm id ", id.value, " not issued");
      if (rmm_.tombstones().count(id)) fail("I7", "realm id ", id.value, " is tombstoned but live");
      if (r.id != id) fail("I7", "registry key ", id.value, " names realm ", r.id.value);
      const Realm* by_rd = rmm_.realm_by_rd(r.rd);
      if (by_rd != &r) fail("I7", "RD granule ", r.rd, " does not resolve to realm ", id.value);
      for (const auto& e : r.apt.entries()) {
        const auto* pe = std::get_if<ProviderEntry>(&e);
        if (!pe) continue;
        if (pe->csm_id) {
          if (pe->csm_id->value == 0 || pe->csm_id->value >= rmm_.next_csm_id()) {
            fail("I7", "csm id ", pe->csm_id->value, " not issued");
          }
          if (!csm_ids.insert(pe->csm_id->value).second) fail("I7", "csm id ", pe->csm_id->value, " duplicated");
        }
        for (const auto& s : pe->shares) {
          if (s.sharing_id.p_id != id || s.sharing_id.c_id != s.c_id) {
            fail("I7", "share ", to_string(s.sharing_id), " recorded by realm ", id.value);
          }
          if (!sids.insert(s.sharing_id).second) fail("I7", "sharing id ", to_string(s.sharing_id), " duplicated");
          auto counter = r.apt.share_counters().find(s.c_id);
          if (counter == r.apt.share_counters().end() || s.sharing_id.counter >= counter->second) {
            fail("I7", "sharing id ", to_string(s.sharing_id), " ahead of its counter");
          }
        }
      }
    }
  }

  const Rmm& rmm_;
  std::map<GranuleIndex, std::vector<Mapper>> by_pa_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> check_invariants(const Rmm& rmm) { return Checker(rmm).run(); }

std::vector<Violation> check_invariants(const World& world) { return check_invariants(world.rmm); }

StateSnapshot snapshot(const Rmm& rmm) {
  StateSnapshot s;
  for (const auto& [id, r] : rmm.realms()) {
    s.realm_ids.insert(id.value);
    for (const auto& [g, e] : r.rtt.entries()) s.mappings[{id.value, g}] = e.pa;
    for (const auto& [g, pa] : r.rtt.unprotected()) s.mappings[{id.value, g}] = pa;
    for (const auto& e : r.apt.entries()) {
      if (const auto* pe = std::get_if<ProviderEntry>(&e); pe && pe->csm_id) s.csm_ids.insert(pe->csm_id->value);
    }
  }
  s.next_realm_id = rmm.next_realm_id();
  s.next_csm_id = rmm.next_csm_id();
  return s;
}

std::vector<Violation> check_transition(const StateSnapshot& before, const StateSnapshot& after,
                                        std::span<const Event> delta) {
  std::vector<Violation> out;
  std::set<std::pair<std::uint64_t, std::uint64_t>> flushed;
  for (const auto& ev : delta) {
    if (const auto* f = std::get_if<TlbFlushEvent>(&ev)) flushed.insert({f->realm.value, f->ipa.granule()});
  }
  for (const auto& [key, pa] : before.mappings) {
    auto it = after.mappings.find(key);
    if (it != after.mappings.end() && it->second == pa) continue;
    if (!flushed.count(key)) {
      out.push_back(Violation{"I4", "realm " + std::to_string(key.first) + " ipa " +
                                        hex_ipa(Ipa::from_granule(key.second)) + " unmapped without TLB flush"});
    }
  }
  if (after.next_realm_id < before.next_realm_id || after.next_csm_id < before.next_csm_id) {
    out.push_back(Violation{"I7", "identifier counter moved backwards"});
  }
  for (auto id : after.realm_ids) {
    if (!before.realm_ids.count(id) && id < before.next_realm_id) {
      out.push_back(Violation{"I7", "realm id " + std::to_string(id) + " reused"});
    }
  }
  for (auto id : after.csm_ids) {
    if (!before.csm_ids.count(id) && id < before.next_csm_id) {
      out.push_back(Violation{"I7", "csm id " + std::to_string(id) + " reused"});
    }
  }
  return out;
}

}  // namespace csmsim
