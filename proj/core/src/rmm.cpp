#include "csmsim/rmm.hpp"

#include <algorithm>

namespace csmsim {

std::string_view to_string(RealmLifecycle l) noexcept {
  switch (l) {
    case RealmLifecycle::New: return "New";
    case RealmLifecycle::Active: return "Active";
    case RealmLifecycle::Destroying: return "Destroying";
  }
  return "?";
}

Rmm::Rmm() : Rmm(Config{}) {}

Rmm::Rmm(Config config) : granules_(config.granule_count), platform_(Platform::boot(config.seed)) {}

Realm* Rmm::live_realm(GranuleIndex rd) {
  auto it = rd_index_.find(rd);
  return it == rd_index_.end() ? nullptr : &realms_.at(it->second);
}

const Realm* Rmm::live_realm(GranuleIndex rd) const {
  auto it = rd_index_.find(rd);
  return it == rd_index_.end() ? nullptr : &realms_.at(it->second);
}

const Realm* Rmm::realm_by_rd(GranuleIndex rd) const { return live_realm(rd); }

Realm* Rmm::find_realm(RealmId id) {
  auto it = realms_.find(id);
  return it == realms_.end() ? nullptr : &it->second;
}

Result<std::reference_wrapper<const Realm>> Rmm::registry_lookup(RealmId id) const {
  auto it = realms_.find(id);
  if (it == realms_.end() || it->second.lifecycle == RealmLifecycle::Destroying) return Error::NoSuchRealm;
  return std::cref(it->second);
}

void Rmm::emit_exit(const RecExit& exit) { events_.push(ExitEvent{exit}); }

void Rmm::invalidate(Realm& realm, Ipa ipa) {
  if (realm.rtt.remove(ipa)) events_.push(TlbFlushEvent{realm.id, ipa});
}

void Rmm::invalidate_window(Realm& realm, Ipa base, std::uint64_t size) {
  for (std::uint64_t k = 0; k < size; ++k) invalidate(realm, Ipa::from_granule(base.granule() + k));
}

// ---------------------------------------------------------------------------
// Physical accesses

Result<std::vector<std::byte>> Rmm::physical_read(SecurityState actor, GranuleIndex index,
                                                  std::size_t offset, std::size_t len) {
  auto r = granules_.read(actor, index, offset, len);
  if (!r && r.error() == Error::Fault) {
    events_.push(FaultEvent{actor, {}, {}, index, "gpc"});
  } else if (r && actor == SecurityState::Normal && granules_.gpt()[index] == PasTag::Realm) {
    ++host_realm_pas_hits_;
  }
  return r;
}

Result<void> Rmm::physical_write(SecurityState actor, GranuleIndex index, std::size_t offset,
                                 std::span<const std::byte> data) {
  const bool realm_pas = index < granules_.size() && granules_.gpt()[index] == PasTag::Realm;
  auto r = granules_.write(actor, index, offset, data);
  if (!r && r.error() == Error::Fault) {
    events_.push(FaultEvent{actor, {}, {}, index, "gpc"});
  } else if (r && actor == SecurityState::Normal && realm_pas) {
    ++host_realm_pas_hits_;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Granule delegation

Result<void> Rmm::granule_delegate(GranuleIndex index) { return granules_.delegate(index); }

Result<void> Rmm::granule_undelegate(GranuleIndex index) { return granules_.undelegate(index); }

// ---------------------------------------------------------------------------
// Realm lifecycle

Result<RealmId> Rmm::rmi_realm_create(GranuleIndex rd, unsigned ipa_width) {
  if (rd >= granules_.size()) return Error::OutOfRange;
  if (ipa_width < kMinIpaWidth || ipa_width > kMaxIpaWidth) return Error::InvalidArgument;
  if (auto t = granules_.transition(rd, GranuleState::Delegated, GranuleState::RD); !t) return t.error();

  Realm realm;
  realm.rd = rd;
  realm.id = RealmId{next_realm_id_++};
  realm.ipa_width = ipa_width;
  realm.rim = rim_initial(ipa_width);
  const RealmId id = realm.id;
  rd_index_[rd] = id;
  realms_.emplace(id, std::move(realm));
  return id;
}

Result<void> Rmm::rmi_apt_create(GranuleIndex rd, GranuleIndex apt) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle != RealmLifecycle::New) return Error::BadState;
  if (realm->apt_granule) return Error::AlreadyExists;
  if (auto t = granules_.transition(apt, GranuleState::Delegated, GranuleState::APT); !t) return t;
  realm->apt_granule = apt;
  realm->apt.clear();
  return {};
}

Result<void> Rmm::rmi_apt_destroy(GranuleIndex rd, GranuleIndex apt) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle != RealmLifecycle::Destroying) return Error::BadState;
  if (realm->apt_granule != apt) return Error::BadState;
  if (!realm->apt.empty()) return Error::NotEmpty;
  if (auto t = granules_.transition(apt, GranuleState::APT, GranuleState::Delegated); !t) return t;
  realm->apt_granule.reset();
  realm->apt.clear();
  return {};
}

Result<void> Rmm::rmi_rec_create(GranuleIndex rd, GranuleIndex rec) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle != RealmLifecycle::New) return Error::BadState;
  if (realm->rec) return Error::AlreadyExists;
  if (auto t = granules_.transition(rec, GranuleState::Delegated, GranuleState::REC); !t) return t;
  realm->rec = Rec{rec, std::nullopt, std::nullopt};
  return {};
}

Result<void> Rmm::rmi_rtt_create(GranuleIndex rd, GranuleIndex rtt, Ipa block_base) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle == RealmLifecycle::Destroying) return Error::BadState;
  if (block_base.granule() % kRttEntriesPerTable != 0 || !block_base.granule_aligned()) return Error::Unaligned;
  if (block_base.value >= realm->ipa_limit()) return Error::OutOfRange;
  if (realm->rtt.backed(block_base)) return Error::AlreadyExists;
  if (auto t = granules_.transition(rtt, GranuleState::Delegated, GranuleState::RTT); !t) return t;
  realm->rtt.back_block(Rtt::block_of(block_base), rtt);
  return {};
}

Result<RttReadout> Rmm::rmi_rtt_read_entry(GranuleIndex rd, Ipa ipa) const {
  const Realm* realm = live_realm(rd);
  if (!realm) return Error::BadState;
  return realm->rtt.read(ipa);
}

namespace {

// Granule eligibility for a new protected mapping.
Result<void> mappable_granule(const GranuleSpace& granules, GranuleIndex g) {
  if (g >= granules.size()) return Error::OutOfRange;
  switch (granules.at(g).state) {
    case GranuleState::Delegated: return {};
    case GranuleState::Undelegated: return Error::NotDelegated;
    case GranuleState::Data: return Error::AlreadyMapped;
    default: return Error::BadState;
  }
}

}  // namespace

Result<void> Rmm::rmi_data_create(GranuleIndex rd, GranuleIndex data, Ipa ipa,
                                  std::span<const std::byte> content) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle != RealmLifecycle::New) return Error::BadState;
  if (!ipa.granule_aligned()) return Error::Unaligned;
  if (!realm->protected_ipa(ipa)) return Error::BadState;
  if (content.size() > kGranuleSize) return Error::InvalidArgument;
  if (!realm->rtt.backed(ipa)) return Error::TableMiss;
  if (realm->rtt.find(ipa)) return Error::AlreadyMapped;
  if (auto m = mappable_granule(granules_, data); !m) return m;

  (void)granules_.transition(data, GranuleState::Delegated, GranuleState::Data);
  granules_.content(data).assign(content);
  realm->rtt.install(ipa, RttEntry{data, Permission::ReadWrite});
  realm->rim = rim_extend_data(realm->rim, ipa, granules_.at(data).content.bytes());
  return {};
}

Result<void> Rmm::rmi_data_create_unknown(GranuleIndex rd, GranuleIndex data, Ipa ipa) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle != RealmLifecycle::Active) return Error::BadState;
  if (!ipa.granule_aligned()) return Error::Unaligned;
  if (!realm->protected_ipa(ipa)) return Error::BadState;
  // A consumer window is only ever filled by attach.
  if (realm->apt.consumer_covering(ipa)) return Error::BadState;
  if (!realm->rtt.backed(ipa)) return Error::TableMiss;
  if (realm->rtt.find(ipa)) return Error::AlreadyMapped;
  if (auto m = mappable_granule(granules_, data); !m) return m;

  (void)granules_.transition(data, GranuleState::Delegated, GranuleState::Data);
  realm->rtt.install(ipa, RttEntry{data, Permission::ReadWrite});
  propagate_map(*realm, ipa, data);
  return {};
}

Result<GranuleIndex> Rmm::rmi_data_destroy(GranuleIndex rd, Ipa ipa) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle == RealmLifecycle::Destroying) return Error::BadState;
  if (!ipa.granule_aligned()) return Error::Unaligned;
  const RttEntry* entry = realm->rtt.find(ipa);
  if (!entry) return Error::NotMapped;
  // Shared granules are torn down through the provider only.
  if (const auto* c = realm->apt.consumer_covering(ipa); c && c->state == ConsumerState::Attached) {
    return Error::BadState;
  }
  const GranuleIndex pa = entry->pa;
  invalidate(*realm, ipa);
  propagate_unmap(*realm, ipa);
  (void)granules_.transition(pa, GranuleState::Data, GranuleState::Delegated);
  return pa;
}

Result<void> Rmm::rmi_rtt_map_unprotected(GranuleIndex rd, Ipa ipa, GranuleIndex normal) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle == RealmLifecycle::Destroying) return Error::BadState;
  if (!ipa.granule_aligned()) return Error::Unaligned;
  if (!realm->unprotected_ipa(ipa)) return Error::BadState;
  if (normal >= granules_.size()) return Error::OutOfRange;
  if (granules_.at(normal).state != GranuleState::Undelegated) return Error::BadState;
  if (realm->rtt.unprotected().count(ipa.granule())) return Error::AlreadyMapped;
  realm->rtt.map_unprotected(ipa, normal);
  return {};
}

Result<void> Rmm::rmi_rtt_unmap_unprotected(GranuleIndex rd, Ipa ipa) {
  Realm* realm = live_realm(rd);
  if (!realm) return Error::BadState;
  if (!realm->rtt.unmap_unprotected(ipa)) return Error::NotMapped;
  events_.push(TlbFlushEvent{realm->id, ipa});
  return {};
}

Result<void> Rmm::rmi_realm_activate(GranuleIndex rd) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle != RealmLifecycle::New) return Error::BadState;
  if (!realm->apt_granule) return Error::MissingApt;
  if (!realm->rec) return Error::BadState;
  realm->lifecycle = RealmLifecycle::Active;
  return {};
}

Result<void> Rmm::rmi_realm_destroy(GranuleIndex rd) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle == RealmLifecycle::Destroying) return Error::BadState;
  const RealmId id = realm->id;
  realm->lifecycle = RealmLifecycle::Destroying;
  tombstones_.insert(id);

  // Regions this realm provides: revoke every peer, then drop the entry.
  std::vector<ProviderEntry> provided;
  std::vector<ConsumerEntry> consumed;
  for (const auto& e : realm->apt.entries()) {
    if (const auto* p = std::get_if<ProviderEntry>(&e)) provided.push_back(*p);
    if (const auto* c = std::get_if<ConsumerEntry>(&e)) consumed.push_back(*c);
  }
  for (const auto& p : provided) {
    if (!p.ready()) {
      realm->apt.remove_pending_provider(p.base);
      continue;
    }
    if (ProviderEntry* live = realm->apt.provider(*p.csm_id)) {
      for (const auto& s : p.shares) revoke_share(*realm, *live, s.sharing_id);
    }
    realm->apt.remove_provider(*p.csm_id);
    emit_exit(RecExit{ExitReason::RemoveCsm, id, p.base, p.size});
  }
  // Regions this realm consumes: detach.
  for (const auto& c : consumed) {
    if (c.state == ConsumerState::Attached) invalidate_window(*realm, c.base, c.size);
    if (Realm* provider = find_realm(c.sharing_id.p_id)) {
      if (ProviderEntry* pe = provider->apt.provider_with_share(c.sharing_id)) {
        pe->share(c.sharing_id)->attached = false;
      }
    }
    realm->apt.remove_consumer(c.sharing_id);
    emit_exit(RecExit{ExitReason::RemoveCsm, id, c.base, c.size});
  }

  // Private memory and unprotected mappings.
  std::vector<std::uint64_t> mapped;
  for (const auto& [g, e] : realm->rtt.entries()) mapped.push_back(g);
  for (auto g : mapped) {
    const GranuleIndex pa = realm->rtt.find(Ipa::from_granule(g))->pa;
    invalidate(*realm, Ipa::from_granule(g));
    (void)granules_.transition(pa, GranuleState::Data, GranuleState::Delegated);
  }
  std::vector<std::uint64_t> shared;
  for (const auto& [g, pa] : realm->rtt.unprotected()) shared.push_back(g);
  for (auto g : shared) {
    realm->rtt.unmap_unprotected(Ipa::from_granule(g));
    events_.push(TlbFlushEvent{id, Ipa::from_granule(g)});
  }

  for (GranuleIndex t : realm->rtt.table_granules()) {
    (void)granules_.transition(t, GranuleState::RTT, GranuleState::Delegated);
  }
  realm->rtt.clear();
  if (realm->rec) {
    (void)granules_.transition(realm->rec->granule, GranuleState::REC, GranuleState::Delegated);
    realm->rec.reset();
  }
  if (realm->apt_granule) {
    if (auto r = rmi_apt_destroy(rd, *realm->apt_granule); !r) return r;
  }
  (void)granules_.transition(rd, GranuleState::RD, GranuleState::Delegated);
  rd_index_.erase(rd);
  realms_.erase(id);
  return {};
}

// ---------------------------------------------------------------------------
// Stage-2 access

Result<GranuleIndex> Rmm::check_realm_access(RealmId id, Ipa ipa, AccessKind kind) const {
  auto it = realms_.find(id);
  if (it == realms_.end() || it->second.lifecycle != RealmLifecycle::Active) return Error::BadState;
  const Realm& realm = it->second;
  const Ipa page = Ipa::from_granule(ipa.granule());
  if (realm.protected_ipa(page)) {
    const RttEntry* e = realm.rtt.find(page);
    if (!e) return Error::Fault;
    if (kind == AccessKind::Write && e->perm == Permission::ReadOnly) return Error::Fault;
    if (!granules_.check_access(SecurityState::Realm, e->pa)) return Error::Fault;
    return e->pa;
  }
  auto u = realm.rtt.unprotected().find(page.granule());
  if (u == realm.rtt.unprotected().end()) return Error::Fault;
  if (!granules_.check_access(SecurityState::Realm, u->second)) return Error::Fault;
  return u->second;
}

Result<std::vector<std::byte>> Rmm::realm_read(RealmId id, Ipa ipa, std::size_t len) {
  auto g = check_realm_access(id, ipa, AccessKind::Read);
  if (!g) {
    if (g.error() == Error::Fault) events_.push(FaultEvent{SecurityState::Realm, id, ipa, 0, "stage2-read"});
    return g.error();
  }
  return granules_.read(SecurityState::Realm, *g, ipa.offset(), len);
}

Result<void> Rmm::realm_write(RealmId id, Ipa ipa, std::span<const std::byte> data) {
  auto g = check_realm_access(id, ipa, AccessKind::Write);
  if (!g) {
    if (g.error() == Error::Fault) events_.push(FaultEvent{SecurityState::Realm, id, ipa, 0, "stage2-write"});
    return g.error();
  }
  return granules_.write(SecurityState::Realm, *g, ipa.offset(), data);
}

// ---------------------------------------------------------------------------
// Attestation

Result<AttestationToken> Rmm::rsi_attestation_token(RealmId caller) const {
  auto it = realms_.find(caller);
  if (it == realms_.end() || it->second.lifecycle != RealmLifecycle::Active) return Error::BadState;
  return issue_token(platform_, ClaimSet{it->second.rim, caller, platform_.digest});
}

}  // namespace csmsim
