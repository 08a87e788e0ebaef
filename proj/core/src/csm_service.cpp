// RSI handlers for confidential shared memory regions, plus the RMM-side
// bookkeeping that keeps consumer mappings in step with the provider.

#include <algorithm>

#include "csmsim/rmm.hpp"

namespace csmsim {

Result<Realm*> Rmm::rsi_caller(RealmId caller) {
  Realm* realm = find_realm(caller);
  if (!realm || realm->lifecycle != RealmLifecycle::Active) return Error::BadState;
  if (realm->rsi_pending()) return Error::BadState;
  if (!realm->apt_granule) return Error::NoApt;
  return realm;
}

Result<void> Rmm::validate_region(const Realm& realm, Ipa base, std::uint64_t size) const {
  if (size == 0) return Error::InvalidArgument;
  if (!base.granule_aligned()) return Error::Unaligned;
  const Ipa last = Ipa::from_granule(base.granule() + size - 1);
  if (!realm.protected_ipa(base) || !realm.protected_ipa(last)) return Error::BadState;
  if (realm.apt.overlaps(base, size)) return Error::Overlap;
  return {};
}

bool Rmm::range_populated(const Realm& realm, Ipa base, std::uint64_t size) const {
  for (std::uint64_t k = 0; k < size; ++k) {
    if (!realm.rtt.find(Ipa::from_granule(base.granule() + k))) return false;
  }
  return true;
}

bool Rmm::range_vacant(const Realm& realm, Ipa base, std::uint64_t size) const {
  for (std::uint64_t k = 0; k < size; ++k) {
    const Ipa ipa = Ipa::from_granule(base.granule() + k);
    if (!realm.rtt.backed(ipa) || realm.rtt.find(ipa)) return false;
  }
  return true;
}

void Rmm::propagate_map(Realm& provider, Ipa ipa, GranuleIndex pa) {
  const ProviderEntry* entry = provider.apt.provider_covering(ipa);
  if (!entry || !entry->ready()) return;
  const std::uint64_t offset = ipa.granule() - entry->base.granule();
  for (const auto& share : entry->shares) {
    if (!share.attached) continue;
    Realm* consumer = find_realm(share.c_id);
    if (!consumer) continue;
    const ConsumerEntry* c = consumer->apt.consumer(share.sharing_id);
    if (!c || c->state != ConsumerState::Attached || offset >= c->size) continue;
    consumer->rtt.install(Ipa::from_granule(c->base.granule() + offset), RttEntry{pa, share.perm});
  }
}

void Rmm::propagate_unmap(Realm& provider, Ipa ipa) {
  const ProviderEntry* entry = provider.apt.provider_covering(ipa);
  if (!entry || !entry->ready()) return;
  const std::uint64_t offset = ipa.granule() - entry->base.granule();
  for (const auto& share : entry->shares) {
    if (!share.attached) continue;
    Realm* consumer = find_realm(share.c_id);
    if (!consumer) continue;
    const ConsumerEntry* c = consumer->apt.consumer(share.sharing_id);
    if (!c || c->state != ConsumerState::Attached || offset >= c->size) continue;
    invalidate(*consumer, Ipa::from_granule(c->base.granule() + offset));
  }
}

void Rmm::drop_consumer_entry(Realm& consumer, const SharingId& sid) {
  const ConsumerEntry* c = consumer.apt.consumer(sid);
  if (!c) return;
  const ConsumerEntry copy = *c;
  if (copy.state == ConsumerState::Attached) invalidate_window(consumer, copy.base, copy.size);
  consumer.apt.remove_consumer(sid);
  emit_exit(RecExit{ExitReason::RemoveCsm, consumer.id, copy.base, copy.size});
}

void Rmm::revoke_share(Realm& provider, ProviderEntry& entry, const SharingId& sid) {
  (void)provider;
  if (Realm* consumer = find_realm(sid.c_id)) drop_consumer_entry(*consumer, sid);
  entry.shares.erase(std::remove_if(entry.shares.begin(), entry.shares.end(),
                                    [&](const ShareRecord& s) { return s.sharing_id == sid; }),
                     entry.shares.end());
}

Result<RecExit> Rmm::rsi_csm_create(RealmId caller, Ipa base, std::uint64_t size) {
  auto r = rsi_caller(caller);
  if (!r) return r.error();
  Realm& realm = **r;
  if (auto v = validate_region(realm, base, size); !v) return v.error();
  if (auto a = realm.apt.add(ProviderEntry{std::nullopt, base, size, {}}); !a) return a.error();

  const RecExit exit{ExitReason::PRealmCsm, caller, base, size};
  realm.rec->pending_exit = exit;
  realm.rec->pending_rsi = PendingRsi{PendingRsiKind::CsmCreate, base, size, {}};
  emit_exit(exit);
  return exit;
}

Result<SharingId> Rmm::rsi_csm_share(RealmId caller, CsmId csm, RealmId c_id, Permission perm) {
  auto r = rsi_caller(caller);
  if (!r) return r.error();
  Realm& realm = **r;
  ProviderEntry* entry = realm.apt.provider(csm);
  if (!entry) {
    const bool elsewhere = std::any_of(realms_.begin(), realms_.end(),
                                       [&](const auto& kv) { return kv.second.apt.provider(csm) != nullptr; });
    return elsewhere ? Error::NotOwner : Error::NoSuchCsm;
  }
  if (c_id == caller) return Error::SelfShare;
  if (!registry_lookup(c_id)) return Error::NoSuchRealm;
  if (entry->share_for(c_id)) return Error::AlreadyShared;

  const SharingId sid = compose_sharing_id(caller, c_id, realm.apt.next_share_counter(c_id));
  entry->shares.push_back(ShareRecord{sid, c_id, perm, false});
  return sid;
}

Result<RecExit> Rmm::rsi_csm_reserve(RealmId caller, const SharingId& sid, Ipa base, std::uint64_t size) {
  auto r = rsi_caller(caller);
  if (!r) return r.error();
  Realm& realm = **r;
  if (sid.c_id != caller) return Error::WrongConsumer;
  if (auto v = validate_region(realm, base, size); !v) return v.error();
  if (realm.apt.consumer(sid)) return Error::AlreadyExists;
  if (auto a = realm.apt.add(ConsumerEntry{sid, base, size, ConsumerState::Reserving}); !a) return a.error();

  const RecExit exit{ExitReason::CRealmCsm, caller, base, size};
  realm.rec->pending_exit = exit;
  realm.rec->pending_rsi = PendingRsi{PendingRsiKind::CsmReserve, base, size, sid};
  emit_exit(exit);
  return exit;
}

Result<void> Rmm::rsi_csm_attach(RealmId caller, const SharingId& sid) {
  auto r = rsi_caller(caller);
  if (!r) return r.error();
  Realm& consumer = **r;
  if (sid.c_id != caller) return Error::WrongConsumer;

  // Consent 1: the provider recorded this sharing.
  Realm* provider = find_realm(sid.p_id);
  ProviderEntry* p = provider ? provider->apt.provider_with_share(sid) : nullptr;
  if (!p) return Error::NotShared;
  ShareRecord* share = p->share(sid);
  if (share->c_id != caller) return Error::NotShared;
  // Consent 2: the consumer reserved a window for it.
  ConsumerEntry* c = consumer.apt.consumer(sid);
  if (!c) return Error::NotReserved;
  if (c->state == ConsumerState::Attached) return Error::AlreadyAttached;
  if (c->state != ConsumerState::Reserved) return Error::NotReserved;
#ifndef CSMSIM_MUTANT_SKIP_ATTACH_SIZE_CHECK
  if (c->size != p->size) return Error::SizeMismatch;
#endif
  if (!p->ready() || !range_populated(*provider, p->base, c->size)) return Error::Unpopulated;
  for (std::uint64_t k = 0; k < c->size; ++k) {
    const Ipa ipa = Ipa::from_granule(c->base.granule() + k);
    if (!consumer.rtt.backed(ipa)) return Error::TableMiss;
    if (consumer.rtt.find(ipa)) return Error::AlreadyMapped;
  }

  for (std::uint64_t k = 0; k < c->size; ++k) {
    const RttEntry* src = provider->rtt.find(Ipa::from_granule(p->base.granule() + k));
    consumer.rtt.install(Ipa::from_granule(c->base.granule() + k), RttEntry{src->pa, share->perm});
  }
  c->state = ConsumerState::Attached;
  share->attached = true;
  return {};
}

Result<void> Rmm::rsi_csm_revoke(RealmId caller, const SharingId& sid) {
  auto r = rsi_caller(caller);
  if (!r) return r.error();
  Realm& provider = **r;
  if (sid.p_id != caller) return Error::NotOwner;
  ProviderEntry* entry = provider.apt.provider_with_share(sid);
  if (!entry) return Error::NoSuchSharing;
  revoke_share(provider, *entry, sid);
  return {};
}

Result<void> Rmm::rsi_csm_destroy(RealmId caller, CsmId csm) {
  auto r = rsi_caller(caller);
  if (!r) return r.error();
  Realm& provider = **r;
  ProviderEntry* entry = provider.apt.provider(csm);
  if (!entry) {
    const bool elsewhere = std::any_of(realms_.begin(), realms_.end(),
                                       [&](const auto& kv) { return kv.second.apt.provider(csm) != nullptr; });
    return elsewhere ? Error::NotOwner : Error::NoSuchCsm;
  }
  const auto shares = entry->shares;
  for (const auto& s : shares) revoke_share(provider, *entry, s.sharing_id);
  const RecExit exit{ExitReason::RemoveCsm, caller, entry->base, entry->size};
  provider.apt.remove_provider(csm);
  emit_exit(exit);
  return {};
}

Result<void> Rmm::rsi_csm_detach_and_free(RealmId caller, const SharingId& sid) {
  auto r = rsi_caller(caller);
  if (!r) return r.error();
  Realm& consumer = **r;
  if (sid.c_id != caller) return Error::WrongConsumer;
  if (!consumer.apt.consumer(sid)) return Error::NoSuchSharing;
  if (Realm* provider = find_realm(sid.p_id)) {
    if (ProviderEntry* p = provider->apt.provider_with_share(sid)) p->share(sid)->attached = false;
  }
  drop_consumer_entry(consumer, sid);
  return {};
}

Result<RsiCompletion> Rmm::rmi_rec_enter(GranuleIndex rd) {
  Realm* realm = live_realm(rd);
  if (!realm || realm->lifecycle != RealmLifecycle::Active) return Error::BadState;
  if (!realm->rsi_pending()) return Error::NoPendingRsi;
  Rec& rec = *realm->rec;
  const PendingRsi pending = *rec.pending_rsi;

  auto finish = [&rec] {
    rec.pending_rsi.reset();
    rec.pending_exit.reset();
  };

  if (pending.kind == PendingRsiKind::CsmCreate) {
    ProviderEntry* entry = realm->apt.pending_provider();
    if (!entry) {
      finish();
      return Error::NoSuchCsm;
    }
    if (!range_populated(*realm, pending.base, pending.size)) {
      emit_exit(*rec.pending_exit);
      return RsiCompletion{*rec.pending_exit};
    }
    entry->csm_id = CsmId{next_csm_id_++};
    finish();
    return RsiCompletion{CsmCreated{*entry->csm_id}};
  }

  ConsumerEntry* c = realm->apt.consumer(pending.sharing_id);
  if (!c) {
    finish();
    return Error::NoSuchSharing;
  }
  if (!range_vacant(*realm, pending.base, pending.size)) {
    emit_exit(*rec.pending_exit);
    return RsiCompletion{*rec.pending_exit};
  }
  c->state = ConsumerState::Reserved;
  finish();
  return RsiCompletion{CsmReserved{}};
}

}  // namespace csmsim
