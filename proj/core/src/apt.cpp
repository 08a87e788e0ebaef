#include "csmsim/apt.hpp"

#include <algorithm>

namespace csmsim {
namespace {

template <class Entry, class Pred>
Entry* find_entry(std::vector<AptEntry>& entries, Pred pred) {
  for (auto& e : entries) {
    if (auto* p = std::get_if<Entry>(&e); p && pred(*p)) return p;
  }
  return nullptr;
}

template <class Entry, class Pred>
const Entry* find_entry(const std::vector<AptEntry>& entries, Pred pred) {
  for (const auto& e : entries) {
    if (const auto* p = std::get_if<Entry>(&e); p && pred(*p)) return p;
  }
  return nullptr;
}

template <class Entry, class Pred>
bool erase_entry(std::vector<AptEntry>& entries, Pred pred) {
  auto it = std::find_if(entries.begin(), entries.end(), [&](const AptEntry& e) {
    const auto* p = std::get_if<Entry>(&e);
    return p && pred(*p);
  });
  if (it == entries.end()) return false;
  entries.erase(it);
  return true;
}

std::pair<std::uint64_t, std::uint64_t> range_of(const AptEntry& e) {
  return std::visit([](const auto& x) { return std::pair{x.base.granule(), x.base.granule() + x.size}; }, e);
}

}  // namespace

ShareRecord* ProviderEntry::share(const SharingId& sid) {
  for (auto& s : shares) {
    if (s.sharing_id == sid) return &s;
  }
  return nullptr;
}

const ShareRecord* ProviderEntry::share(const SharingId& sid) const {
  return const_cast<ProviderEntry*>(this)->share(sid);
}

const ShareRecord* ProviderEntry::share_for(RealmId c_id) const {
  for (const auto& s : shares) {
    if (s.c_id == c_id) return &s;
  }
  return nullptr;
}

bool Apt::overlaps(Ipa base, std::uint64_t size) const {
  const auto lo = base.granule();
  const auto hi = lo + size;
  return std::any_of(entries_.begin(), entries_.end(), [&](const AptEntry& e) {
    auto [elo, ehi] = range_of(e);
    return lo < ehi && elo < hi;
  });
}

Result<void> Apt::add(AptEntry entry) {
  if (entries_.size() >= kCapacity) return Error::CapacityExceeded;
  entries_.push_back(std::move(entry));
  return {};
}

ProviderEntry* Apt::provider(CsmId id) {
  return find_entry<ProviderEntry>(entries_, [&](const ProviderEntry& p) { return p.csm_id == id; });
}
const ProviderEntry* Apt::provider(CsmId id) const {
  return find_entry<ProviderEntry>(entries_, [&](const ProviderEntry& p) { return p.csm_id == id; });
}
ProviderEntry* Apt::provider_covering(Ipa ipa) {
  return find_entry<ProviderEntry>(entries_, [&](const ProviderEntry& p) { return p.contains(ipa); });
}
const ProviderEntry* Apt::provider_covering(Ipa ipa) const {
  return find_entry<ProviderEntry>(entries_, [&](const ProviderEntry& p) { return p.contains(ipa); });
}
ProviderEntry* Apt::provider_with_share(const SharingId& sid) {
  return find_entry<ProviderEntry>(entries_, [&](const ProviderEntry& p) { return p.share(sid) != nullptr; });
}
const ProviderEntry* Apt::provider_with_share(const SharingId& sid) const {
  return find_entry<ProviderEntry>(entries_, [&](const ProviderEntry& p) { return p.share(sid) != nullptr; });
}
ProviderEntry* Apt::pending_provider() {
  return find_entry<ProviderEntry>(entries_, [](const ProviderEntry& p) { return !p.ready(); });
}

ConsumerEntry* Apt::consumer(const SharingId& sid) {
  return find_entry<ConsumerEntry>(entries_, [&](const ConsumerEntry& c) { return c.sharing_id == sid; });
}
const ConsumerEntry* Apt::consumer(const SharingId& sid) const {
  return find_entry<ConsumerEntry>(entries_, [&](const ConsumerEntry& c) { return c.sharing_id == sid; });
}
const ConsumerEntry* Apt::consumer_covering(Ipa ipa) const {
  return find_entry<ConsumerEntry>(entries_, [&](const ConsumerEntry& c) { return c.contains(ipa); });
}

bool Apt::remove_provider(CsmId id) {
  return erase_entry<ProviderEntry>(entries_, [&](const ProviderEntry& p) { return p.csm_id == id; });
}
bool Apt::remove_pending_provider(Ipa base) {
  return erase_entry<ProviderEntry>(entries_,
                                    [&](const ProviderEntry& p) { return !p.ready() && p.base == base; });
}
bool Apt::remove_consumer(const SharingId& sid) {
  return erase_entry<ConsumerEntry>(entries_, [&](const ConsumerEntry& c) { return c.sharing_id == sid; });
}

}  // namespace csmsim
