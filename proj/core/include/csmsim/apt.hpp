#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "csmsim/result.hpp"
#include "csmsim/types.hpp"

namespace csmsim {

struct ShareRecord {
  SharingId sharing_id;
  RealmId c_id;
  Permission perm = Permission::ReadOnly;
  bool attached = false;

  friend bool operator==(const ShareRecord&, const ShareRecord&) = default;
};

// Entry held by the realm that created the region. csm_id is assigned
// once the host has populated the range and the create RSI completes.
struct ProviderEntry {
  std::optional<CsmId> csm_id;
  Ipa base;
  std::uint64_t size = 0;
  std::vector<ShareRecord> shares;

  bool ready() const noexcept { return csm_id.has_value(); }
  bool contains(Ipa ipa) const noexcept {
    return ipa.granule() >= base.granule() && ipa.granule() < base.granule() + size;
  }
  ShareRecord* share(const SharingId& sid);
  const ShareRecord* share(const SharingId& sid) const;
  const ShareRecord* share_for(RealmId c_id) const;

  friend bool operator==(const ProviderEntry&, const ProviderEntry&) = default;
};

// Reserving: reserve RSI issued, host has not yet cleared the window.
enum class ConsumerState : std::uint8_t { Reserving, Reserved, Attached };

struct ConsumerEntry {
  SharingId sharing_id;
  Ipa base;
  std::uint64_t size = 0;
  ConsumerState state = ConsumerState::Reserving;

  bool contains(Ipa ipa) const noexcept {
    return ipa.granule() >= base.granule() && ipa.granule() < base.granule() + size;
  }

  friend bool operator==(const ConsumerEntry&, const ConsumerEntry&) = default;
};

using AptEntry = std::variant<ProviderEntry, ConsumerEntry>;

// Access Policy Table: one entry per CSM region mapped into the realm.
class Apt {
 public:
  // Entries per APT granule.
  static constexpr std::size_t kCapacity = 128;

  const std::vector<AptEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  bool overlaps(Ipa base, std::uint64_t size) const;
  Result<void> add(AptEntry entry);

  ProviderEntry* provider(CsmId id);
  const ProviderEntry* provider(CsmId id) const;
  ProviderEntry* provider_covering(Ipa ipa);
  const ProviderEntry* provider_covering(Ipa ipa) const;
  ProviderEntry* provider_with_share(const SharingId& sid);
  const ProviderEntry* provider_with_share(const SharingId& sid) const;
  ProviderEntry* pending_provider();

  ConsumerEntry* consumer(const SharingId& sid);
  const ConsumerEntry* consumer(const SharingId& sid) const;
  const ConsumerEntry* consumer_covering(Ipa ipa) const;

  bool remove_provider(CsmId id);
  bool remove_pending_provider(Ipa base);
  bool remove_consumer(const SharingId& sid);

  // Post-increments the per-peer share counter.
  std::uint32_t next_share_counter(RealmId peer) { return share_counters_[peer]++; }
  const std::map<RealmId, std::uint32_t>& share_counters() const noexcept { return share_counters_; }

  void clear() {
    entries_.clear();
    share_counters_.clear();
  }

 private:
  std::vector<AptEntry> entries_;
  std::map<RealmId, std::uint32_t> share_counters_;
};

}  // namespace csmsim
