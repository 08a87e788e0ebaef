#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "csmsim/types.hpp"

namespace csmsim {

struct RttEntry {
  GranuleIndex pa = 0;
  Permission perm = Permission::ReadWrite;

  friend bool operator==(const RttEntry&, const RttEntry&) = default;
};

enum class RttEntryState : std::uint8_t { Unassigned, Assigned };

struct RttReadout {
  RttEntryState state = RttEntryState::Unassigned;
  std::optional<GranuleIndex> pa;
  std::optional<Permission> perm;
};

// Stage-2 translation for one realm: a flat IPA map plus the set of
// 512-entry blocks that have a delegated table granule behind them.
// Absent entries are invalid.
class Rtt {
 public:
  static std::uint64_t block_of(Ipa ipa) noexcept { return ipa.granule() / kRttEntriesPerTable; }

  bool backed(Ipa ipa) const { return backed_blocks_.count(block_of(ipa)) != 0; }
  bool back_block(std::uint64_t block, GranuleIndex table_granule);
  std::size_t table_budget() const noexcept { return table_granules_.size(); }
  const std::vector<GranuleIndex>& table_granules() const noexcept { return table_granules_; }
  const std::set<std::uint64_t>& backed_blocks() const noexcept { return backed_blocks_; }

  const RttEntry* find(Ipa ipa) const;
  void install(Ipa ipa, RttEntry e) { entries_[ipa.granule()] = e; }
  bool remove(Ipa ipa) { return entries_.erase(ipa.granule()) != 0; }
  RttReadout read(Ipa ipa) const;

  // Keyed by IPA granule number.
  const std::map<std::uint64_t, RttEntry>& entries() const noexcept { return entries_; }
  const std::map<std::uint64_t, GranuleIndex>& unprotected() const noexcept { return unprotected_; }
  void map_unprotected(Ipa ipa, GranuleIndex g) { unprotected_[ipa.granule()] = g; }
  bool unmap_unprotected(Ipa ipa) { return unprotected_.erase(ipa.granule()) != 0; }

  void clear() {
    entries_.clear();
    unprotected_.clear();
    backed_blocks_.clear();
    table_granules_.clear();
  }

 private:
  std::map<std::uint64_t, RttEntry> entries_;
  std::map<std::uint64_t, GranuleIndex> unprotected_;
  std::set<std::uint64_t> backed_blocks_;
  std::vector<GranuleIndex> table_granules_;
};

}  // namespace csmsim
