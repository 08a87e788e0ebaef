#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace csmsim {

inline constexpr std::size_t kGranuleSize = 4096;
inline constexpr unsigned kGranuleShift = 12;
// One RTT granule backs this many contiguous granule-sized IPAs.
inline constexpr std::uint64_t kRttEntriesPerTable = 512;

using GranuleIndex = std::uint32_t;

// Realm identifier assigned by the RMM. 0 means "no realm".
struct RealmId {
  std::uint64_t value = 0;

  constexpr bool valid() const noexcept { return value != 0; }
  friend constexpr auto operator<=>(RealmId, RealmId) = default;
};

struct CsmId {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(CsmId, CsmId) = default;
};

// Intermediate physical address (byte granular).
struct Ipa {
  std::uint64_t value = 0;

  constexpr bool granule_aligned() const noexcept { return (value & (kGranuleSize - 1)) == 0; }
  constexpr std::uint64_t granule() const noexcept { return value >> kGranuleShift; }
  constexpr std::size_t offset() const noexcept { return value & (kGranuleSize - 1); }
  static constexpr Ipa from_granule(std::uint64_t g) noexcept { return Ipa{g << kGranuleShift}; }

  friend constexpr auto operator<=>(Ipa, Ipa) = default;
};

enum class Permission : std::uint8_t { ReadOnly, ReadWrite };

enum class AccessKind : std::uint8_t { Read, Write };

// Deterministic sharing identifier: (provider, consumer, per-pair counter).
struct SharingId {
  RealmId p_id;
  RealmId c_id;
  std::uint32_t counter = 0;

  friend constexpr auto operator<=>(const SharingId&, const SharingId&) = default;
};

SharingId compose_sharing_id(RealmId p_id, RealmId c_id, std::uint32_t counter) noexcept;

std::string to_string(Permission p);
std::string to_string(const SharingId& sid);
std::string hex_ipa(Ipa ipa);

}  // namespace csmsim

template <>
struct std::hash<csmsim::RealmId> {
  std::size_t operator()(csmsim::RealmId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};
