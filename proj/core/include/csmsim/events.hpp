#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "csmsim/granule_space.hpp"
#include "csmsim/types.hpp"

namespace csmsim {

enum class ExitReason : std::uint8_t { PRealmCsm, CRealmCsm, RemoveCsm };

std::string_view to_string(ExitReason r) noexcept;

// Exit from a realm's REC to the host, carrying a CSM notification.
struct RecExit {
  ExitReason reason = ExitReason::PRealmCsm;
  RealmId realm;
  Ipa ipa_base;
  std::uint64_t size = 0;  // granules

  friend bool operator==(const RecExit&, const RecExit&) = default;
};

struct TlbFlushEvent {
  RealmId realm;
  Ipa ipa;
};

struct FaultEvent {
  SecurityState actor = SecurityState::Normal;
  RealmId realm;  // set for realm accesses through stage 2
  Ipa ipa;
  GranuleIndex granule = 0;
  std::string reason;
};

struct ExitEvent {
  RecExit exit;
};

struct ProvisionEvent {
  RealmId holder;
  std::string label;
  RealmId peer;
};

using Event = std::variant<TlbFlushEvent, FaultEvent, ExitEvent, ProvisionEvent>;

// Append-only event trace of one simulation.
class EventLog {
 public:
  void push(Event e) { events_.push_back(std::move(e)); }
  std::size_t size() const noexcept { return events_.size(); }
  const std::vector<Event>& all() const noexcept { return events_; }
  std::vector<Event> since(std::size_t mark) const {
    return {events_.begin() + static_cast<std::ptrdiff_t>(mark), events_.end()};
  }
  void clear() noexcept { events_.clear(); }

 private:
  std::vector<Event> events_;
};

}  // namespace csmsim
