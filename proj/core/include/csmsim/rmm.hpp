#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "csmsim/apt.hpp"
#include "csmsim/attestation.hpp"
#include "csmsim/digest.hpp"
#include "csmsim/events.hpp"
#include "csmsim/granule_space.hpp"
#include "csmsim/result.hpp"
#include "csmsim/rtt.hpp"
#include "csmsim/types.hpp"

namespace csmsim {

// Destroying is the transient teardown phase during which the APT may be
// destroyed; it is never observable between commands.
enum class RealmLifecycle : std::uint8_t { New, Active, Destroying };

std::string_view to_string(RealmLifecycle l) noexcept;

enum class PendingRsiKind : std::uint8_t { CsmCreate, CsmReserve };

// An RSI suspended on a REC exit, revalidated on the next REC entry.
struct PendingRsi {
  PendingRsiKind kind = PendingRsiKind::CsmCreate;
  Ipa base;
  std::uint64_t size = 0;
  SharingId sharing_id;  // reserve only

  friend bool operator==(const PendingRsi&, const PendingRsi&) = default;
};

struct Rec {
  GranuleIndex granule = 0;
  std::optional<RecExit> pending_exit;
  std::optional<PendingRsi> pending_rsi;
};

struct Realm {
  GranuleIndex rd = 0;
  RealmId id;
  RealmLifecycle lifecycle = RealmLifecycle::New;
  unsigned ipa_width = 0;
  Digest rim;
  std::optional<GranuleIndex> apt_granule;
  Apt apt;
  Rtt rtt;
  std::optional<Rec> rec;

  std::uint64_t ipa_limit() const noexcept { return std::uint64_t{1} << ipa_width; }
  // Top IPA bit clear.
  bool protected_ipa(Ipa ipa) const noexcept { return ipa.value < (ipa_limit() >> 1); }
  bool unprotected_ipa(Ipa ipa) const noexcept {
    return ipa.value >= (ipa_limit() >> 1) && ipa.value < ipa_limit();
  }
  bool rsi_pending() const noexcept { return rec && rec->pending_rsi.has_value(); }
};

struct CsmCreated {
  CsmId id;
};
struct CsmReserved {};

// Result of entering a REC that had a suspended RSI: either the RSI
// completes or the same exit is raised again.
using RsiCompletion = std::variant<RecExit, CsmCreated, CsmReserved>;

// Realm Management Monitor together with the physical memory it guards.
// Every public handler runs to completion before the next command; the
// object is a value type so independent simulations can be cloned freely.
class Rmm {
 public:
  static constexpr unsigned kMinIpaWidth = 14;
  static constexpr unsigned kMaxIpaWidth = 48;

  struct Config {
    std::size_t granule_count = 64;
    std::uint64_t seed = 0;
  };

  Rmm();
  explicit Rmm(Config config);

  const GranuleSpace& granules() const noexcept { return granules_; }
  const EventLog& events() const noexcept { return events_; }
  EventLog& events() noexcept { return events_; }
  const Platform& platform() const noexcept { return platform_; }

  // Physical accesses by a world actor; faults are traced.
  Result<std::vector<std::byte>> physical_read(SecurityState actor, GranuleIndex index,
                                               std::size_t offset, std::size_t len);
  Result<void> physical_write(SecurityState actor, GranuleIndex index, std::size_t offset,
                              std::span<const std::byte> data);

  // RMI, issued by the host. Realms are addressed by their RD granule.
  Result<void> granule_delegate(GranuleIndex index);
  Result<void> granule_undelegate(GranuleIndex index);
  Result<RealmId> rmi_realm_create(GranuleIndex rd, unsigned ipa_width);
  Result<void> rmi_apt_create(GranuleIndex rd, GranuleIndex apt);
  Result<void> rmi_apt_destroy(GranuleIndex rd, GranuleIndex apt);
  Result<void> rmi_rec_create(GranuleIndex rd, GranuleIndex rec);
  Result<void> rmi_rtt_create(GranuleIndex rd, GranuleIndex rtt, Ipa block_base);
  Result<RttReadout> rmi_rtt_read_entry(GranuleIndex rd, Ipa ipa) const;
  Result<void> rmi_data_create(GranuleIndex rd, GranuleIndex data, Ipa ipa,
                               std::span<const std::byte> content);
  Result<void> rmi_data_create_unknown(GranuleIndex rd, GranuleIndex data, Ipa ipa);
  Result<GranuleIndex> rmi_data_destroy(GranuleIndex rd, Ipa ipa);
  Result<void> rmi_rtt_map_unprotected(GranuleIndex rd, Ipa ipa, GranuleIndex normal);
  Result<void> rmi_rtt_unmap_unprotected(GranuleIndex rd, Ipa ipa);
  Result<void> rmi_realm_activate(GranuleIndex rd);
  Result<void> rmi_realm_destroy(GranuleIndex rd);
  Result<RsiCompletion> rmi_rec_enter(GranuleIndex rd);

  // RSI, issued by the executing realm.
  Result<RecExit> rsi_csm_create(RealmId caller, Ipa base, std::uint64_t size);
  Result<SharingId> rsi_csm_share(RealmId caller, CsmId csm, RealmId c_id, Permission perm);
  Result<RecExit> rsi_csm_reserve(RealmId caller, const SharingId& sid, Ipa base, std::uint64_t size);
  Result<void> rsi_csm_attach(RealmId caller, const SharingId& sid);
  Result<void> rsi_csm_revoke(RealmId caller, const SharingId& sid);
  Result<void> rsi_csm_destroy(RealmId caller, CsmId csm);
  Result<void> rsi_csm_detach_and_free(RealmId caller, const SharingId& sid);
  Result<AttestationToken> rsi_attestation_token(RealmId caller) const;

  // Stage-2 translated access by a realm.
  Result<GranuleIndex> check_realm_access(RealmId realm, Ipa ipa, AccessKind kind) const;
  Result<std::vector<std::byte>> realm_read(RealmId realm, Ipa ipa, std::size_t len);
  Result<void> realm_write(RealmId realm, Ipa ipa, std::span<const std::byte> data);

  Result<std::reference_wrapper<const Realm>> registry_lookup(RealmId id) const;
  const Realm* realm_by_rd(GranuleIndex rd) const;
  const std::map<RealmId, Realm>& realms() const noexcept { return realms_; }
  const std::set<RealmId>& tombstones() const noexcept { return tombstones_; }
  std::uint64_t next_realm_id() const noexcept { return next_realm_id_; }
  std::uint64_t next_csm_id() const noexcept { return next_csm_id_; }

  // Successful Normal-world reads or writes of Realm PAS; must stay zero.
  std::uint64_t host_realm_pas_hits() const noexcept { return host_realm_pas_hits_; }

 private:
  friend struct RmmTestAccess;

  Realm* live_realm(GranuleIndex rd);
  const Realm* live_realm(GranuleIndex rd) const;
  Realm* find_realm(RealmId id);
  Result<Realm*> rsi_caller(RealmId caller);

  void invalidate(Realm& realm, Ipa ipa);
  void invalidate_window(Realm& realm, Ipa base, std::uint64_t size);
  void emit_exit(const RecExit& exit);
  void propagate_map(Realm& provider, Ipa ipa, GranuleIndex pa);
  void propagate_unmap(Realm& provider, Ipa ipa);
  void revoke_share(Realm& provider, ProviderEntry& entry, const SharingId& sid);
  void drop_consumer_entry(Realm& consumer, const SharingId& sid);
  bool range_populated(const Realm& realm, Ipa base, std::uint64_t size) const;
  bool range_vacant(const Realm& realm, Ipa base, std::uint64_t size) const;
  Result<void> validate_region(const Realm& realm, Ipa base, std::uint64_t size) const;

  GranuleSpace granules_;
  EventLog events_;
  Platform platform_;
  std::map<RealmId, Realm> realms_;
  std::map<GranuleIndex, RealmId> rd_index_;
  std::set<RealmId> tombstones_;
  std::uint64_t next_realm_id_ = 1;
  std::uint64_t next_csm_id_ = 1;
  std::uint64_t host_realm_pas_hits_ = 0;
};

}  // namespace csmsim
