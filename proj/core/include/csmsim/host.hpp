#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "csmsim/image.hpp"
#include "csmsim/rmm.hpp"

namespace csmsim {

enum class HostPolicy : std::uint8_t {
  Cooperative,
  Starve,         // ignores CSM exits
  WrongGranule,   // populates or reclaims a range shifted by one granule
  Prober,         // tries to touch realm memory directly
  ToctouSwapper,  // destroys and recreates a realm at the same RD granule
  DoubleMapper,   // maps one granule into two realms
};

std::string_view to_string(HostPolicy p) noexcept;
std::optional<HostPolicy> host_policy_from_string(std::string_view name) noexcept;

// One RMI issued by the host, with its outcome ("ok" or an error name).
struct RmiCall {
  std::string name;
  std::vector<std::uint64_t> args;
  std::string outcome;
};

using RmiLog = std::vector<RmiCall>;

std::size_t count_calls(const RmiLog& log, std::string_view name);

struct LaunchedRealm {
  RealmId id;
  GranuleIndex rd = 0;
};

// Result of one adversarial probe. The outcome is the observation; it is
// never an error of the host itself.
struct AdversarialOutcome {
  HostPolicy policy = HostPolicy::Cooperative;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;  // accesses or mappings the RMM let through
  std::optional<Error> error;
  std::optional<RealmId> old_realm;
  std::optional<RealmId> new_realm;
  RmiLog calls;
};

// Hypervisor model. Its memory pool is the set of Undelegated granules it
// has not pinned for its own use.
class Host {
 public:
  explicit Host(HostPolicy policy = HostPolicy::Cooperative) : policy_(policy) {}

  HostPolicy policy() const noexcept { return policy_; }

  // Delegates the lowest free Undelegated granule.
  Result<GranuleIndex> allocate(Rmm& rmm, RmiLog& log);
  void pin(GranuleIndex g) { pinned_.insert(g); }
  void unpin(GranuleIndex g) { pinned_.erase(g); }

  // Full initialization flow: RD, APT, REC, tables, measured image, activate.
  Result<LaunchedRealm> launch_realm(Rmm& rmm, const RealmImage& image, RmiLog& log);
  Result<void> ensure_table(Rmm& rmm, GranuleIndex rd, Ipa ipa, RmiLog& log);
  // Delegates and maps fresh private granules over [base, base+size).
  Result<void> map_private(Rmm& rmm, GranuleIndex rd, Ipa base, std::uint64_t size, RmiLog& log);

  Result<RmiLog> handle_exit_p_csm(Rmm& rmm, const RecExit& exit);
  Result<RmiLog> handle_exit_c_csm(Rmm& rmm, const RecExit& exit);
  void handle_remove_csm(const RecExit& exit);

  // Handles the realm's pending exit under the current policy, then enters
  // the REC again.
  Result<RsiCompletion> service(Rmm& rmm, GranuleIndex rd, RmiLog& log);
  // Processes RemoveCsm exits appended to the event log since the last call.
  void drain_remove_exits(const Rmm& rmm);

  // Executes the policy's probe. `target`/`other` name realms by RD granule
  // where the policy needs them.
  AdversarialOutcome adversarial_step(Rmm& rmm, std::optional<GranuleIndex> target = std::nullopt,
                                      std::optional<GranuleIndex> other = std::nullopt, Ipa ipa = {},
                                      const RealmImage* image = nullptr);

  // Ranges the host currently treats as CSM-managed, by (realm, base, size).
  const std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>>& csm_ranges() const noexcept {
    return csm_ranges_;
  }

 private:
  Result<RmiLog> populate(Rmm& rmm, GranuleIndex rd, Ipa base, std::uint64_t size);
  Result<RmiLog> reclaim(Rmm& rmm, GranuleIndex rd, Ipa base, std::uint64_t size);

  HostPolicy policy_;
  std::set<GranuleIndex> pinned_;
  std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> csm_ranges_;
  std::size_t event_cursor_ = 0;
};

}  // namespace csmsim
