#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csmsim/rmm.hpp"

namespace csmsim {

enum class Reach : std::uint8_t { None, Read, ReadWrite };

std::string_view to_string(Reach r) noexcept;

// Actor x granule reachability recomputed from the raw GPT and RTTs.
// World rows are indexed by SecurityState; realm rows follow `realms`
// (Active realms in id order).
struct AccessMatrix {
  std::vector<std::vector<Reach>> world_rows;
  std::vector<RealmId> realms;
  std::vector<std::vector<Reach>> realm_rows;

  Reach world(SecurityState s, GranuleIndex g) const { return world_rows.at(static_cast<std::size_t>(s)).at(g); }
  Reach realm(RealmId id, GranuleIndex g) const;
};

AccessMatrix access_oracle(const Rmm& rmm);

struct OracleMismatch {
  std::string actor;
  GranuleIndex granule = 0;
  AccessKind kind = AccessKind::Read;
  bool oracle = false;
  bool operational = false;
};

// Compares the oracle with GranuleSpace::check_access and
// Rmm::check_realm_access for every (actor, granule, kind). Realm accesses
// are probed at every mapped IPA plus `extra_ipas`.
std::vector<OracleMismatch> oracle_equivalence(const Rmm& rmm, std::span<const Ipa> extra_ipas = {});

}  // namespace csmsim
