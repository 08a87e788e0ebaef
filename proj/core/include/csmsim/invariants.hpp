#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csmsim/events.hpp"
#include "csmsim/rmm.hpp"
#include "csmsim/world.hpp"

namespace csmsim {

// I1 disjointness, I2 CSM view consistency, I3 host exclusion,
// I4 revocation completeness and flush-on-unmap, I5 bidirectional consent,
// I6 conservation, I7 identifier uniqueness and freshness.
struct Violation {
  std::string invariant;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> check_invariants(const Rmm& rmm);
std::vector<Violation> check_invariants(const World& world);

// Valid translations keyed by (realm id, IPA granule number); unprotected
// mappings use the same key space.
struct StateSnapshot {
  std::map<std::pair<std::uint64_t, std::uint64_t>, GranuleIndex> mappings;
  std::set<std::uint64_t> realm_ids;
  std::set<std::uint64_t> csm_ids;
  std::uint64_t next_realm_id = 0;
  std::uint64_t next_csm_id = 0;
};

StateSnapshot snapshot(const Rmm& rmm);

// Checks one command's effect: every valid entry that disappeared or changed
// must be matched by a TlbFlush in `delta`, and new identifiers are fresh.
std::vector<Violation> check_transition(const StateSnapshot& before, const StateSnapshot& after,
                                        std::span<const Event> delta);

}  // namespace csmsim
