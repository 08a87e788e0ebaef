#pragma once

#include <doctest.h>

#include <string>
#include <string_view>
#include <vector>

#include "csmsim/host.hpp"
#include "csmsim/image.hpp"
#include "csmsim/invariants.hpp"
#include "csmsim/world.hpp"

namespace csmsim {

// Test-only backdoor into the RMM, used to build states the command API
// cannot reach.
struct RmmTestAccess {
  static Realm& realm(Rmm& rmm, RealmId id) { return rmm.realms_.at(id); }
  static GranuleSpace& granules(Rmm& rmm) { return rmm.granules_; }
  static void host_hit(Rmm& rmm) { ++rmm.host_realm_pas_hits_; }
};

}  // namespace csmsim

namespace csmsim::test {

inline std::vector<std::byte> bytes(std::string_view s) {
  std::vector<std::byte> out;
  for (char c : s) out.push_back(static_cast<std::byte>(c));
  return out;
}

inline std::string text(const std::vector<std::byte>& b) {
  std::string s;
  for (std::byte x : b) s.push_back(static_cast<char>(x));
  return s;
}

inline RealmImage image(std::string_view content, unsigned ipa_width = 32) {
  return RealmImage{ipa_width, {ImagePage{Ipa{0}, bytes(content)}}};
}

inline constexpr Ipa kPBase{0x100000};
inline constexpr Ipa kCBase{0x200000};

inline Ipa at(Ipa base, std::uint64_t k) { return Ipa{base.value + k * kGranuleSize}; }

// Two launched realms on a cooperative host.
struct Duo {
  World w;
  LaunchedRealm p, c;
  RmiLog log;

  explicit Duo(HostPolicy policy = HostPolicy::Cooperative, std::size_t granules = 64)
      : w(Rmm::Config{granules, 3}, policy) {
    p = *w.host.launch_realm(w.rmm, image("provider"), log);
    c = *w.host.launch_realm(w.rmm, image("consumer"), log);
  }

  Rmm& rmm() { return w.rmm; }

  LaunchedRealm launch(std::string_view content) { return *w.host.launch_realm(w.rmm, image(content), log); }

  // create + cooperative service; returns the new CsmId.
  CsmId create(const LaunchedRealm& r, Ipa base, std::uint64_t size) {
    REQUIRE(w.rmm.rsi_csm_create(r.id, base, size));
    auto done = w.host.service(w.rmm, r.rd, log);
    REQUIRE(done);
    REQUIRE(std::holds_alternative<CsmCreated>(*done));
    return std::get<CsmCreated>(*done).id;
  }

  void reserve(const LaunchedRealm& r, const SharingId& sid, Ipa base, std::uint64_t size) {
    REQUIRE(w.rmm.rsi_csm_reserve(r.id, sid, base, size));
    auto done = w.host.service(w.rmm, r.rd, log);
    REQUIRE(done);
    REQUIRE(std::holds_alternative<CsmReserved>(*done));
  }

  // create, share, reserve, attach with matching sizes.
  SharingId share_and_attach(std::uint64_t size = 2, Permission perm = Permission::ReadWrite) {
    const CsmId csm = create(p, kPBase, size);
    auto sid = w.rmm.rsi_csm_share(p.id, csm, c.id, perm);
    REQUIRE(sid);
    reserve(c, *sid, kCBase, size);
    REQUIRE(w.rmm.rsi_csm_attach(c.id, *sid));
    return *sid;
  }

  void require_clean() {
    w.host.drain_remove_exits(w.rmm);
    const auto v = check_invariants(w);
    for (const auto& x : v) INFO(x.invariant << ": " << x.detail);
    REQUIRE(v.empty());
  }
};

template <class T>
bool is_error(const T& r, Error e) {
  return !r && r.error() == e;
}

}  // namespace csmsim::test
