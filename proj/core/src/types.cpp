#include "csmsim/types.hpp"

#include <cstdio>

namespace csmsim {

SharingId compose_sharing_id(RealmId p_id, RealmId c_id, std::uint32_t counter) noexcept {
  return SharingId{p_id, c_id, counter};
}

std::string to_string(Permission p) { return p == Permission::ReadOnly ? "ro" : "rw"; }

std::string to_string(const SharingId& sid) {
  return "(" + std::to_string(sid.p_id.value) + "," + std::to_string(sid.c_id.value) + "," +
         std::to_string(sid.counter) + ")";
}

std::string hex_ipa(Ipa ipa) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(ipa.value));
  return buf;
}

}  // namespace csmsim
