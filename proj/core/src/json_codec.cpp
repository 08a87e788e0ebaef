#include "csmsim/json_codec.hpp"

namespace csmsim {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

template <class Byte>
std::string hex_of(std::span<const Byte> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (Byte b : bytes) {
    const auto v = static_cast<unsigned>(b);
    out.push_back(kHexDigits[v >> 4]);
    out.push_back(kHexDigits[v & 0xF]);
  }
  return out;
}

}  // namespace

std::string to_hex(std::span<const std::byte> bytes) { return hex_of(bytes); }
std::string to_hex(std::span<const std::uint8_t> bytes) { return hex_of(bytes); }

Result<std::vector<std::byte>> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return Error::InvalidArgument;
  std::vector<std::byte> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return Error::InvalidArgument;
    out.push_back(static_cast<std::byte>((hi << 4) | lo));
  }
  return out;
}

Json to_json(const SharingId& sid) {
  return Json{{"p", sid.p_id.value}, {"c", sid.c_id.value}, {"n", sid.counter}};
}

Json to_json(const RecExit& exit) {
  return Json{{"reason", std::string(to_string(exit.reason))},
              {"realm", exit.realm.value},
              {"ipa_base", hex_ipa(exit.ipa_base)},
              {"size", exit.size}};
}

Json to_json(const Event& event) {
  return std::visit(
      [](const auto& e) -> Json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, TlbFlushEvent>) {
          return Json{{"type", "TlbFlush"}, {"realm", e.realm.value}, {"ipa", hex_ipa(e.ipa)}};
        } else if constexpr (std::is_same_v<T, FaultEvent>) {
          Json j{{"type", "Fault"}, {"actor", std::string(to_string(e.actor))}};
          if (e.realm.valid()) {
            j["realm"] = e.realm.value;
            j["ipa"] = hex_ipa(e.ipa);
          } else {
            j["granule"] = e.granule;
          }
          j["reason"] = e.reason;
          return j;
        } else if constexpr (std::is_same_v<T, ExitEvent>) {
          Json j{{"type", "Exit"}};
          j.update(to_json(e.exit));
          return j;
        } else {
          return Json{{"type", "Provision"}, {"holder", e.holder.value}, {"label", e.label}, {"peer", e.peer.value}};
        }
      },
      event);
}

Json to_json(const AttestationToken& token) {
  const auto bytes = serialize_token(token);
  return Json{{"realm_id", token.claims.realm_id.value},
              {"rim", token.claims.rim.hex()},
              {"platform_digest", token.claims.platform_digest.hex()},
              {"signature", to_hex(std::span<const std::uint8_t>(token.signature))},
              {"bytes", to_hex(bytes)}};
}

Json to_json(const RsiCompletion& completion) {
  return std::visit(
      [](const auto& c) -> Json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RecExit>) {
          return Json{{"exit", to_json(c)}};
        } else if constexpr (std::is_same_v<T, CsmCreated>) {
          return Json{{"completed", "CsmCreated"}, {"csm_id", c.id.value}};
        } else {
          return Json{{"completed", "CsmReserved"}};
        }
      },
      completion);
}

Json to_json(const RmiCall& call) { return Json{{"rmi", call.name}, {"args", call.args}, {"outcome", call.outcome}}; }

Json to_json(const Violation& v) { return Json{{"invariant", v.invariant}, {"detail", v.detail}}; }

}  // namespace csmsim
