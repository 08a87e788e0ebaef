#include "csmsim/digest.hpp"

#include <sodium.h>

#include <cstring>

namespace csmsim {
namespace {

static_assert(sizeof(crypto_hash_sha256_state) <= 128);

crypto_hash_sha256_state* as_state(std::array<unsigned char, 128>& storage) {
  return reinterpret_cast<crypto_hash_sha256_state*>(storage.data());
}

void put_u32be(unsigned char* out, std::uint32_t v) {
  out[0] = static_cast<unsigned char>(v >> 24);
  out[1] = static_cast<unsigned char>(v >> 16);
  out[2] = static_cast<unsigned char>(v >> 8);
  out[3] = static_cast<unsigned char>(v);
}

}  // namespace

std::string Digest::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

DigestBuilder::DigestBuilder() {
  if (sodium_init() < 0) std::abort();
  crypto_hash_sha256_init(as_state(state_));
}

void DigestBuilder::raw(const void* data, std::size_t len) {
  crypto_hash_sha256_update(as_state(state_), static_cast<const unsigned char*>(data), len);
}

DigestBuilder& DigestBuilder::field(std::span<const std::byte> bytes) {
  unsigned char len[4];
  put_u32be(len, static_cast<std::uint32_t>(bytes.size()));
  raw(len, sizeof len);
  raw(bytes.data(), bytes.size());
  return *this;
}

DigestBuilder& DigestBuilder::field(std::string_view text) {
  return field(std::as_bytes(std::span(text.data(), text.size())));
}

DigestBuilder& DigestBuilder::field(std::uint64_t value) {
  std::array<std::byte, 8> be{};
  for (int i = 0; i < 8; ++i) be[i] = static_cast<std::byte>(value >> (56 - 8 * i));
  return field(std::span<const std::byte>(be));
}

DigestBuilder& DigestBuilder::field(const Digest& d) { return field(std::as_bytes(std::span(d.bytes))); }

Digest DigestBuilder::finish() {
  Digest d;
  crypto_hash_sha256_final(as_state(state_), d.bytes.data());
  return d;
}

Digest sha256(std::span<const std::byte> bytes) {
  if (sodium_init() < 0) std::abort();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return d;
}

Digest rim_initial(unsigned ipa_width) {
  return DigestBuilder().field("csmsim.rim.init").field(std::uint64_t{ipa_width}).finish();
}

Digest rim_extend_data(const Digest& rim, Ipa ipa, std::span<const std::byte> content) {
  return DigestBuilder().field("csmsim.rim.data").field(rim).field(ipa.value).field(sha256(content)).finish();
}

}  // namespace csmsim
