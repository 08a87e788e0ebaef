#include "csmsim/attestation.hpp"

#include <sodium.h>

#include <cstring>

namespace csmsim {
namespace {

void put_u32be(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::byte>(v >> (8 * i)));
}

void put_u64be(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::byte>(v >> (8 * i)));
}

template <std::size_t N>
void put_field(std::vector<std::byte>& out, const std::array<std::uint8_t, N>& bytes) {
  put_u32be(out, N);
  for (auto b : bytes) out.push_back(static_cast<std::byte>(b));
}

class Reader {
 public:
  explicit Reader(std::span<const std::byte> in) : in_(in) {}

  bool u32(std::uint32_t& v) {
    if (in_.size() - pos_ < 4) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | std::to_integer<std::uint32_t>(in_[pos_ + i]);
    pos_ += 4;
    return true;
  }
  bool u64(std::uint64_t& v) {
    if (in_.size() - pos_ < 8) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | std::to_integer<std::uint64_t>(in_[pos_ + i]);
    pos_ += 8;
    return true;
  }
  template <std::size_t N>
  bool bytes(std::array<std::uint8_t, N>& out) {
    if (in_.size() - pos_ < N) return false;
    std::memcpy(out.data(), in_.data() + pos_, N);
    pos_ += N;
    return true;
  }
  // Length prefix that must match exactly.
  bool expect_len(std::uint32_t n) {
    std::uint32_t v = 0;
    return u32(v) && v == n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

void ensure_sodium() {
  if (sodium_init() < 0) std::abort();
}

}  // namespace

PlatformKey PlatformKey::from_seed(std::uint64_t seed) {
  ensure_sodium();
  const Digest material = DigestBuilder().field("csmsim.platform.key").field(seed).finish();
  PlatformKey key;
  crypto_sign_ed25519_seed_keypair(key.public_.bytes.data(), key.secret_.data(), material.bytes.data());
  return key;
}

Signature PlatformKey::sign(std::span<const std::byte> message) const {
  Signature sig{};
  crypto_sign_ed25519_detached(sig.data(), nullptr, reinterpret_cast<const unsigned char*>(message.data()),
                               message.size(), secret_.data());
  return sig;
}

Platform Platform::boot(std::uint64_t seed) {
  return Platform{PlatformKey::from_seed(seed),
                  DigestBuilder().field("csmsim.platform.measurement").field(seed).finish()};
}

std::vector<std::byte> encode_claims(const ClaimSet& claims) {
  std::vector<std::byte> out;
  out.reserve(4 + 32 + 4 + 8 + 4 + 32);
  put_field(out, claims.rim.bytes);
  put_u32be(out, 8);
  put_u64be(out, claims.realm_id.value);
  put_field(out, claims.platform_digest.bytes);
  return out;
}

std::vector<std::byte> serialize_token(const AttestationToken& token) {
  const auto claims = encode_claims(token.claims);
  std::vector<std::byte> out;
  put_u32be(out, static_cast<std::uint32_t>(claims.size()));
  out.insert(out.end(), claims.begin(), claims.end());
  put_field(out, token.signature);
  return out;
}

Result<AttestationToken> parse_token(std::span<const std::byte> bytes) {
  Reader in(bytes);
  AttestationToken t;
  std::uint64_t id = 0;
  const bool ok = in.expect_len(4 + 32 + 4 + 8 + 4 + 32) && in.expect_len(32) && in.bytes(t.claims.rim.bytes) &&
                  in.expect_len(8) && in.u64(id) && in.expect_len(32) &&
                  in.bytes(t.claims.platform_digest.bytes) && in.expect_len(64) && in.bytes(t.signature) &&
                  in.done();
  if (!ok) return Error::InvalidArgument;
  t.claims.realm_id = RealmId{id};
  return t;
}

AttestationToken issue_token(const Platform& platform, const ClaimSet& claims) {
  return AttestationToken{claims, platform.key.sign(encode_claims(claims))};
}

bool signature_valid(const AttestationToken& token, const PublicKey& key) {
  ensure_sodium();
  const auto msg = encode_claims(token.claims);
  return crypto_sign_ed25519_verify_detached(token.signature.data(),
                                             reinterpret_cast<const unsigned char*>(msg.data()), msg.size(),
                                             key.bytes.data()) == 0;
}

Verification verify_token(const AttestationToken& token, const OwnerExpectation& expectation) {
  if (!signature_valid(token, expectation.platform_pubkey)) return {};
  if (token.claims.rim != expectation.expected_rim) return {};
  if (token.claims.platform_digest != expectation.platform_digest) return {};
  return Verification{true, token.claims.realm_id};
}

void PeerDirectory::provision(RealmId holder, const std::string& label, RealmId peer) {
  store_[holder][label] = peer;
}

std::optional<RealmId> PeerDirectory::lookup(RealmId holder, const std::string& label) const {
  auto h = store_.find(holder);
  if (h == store_.end()) return std::nullopt;
  auto p = h->second.find(label);
  if (p == h->second.end()) return std::nullopt;
  return p->second;
}

Result<RealmId> owner_release_peer_id(PeerDirectory& directory, EventLog& log, RealmId owner_realm,
                                      const std::string& label, const AttestationToken& peer_token,
                                      const OwnerExpectation& expectation) {
  const Verification v = verify_token(peer_token, expectation);
  if (!v.valid) return Error::VerificationFailed;
  directory.provision(owner_realm, label, *v.realm_id);
  log.push(ProvisionEvent{owner_realm, label, *v.realm_id});
  return *v.realm_id;
}

}  // namespace csmsim
