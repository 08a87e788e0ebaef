#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csmsim/digest.hpp"
#include "csmsim/events.hpp"
#include "csmsim/result.hpp"
#include "csmsim/types.hpp"

namespace csmsim {

struct PublicKey {
  std::array<std::uint8_t, 32> bytes{};
  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

using Signature = std::array<std::uint8_t, 64>;

// Ed25519 platform attestation key, derived deterministically from the
// simulation seed so that traces are replayable.
class PlatformKey {
 public:
  static PlatformKey from_seed(std::uint64_t seed);

  const PublicKey& public_key() const noexcept { return public_; }
  Signature sign(std::span<const std::byte> message) const;

 private:
  std::array<std::uint8_t, 64> secret_{};
  PublicKey public_;
};

struct Platform {
  PlatformKey key;
  Digest digest;  // platform measurement claim, constant per boot

  static Platform boot(std::uint64_t seed);
};

struct ClaimSet {
  Digest rim;
  RealmId realm_id;
  Digest platform_digest;

  friend bool operator==(const ClaimSet&, const ClaimSet&) = default;
};

struct AttestationToken {
  ClaimSet claims;
  Signature signature{};
};

// Canonical claim encoding, in this order:
//   u32be len=32 | rim | u32be len=8 | realm_id (u64be) | u32be len=32 | platform_digest
std::vector<std::byte> encode_claims(const ClaimSet& claims);

// Token wire format: u32be claims_len | claims | u32be sig_len | signature.
std::vector<std::byte> serialize_token(const AttestationToken& token);
Result<AttestationToken> parse_token(std::span<const std::byte> bytes);

AttestationToken issue_token(const Platform& platform, const ClaimSet& claims);
bool signature_valid(const AttestationToken& token, const PublicKey& key);

struct OwnerExpectation {
  Digest expected_rim;
  PublicKey platform_pubkey;
  Digest platform_digest;
};

struct Verification {
  bool valid = false;
  std::optional<RealmId> realm_id;
};

Verification verify_token(const AttestationToken& token, const OwnerExpectation& expectation);

// Peer identifiers provisioned into each realm by its owner, keyed by a
// label the owner chooses (usually the peer's role).
class PeerDirectory {
 public:
  void provision(RealmId holder, const std::string& label, RealmId peer);
  std::optional<RealmId> lookup(RealmId holder, const std::string& label) const;
  const std::map<RealmId, std::map<std::string, RealmId>>& all() const noexcept { return store_; }

 private:
  std::map<RealmId, std::map<std::string, RealmId>> store_;
};

// Owner side of mutual attestation: verify the peer's token and, only on
// success, hand the attested identifier to the owner's realm.
Result<RealmId> owner_release_peer_id(PeerDirectory& directory, EventLog& log, RealmId owner_realm,
                                      const std::string& label, const AttestationToken& peer_token,
                                      const OwnerExpectation& expectation);

}  // namespace csmsim
