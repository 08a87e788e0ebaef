#include <random>

#include "csmsim/attestation.hpp"
#include "helpers.hpp"

using namespace csmsim;
using namespace csmsim::test;

namespace {

OwnerExpectation expect_for(const Rmm& rmm, const RealmImage& img) {
  return OwnerExpectation{measure_image(img), rmm.platform().key.public_key(), rmm.platform().digest};
}

}  // namespace

TEST_CASE("token verifies and yields the realm id") {
  Duo d;
  auto t = d.rmm().rsi_attestation_token(d.p.id);
  REQUIRE(t);
  const Verification v = verify_token(*t, expect_for(d.rmm(), image("provider")));
  CHECK(v.valid);
  CHECK(v.realm_id == d.p.id);
}

TEST_CASE("identical images give equal RIM and different ids") {
  Duo d;
  const LaunchedRealm twin = d.launch("provider");
  auto a = *d.rmm().rsi_attestation_token(d.p.id);
  auto b = *d.rmm().rsi_attestation_token(twin.id);
  CHECK(a.claims.rim == b.claims.rim);
  CHECK(a.claims.realm_id != b.claims.realm_id);
  CHECK(a.claims.rim == measure_image(image("provider")));
}

TEST_CASE("token before activation is refused") {
  Rmm rmm(Rmm::Config{8, 0});
  REQUIRE(rmm.granule_delegate(0));
  auto id = rmm.rmi_realm_create(0, 32);
  REQUIRE(id);
  CHECK(is_error(rmm.rsi_attestation_token(*id), Error::BadState));
}

TEST_CASE("flipping a realm_id byte breaks the signature") {
  Duo d;
  auto t = *d.rmm().rsi_attestation_token(d.p.id);
  auto wire = serialize_token(t);
  // claims_len(4) | len(4) rim(32) | len(4) realm_id(8) ...
  wire[4 + 4 + 32 + 4 + 7] ^= std::byte{0x01};
  auto parsed = parse_token(wire);
  REQUIRE(parsed);
  CHECK(parsed->claims.realm_id != t.claims.realm_id);
  CHECK_FALSE(verify_token(*parsed, expect_for(d.rmm(), image("provider"))).valid);
}

TEST_CASE("different image means RIM mismatch and no id release") {
  Duo d;
  auto t = *d.rmm().rsi_attestation_token(d.c.id);
  CHECK_FALSE(verify_token(t, expect_for(d.rmm(), image("provider"))).valid);
  const auto mark = d.rmm().events().size();
  auto r = owner_release_peer_id(d.w.peers, d.rmm().events(), d.p.id, "peer", t,
                                 expect_for(d.rmm(), image("provider")));
  CHECK(is_error(r, Error::VerificationFailed));
  CHECK_FALSE(d.w.peers.lookup(d.p.id, "peer"));
  CHECK(d.rmm().events().size() == mark);
}

TEST_CASE("wrong platform key or digest is rejected") {
  Duo d;
  auto t = *d.rmm().rsi_attestation_token(d.p.id);
  OwnerExpectation e = expect_for(d.rmm(), image("provider"));
  OwnerExpectation wrong_key = e;
  wrong_key.platform_pubkey = PlatformKey::from_seed(12345).public_key();
  CHECK_FALSE(verify_token(t, wrong_key).valid);
  OwnerExpectation wrong_digest = e;
  wrong_digest.platform_digest.bytes[0] ^= 1;
  CHECK_FALSE(verify_token(t, wrong_digest).valid);
}

TEST_CASE("mutual attestation provisions both sides") {
  Duo d;
  auto tp = *d.rmm().rsi_attestation_token(d.p.id);
  auto tc = *d.rmm().rsi_attestation_token(d.c.id);
  const auto mark = d.rmm().events().size();
  REQUIRE(owner_release_peer_id(d.w.peers, d.rmm().events(), d.p.id, "consumer", tc,
                                expect_for(d.rmm(), image("consumer"))));
  REQUIRE(owner_release_peer_id(d.w.peers, d.rmm().events(), d.c.id, "provider", tp,
                                expect_for(d.rmm(), image("provider"))));
  CHECK(d.w.peers.lookup(d.p.id, "consumer") == d.c.id);
  CHECK(d.w.peers.lookup(d.c.id, "provider") == d.p.id);
  std::size_t provisions = 0;
  for (const auto& e : d.rmm().events().since(mark)) provisions += std::holds_alternative<ProvisionEvent>(e);
  CHECK(provisions == 2);
}

TEST_CASE("serialization round trip and malformed input") {
  Duo d;
  auto t = *d.rmm().rsi_attestation_token(d.p.id);
  auto wire = serialize_token(t);
  auto back = parse_token(wire);
  REQUIRE(back);
  CHECK(back->claims == t.claims);
  CHECK(back->signature == t.signature);
  wire.pop_back();
  CHECK_FALSE(parse_token(wire));
  CHECK_FALSE(parse_token(std::span<const std::byte>{}));
}

TEST_CASE("random single-byte tampering is never accepted") {
  Duo d;
  const auto t = *d.rmm().rsi_attestation_token(d.p.id);
  const auto e = expect_for(d.rmm(), image("provider"));
  const auto wire = serialize_token(t);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    auto w = wire;
    const auto pos = rng() % w.size();
    const auto flip = static_cast<std::byte>(1 + rng() % 255);
    w[pos] ^= flip;
    auto parsed = parse_token(w);
    if (parsed) CHECK_FALSE(verify_token(*parsed, e).valid);
  }
}

TEST_CASE("platform key is deterministic per seed") {
  CHECK(PlatformKey::from_seed(1).public_key() == PlatformKey::from_seed(1).public_key());
  CHECK_FALSE(PlatformKey::from_seed(1).public_key() == PlatformKey::from_seed(2).public_key());
}
