#include <cstring>
#include <thread>
#include <vector>

#include "csmsim/channel.hpp"
#include "helpers.hpp"

using namespace csmsim;
using namespace csmsim::test;

TEST_CASE("header encoding is big-endian and round-trips") {
  const MessageHeader h{0x0102030405060708ull, 9, 300};
  const auto enc = h.encode();
  CHECK(std::to_integer<int>(enc[0]) == 1);
  CHECK(std::to_integer<int>(enc[7]) == 8);
  CHECK(std::to_integer<int>(enc[15]) == 9);
  CHECK(std::to_integer<int>(enc[22]) == 1);
  CHECK(std::to_integer<int>(enc[23]) == 44);
  const auto back = MessageHeader::decode(enc);
  CHECK(back.session_id == h.session_id);
  CHECK(back.seq == h.seq);
  CHECK(back.length == h.length);
}

TEST_CASE("mode names") {
  for (auto m : {ChannelMode::Plaintext, ChannelMode::Aead, ChannelMode::Csm}) {
    CHECK(channel_mode_from_string(to_string(m)) == m);
  }
  CHECK_FALSE(channel_mode_from_string("tls"));
}

TEST_CASE("round trip in every mode") {
  for (auto m : {ChannelMode::Plaintext, ChannelMode::Aead, ChannelMode::Csm}) {
    Channel ch(m, 64);
    std::vector<std::byte> out(64);
    for (int i = 0; i < 3; ++i) {
      const auto msg = bytes("message " + std::to_string(i));
      REQUIRE(ch.send(msg));
      auto n = ch.recv(out);
      REQUIRE(n);
      CHECK(std::vector<std::byte>(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(*n)) == msg);
    }
    CHECK(ch.sent() == 3);
    CHECK(ch.received() == 3);
    REQUIRE(ch.send({}));
    CHECK(*ch.recv(out) == 0);
  }
}

TEST_CASE("plaintext slot holds header then payload verbatim") {
  Channel ch(ChannelMode::Plaintext, 32, 5);
  const auto msg = bytes("visible");
  REQUIRE(ch.send(msg));
  const auto head = MessageHeader{5, 0, msg.size()}.encode();
  CHECK(std::memcmp(ch.slot().data(), head.data(), head.size()) == 0);
  CHECK(std::memcmp(ch.slot().data() + MessageHeader::kSize, msg.data(), msg.size()) == 0);
}

TEST_CASE("aead slot does not reveal the payload") {
  Channel ch(ChannelMode::Aead, 32);
  const auto msg = bytes("secret payload!!");
  REQUIRE(ch.send(msg));
  CHECK(std::memcmp(ch.slot().data() + MessageHeader::kSize, msg.data(), msg.size()) != 0);
}

TEST_CASE("aead detects any flipped bit and leaves the counter alone") {
  const auto msg = bytes("integrity");
  const std::size_t sealed = MessageHeader::kSize + msg.size() + Channel::kTagSize;
  for (std::size_t i = 0; i < sealed; ++i) {
    Channel ch(ChannelMode::Aead, 32);
    REQUIRE(ch.send(msg));
    ch.slot()[i] ^= std::byte{0x20};
    std::vector<std::byte> out(32);
    auto r = ch.recv(out);
    INFO("byte " << i);
    REQUIRE_FALSE(r);
    // A flipped length may exceed the buffer before the tag is checked.
    CHECK((r.error() == Error::AuthFailure || r.error() == Error::PayloadTooLarge));
    CHECK(ch.received() == 0);
  }
}

TEST_CASE("plaintext corruption goes unnoticed") {
  Channel ch(ChannelMode::Plaintext, 32);
  REQUIRE(ch.send(bytes("abc")));
  ch.slot()[MessageHeader::kSize] = std::byte{'x'};
  std::vector<std::byte> out(32);
  auto n = ch.recv(out);
  REQUIRE(n);
  CHECK(std::vector<std::byte>(out.begin(), out.begin() + 3) == bytes("xbc"));
}

TEST_CASE("replayed message is rejected by sequence number") {
  for (auto m : {ChannelMode::Plaintext, ChannelMode::Aead}) {
    Channel ch(m, 32);
    std::vector<std::byte> out(32);
    REQUIRE(ch.send(bytes("first")));
    const std::vector<std::byte> old(ch.slot().begin(), ch.slot().end());
    REQUIRE(ch.recv(out));
    ch.publish_raw(old);
    auto r = ch.recv(out);
    CHECK(is_error(r, Error::SeqMismatch));
    CHECK(ch.received() == 1);
  }
}

TEST_CASE("oversized payloads are refused") {
  Channel ch(ChannelMode::Csm, 8);
  CHECK(is_error(ch.send(std::vector<std::byte>(9)), Error::PayloadTooLarge));
  CHECK(ch.sent() == 0);
}

TEST_CASE("two threads exchange an ordered stream") {
  for (auto m : {ChannelMode::Plaintext, ChannelMode::Aead, ChannelMode::Csm}) {
    constexpr int kCount = 500;
    Channel ch(m, 16);
    bool ordered = true;
    std::thread rx([&] {
      std::vector<std::byte> out(16);
      for (int i = 0; i < kCount; ++i) {
        auto n = ch.recv(out);
        std::uint32_t v = 0;
        if (!n || *n != sizeof v) {
          ordered = false;
          return;
        }
        std::memcpy(&v, out.data(), sizeof v);
        if (v != static_cast<std::uint32_t>(i)) ordered = false;
      }
    });
    for (std::uint32_t i = 0; i < kCount; ++i) {
      std::vector<std::byte> b(sizeof i);
      std::memcpy(b.data(), &i, sizeof i);
      REQUIRE(ch.send(b));
    }
    rx.join();
    CHECK(ordered);
    CHECK(ch.received() == kCount);
  }
}

TEST_CASE("bench arguments are validated") {
  CHECK(is_error(bench_run(ChannelMode::Plaintext, 64, 999), Error::InvalidArgument));
  CHECK(is_error(bench_run(ChannelMode::Plaintext, 32, 1000), Error::InvalidArgument));
  CHECK(is_error(bench_run(ChannelMode::Plaintext, kBenchMaxSize + 1, 1000), Error::InvalidArgument));
  auto r = bench_run(ChannelMode::Aead, 64, 1000);
  REQUIRE(r);
  CHECK(r->iters == 1000);
  CHECK(r->median_latency_ns > 0);
  CHECK(r->cpu_ns_per_msg > 0);
  CHECK(bench_default_sizes().front() == 64);
  CHECK(bench_default_sizes().back() == kBenchMaxSize);
  CHECK(bench_csv_row(*r).rfind("aead,64,1000,", 0) == 0);
}
