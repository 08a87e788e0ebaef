#include "csmsim/channel.hpp"

#include <sodium.h>
#include <time.h>

#include <algorithm>
#include <atomic>
#include <array>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>

namespace csmsim {
namespace {

void put_be64(std::byte* out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::byte>(v & 0xFF);
    v >>= 8;
  }
}

std::uint64_t get_be64(const std::byte* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | std::to_integer<std::uint64_t>(in[i]);
  return v;
}

std::array<unsigned char, crypto_aead_xchacha20poly1305_ietf_NPUBBYTES> nonce_for(std::uint64_t session,
                                                                                 std::uint64_t seq) {
  std::array<unsigned char, crypto_aead_xchacha20poly1305_ietf_NPUBBYTES> n{};
  put_be64(reinterpret_cast<std::byte*>(n.data()), session);
  put_be64(reinterpret_cast<std::byte*>(n.data() + 8), seq);
  return n;
}

std::uint64_t thread_cpu_ns() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<std::uint64_t>(ts.tv_sec) * 1'000'000'000ull + static_cast<std::uint64_t>(ts.tv_nsec);
}

constexpr std::array<std::pair<ChannelMode, std::string_view>, 3> kModeNames{{
    {ChannelMode::Plaintext, "plaintext"},
    {ChannelMode::Aead, "aead"},
    {ChannelMode::Csm, "csm"},
}};

}  // namespace

std::string_view to_string(ChannelMode m) noexcept {
  for (const auto& [v, n] : kModeNames) {
    if (v == m) return n;
  }
  return "?";
}

std::optional<ChannelMode> channel_mode_from_string(std::string_view name) noexcept {
  for (const auto& [v, n] : kModeNames) {
    if (n == name) return v;
  }
  return std::nullopt;
}

std::array<std::byte, MessageHeader::kSize> MessageHeader::encode() const noexcept {
  std::array<std::byte, kSize> out{};
  put_be64(out.data(), session_id);
  put_be64(out.data() + 8, seq);
  put_be64(out.data() + 16, length);
  return out;
}

MessageHeader MessageHeader::decode(std::span<const std::byte, kSize> bytes) noexcept {
  return MessageHeader{get_be64(bytes.data()), get_be64(bytes.data() + 8), get_be64(bytes.data() + 16)};
}

Channel::Channel(ChannelMode mode, std::size_t max_payload, std::uint64_t session_id)
    : mode_(mode),
      max_payload_(max_payload),
      session_id_(session_id),
      slot_(MessageHeader::kSize + max_payload + kTagSize) {
  if (sodium_init() < 0) std::abort();
  // Fixed per-session key; the model has no key exchange.
  std::array<std::byte, 8> sid{};
  put_be64(sid.data(), session_id);
  static constexpr std::string_view kContext = "csmsim channel key";
  crypto_generichash(key_.data(), key_.size(), reinterpret_cast<const unsigned char*>(sid.data()), sid.size(),
                     reinterpret_cast<const unsigned char*>(kContext.data()), kContext.size());
}

Result<void> Channel::send(std::span<const std::byte> payload) {
  if (payload.size() > max_payload_) return Error::PayloadTooLarge;
  const std::uint64_t seq = sent_.load(std::memory_order_relaxed);
  while (received_.load(std::memory_order_acquire) != seq) std::this_thread::yield();

  const MessageHeader h{session_id_, seq, payload.size()};
  const auto head = h.encode();
  std::memcpy(slot_.data(), head.data(), head.size());
  std::byte* body = slot_.data() + MessageHeader::kSize;
  if (mode_ == ChannelMode::Aead) {
    const auto nonce = nonce_for(session_id_, seq);
    unsigned long long clen = 0;
    crypto_aead_xchacha20poly1305_ietf_encrypt(
        reinterpret_cast<unsigned char*>(body), &clen, reinterpret_cast<const unsigned char*>(payload.data()),
        payload.size(), reinterpret_cast<const unsigned char*>(head.data()), head.size(), nullptr, nonce.data(),
        key_.data());
  } else if (!payload.empty()) {
    std::memcpy(body, payload.data(), payload.size());
  }
  sent_.store(seq + 1, std::memory_order_release);
  return {};
}

Result<std::size_t> Channel::recv(std::span<std::byte> out) {
  const std::uint64_t expected = received_.load(std::memory_order_relaxed);
  while (sent_.load(std::memory_order_acquire) <= expected) std::this_thread::yield();

  const MessageHeader h =
      MessageHeader::decode(std::span<const std::byte, MessageHeader::kSize>(slot_.data(), MessageHeader::kSize));
  if (h.length > max_payload_ || h.length > out.size()) return Error::PayloadTooLarge;
  const std::byte* body = slot_.data() + MessageHeader::kSize;
  if (mode_ == ChannelMode::Aead) {
    // The header is authenticated, so a forged seq fails the tag first.
    const auto nonce = nonce_for(h.session_id, h.seq);
    unsigned long long mlen = 0;
    const int rc = crypto_aead_xchacha20poly1305_ietf_decrypt(
        reinterpret_cast<unsigned char*>(out.data()), &mlen, nullptr, reinterpret_cast<const unsigned char*>(body),
        h.length + kTagSize, reinterpret_cast<const unsigned char*>(slot_.data()), MessageHeader::kSize,
        nonce.data(), key_.data());
    if (rc != 0) return Error::AuthFailure;
    if (h.session_id != session_id_ || h.seq != expected) return Error::SeqMismatch;
  } else {
    if (h.session_id != session_id_ || h.seq != expected) return Error::SeqMismatch;
    if (h.length != 0) std::memcpy(out.data(), body, h.length);
  }
  received_.store(expected + 1, std::memory_order_release);
  return static_cast<std::size_t>(h.length);
}

void Channel::publish_raw(std::span<const std::byte> bytes) {
  std::copy_n(bytes.begin(), std::min(bytes.size(), slot_.size()), slot_.begin());
  sent_.fetch_add(1, std::memory_order_release);
}

Result<BenchReport> bench_run(ChannelMode mode, std::size_t size, std::size_t iters) {
  if (size < kBenchMinSize || size > kBenchMaxSize || iters < kBenchMinIters) return Error::InvalidArgument;
  if (sodium_init() < 0) std::abort();

  Channel ch(mode, size);
  std::vector<std::byte> payload(size);
  randombytes_buf(payload.data(), payload.size());
  std::vector<std::int64_t> start(iters), done(iters);
  std::uint64_t tx_cpu = 0, rx_cpu = 0;
  std::atomic<bool> rx_ok{true};

  using Clock = std::chrono::steady_clock;
  const auto ns = [](Clock::time_point t) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count();
  };

  const auto wall0 = Clock::now();
  std::thread receiver([&] {
    std::vector<std::byte> buf(size);
    const std::uint64_t c0 = thread_cpu_ns();
    for (std::size_t i = 0; i < iters; ++i) {
      auto r = ch.recv(buf);
      done[i] = ns(Clock::now());
      if (!r || *r != size) {
        rx_ok = false;
        break;
      }
    }
    rx_cpu = thread_cpu_ns() - c0;
  });
  {
    const std::uint64_t c0 = thread_cpu_ns();
    for (std::size_t i = 0; i < iters; ++i) {
      start[i] = ns(Clock::now());
      if (!ch.send(payload)) break;
      if (!rx_ok) break;
    }
    tx_cpu = thread_cpu_ns() - c0;
  }
  receiver.join();
  const auto wall = std::chrono::duration<double>(Clock::now() - wall0).count();
  if (!rx_ok) return Error::AuthFailure;

  std::vector<std::int64_t> lat(iters);
  for (std::size_t i = 0; i < iters; ++i) lat[i] = done[i] - start[i];
  std::nth_element(lat.begin(), lat.begin() + static_cast<std::ptrdiff_t>(iters / 2), lat.end());

  BenchReport r;
  r.mode = mode;
  r.size_bytes = size;
  r.iters = iters;
  r.median_latency_ns = static_cast<double>(lat[iters / 2]);
  r.throughput_Bps = static_cast<double>(size) * static_cast<double>(iters) / wall;
  r.cpu_ns_per_msg = static_cast<double>(tx_cpu + rx_cpu) / static_cast<double>(iters);
  return r;
}

std::string_view bench_csv_header() noexcept {
  return "mode,size_bytes,iters,median_latency_ns,throughput_Bps,cpu_ns_per_msg";
}

std::string bench_csv_row(const BenchReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.0f,%.0f,%.0f", std::string(to_string(r.mode)).c_str(), r.size_bytes,
                r.iters, r.median_latency_ns, r.throughput_Bps, r.cpu_ns_per_msg);
  return buf;
}

std::vector<std::size_t> bench_default_sizes() {
  std::vector<std::size_t> sizes;
  for (std::size_t s = kBenchMinSize; s <= kBenchMaxSize; s *= 4) sizes.push_back(s);
  return sizes;
}

}  // namespace csmsim
