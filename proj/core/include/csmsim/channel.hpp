#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "csmsim/result.hpp"

namespace csmsim {

enum class ChannelMode : std::uint8_t { Plaintext, Aead, Csm };

std::string_view to_string(ChannelMode m) noexcept;
std::optional<ChannelMode> channel_mode_from_string(std::string_view name) noexcept;

struct MessageHeader {
  std::uint64_t session_id = 0;
  std::uint64_t seq = 0;
  std::uint64_t length = 0;  // payload bytes, excluding the tag

  static constexpr std::size_t kSize = 24;
  std::array<std::byte, kSize> encode() const noexcept;
  static MessageHeader decode(std::span<const std::byte, kSize> bytes) noexcept;
};

// Depth-1 single-producer/single-consumer channel over one shared slot.
// Plaintext and Csm copy the payload verbatim; Aead seals it with
// XChaCha20-Poly1305, the header as associated data and the nonce
// session_id || seq || 0.
class Channel {
 public:
  static constexpr std::size_t kTagSize = 16;

  Channel(ChannelMode mode, std::size_t max_payload, std::uint64_t session_id = 1);

  ChannelMode mode() const noexcept { return mode_; }
  std::size_t max_payload() const noexcept { return max_payload_; }
  std::uint64_t session_id() const noexcept { return session_id_; }

  // Blocks (yield polling) until the previous message was consumed.
  Result<void> send(std::span<const std::byte> payload);
  // Blocks until a message is pending. On success returns the payload length
  // written to the front of `out`, which must hold max_payload() bytes.
  Result<std::size_t> recv(std::span<std::byte> out);

  std::uint64_t sent() const noexcept { return sent_.load(std::memory_order_acquire); }
  std::uint64_t received() const noexcept { return received_.load(std::memory_order_acquire); }

  // Test hooks: raw slot access and publishing arbitrary slot bytes.
  std::span<std::byte> slot() noexcept { return slot_; }
  void publish_raw(std::span<const std::byte> bytes);

 private:
  ChannelMode mode_;
  std::size_t max_payload_;
  std::uint64_t session_id_;
  std::array<unsigned char, 32> key_{};
  std::vector<std::byte> slot_;
  alignas(64) std::atomic<std::uint64_t> sent_{0};
  alignas(64) std::atomic<std::uint64_t> received_{0};
};

inline constexpr std::size_t kBenchMinSize = 64;
inline constexpr std::size_t kBenchMaxSize = 4u << 20;
inline constexpr std::size_t kBenchMinIters = 1000;

struct BenchReport {
  ChannelMode mode = ChannelMode::Plaintext;
  std::size_t size_bytes = 0;
  std::size_t iters = 0;
  double median_latency_ns = 0;
  double throughput_Bps = 0;
  double cpu_ns_per_msg = 0;  // thread CPU time of both endpoints per message
};

// Two endpoint threads exchange `iters` messages of `size` bytes.
Result<BenchReport> bench_run(ChannelMode mode, std::size_t size, std::size_t iters);

std::string_view bench_csv_header() noexcept;
std::string bench_csv_row(const BenchReport& r);

// 64 B, 256 B, ... 4 MiB.
std::vector<std::size_t> bench_default_sizes();

}  // namespace csmsim
