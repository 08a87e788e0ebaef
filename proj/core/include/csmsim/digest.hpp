#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "csmsim/types.hpp"

namespace csmsim {

// SHA-256 output. All measurement and claim digests in the model use it.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  friend auto operator<=>(const Digest&, const Digest&) = default;
  std::string hex() const;
};

// Incremental SHA-256 over a canonical length-prefixed encoding: every
// field is written as a big-endian u32 length followed by its bytes, so
// concatenation ambiguities cannot produce equal digests.
class DigestBuilder {
 public:
  DigestBuilder();
  DigestBuilder& field(std::span<const std::byte> bytes);
  DigestBuilder& field(std::string_view text);
  DigestBuilder& field(std::uint64_t value);
  DigestBuilder& field(const Digest& d);
  Digest finish();

 private:
  void raw(const void* data, std::size_t len);
  alignas(16) std::array<unsigned char, 128> state_{};
};

Digest sha256(std::span<const std::byte> bytes);

// Realm Initial Measurement fold.
Digest rim_initial(unsigned ipa_width);
Digest rim_extend_data(const Digest& rim, Ipa ipa, std::span<const std::byte> content);

}  // namespace csmsim
