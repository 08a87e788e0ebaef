#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "csmsim/digest.hpp"
#include "csmsim/result.hpp"
#include "csmsim/types.hpp"

namespace csmsim {

enum class PasTag : std::uint8_t { Normal, Secure, Realm, Root };
enum class SecurityState : std::uint8_t { Normal, Secure, Realm, Root };
enum class GranuleState : std::uint8_t { Undelegated, Delegated, RD, REC, RTT, Data, APT };

std::string_view to_string(PasTag t) noexcept;
std::string_view to_string(SecurityState s) noexcept;
std::string_view to_string(GranuleState s) noexcept;

// Granule Protection Check: may `state` access a granule tagged `pas`?
constexpr bool gpc_check(SecurityState state, PasTag pas) noexcept {
  switch (state) {
    case SecurityState::Root:
      return true;
    case SecurityState::Normal:
      return pas == PasTag::Normal;
    case SecurityState::Secure:
      return pas == PasTag::Normal || pas == PasTag::Secure;
    case SecurityState::Realm:
      return pas == PasTag::Normal || pas == PasTag::Realm;
  }
  return false;
}

// Copy-on-write 4 KiB frame. A null page reads as all zeroes, so clones of
// a world share unmodified contents.
class GranuleContent {
 public:
  using Page = std::array<std::byte, kGranuleSize>;

  std::span<const std::byte, kGranuleSize> bytes() const noexcept;
  bool is_zero() const noexcept;
  void wipe() noexcept { frame_.reset(); }
  void write(std::size_t offset, std::span<const std::byte> data);
  void assign(std::span<const std::byte> data);
  // SHA-256 of the 4 KiB frame, cached per written page.
  const Digest& digest() const noexcept;

 private:
  struct Frame {
    Page page;
    Digest digest;
  };
  void commit(std::shared_ptr<Frame> frame);

  std::shared_ptr<const Frame> frame_;
};

struct Granule {
  GranuleIndex index = 0;
  PasTag pas = PasTag::Normal;
  GranuleState state = GranuleState::Undelegated;
  GranuleContent content;
};

// Physical memory plus its Granule Protection Table.
class GranuleSpace {
 public:
  explicit GranuleSpace(std::size_t count = 64);

  std::size_t size() const noexcept { return granules_.size(); }
  const Granule& at(GranuleIndex index) const { return granules_.at(index); }
  std::span<const PasTag> gpt() const noexcept { return gpt_; }

  // Side-effect free half of physical_access.
  Result<void> check_access(SecurityState actor, GranuleIndex index) const;
  Result<std::vector<std::byte>> read(SecurityState actor, GranuleIndex index, std::size_t offset,
                                      std::size_t len) const;
  Result<void> write(SecurityState actor, GranuleIndex index, std::size_t offset,
                     std::span<const std::byte> data);

  Result<void> delegate(GranuleIndex index);
  Result<void> undelegate(GranuleIndex index);

  // RMM-internal transitions between Delegated and the in-use states.
  // Moving back to Delegated wipes the contents.
  Result<void> transition(GranuleIndex index, GranuleState from, GranuleState to);
  GranuleContent& content(GranuleIndex index) { return granules_.at(index).content; }

  std::size_t count(GranuleState s) const noexcept;

 private:
  void set_pas(GranuleIndex index, PasTag pas);

  std::vector<Granule> granules_;
  std::vector<PasTag> gpt_;
};

}  // namespace csmsim
