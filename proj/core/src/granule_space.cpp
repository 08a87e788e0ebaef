#include "csmsim/granule_space.hpp"

#include <algorithm>
#include <cstring>

namespace csmsim {
namespace {

const GranuleContent::Page& zero_page() {
  static const GranuleContent::Page page{};
  return page;
}

const Digest& zero_digest() {
  static const Digest d = sha256(zero_page());
  return d;
}

}  // namespace

std::string_view to_string(PasTag t) noexcept {
  switch (t) {
    case PasTag::Normal: return "Normal";
    case PasTag::Secure: return "Secure";
    case PasTag::Realm: return "Realm";
    case PasTag::Root: return "Root";
  }
  return "?";
}

std::string_view to_string(SecurityState s) noexcept {
  switch (s) {
    case SecurityState::Normal: return "Normal";
    case SecurityState::Secure: return "Secure";
    case SecurityState::Realm: return "Realm";
    case SecurityState::Root: return "Root";
  }
  return "?";
}

std::string_view to_string(GranuleState s) noexcept {
  switch (s) {
    case GranuleState::Undelegated: return "Undelegated";
    case GranuleState::Delegated: return "Delegated";
    case GranuleState::RD: return "RD";
    case GranuleState::REC: return "REC";
    case GranuleState::RTT: return "RTT";
    case GranuleState::Data: return "Data";
    case GranuleState::APT: return "APT";
  }
  return "?";
}

std::span<const std::byte, kGranuleSize> GranuleContent::bytes() const noexcept {
  return frame_ ? std::span<const std::byte, kGranuleSize>(frame_->page)
                : std::span<const std::byte, kGranuleSize>(zero_page());
}

bool GranuleContent::is_zero() const noexcept {
  if (!frame_) return true;
  return std::all_of(frame_->page.begin(), frame_->page.end(), [](std::byte b) { return b == std::byte{0}; });
}

void GranuleContent::write(std::size_t offset, std::span<const std::byte> data) {
  if (data.empty()) return;
  auto copy = std::make_shared<Frame>();
  copy->page = frame_ ? frame_->page : Page{};
  std::memcpy(copy->page.data() + offset, data.data(), data.size());
  commit(std::move(copy));
}

void GranuleContent::assign(std::span<const std::byte> data) {
  auto copy = std::make_shared<Frame>();
  copy->page = Page{};
  std::memcpy(copy->page.data(), data.data(), std::min(data.size(), kGranuleSize));
  commit(std::move(copy));
}

void GranuleContent::commit(std::shared_ptr<Frame> frame) {
  frame->digest = sha256(frame->page);
  frame_ = std::move(frame);
}

const Digest& GranuleContent::digest() const noexcept { return frame_ ? frame_->digest : zero_digest(); }

GranuleSpace::GranuleSpace(std::size_t count) : granules_(count), gpt_(count, PasTag::Normal) {
  for (std::size_t i = 0; i < count; ++i) granules_[i].index = static_cast<GranuleIndex>(i);
}

Result<void> GranuleSpace::check_access(SecurityState actor, GranuleIndex index) const {
  if (index >= granules_.size()) return Error::OutOfRange;
  if (!gpc_check(actor, gpt_[index])) return Error::Fault;
  return {};
}

Result<std::vector<std::byte>> GranuleSpace::read(SecurityState actor, GranuleIndex index,
                                                  std::size_t offset, std::size_t len) const {
  if (auto ok = check_access(actor, index); !ok) return ok.error();
  if (offset > kGranuleSize || len > kGranuleSize - offset) return Error::OutOfRange;
  auto bytes = granules_[index].content.bytes().subspan(offset, len);
  return std::vector<std::byte>(bytes.begin(), bytes.end());
}

Result<void> GranuleSpace::write(SecurityState actor, GranuleIndex index, std::size_t offset,
                                 std::span<const std::byte> data) {
  if (auto ok = check_access(actor, index); !ok) return ok;
  if (offset > kGranuleSize || data.size() > kGranuleSize - offset) return Error::OutOfRange;
  granules_[index].content.write(offset, data);
  return {};
}

Result<void> GranuleSpace::delegate(GranuleIndex index) {
  if (index >= granules_.size()) return Error::OutOfRange;
  auto& g = granules_[index];
  if (g.state != GranuleState::Undelegated) return Error::BadState;
  g.state = GranuleState::Delegated;
  g.content.wipe();
  set_pas(index, PasTag::Realm);
  return {};
}

Result<void> GranuleSpace::undelegate(GranuleIndex index) {
  if (index >= granules_.size()) return Error::OutOfRange;
  auto& g = granules_[index];
  if (g.state != GranuleState::Delegated) return Error::BadState;
  g.content.wipe();
  g.state = GranuleState::Undelegated;
  set_pas(index, PasTag::Normal);
  return {};
}

Result<void> GranuleSpace::transition(GranuleIndex index, GranuleState from, GranuleState to) {
  if (index >= granules_.size()) return Error::OutOfRange;
  auto& g = granules_[index];
  if (g.state != from) return Error::BadState;
  if (from == GranuleState::Undelegated || to == GranuleState::Undelegated) return Error::BadState;
  if (to == GranuleState::Delegated) g.content.wipe();
  g.state = to;
  return {};
}

std::size_t GranuleSpace::count(GranuleState s) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(granules_.begin(), granules_.end(), [s](const Granule& g) { return g.state == s; }));
}

void GranuleSpace::set_pas(GranuleIndex index, PasTag pas) {
  granules_[index].pas = pas;
  gpt_[index] = pas;
}

}  // namespace csmsim
