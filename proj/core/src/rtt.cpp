#include "csmsim/rtt.hpp"

namespace csmsim {

bool Rtt::back_block(std::uint64_t block, GranuleIndex table_granule) {
  if (!backed_blocks_.insert(block).second) return false;
  table_granules_.push_back(table_granule);
  return true;
}

const RttEntry* Rtt::find(Ipa ipa) const {
  auto it = entries_.find(ipa.granule());
  return it == entries_.end() ? nullptr : &it->second;
}

RttReadout Rtt::read(Ipa ipa) const {
  if (const auto* e = find(ipa)) return {RttEntryState::Assigned, e->pa, e->perm};
  return {};
}

}  // namespace csmsim
