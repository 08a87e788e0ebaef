#include "csmsim/image.hpp"

#include <algorithm>
#include <array>

namespace csmsim {

Digest measure_image(const RealmImage& image) {
  Digest rim = rim_initial(image.ipa_width);
  std::array<std::byte, kGranuleSize> page{};
  for (const auto& p : image.pages) {
    page.fill(std::byte{0});
    std::copy_n(p.content.begin(), std::min(p.content.size(), kGranuleSize), page.begin());
    rim = rim_extend_data(rim, p.ipa, page);
  }
  return rim;
}

}  // namespace csmsim
