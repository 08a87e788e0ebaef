#pragma once

#include <cstddef>
#include <vector>

#include "csmsim/digest.hpp"
#include "csmsim/types.hpp"

namespace csmsim {

struct ImagePage {
  Ipa ipa;
  std::vector<std::byte> content;  // at most one granule; zero padded
};

// Initial realm image as loaded by the host before activation.
struct RealmImage {
  unsigned ipa_width = 32;
  std::vector<ImagePage> pages;
};

// Reference RIM of an image, computed the same way the RMM measures it
// page by page. Realm owners use it as their expected value.
Digest measure_image(const RealmImage& image);

}  // namespace csmsim
