#pragma once

#include <vector>

#include "fiberscan/image.hpp"
#include "fiberscan/ridge.hpp"

namespace fiberscan {

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel& a, const Pixel& b) {
    return a.y != b.y ? a.y <=> b.y : a.x <=> b.x;
  }
};

/// A group of ridge pixels taken to be one fiber. Pixels are sorted by (y, x).
struct FiberComponent {
  std::vector<Pixel> pixels;
  Rect bbox;
  double centroid_x = 0.0;
  double centroid_y = 0.0;

  std::size_t length() const noexcept { return pixels.size(); }
  friend bool operator==(const FiberComponent&, const FiberComponent&) = default;
};

/// Builds bbox and centroid from a pixel list (sorted in place).
FiberComponent make_component(std::vector<Pixel> pixels);

/// Groups mask pixels whose Chebyshev distance is <= gap (transitively).
/// Output is sorted by (bbox.y, bbox.x, length), then by pixel list.
std::vector<FiberComponent> link_components(const Mask& mask, int gap);

/// Keeps components with length >= min_length, preserving order.
std::vector<FiberComponent> filter_components(std::vector<FiberComponent> comps,
                                              std::size_t min_length);

}  // namespace fiberscan
