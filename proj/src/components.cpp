#include "fiberscan/components.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "fiberscan/error.hpp"

namespace fiberscan {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

FiberComponent make_component(std::vector<Pixel> pixels) {
  FiberComponent c;
  std::sort(pixels.begin(), pixels.end());
  c.pixels = std::move(pixels);
  if (c.pixels.empty()) return c;
  int x0 = c.pixels.front().x, x1 = x0, y0 = c.pixels.front().y, y1 = y0;
  double sx = 0.0, sy = 0.0;
  for (const Pixel& p : c.pixels) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
    sx += p.x;
    sy += p.y;
  }
  c.bbox = Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  c.centroid_x = sx / static_cast<double>(c.pixels.size());
  c.centroid_y = sy / static_cast<double>(c.pixels.size());
  return c;
}

std::vector<FiberComponent> link_components(const Mask& mask, int gap) {
  if (gap < 1) throw Error(ErrorCode::kInvalidConfig, "component gap must be >= 1");
  const int w = mask.width();
  const int h = mask.height();

  std::vector<Pixel> pixels;
  std::vector<int> index(static_cast<std::size_t>(w) * h, -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      index[static_cast<std::size_t>(y) * w + x] = static_cast<int>(pixels.size());
      pixels.push_back({x, y});
    }
  }

  // Each pixel is joined with every earlier pixel (raster order) inside its
  // (2*gap+1)^2 window, which covers every pair exactly once.
  DisjointSet sets(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const auto [x, y] = pixels[i];
    for (int ny = std::max(y - gap, 0); ny <= y; ++ny) {
      const int x_end = ny == y ? x - 1 : std::min(x + gap, w - 1);
      for (int nx = std::max(x - gap, 0); nx <= x_end; ++nx) {
        const int j = index[static_cast<std::size_t>(ny) * w + nx];
        if (j >= 0) sets.unite(static_cast<int>(i), j);
      }
    }
  }

  std::vector<std::vector<Pixel>> groups;
  std::vector<int> group_of(pixels.size(), -1);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const int root = sets.find(static_cast<int>(i));
    if (group_of[root] < 0) {
      group_of[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of[root]].push_back(pixels[i]);
  }

  std::vector<FiberComponent> comps;
  comps.reserve(groups.size());
  for (auto& g : groups) comps.push_back(make_component(std::move(g)));
  std::sort(comps.begin(), comps.end(), [](const FiberComponent& a, const FiberComponent& b) {
    return std::forward_as_tuple(a.bbox.y, a.bbox.x, a.pixels.size(), a.pixels) <
           std::forward_as_tuple(b.bbox.y, b.bbox.x, b.pixels.size(), b.pixels);
  });
  return comps;
}

std::vector<FiberComponent> filter_components(std::vector<FiberComponent> comps,
                                              std::size_t min_length) {
  std::erase_if(comps, [&](const FiberComponent& c) { return c.length() < min_length; });
  return comps;
}

}  // namespace fiberscan
