// Test-only oracles, independent of the library implementation paths they
// check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <random>
#include <vector>

#include "edar/image.hpp"

namespace edar::testing {

// A pixel is a true class boundary iff some 4-neighbor has a different class.
inline std::vector<uint8_t> class_transitions(const SegmentationMap& seg) {
  std::vector<uint8_t> out(seg.classes.size(), 0);
  for (int y = 0; y < seg.height; ++y)
    for (int x = 0; x < seg.width; ++x) {
      const uint8_t c = seg.at(x, y);
      const bool boundary = (x > 0 && seg.at(x - 1, y) != c) || (x + 1 < seg.width && seg.at(x + 1, y) != c) ||
                            (y > 0 && seg.at(x, y - 1) != c) || (y + 1 < seg.height && seg.at(x, y + 1) != c);
      if (boundary) out[static_cast<size_t>(y) * seg.width + x] = 1;
    }
  return out;
}

// Bidirectional 2-px (Chebyshev) bound between emitted edges and true class
// transitions. Transitions within `border` pixels of the image border are
// exempt from the must-be-detected direction (the detector never fires
// there). Returns true when the bound holds.
inline bool edge_map_within_bound(const BinaryMap& edges, const SegmentationMap& seg, int radius = 2,
                                  int border = 2) {
  const auto trans = class_transitions(seg);
  auto any_within = [&](const std::vector<uint8_t>& mask, int cx, int cy) {
    for (int y = std::max(0, cy - radius); y <= std::min(seg.height - 1, cy + radius); ++y)
      for (int x = std::max(0, cx - radius); x <= std::min(seg.width - 1, cx + radius); ++x)
        if (mask[static_cast<size_t>(y) * seg.width + x]) return true;
    return false;
  };
  for (int y = 0; y < seg.height; ++y)
    for (int x = 0; x < seg.width; ++x) {
      const size_t i = static_cast<size_t>(y) * seg.width + x;
      if (edges.bits[i] && !any_within(trans, x, y)) return false;
      const bool near_border =
          x < border || y < border || x >= seg.width - border || y >= seg.height - border;
      if (trans[i] && !near_border && !any_within(edges.bits, x, y)) return false;
    }
  return true;
}

// Smooth synthetic segmentation maps: nested random ellipses, the kind of
// region structure real label maps have.
inline SegmentationMap random_smooth_seg(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double cx = w * (0.35 + 0.3 * uni(rng));
  const double cy = h * (0.35 + 0.3 * uni(rng));
  const double ax = w * (0.18 + 0.12 * uni(rng));
  const double ay = h * (0.18 + 0.12 * uni(rng));
  const double r2 = std::min(ax, ay) * (0.45 + 0.2 * uni(rng));
  const double r3 = r2 * (0.4 + 0.2 * uni(rng));
  SegmentationMap seg(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      const double d2 = dx * dx + dy * dy;
      if (d2 <= r3 * r3)
        seg.at(x, y) = 3;
      else if (d2 <= r2 * r2)
        seg.at(x, y) = 2;
      else if ((dx / ax) * (dx / ax) + (dy / ay) * (dy / ay) <= 1.0)
        seg.at(x, y) = 1;
    }
  return seg;
}

// Reference refinement: 4/8-connected-at-distance-eps component analysis
// keeping the largest region, then flood fill of enclosed background from the
// border. Ignores the density requirement, so it agrees with DBSCAN whenever
// spurious blobs are either smaller than min_pts or farther than eps from the
// kept region.
inline SegmentationMap refine_oracle(const SegmentationMap& seg, double eps) {
  const int w = seg.width, h = seg.height;
  const int r = static_cast<int>(std::floor(eps));
  std::vector<int> comp(static_cast<size_t>(w) * h, -1);
  std::vector<long long> sizes;
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      if (seg.at(sx, sy) == 0 || comp[static_cast<size_t>(sy) * w + sx] != -1) continue;
      const int id = static_cast<int>(sizes.size());
      sizes.push_back(0);
      std::deque<std::pair<int, int>> q{{sx, sy}};
      comp[static_cast<size_t>(sy) * w + sx] = id;
      while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop_front();
        ++sizes[static_cast<size_t>(id)];
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy > eps * eps) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (seg.at(nx, ny) == 0 || comp[static_cast<size_t>(ny) * w + nx] != -1) continue;
            comp[static_cast<size_t>(ny) * w + nx] = id;
            q.emplace_back(nx, ny);
          }
      }
    }
  int largest = -1;
  long long best = 0;
  for (size_t i = 0; i < sizes.size(); ++i)
    if (sizes[i] > best) {
      best = sizes[i];
      largest = static_cast<int>(i);
    }
  SegmentationMap out(w, h, 0);
  if (largest >= 0)
    for (size_t i = 0; i < out.classes.size(); ++i)
      if (comp[i] == largest) out.classes[i] = seg.classes[i];

  // background reachable from the border stays; everything else fills with
  // the majority boundary class
  std::vector<uint8_t> outside(static_cast<size_t>(w) * h, 0);
  std::deque<std::pair<int, int>> q;
  for (int x = 0; x < w; ++x) {
    if (out.at(x, 0) == 0 && !outside[static_cast<size_t>(x)]) {
      outside[static_cast<size_t>(x)] = 1;
      q.emplace_back(x, 0);
    }
    if (out.at(x, h - 1) == 0 && !outside[static_cast<size_t>(h - 1) * w + x]) {
      outside[static_cast<size_t>(h - 1) * w + x] = 1;
      q.emplace_back(x, h - 1);
    }
  }
  for (int y = 0; y < h; ++y) {
    if (out.at(0, y) == 0 && !outside[static_cast<size_t>(y) * w]) {
      outside[static_cast<size_t>(y) * w] = 1;
      q.emplace_back(0, y);
    }
    if (out.at(w - 1, y) == 0 && !outside[static_cast<size_t>(y) * w + w - 1]) {
      outside[static_cast<size_t>(y) * w + w - 1] = 1;
      q.emplace_back(w - 1, y);
    }
  }
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop_front();
    static const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto& d : d4) {
      const int nx = x + d[0], ny = y + d[1];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      const size_t ni = static_cast<size_t>(ny) * w + nx;
      if (out.classes[ni] == 0 && !outside[ni]) {
        outside[ni] = 1;
        q.emplace_back(nx, ny);
      }
    }
  }
  // collect holes as 4-connected components and fill with boundary majority
  std::vector<int> hole(static_cast<size_t>(w) * h, -1);
  int nholes = 0;
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      const size_t si = static_cast<size_t>(sy) * w + sx;
      if (out.classes[si] != 0 || outside[si] || hole[si] != -1) continue;
      const int id = nholes++;
      std::deque<std::pair<int, int>> hq{{sx, sy}};
      hole[si] = id;
      std::vector<size_t> pixels;
      int votes[4] = {0, 0, 0, 0};
      while (!hq.empty()) {
        auto [x, y] = hq.front();
        hq.pop_front();
        pixels.push_back(static_cast<size_t>(y) * w + x);
        static const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : d4) {
          const int nx = x + d[0], ny = y + d[1];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const size_t ni = static_cast<size_t>(ny) * w + nx;
          if (out.classes[ni] != 0) {
            ++votes[out.classes[ni]];
          } else if (!outside[ni] && hole[ni] == -1) {
            hole[ni] = id;
            hq.emplace_back(nx, ny);
          }
        }
      }
      int fill = 0, bestv = 0;
      for (int c = 1; c < 4; ++c)
        if (votes[c] > bestv) {
          bestv = votes[c];
          fill = c;
        }
      if (fill != 0)
        for (size_t i : pixels) out.classes[i] = static_cast<uint8_t>(fill);
    }
  return out;
}

inline int count_foreground_components4(const SegmentationMap& seg) {
  const int w = seg.width, h = seg.height;
  std::vector<uint8_t> seen(static_cast<size_t>(w) * h, 0);
  int n = 0;
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      if (seg.at(sx, sy) == 0 || seen[static_cast<size_t>(sy) * w + sx]) continue;
      ++n;
      std::deque<std::pair<int, int>> q{{sx, sy}};
      seen[static_cast<size_t>(sy) * w + sx] = 1;
      while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop_front();
        static const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : d4) {
          const int nx = x + d[0], ny = y + d[1];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const size_t ni = static_cast<size_t>(ny) * w + nx;
          if (seg.classes[ni] != 0 && !seen[ni]) {
            seen[ni] = 1;
            q.emplace_back(nx, ny);
          }
        }
      }
    }
  return n;
}

}  // namespace edar::testing
