#include "edar/event.hpp"

#include <cmath>
#include <stdexcept>

#include "edar/parallel.hpp"

namespace edar {

BinaryMap event_map(const Frame& prev, const Frame& curr, double sigma, double epsilon_div) {
  if (!prev.same_dims(curr)) throw std::invalid_argument("event_map: frame dims mismatch");
  if (sigma <= 0) throw std::invalid_argument("event_map: sigma must be positive");
  if (epsilon_div <= 0) throw std::invalid_argument("event_map: epsilon_div must be positive");
  BinaryMap out(prev.width, prev.height);
  parallel_for(prev.height, [&](long long y) {
    const uint8_t* p = &prev.pixels[static_cast<size_t>(y) * prev.width];
    const uint8_t* c = &curr.pixels[static_cast<size_t>(y) * curr.width];
    uint8_t* o = &out.bits[static_cast<size_t>(y) * out.width];
    for (int x = 0; x < prev.width; ++x) {
      double diff = std::abs(static_cast<double>(p[x]) - static_cast<double>(c[x]));
      double denom = std::max(static_cast<double>(p[x]), epsilon_div);
      o[x] = (diff / denom > sigma) ? 1 : 0;
    }
  });
  return out;
}

double event_density(const BinaryMap& events, const PixelRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > events.width || rect.y1 > events.height)
    throw std::invalid_argument("event_density: rect out of bounds");
  if (rect.area() <= 0) throw std::invalid_argument("event_density: zero-area rect");
  long long ones = 0;
  for (int y = rect.y0; y < rect.y1; ++y) {
    const uint8_t* row = &events.bits[static_cast<size_t>(y) * events.width];
    for (int x = rect.x0; x < rect.x1; ++x) ones += row[x];
  }
  return static_cast<double>(ones) / static_cast<double>(rect.area());
}

BinaryMap downsample_by_2(const BinaryMap& map) {
  int ow = (map.width + 1) / 2;
  int oh = (map.height + 1) / 2;
  BinaryMap out(ow, oh, true);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      uint8_t v = 0;
      for (int dy = 0; dy < 2 && 2 * y + dy < map.height; ++dy)
        for (int dx = 0; dx < 2 && 2 * x + dx < map.width; ++dx)
          v |= map.at(2 * x + dx, 2 * y + dy);
      out.at(x, y) = v;
    }
  }
  return out;
}

}  // namespace edar
