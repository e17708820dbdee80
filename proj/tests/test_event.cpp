#include <doctest.h>

#include <random>

#include "edar/event.hpp"

using namespace edar;

namespace {

Frame make_frame(int w, int h, std::initializer_list<int> values) {
  Frame f(w, h);
  int i = 0;
  for (int v : values) f.pixels[static_cast<size_t>(i++)] = static_cast<uint8_t>(v);
  return f;
}

Frame random_frame(int w, int h, std::mt19937_64& rng) {
  Frame f(w, h);
  for (auto& p : f.pixels) p = static_cast<uint8_t>(rng());
  return f;
}

// straight-line per-pixel evaluation
BinaryMap event_oracle(const Frame& prev, const Frame& curr, double sigma, double eps) {
  BinaryMap out(prev.width, prev.height);
  for (int y = 0; y < prev.height; ++y)
    for (int x = 0; x < prev.width; ++x) {
      double d = std::abs(double(prev.at(x, y)) - double(curr.at(x, y)));
      out.at(x, y) = d / std::max(double(prev.at(x, y)), eps) > sigma ? 1 : 0;
    }
  return out;
}

}  // namespace

TEST_CASE("event_map basics") {
  SUBCASE("identical frames give an all-zero map") {
    std::mt19937_64 rng(1);
    Frame f = random_frame(9, 7, rng);
    CHECK(event_map(f, f, 0.3).count_ones() == 0);
  }
  SUBCASE("hand-worked 2x2 example") {
    // |100-140|/100 = 0.4 > 0.3 -> 1;  |50-50|/50 = 0 -> 0
    // |200-100|/200 = 0.5 > 0.3 -> 1;  |10-10|/10 = 0 -> 0
    Frame prev = make_frame(2, 2, {100, 50, 200, 10});
    Frame curr = make_frame(2, 2, {140, 50, 100, 10});
    BinaryMap m = event_map(prev, curr, 0.3);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(1, 0) == 0);
    CHECK(m.at(0, 1) == 1);
    CHECK(m.at(1, 1) == 0);
  }
  SUBCASE("zero previous frame is guarded by epsilon_div") {
    Frame prev(4, 4, 0);
    Frame curr(4, 4, 255);
    BinaryMap m = event_map(prev, curr, 0.3, 1.0);
    CHECK(m.count_ones() == 16);  // 255/1 > 0.3 everywhere
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS(event_map(Frame(4, 4), Frame(4, 5), 0.3));
  }
}

TEST_CASE("event_map matches the per-pixel oracle on random pairs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    Frame prev = random_frame(17, 13, rng);
    Frame curr = random_frame(17, 13, rng);
    double sigma = 0.05 + 0.9 * (trial / 100.0);
    CHECK(event_map(prev, curr, sigma).bits == event_oracle(prev, curr, sigma, 1.0).bits);
  }
}

TEST_CASE("event_map is monotone in sigma") {
  std::mt19937_64 rng(43);
  Frame prev = random_frame(20, 20, rng);
  Frame curr = random_frame(20, 20, rng);
  BinaryMap loose = event_map(prev, curr, 0.1);
  BinaryMap tight = event_map(prev, curr, 0.5);
  for (size_t i = 0; i < loose.bits.size(); ++i)
    if (tight.bits[i]) CHECK(loose.bits[i] == 1);  // tight events are a subset
}

TEST_CASE("event_density") {
  BinaryMap m(20, 15);
  SUBCASE("all-zero map") { CHECK(event_density(m, {0, 0, 20, 15}) == 0.0); }
  SUBCASE("5 events in a 10x10 rect") {
    m.at(2, 2) = m.at(3, 3) = m.at(4, 4) = m.at(5, 5) = m.at(6, 6) = 1;
    CHECK(event_density(m, {0, 0, 10, 10}) == doctest::Approx(0.05));
  }
  SUBCASE("all-one map") {
    for (auto& b : m.bits) b = 1;
    CHECK(event_density(m, {0, 0, 20, 15}) == 1.0);
  }
  SUBCASE("zero-area rect throws") { CHECK_THROWS(event_density(m, {3, 3, 3, 8})); }
  SUBCASE("density is additive over a partition") {
    std::mt19937_64 rng(9);
    for (auto& b : m.bits) b = static_cast<uint8_t>(rng() % 2);
    PixelRect whole{2, 1, 18, 13};
    PixelRect left{2, 1, 10, 13}, right{10, 1, 18, 13};
    double combined = (event_density(m, left) * left.area() + event_density(m, right) * right.area()) /
                      static_cast<double>(whole.area());
    CHECK(event_density(m, whole) == doctest::Approx(combined).epsilon(1e-12));
  }
}

TEST_CASE("downsample_by_2") {
  SUBCASE("all-zero stays all-zero at half dims") {
    BinaryMap out = downsample_by_2(BinaryMap(10, 8));
    CHECK(out.width == 5);
    CHECK(out.height == 4);
    CHECK(out.downsampled);
    CHECK(out.count_ones() == 0);
  }
  SUBCASE("single bit survives at the block position") {
    BinaryMap m(4, 4);
    m.at(3, 3) = 1;
    BinaryMap out = downsample_by_2(m);
    CHECK(out.width == 2);
    CHECK(out.height == 2);
    CHECK(out.at(1, 1) == 1);
    CHECK(out.count_ones() == 1);
  }
  SUBCASE("all-one 4x4 gives all-one 2x2") {
    BinaryMap m(4, 4);
    for (auto& b : m.bits) b = 1;
    CHECK(downsample_by_2(m).count_ones() == 4);
  }
  SUBCASE("odd dims round up") {
    BinaryMap m(5, 3);
    m.at(4, 2) = 1;
    BinaryMap out = downsample_by_2(m);
    CHECK(out.width == 3);
    CHECK(out.height == 2);
    CHECK(out.at(2, 1) == 1);
  }
  SUBCASE("output bit is exactly the OR of its 2x2 block") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      BinaryMap m(11, 9);
      for (auto& b : m.bits) b = static_cast<uint8_t>(rng() % 4 == 0);
      BinaryMap out = downsample_by_2(m);
      for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
          uint8_t want = 0;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
              int sx = 2 * x + dx, sy = 2 * y + dy;
              if (sx < m.width && sy < m.height) want |= m.at(sx, sy);
            }
          CHECK(out.at(x, y) == want);
        }
    }
  }
}
