#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "edar/image.hpp"

using namespace edar;

TEST_CASE("roi_to_pixels denormalizes with floor/ceil") {
  CHECK(roi_to_pixels({0, 0, 1, 1}, 640, 400) == PixelRect{0, 0, 640, 400});
  // direct arithmetic: floor(0.25*640)=160, floor(0.5*400)=200, ceil(0.75*640)=480, ceil(1.0*400)=400
  CHECK(roi_to_pixels({0.25, 0.5, 0.75, 1.0}, 640, 400) == PixelRect{160, 200, 480, 400});
  const PixelRect degenerate = roi_to_pixels({0.5, 0.5, 0.5, 0.5}, 640, 400);
  CHECK(degenerate == PixelRect{320, 200, 320, 200});
  CHECK(degenerate.area() == 0);
}

TEST_CASE("roi_to_pixels then renormalizing encloses the original") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    double a = uni(rng), b = uni(rng), c = uni(rng), d = uni(rng);
    Roi roi{std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
    PixelRect rect = roi_to_pixels(roi, 123, 77);
    Roi back = rect_to_roi(rect, 123, 77);
    CHECK(back.x_min <= roi.x_min + 1e-12);
    CHECK(back.y_min <= roi.y_min + 1e-12);
    CHECK(back.x_max >= roi.x_max - 1e-12);
    CHECK(back.y_max >= roi.y_max - 1e-12);
  }
}

TEST_CASE("roi_is_feasible checks ordering and finiteness") {
  CHECK(roi_is_feasible({0.1, 0.1, 0.9, 0.9}));
  CHECK_FALSE(roi_is_feasible({0.9, 0.1, 0.1, 0.9}));  // corners swapped
  CHECK(roi_is_feasible({0.2, 0.2, 0.2, 0.8}));        // zero width is fine
  CHECK_FALSE(roi_is_feasible({0.1, std::nan(""), 0.9, 0.9}));

  // invariant under uniform translation of all four coordinates
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    Roi roi{uni(rng), uni(rng), uni(rng), uni(rng)};
    double shift = uni(rng);
    Roi moved{roi.x_min + shift, roi.y_min + shift, roi.x_max + shift, roi.y_max + shift};
    CHECK(roi_is_feasible(roi) == roi_is_feasible(moved));
  }
}

TEST_CASE("crop copies the rect") {
  Frame f(8, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 8; ++x) f.at(x, y) = static_cast<uint8_t>(y * 8 + x);

  SUBCASE("full frame crop is identical") {
    Frame c = crop(f, {0, 0, 8, 6});
    CHECK(c.pixels == f.pixels);
  }
  SUBCASE("inner rect, per-pixel oracle") {
    Frame c = crop(f, {2, 1, 7, 4});
    REQUIRE(c.width == 5);
    REQUIRE(c.height == 3);
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 5; ++x) CHECK(c.at(x, y) == f.at(x + 2, y + 1));
  }
  SUBCASE("pixels are copied, not aliased") {
    Frame c = crop(f, {0, 0, 2, 2});
    f.at(0, 0) = 255;
    CHECK(c.at(0, 0) == 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS(crop(f, {0, 0, 9, 6}));
    CHECK_THROWS(crop(f, {3, 3, 3, 5}));  // empty
  }
}

namespace {

// exhaustive scan, independent of the implementation
std::optional<Roi> bbox_oracle(const SegmentationMap& seg) {
  int x0 = 1 << 20, y0 = 1 << 20, x1 = -1, y1 = -1;
  for (int y = 0; y < seg.height; ++y)
    for (int x = 0; x < seg.width; ++x)
      if (seg.at(x, y) != 0) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
  if (x1 < 0) return std::nullopt;
  return Roi{double(x0) / seg.width, double(y0) / seg.height, double(x1 + 1) / seg.width,
             double(y1 + 1) / seg.height};
}

}  // namespace

TEST_CASE("foreground_bbox") {
  SUBCASE("all background gives the empty sentinel") {
    CHECK_FALSE(foreground_bbox(SegmentationMap(10, 10)).has_value());
  }
  SUBCASE("single pupil pixel") {
    SegmentationMap seg(100, 100);
    seg.at(10, 20) = 3;
    auto roi = foreground_bbox(seg);
    REQUIRE(roi.has_value());
    CHECK(roi->x_min == doctest::Approx(0.10));
    CHECK(roi->y_min == doctest::Approx(0.20));
    CHECK(roi->x_max == doctest::Approx(0.11));
    CHECK(roi->y_max == doctest::Approx(0.21));
  }
  SUBCASE("full foreground") {
    SegmentationMap seg(16, 16, 1);
    auto roi = foreground_bbox(seg);
    REQUIRE(roi.has_value());
    CHECK(*roi == Roi{0, 0, 1, 1});
  }
  SUBCASE("matches the exhaustive oracle and is tight") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      SegmentationMap seg(24, 17);
      std::uniform_int_distribution<int> coord_x(0, 23), coord_y(0, 16), cls(1, 3);
      int n = 1 + static_cast<int>(rng() % 30);
      for (int i = 0; i < n; ++i) seg.at(coord_x(rng), coord_y(rng)) = static_cast<uint8_t>(cls(rng));
      auto roi = foreground_bbox(seg);
      auto want = bbox_oracle(seg);
      REQUIRE(roi.has_value());
      REQUIRE(want.has_value());
      CHECK(roi->x_min == doctest::Approx(want->x_min));
      CHECK(roi->y_min == doctest::Approx(want->y_min));
      CHECK(roi->x_max == doctest::Approx(want->x_max));
      CHECK(roi->y_max == doctest::Approx(want->y_max));

      // tightness: shrinking any edge by one pixel loses a foreground pixel
      PixelRect r = roi_to_pixels(*roi, seg.width, seg.height);
      auto contains_all = [&](PixelRect q) {
        for (int y = 0; y < seg.height; ++y)
          for (int x = 0; x < seg.width; ++x)
            if (seg.at(x, y) != 0 && (x < q.x0 || x >= q.x1 || y < q.y0 || y >= q.y1)) return false;
        return true;
      };
      CHECK(contains_all(r));
      CHECK_FALSE(contains_all({r.x0 + 1, r.y0, r.x1, r.y1}));
      CHECK_FALSE(contains_all({r.x0, r.y0 + 1, r.x1, r.y1}));
      CHECK_FALSE(contains_all({r.x0, r.y0, r.x1 - 1, r.y1}));
      CHECK_FALSE(contains_all({r.x0, r.y0, r.x1, r.y1 - 1}));
    }
  }
}

TEST_CASE("pgm round trips") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "edar_pgm_test";
  fs::create_directories(dir);

  std::mt19937_64 rng(5);
  Frame f(33, 21);
  for (auto& p : f.pixels) p = static_cast<uint8_t>(rng());
  write_pgm(f, (dir / "f.pgm").string());
  Frame f2 = read_pgm((dir / "f.pgm").string());
  CHECK(f2.width == f.width);
  CHECK(f2.height == f.height);
  CHECK(f2.pixels == f.pixels);

  SegmentationMap seg(12, 9);
  for (auto& c : seg.classes) c = static_cast<uint8_t>(rng() % 4);
  write_seg_pgm(seg, (dir / "s.pgm").string());
  CHECK(read_seg_pgm((dir / "s.pgm").string()) == seg);

  BinaryMap b(12, 9);
  for (auto& v : b.bits) v = static_cast<uint8_t>(rng() % 2);
  write_binary_pgm(b, (dir / "b.pgm").string());
  CHECK(read_binary_pgm((dir / "b.pgm").string()).bits == b.bits);

  fs::remove_all(dir);
}

TEST_CASE("roi_iou") {
  CHECK(roi_iou({0, 0, 1, 1}, {0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(roi_iou({0, 0, 0.5, 1}, {0.5, 0, 1, 1}) == doctest::Approx(0.0));
  CHECK(roi_iou({0, 0, 0.5, 0.5}, {0.25, 0, 0.75, 0.5}) == doctest::Approx(0.25 / 0.75));
}
