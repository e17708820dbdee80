#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edar {

// Integer pixel rectangle, half-open: [x0,x1) x [y0,y1). Origin top-left,
// x rightward, y downward.
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool operator==(const PixelRect&) const = default;
};

// 8-bit grayscale frame, row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;
  int64_t timestamp_index = 0;

  Frame() = default;
  Frame(int w, int h, uint8_t fill = 0, int64_t t = 0);

  uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  bool same_dims(const Frame& o) const { return width == o.width && height == o.height; }
};

// One byte per element, values restricted to {0,1}. Used for event maps and
// edge maps. `downsampled` marks half-resolution maps.
struct BinaryMap {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> bits;
  bool downsampled = false;

  BinaryMap() = default;
  BinaryMap(int w, int h, bool ds = false);

  uint8_t at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int x, int y) { return bits[static_cast<size_t>(y) * width + x]; }
  size_t count_ones() const;
};

// Per-pixel class IDs: 0 background, 1 sclera, 2 iris, 3 pupil.
struct SegmentationMap {
  static constexpr int kNumClasses = 4;

  int width = 0;
  int height = 0;
  std::vector<uint8_t> classes;

  SegmentationMap() = default;
  SegmentationMap(int w, int h, uint8_t fill = 0);

  uint8_t at(int x, int y) const { return classes[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int x, int y) { return classes[static_cast<size_t>(y) * width + x]; }
  bool operator==(const SegmentationMap&) const = default;
};

// Normalized bounding box, coordinates as fractions of image width/height.
// Deliberately not validated on construction: a raw network output may have
// x_min > x_max, and that violation is what triggers the full-resolution
// fallback.
struct Roi {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  bool operator==(const Roi&) const = default;
};

bool roi_is_feasible(const Roi& roi);

// Clamp all four coordinates to [0,1]. Does not reorder.
Roi roi_clamped(const Roi& roi);

// Denormalize to integer pixel bounds: floor on mins, ceil on maxes,
// clipped to the image.
PixelRect roi_to_pixels(const Roi& roi, int width, int height);

// Renormalize a pixel rect (inverse of roi_to_pixels up to rounding).
Roi rect_to_roi(const PixelRect& rect, int width, int height);

// Copy the rect out of the frame. Throws on out-of-bounds or empty rect.
Frame crop(const Frame& frame, const PixelRect& rect);
SegmentationMap crop(const SegmentationMap& seg, const PixelRect& rect);

// Tight normalized bbox of all pixels with class in {1,2,3}; nullopt when
// the map is all background.
std::optional<Roi> foreground_bbox(const SegmentationMap& seg);

double roi_iou(const Roi& a, const Roi& b);

// --- PGM (P5, maxval 255) serialization ------------------------------------

Frame read_pgm(const std::string& path);
void write_pgm(const Frame& frame, const std::string& path);

// Segmentation maps are stored as PGM with intensities {0,85,170,255}.
SegmentationMap read_seg_pgm(const std::string& path);
void write_seg_pgm(const SegmentationMap& seg, const std::string& path);

// Binary maps as PGM with intensities {0,255}.
BinaryMap read_binary_pgm(const std::string& path);
void write_binary_pgm(const BinaryMap& map, const std::string& path);

}  // namespace edar
