#include "edar/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace edar {

Frame::Frame(int w, int h, uint8_t fill, int64_t t)
    : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill), timestamp_index(t) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("Frame: dims must be positive");
}

BinaryMap::BinaryMap(int w, int h, bool ds)
    : width(w), height(h), bits(static_cast<size_t>(w) * h, 0), downsampled(ds) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("BinaryMap: dims must be positive");
}

size_t BinaryMap::count_ones() const {
  size_t n = 0;
  for (uint8_t b : bits) n += b;
  return n;
}

SegmentationMap::SegmentationMap(int w, int h, uint8_t fill)
    : width(w), height(h), classes(static_cast<size_t>(w) * h, fill) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("SegmentationMap: dims must be positive");
}

bool roi_is_feasible(const Roi& roi) {
  return std::isfinite(roi.x_min) && std::isfinite(roi.y_min) && std::isfinite(roi.x_max) &&
         std::isfinite(roi.y_max) && roi.x_min <= roi.x_max && roi.y_min <= roi.y_max;
}

Roi roi_clamped(const Roi& roi) {
  auto cl = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return Roi{cl(roi.x_min), cl(roi.y_min), cl(roi.x_max), cl(roi.y_max)};
}

PixelRect roi_to_pixels(const Roi& roi, int width, int height) {
  PixelRect r;
  r.x0 = std::clamp(static_cast<int>(std::floor(roi.x_min * width)), 0, width);
  r.y0 = std::clamp(static_cast<int>(std::floor(roi.y_min * height)), 0, height);
  r.x1 = std::clamp(static_cast<int>(std::ceil(roi.x_max * width)), 0, width);
  r.y1 = std::clamp(static_cast<int>(std::ceil(roi.y_max * height)), 0, height);
  if (r.x1 < r.x0) r.x1 = r.x0;
  if (r.y1 < r.y0) r.y1 = r.y0;
  return r;
}

Roi rect_to_roi(const PixelRect& rect, int width, int height) {
  return Roi{static_cast<double>(rect.x0) / width, static_cast<double>(rect.y0) / height,
             static_cast<double>(rect.x1) / width, static_cast<double>(rect.y1) / height};
}

static void check_rect(int w, int h, const PixelRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > w || rect.y1 > h)
    throw std::invalid_argument("crop: rect out of bounds");
  if (rect.width() <= 0 || rect.height() <= 0) throw std::invalid_argument("crop: empty rect");
}

Frame crop(const Frame& frame, const PixelRect& rect) {
  check_rect(frame.width, frame.height, rect);
  Frame out(rect.width(), rect.height(), 0, frame.timestamp_index);
  for (int y = 0; y < out.height; ++y)
    std::memcpy(&out.pixels[static_cast<size_t>(y) * out.width],
                &frame.pixels[static_cast<size_t>(y + rect.y0) * frame.width + rect.x0],
                static_cast<size_t>(out.width));
  return out;
}

SegmentationMap crop(const SegmentationMap& seg, const PixelRect& rect) {
  check_rect(seg.width, seg.height, rect);
  SegmentationMap out(rect.width(), rect.height());
  for (int y = 0; y < out.height; ++y)
    std::memcpy(&out.classes[static_cast<size_t>(y) * out.width],
                &seg.classes[static_cast<size_t>(y + rect.y0) * seg.width + rect.x0],
                static_cast<size_t>(out.width));
  return out;
}

std::optional<Roi> foreground_bbox(const SegmentationMap& seg) {
  int x0 = seg.width, y0 = seg.height, x1 = -1, y1 = -1;
  for (int y = 0; y < seg.height; ++y) {
    const uint8_t* row = &seg.classes[static_cast<size_t>(y) * seg.width];
    for (int x = 0; x < seg.width; ++x) {
      if (row[x] != 0) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) return std::nullopt;
  // +1: the box covers the last foreground pixel, half-open in pixel space
  return rect_to_roi(PixelRect{x0, y0, x1 + 1, y1 + 1}, seg.width, seg.height);
}

double roi_iou(const Roi& a, const Roi& b) {
  double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  double inter = ix * iy;
  double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  double area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min);
  double uni = area_a + area_b - inter;
  if (uni <= 0) return 0.0;
  return inter / uni;
}

// --- PGM --------------------------------------------------------------------

static void skip_pgm_whitespace(std::istream& in) {
  int c = in.peek();
  while (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#') {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      in.get();
    }
    c = in.peek();
  }
}

Frame read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("read_pgm: not a binary PGM: " + path);
  int w = 0, h = 0, maxval = 0;
  skip_pgm_whitespace(in);
  in >> w;
  skip_pgm_whitespace(in);
  in >> h;
  skip_pgm_whitespace(in);
  in >> maxval;
  if (!in || w <= 0 || h <= 0) throw std::runtime_error("read_pgm: bad header in " + path);
  if (maxval != 255) throw std::runtime_error("read_pgm: only maxval 255 supported: " + path);
  in.get();  // single whitespace after maxval
  Frame frame(w, h);
  in.read(reinterpret_cast<char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size()))
    throw std::runtime_error("read_pgm: truncated file " + path);
  return frame;
}

void write_pgm(const Frame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw std::runtime_error("write_pgm: write failed " + path);
}

SegmentationMap read_seg_pgm(const std::string& path) {
  Frame f = read_pgm(path);
  SegmentationMap seg(f.width, f.height);
  for (size_t i = 0; i < f.pixels.size(); ++i) {
    uint8_t v = f.pixels[i];
    if (v % 85 != 0) throw std::runtime_error("read_seg_pgm: invalid class intensity in " + path);
    seg.classes[i] = v / 85;
  }
  return seg;
}

void write_seg_pgm(const SegmentationMap& seg, const std::string& path) {
  Frame f(seg.width, seg.height);
  for (size_t i = 0; i < seg.classes.size(); ++i) f.pixels[i] = static_cast<uint8_t>(seg.classes[i] * 85);
  write_pgm(f, path);
}

BinaryMap read_binary_pgm(const std::string& path) {
  Frame f = read_pgm(path);
  BinaryMap map(f.width, f.height);
  for (size_t i = 0; i < f.pixels.size(); ++i) {
    if (f.pixels[i] != 0 && f.pixels[i] != 255)
      throw std::runtime_error("read_binary_pgm: non-binary intensity in " + path);
    map.bits[i] = f.pixels[i] ? 1 : 0;
  }
  return map;
}

void write_binary_pgm(const BinaryMap& map, const std::string& path) {
  Frame f(map.width, map.height);
  for (size_t i = 0; i < map.bits.size(); ++i) f.pixels[i] = map.bits[i] ? 255 : 0;
  write_pgm(f, path);
}

}  // namespace edar
