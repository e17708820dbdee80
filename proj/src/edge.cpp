#include "edar/edge.hpp"

#include <cmath>
#include <stdexcept>

#include "edar/parallel.hpp"

namespace edar {

namespace {

// 5x5 Gaussian blur with clamped borders.
std::vector<double> gaussian_blur(const std::vector<double>& img, int w, int h, double sigma) {
  double k[5];
  double sum = 0;
  for (int i = -2; i <= 2; ++i) {
    k[i + 2] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + 2];
  }
  for (double& v : k) v /= sum;

  std::vector<double> tmp(img.size()), out(img.size());
  auto cx = [&](int x) { return x < 0 ? 0 : (x >= w ? w - 1 : x); };
  auto cy = [&](int y) { return y < 0 ? 0 : (y >= h ? h - 1 : y); };
  parallel_for(h, [&](long long y) {
    for (int x = 0; x < w; ++x) {
      double v = 0;
      for (int i = -2; i <= 2; ++i) v += k[i + 2] * img[static_cast<size_t>(y) * w + cx(x + i)];
      tmp[static_cast<size_t>(y) * w + x] = v;
    }
  });
  parallel_for(h, [&](long long y) {
    for (int x = 0; x < w; ++x) {
      double v = 0;
      for (int i = -2; i <= 2; ++i) v += k[i + 2] * tmp[static_cast<size_t>(cy(static_cast<int>(y) + i)) * w + x];
      out[static_cast<size_t>(y) * w + x] = v;
    }
  });
  return out;
}

}  // namespace

BinaryMap canny(const std::vector<double>& image, int width, int height, const CannyParams& params) {
  if (width <= 2 || height <= 2) throw std::invalid_argument("canny: degenerate dims");
  if (image.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("canny: image size mismatch");
  if (!(params.high >= params.low && params.low > 0))
    throw std::invalid_argument("canny: need high >= low > 0");

  std::vector<double> blurred = gaussian_blur(image, width, height, params.blur_sigma);

  std::vector<double> mag(image.size(), 0.0);
  std::vector<uint8_t> dir(image.size(), 0);  // quantized: 0=E/W, 1=NE/SW, 2=N/S, 3=NW/SE
  auto idx = [&](int x, int y) { return static_cast<size_t>(y) * width + x; };
  parallel_for(height - 2, [&](long long yy) {
    int y = static_cast<int>(yy) + 1;
    for (int x = 1; x < width - 1; ++x) {
      double gx = blurred[idx(x + 1, y - 1)] - blurred[idx(x - 1, y - 1)] +
                  2 * (blurred[idx(x + 1, y)] - blurred[idx(x - 1, y)]) +
                  blurred[idx(x + 1, y + 1)] - blurred[idx(x - 1, y + 1)];
      double gy = blurred[idx(x - 1, y + 1)] - blurred[idx(x - 1, y - 1)] +
                  2 * (blurred[idx(x, y + 1)] - blurred[idx(x, y - 1)]) +
                  blurred[idx(x + 1, y + 1)] - blurred[idx(x + 1, y - 1)];
      mag[idx(x, y)] = std::sqrt(gx * gx + gy * gy);
      double angle = std::atan2(gy, gx);  // [-pi, pi]
      if (angle < 0) angle += M_PI;       // fold: direction is sign-insensitive
      int bin = static_cast<int>(std::floor((angle + M_PI / 8) / (M_PI / 4))) % 4;
      dir[idx(x, y)] = static_cast<uint8_t>(bin);
    }
  });

  // Non-maximum suppression along the quantized gradient direction. The
  // asymmetric tie rule (> forward, >= backward) keeps exactly one pixel of a
  // two-pixel plateau.
  static const int off[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  std::vector<uint8_t> nms(image.size(), 0);
  parallel_for(height - 2, [&](long long yy) {
    int y = static_cast<int>(yy) + 1;
    for (int x = 1; x < width - 1; ++x) {
      double m = mag[idx(x, y)];
      if (m <= params.low) continue;
      int dx = off[dir[idx(x, y)]][0], dy = off[dir[idx(x, y)]][1];
      double fwd = mag[idx(x + dx, y + dy)];
      double bwd = mag[idx(x - dx, y - dy)];
      if (m > fwd && m >= bwd) nms[idx(x, y)] = 1;
    }
  });

  // Hysteresis: seed at strong pixels, grow through weak NMS survivors.
  BinaryMap out(width, height);
  std::vector<size_t> stack;
  for (int y = 1; y < height - 1; ++y) {
    for (int x = 1; x < width - 1; ++x) {
      size_t i = idx(x, y);
      if (nms[i] && mag[i] > params.high && !out.bits[i]) {
        out.bits[i] = 1;
        stack.push_back(i);
        while (!stack.empty()) {
          size_t j = stack.back();
          stack.pop_back();
          int jx = static_cast<int>(j % width), jy = static_cast<int>(j / width);
          for (int ny = jy - 1; ny <= jy + 1; ++ny) {
            for (int nx = jx - 1; nx <= jx + 1; ++nx) {
              if (nx < 1 || ny < 1 || nx >= width - 1 || ny >= height - 1) continue;
              size_t n = idx(nx, ny);
              if (nms[n] && !out.bits[n] && mag[n] > params.low) {
                out.bits[n] = 1;
                stack.push_back(n);
              }
            }
          }
        }
      }
    }
  }
  return out;
}

BinaryMap seg_edge_map(const SegmentationMap& seg) {
  std::vector<double> img(seg.classes.size());
  for (size_t i = 0; i < seg.classes.size(); ++i) img[i] = seg.classes[i] * 85.0;
  return canny(img, seg.width, seg.height);
}

}  // namespace edar
