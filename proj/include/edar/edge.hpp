#pragma once

#include <vector>

#include "edar/image.hpp"

namespace edar {

struct CannyParams {
  double low = 20.0;        // hysteresis thresholds on the Sobel magnitude scale
  double high = 60.0;
  double blur_sigma = 1.0;  // Gaussian blur, 5x5 kernel
};

// Classic Canny: Gaussian blur, Sobel gradients, non-maximum suppression with
// the gradient direction quantized to 4 bins, then hysteresis growing from
// high-threshold seeds through low-threshold neighbors (8-connected). Border
// pixels never emit edges. Input is a row-major real image.
BinaryMap canny(const std::vector<double>& image, int width, int height, const CannyParams& params = {});

// Edge-map feedback cue: class IDs mapped to intensities {0,85,170,255}, then
// canny with the defaults above. Class steps are at least 85 intensity units
// apart, so the thresholds fire exactly on class boundaries.
BinaryMap seg_edge_map(const SegmentationMap& seg);

}  // namespace edar
