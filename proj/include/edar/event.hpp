#pragma once

#include "edar/image.hpp"

namespace edar {

// Emulated event camera output: a pixel fires when its normalized intensity
// change between consecutive frames exceeds sigma. The difference is divided
// by the previous pixel value (guarded below epsilon_div), which mimics the
// log-scale differencing a real event camera performs.
BinaryMap event_map(const Frame& prev, const Frame& curr, double sigma, double epsilon_div = 1.0);

// Fraction of 1-bits inside rect. Throws on zero-area or out-of-bounds rect.
double event_density(const BinaryMap& events, const PixelRect& rect);

// 2x2 OR pooling to ceil(w/2) x ceil(h/2); a sparse event survives
// downsampling as long as its block does.
BinaryMap downsample_by_2(const BinaryMap& map);

}  // namespace edar
