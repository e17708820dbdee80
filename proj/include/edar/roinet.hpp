#pragma once

#include "edar/graph.hpp"
#include "edar/image.hpp"

namespace edar {

// How a frame gets processed, decided per frame from the ROI prediction.
enum class Mode { Extrapolate, RoiSegment, FullResolution };

std::string to_string(Mode mode);

struct RoiPrediction {
  Roi roi;                    // raw network output, unclamped
  bool extrapolate = false;   // event density below gamma
  bool feasible = false;      // coordinate ordering holds
  double event_density = 0.0; // over the predicted ROI, full-resolution map
};

struct RoinetChannels {
  int c1 = 8, c2 = 16, c3 = 16;
  int fc_hidden = 64;
};

// Fig-style ROI predictor: two half-resolution binary maps stacked as a
// 2-channel input, three Conv3x3+MaxPool stages, then the flattened features
// concatenated with the previous ROI (1x4) through two FC layers onto a
// sigmoid head. input_w/input_h are the half-resolution map dims; the FC
// flatten binds the graph to that resolution.
LayerGraph build_roinet(int input_w, int input_h, const RoinetChannels& channels = {});

// Dims the network was built for (from graph meta), as {w, h}.
std::pair<int, int> roinet_input_dims(const LayerGraph& net);

// Raw forward pass: maps are fed as {0.0, 1.0} values. Throws when map dims
// disagree with each other or with the trained resolution.
Roi roinet_forward(LayerGraph& net, const BinaryMap& events_ds, const BinaryMap& edges_ds,
                   const Roi& prev_roi);

// Full prediction: network output, feasibility, and the extrapolation
// decision from the event density inside the predicted ROI measured on the
// full-resolution event map. A degenerate (zero-area) predicted box has
// density 0.
RoiPrediction predict_roi(LayerGraph& net, const BinaryMap& events_ds, const BinaryMap& edges_ds,
                          const Roi& prev_roi, const BinaryMap& events_full, double gamma);

Mode decide_mode(const RoiPrediction& pred, double gamma);

}  // namespace edar
