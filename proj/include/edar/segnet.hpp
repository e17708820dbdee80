#pragma once

#include <array>

#include "edar/config.hpp"
#include "edar/graph.hpp"
#include "edar/image.hpp"

namespace edar {

// Channel widths of the depthwise stages; the 1x1 stages that bound each
// block run at half these widths. Chosen to land on the published parameter
// and FLOP budgets of the two variants.
struct SegnetWidths {
  std::array<int, 5> down;
  std::array<int, 4> up;
};

SegnetWidths segnet_widths(SegVariant variant);

// U-Net-style segmentation network: five downsampling blocks (blocks 2-5
// start with a MaxPool) and four upsampling blocks with encoder skip
// concatenation. Each block interleaves 1x1 convs with a wide 3x3 depthwise
// conv and carries an additive projection skip. Head is a 1x1 conv to the 4
// classes followed by a per-pixel channel softmax.
LayerGraph build_segnet(SegVariant variant);

// Node holding the pre-softmax class scores, for loss computation.
int segnet_logits_node(const LayerGraph& net);

// Per-pixel argmax over the class channels. Input pixels are scaled to [0,1].
// Frame dims must be multiples of 16 (callers pad); ties break to the lowest
// class index.
SegmentationMap segment(LayerGraph& net, const Frame& frame);

// segment() on a frame zero-padded at the right/bottom to `multiple`, result
// cut back to the original dims.
SegmentationMap segment_padded(LayerGraph& net, const Frame& frame, int multiple = 16);

}  // namespace edar
