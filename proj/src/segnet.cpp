#include "edar/segnet.hpp"

#include <stdexcept>
#include <string>

namespace edar {

SegnetWidths segnet_widths(SegVariant variant) {
  // Budget-anchored tables. The depthwise stages are the wide ones; block
  // outputs run at half these values.
  if (variant == SegVariant::L) return {{24, 32, 48, 80, 144}, {112, 64, 40, 24}};
  return {{16, 24, 32, 48, 72}, {72, 48, 24, 16}};
}

namespace {

// 1x1 conv -> lrelu -> 3x3 dws -> lrelu -> 1x1 conv, plus an additive skip
// from the block input (projected by 1x1 when widths differ). Returns the
// output node; output width is dws_width/2.
int add_block(LayerGraph& g, int in, int in_ch, int dws_width, const std::string& name) {
  int out_ch = dws_width / 2;
  int x = g.add_conv(in, in_ch, dws_width, 1, name + ".conv_in");
  x = g.add_leaky_relu(x);
  x = g.add_dwsconv(x, dws_width, name + ".dws");
  x = g.add_leaky_relu(x);
  x = g.add_conv(x, dws_width, out_ch, 1, name + ".conv_out");
  int skip = in_ch == out_ch ? in : g.add_conv(in, in_ch, out_ch, 1, name + ".skip");
  return g.add_add_skip(x, skip);
}

}  // namespace

LayerGraph build_segnet(SegVariant variant) {
  const SegnetWidths w = segnet_widths(variant);
  LayerGraph g;
  g.name = variant == SegVariant::L ? "segnet-l-v1" : "segnet-s-v1";

  int x = g.add_input();  // (N, 1, H, W), H and W multiples of 16
  int ch = 1;
  std::array<int, 5> enc_nodes{};
  std::array<int, 5> enc_ch{};
  for (int i = 0; i < 5; ++i) {
    if (i > 0) x = g.add_maxpool2(x);
    x = add_block(g, x, ch, w.down[static_cast<size_t>(i)], "down" + std::to_string(i + 1));
    ch = w.down[static_cast<size_t>(i)] / 2;
    enc_nodes[static_cast<size_t>(i)] = x;
    enc_ch[static_cast<size_t>(i)] = ch;
  }
  for (int j = 0; j < 4; ++j) {
    x = g.add_upsample2(x);
    x = g.add_concat_channels(x, enc_nodes[static_cast<size_t>(3 - j)]);
    ch += enc_ch[static_cast<size_t>(3 - j)];
    x = add_block(g, x, ch, w.up[static_cast<size_t>(j)], "up" + std::to_string(j + 1));
    ch = w.up[static_cast<size_t>(j)] / 2;
  }
  int logits = g.add_conv(x, ch, SegmentationMap::kNumClasses, 1, "head");
  int out = g.add_softmax_channels(logits);
  g.set_output(out);
  g.meta["logits_node"] = {static_cast<double>(logits)};
  return g;
}

int segnet_logits_node(const LayerGraph& net) {
  auto it = net.meta.find("logits_node");
  if (it == net.meta.end() || it->second.empty())
    throw std::runtime_error("segnet: missing logits_node metadata");
  return static_cast<int>(it->second[0]);
}

SegmentationMap segment(LayerGraph& net, const Frame& frame) {
  if (frame.width % 16 != 0 || frame.height % 16 != 0)
    throw std::invalid_argument("segment: frame dims must be multiples of 16");
  Tensor in({1, 1, frame.height, frame.width});
  for (size_t i = 0; i < frame.pixels.size(); ++i) in.data[i] = frame.pixels[i] / 255.0;
  const Tensor& probs = net.forward({in});

  SegmentationMap seg(frame.width, frame.height);
  const size_t plane = frame.pixels.size();
  for (size_t p = 0; p < plane; ++p) {
    int best = 0;
    double best_v = probs.data[p];
    for (int c = 1; c < SegmentationMap::kNumClasses; ++c) {
      double v = probs.data[c * plane + p];
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    seg.classes[p] = static_cast<uint8_t>(best);
  }
  return seg;
}

SegmentationMap segment_padded(LayerGraph& net, const Frame& frame, int multiple) {
  int pw = (frame.width + multiple - 1) / multiple * multiple;
  int ph = (frame.height + multiple - 1) / multiple * multiple;
  if (pw == frame.width && ph == frame.height) return segment(net, frame);
  Frame padded(pw, ph, 0, frame.timestamp_index);
  for (int y = 0; y < frame.height; ++y)
    std::copy_n(&frame.pixels[static_cast<size_t>(y) * frame.width], frame.width,
                &padded.pixels[static_cast<size_t>(y) * pw]);
  SegmentationMap full = segment(net, padded);
  return crop(full, PixelRect{0, 0, frame.width, frame.height});
}

}  // namespace edar
