#include "edar/roinet.hpp"

#include <stdexcept>

#include "edar/event.hpp"

namespace edar {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Extrapolate: return "extrapolate";
    case Mode::RoiSegment: return "roi";
    case Mode::FullResolution: return "full";
  }
  return "?";
}

LayerGraph build_roinet(int input_w, int input_h, const RoinetChannels& ch) {
  if (input_w % 8 != 0 || input_h % 8 != 0)
    throw std::invalid_argument("build_roinet: input dims must be divisible by 8");
  if (ch.c1 <= 0 || ch.c2 <= 0 || ch.c3 <= 0 || ch.fc_hidden <= 0)
    throw std::invalid_argument("build_roinet: channel counts must be positive");

  LayerGraph g;
  g.name = "roinet-v1";
  g.meta["input_hw"] = {static_cast<double>(input_h), static_cast<double>(input_w)};
  g.meta["channels"] = {static_cast<double>(ch.c1), static_cast<double>(ch.c2),
                        static_cast<double>(ch.c3), static_cast<double>(ch.fc_hidden)};

  int maps = g.add_input();     // (N, 2, h, w) event map + edge map
  int prev_roi = g.add_input(); // (N, 4)

  int x = g.add_conv(maps, 2, ch.c1, 3, "conv1");
  x = g.add_leaky_relu(x);
  x = g.add_maxpool2(x);
  x = g.add_conv(x, ch.c1, ch.c2, 3, "conv2");
  x = g.add_leaky_relu(x);
  x = g.add_maxpool2(x);
  x = g.add_conv(x, ch.c2, ch.c3, 3, "conv3");
  x = g.add_leaky_relu(x);
  x = g.add_maxpool2(x);
  x = g.add_flatten(x);

  int feat = ch.c3 * (input_w / 8) * (input_h / 8);
  x = g.add_concat_vector(x, prev_roi);
  x = g.add_fc(x, feat + 4, ch.fc_hidden, "fc1");
  x = g.add_leaky_relu(x);
  x = g.add_fc(x, ch.fc_hidden, 4, "fc2");
  x = g.add_sigmoid(x);
  g.set_output(x);
  return g;
}

std::pair<int, int> roinet_input_dims(const LayerGraph& net) {
  auto it = net.meta.find("input_hw");
  if (it == net.meta.end() || it->second.size() != 2)
    throw std::runtime_error("roinet: missing input_hw metadata");
  return {static_cast<int>(it->second[1]), static_cast<int>(it->second[0])};
}

static Tensor maps_tensor(const BinaryMap& events_ds, const BinaryMap& edges_ds) {
  Tensor t({1, 2, events_ds.height, events_ds.width});
  for (size_t i = 0; i < events_ds.bits.size(); ++i) t.data[i] = events_ds.bits[i];
  for (size_t i = 0; i < edges_ds.bits.size(); ++i) t.data[events_ds.bits.size() + i] = edges_ds.bits[i];
  return t;
}

Roi roinet_forward(LayerGraph& net, const BinaryMap& events_ds, const BinaryMap& edges_ds,
                   const Roi& prev_roi) {
  if (events_ds.width != edges_ds.width || events_ds.height != edges_ds.height)
    throw std::invalid_argument("roinet: event and edge map dims mismatch");
  auto [w, h] = roinet_input_dims(net);
  if (events_ds.width != w || events_ds.height != h)
    throw std::invalid_argument("roinet: maps are " + std::to_string(events_ds.width) + "x" +
                                std::to_string(events_ds.height) + " but the network was trained for " +
                                std::to_string(w) + "x" + std::to_string(h));
  Tensor roi_t({1, 4}, {prev_roi.x_min, prev_roi.y_min, prev_roi.x_max, prev_roi.y_max});
  const Tensor& out = net.forward({maps_tensor(events_ds, edges_ds), roi_t});
  return Roi{out.data[0], out.data[1], out.data[2], out.data[3]};
}

RoiPrediction predict_roi(LayerGraph& net, const BinaryMap& events_ds, const BinaryMap& edges_ds,
                          const Roi& prev_roi, const BinaryMap& events_full, double gamma) {
  RoiPrediction pred;
  pred.roi = roinet_forward(net, events_ds, edges_ds, prev_roi);
  pred.feasible = roi_is_feasible(pred.roi);
  if (pred.feasible) {
    PixelRect rect = roi_to_pixels(roi_clamped(pred.roi), events_full.width, events_full.height);
    pred.event_density = rect.area() > 0 ? event_density(events_full, rect) : 0.0;
    pred.extrapolate = pred.event_density < gamma;
  }
  return pred;
}

Mode decide_mode(const RoiPrediction& pred, double gamma) {
  if (!pred.feasible) return Mode::FullResolution;
  if (pred.event_density < gamma) return Mode::Extrapolate;
  return Mode::RoiSegment;
}

}  // namespace edar
