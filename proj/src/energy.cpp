#include "edar/energy.hpp"

#include <stdexcept>

namespace edar {

std::string to_string(Component c) {
  switch (c) {
    case Component::EvMapGen: return "EvMapGen";
    case Component::EdMapGen: return "EdMapGen";
    case Component::PredNet: return "PredNet";
    case Component::SegNet: return "SegNet";
  }
  return "?";
}

MappingScenario make_mode_scenario(char mode) {
  MappingScenario s;
  switch (mode) {
    case 'a':
      break;  // all processor
    case 'b':
      s.placement[static_cast<size_t>(Component::EvMapGen)] = Chip::Sensor;
      s.placement[static_cast<size_t>(Component::EdMapGen)] = Chip::Sensor;
      s.placement[static_cast<size_t>(Component::PredNet)] = Chip::Sensor;
      break;
    case 'c':
      s.placement[static_cast<size_t>(Component::EvMapGen)] = Chip::Sensor;
      s.placement[static_cast<size_t>(Component::PredNet)] = Chip::Sensor;
      break;
    default:
      throw std::invalid_argument("make_mode_scenario: mode must be a, b or c");
  }
  return s;
}

EnergyBreakdown scenario_energy(const MappingScenario& s, const ComponentCosts& costs) {
  if (!(s.sensor_node > 0 && s.processor_node > 0))
    throw std::invalid_argument("scenario_energy: nodes must be positive");
  if (!(s.roi_fraction >= 0 && s.roi_fraction <= 1 && s.extrapolated_fraction >= 0 &&
        s.extrapolated_fraction <= 1))
    throw std::invalid_argument("scenario_energy: fractions must be in [0,1]");
  if (s.tx_ratio < 0) throw std::invalid_argument("scenario_energy: tx_ratio must be non-negative");

  auto node_unit = [&](Chip chip) {
    const double n = chip == Chip::Sensor ? s.sensor_node : s.processor_node;
    return (n / 7.0) * (n / 7.0);
  };

  EnergyBreakdown out;
  for (int i = 0; i < kNumComponents; ++i) {
    const Component c = static_cast<Component>(i);
    out.compute_energy += costs.at(c).flops * node_unit(s.chip(c));
  }

  // Steady-state dataflow. Producers: the pixel array (pinned to the sensor)
  // and the four components; gaze estimation is a pinned processor-side sink.
  // A producer is charged once per direction, at the largest payload any
  // cross-chip consumer needs (the ROI image is a subset of the full image,
  // so a full-image transfer also covers the crop).
  const double roi_image_bytes = costs.full_res_bytes * s.roi_fraction * (1.0 - s.extrapolated_fraction);
  const Chip ev = s.chip(Component::EvMapGen), ed = s.chip(Component::EdMapGen);
  const Chip pred = s.chip(Component::PredNet), seg = s.chip(Component::SegNet);
  // The crop happens wherever the segmentation input materializes from the
  // pixel array: on the sensor (windowed readout) unless the full image is
  // transmitted anyway, in which case the processor crops its local copy. The
  // predicted coordinates (4 float32) must reach that chip.
  const Chip cropper = (seg == Chip::Sensor || ev == Chip::Sensor) ? Chip::Sensor : Chip::Processor;
  constexpr double kRoiCoordBytes = 16.0;
  struct Edge {
    Chip from;
    Chip to;
    double bytes;
    int producer;  // dedup key
  };
  const Edge edges[] = {
      {Chip::Sensor, ev, costs.full_res_bytes, 0},                       // pixels -> event map gen
      {Chip::Sensor, seg, roi_image_bytes, 0},                           // pixels -> segnet (ROI crop)
      {ev, pred, costs.at(Component::EvMapGen).output_bytes, 1},         // event map -> prednet
      {ed, pred, costs.at(Component::EdMapGen).output_bytes, 2},         // edge map -> prednet
      {seg, ed, costs.at(Component::SegNet).output_bytes, 3},            // seg map -> edge map gen
      {seg, Chip::Processor, costs.at(Component::SegNet).output_bytes, 3},  // seg map -> gaze estimation
      {pred, cropper, kRoiCoordBytes, 4},                                // roi coords -> crop site
  };
  double to_processor[5] = {0, 0, 0, 0, 0};
  double to_sensor[5] = {0, 0, 0, 0, 0};
  for (const Edge& e : edges) {
    if (e.from == e.to) continue;
    double& slot = e.to == Chip::Processor ? to_processor[e.producer] : to_sensor[e.producer];
    if (e.bytes > slot) slot = e.bytes;
  }
  for (int p = 0; p < 5; ++p) {
    out.sensor_to_processor_bytes += to_processor[p];
    out.processor_to_sensor_bytes += to_sensor[p];
  }
  out.transmission_energy =
      (out.sensor_to_processor_bytes + out.processor_to_sensor_bytes) * s.tx_ratio;
  out.total = out.compute_energy + out.transmission_energy;
  return out;
}

MappingScenario optimal_mapping(const ComponentCosts& costs, double sensor_node, double processor_node,
                                double roi_fraction, double extrapolated_fraction, double tx_ratio) {
  MappingScenario best;
  double best_total = 0;
  bool first = true;
  for (int mask = 0; mask < (1 << kNumComponents); ++mask) {
    MappingScenario s;
    s.sensor_node = sensor_node;
    s.processor_node = processor_node;
    s.roi_fraction = roi_fraction;
    s.extrapolated_fraction = extrapolated_fraction;
    s.tx_ratio = tx_ratio;
    for (int i = 0; i < kNumComponents; ++i)
      s.placement[static_cast<size_t>(i)] = (mask >> i) & 1 ? Chip::Sensor : Chip::Processor;
    const double total = scenario_energy(s, costs).total;
    if (first || total < best_total) {
      best = s;
      best_total = total;
      first = false;
    }
  }
  return best;
}

}  // namespace edar
