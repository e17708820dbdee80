#pragma once

#include <array>
#include <string>

namespace edar {

// The four pipeline components of the in-sensor mapping study, plus two
// pinned endpoints: the pixel array (always in the sensor) and gaze
// estimation (always on the processor).
enum class Component { EvMapGen = 0, EdMapGen = 1, PredNet = 2, SegNet = 3 };
enum class Chip { Sensor, Processor };

constexpr int kNumComponents = 4;

std::string to_string(Component c);

struct ComponentCost {
  double flops = 0;
  double output_bytes = 0;  // per steady-state frame
};

// Published per-frame costs for a 640x400 grayscale input. Event and edge
// maps are the half-resolution bitmaps (1 bit/px); the prediction network's
// listed output is the average ROI image payload at the default fractions
// (one third of full resolution, half the frames extrapolated); the
// segmentation map is 2 bits/px.
struct ComponentCosts {
  std::array<ComponentCost, kNumComponents> components{{
      {0.3e6, 8000.0},        // EvMapGen
      {1.9e6, 8000.0},        // EdMapGen
      {55.4e6, 256000.0 / 6}, // PredNet (default-fraction ROI payload, ~41.7 KB)
      {2641.6e6, 64000.0},    // SegNet
  }};
  double full_res_bytes = 256000.0;  // 250 KB

  const ComponentCost& at(Component c) const { return components[static_cast<size_t>(c)]; }
};

struct MappingScenario {
  std::array<Chip, kNumComponents> placement{Chip::Processor, Chip::Processor, Chip::Processor,
                                             Chip::Processor};
  double sensor_node = 7.0;     // nm
  double processor_node = 7.0;  // nm
  double roi_fraction = 1.0 / 3.0;
  double extrapolated_fraction = 0.5;
  double tx_ratio = 800.0;  // energy per transmitted byte over energy per FLOP

  Chip chip(Component c) const { return placement[static_cast<size_t>(c)]; }
};

// The three named mappings: 'a' all-processor, 'b' the whole ROI prediction
// stack in the sensor, 'c' events+prediction in the sensor with edge map and
// segmentation on the processor.
MappingScenario make_mode_scenario(char mode);

struct EnergyBreakdown {
  double compute_energy = 0;
  double transmission_energy = 0;
  double total = 0;
  double sensor_to_processor_bytes = 0;
  double processor_to_sensor_bytes = 0;
};

// Normalized-unit model: energy per FLOP at node n is (n/7)^2, energy per
// transmitted byte is tx_ratio. Cross-chip dataflow edges are charged at the
// producer's output size; a producer crossing once serves all its consumers
// on the other chip. The ROI image payload from the pixel array to the
// segmentation network scales with roi_fraction and extrapolated_fraction.
EnergyBreakdown scenario_energy(const MappingScenario& scenario, const ComponentCosts& costs);

// Exhaustive search over the 2^4 placements at the given nodes/fractions;
// ties resolve toward fewer in-sensor components (all-processor first).
MappingScenario optimal_mapping(const ComponentCosts& costs, double sensor_node, double processor_node,
                                double roi_fraction = 1.0 / 3.0, double extrapolated_fraction = 0.5,
                                double tx_ratio = 800.0);

}  // namespace edar
