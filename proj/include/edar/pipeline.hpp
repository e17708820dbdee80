#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edar/config.hpp"
#include "edar/graph.hpp"
#include "edar/image.hpp"
#include "edar/roinet.hpp"
#include "edar/synth.hpp"

namespace edar {

// Temporal feedback carried between frames plus run counters. All feedback
// fields describe the same (latest processed) frame.
struct PipelineState {
  std::optional<Frame> prev_frame;
  std::optional<SegmentationMap> prev_seg;
  std::optional<Roi> prev_roi;    // absent after an all-background frame (blink recovery)
  std::optional<BinaryMap> prev_edge;

  long long frames = 0;
  long long mode_counts[3] = {0, 0, 0};  // indexed by Mode
  long long processed_pixels = 0;        // crop area / full area / 0 per mode

  // wall-clock seconds per stage, accumulated
  double time_event = 0, time_edge = 0, time_roinet = 0, time_segnet = 0, time_other = 0;
};

struct FrameResult {
  SegmentationMap seg;
  Roi trace_roi;   // raw prediction when one ran, else the fresh foreground bbox
  Mode mode = Mode::FullResolution;
  std::optional<RoiPrediction> prediction;
};

// One step of the per-frame state machine: frame 0 (and any frame without ROI
// feedback) runs full resolution; later frames build the event map, predict
// the ROI and either extrapolate, segment the crop, or fall back. roinet may
// be null to force full-resolution-only operation.
FrameResult process_frame(PipelineState& state, const Frame& frame, const PipelineConfig& config,
                          LayerGraph* roinet, LayerGraph& segnet);

struct SequenceMetrics {
  std::vector<double> per_frame_miou;
  double miou_mean = 0;
  double pupil_error_mean = 0;
  double pupil_error_std = 0;
  long long pupil_compared = 0;  // frames contributing to the error stats
  long long pupil_excluded = 0;  // empty-vs-present disagreements
};

SequenceMetrics compute_metrics(const std::vector<SegmentationMap>& pred,
                                const std::vector<SequenceFrame>& truth);

struct SequenceReport {
  long long frames = 0;
  long long mode_counts[3] = {0, 0, 0};
  long long processed_pixels = 0;
  long long full_res_pixels = 0;  // per frame, unpadded
  double processed_pixel_fraction = 0;
  double pixel_speedup_proxy = 0;
  double time_event = 0, time_edge = 0, time_roinet = 0, time_segnet = 0, time_other = 0;
  std::optional<SequenceMetrics> metrics;
};

struct SequenceResult {
  std::vector<FrameResult> outputs;
  SequenceReport report;
};

// Streams frames through process_frame. Ground truth, when given, fills
// report.metrics.
SequenceResult run_sequence(const std::vector<Frame>& frames, const PipelineConfig& config,
                            LayerGraph* roinet, LayerGraph& segnet,
                            const std::vector<SequenceFrame>* ground_truth = nullptr);

// Hardware-independent stand-in for wall-clock speedups: full-resolution
// pixel volume over pixels actually processed.
double pixel_speedup_proxy(const SequenceReport& report);

// report.json payload. Stage timings are deliberately left out so reports are
// byte-identical across runs; `include_per_frame` controls the per-frame mIoU
// array.
std::string report_to_json(const SequenceReport& report, const PipelineConfig& config,
                           bool include_per_frame = true);
std::string metrics_to_json(const SequenceMetrics& metrics, bool include_per_frame = true);

// Writes seg/NNNNN.pgm, roi_trace.csv and report.json under out_dir.
void write_run_outputs(const SequenceResult& result, const PipelineConfig& config,
                       const std::string& out_dir);

// Metrics of a finished run directory (seg/ + roi_trace.csv) against a
// ground-truth sequence directory; returns a JSON document whose "metrics"
// object matches the one embedded in the run's report.json.
std::string evaluate_run_dir(const std::string& run_dir, const std::string& truth_dir);

}  // namespace edar
