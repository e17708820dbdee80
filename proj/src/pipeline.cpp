#include "edar/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "edar/edge.hpp"
#include "edar/event.hpp"
#include "edar/pupil.hpp"
#include "edar/segnet.hpp"

namespace fs = std::filesystem;

namespace edar {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct StageTimer {
  double& sink;
  double start;
  explicit StageTimer(double& s) : sink(s), start(now_seconds()) {}
  ~StageTimer() { sink += now_seconds() - start; }
};

// Full-resolution segmentation plus feedback refresh from the fresh map.
SegmentationMap full_res_step(PipelineState& state, const Frame& frame, const PipelineConfig& config,
                              LayerGraph& segnet) {
  SegmentationMap seg;
  {
    StageTimer t(state.time_segnet);
    seg = segment_padded(segnet, frame, config.roi_pad_multiple);
  }
  {
    StageTimer t(state.time_edge);
    state.prev_edge = seg_edge_map(seg);
  }
  // reset the ROI feedback from the result, not from any prediction, so a bad
  // prediction cannot persist
  state.prev_roi = foreground_bbox(seg);
  state.processed_pixels += static_cast<long long>(frame.width) * frame.height;
  return seg;
}

}  // namespace

FrameResult process_frame(PipelineState& state, const Frame& frame, const PipelineConfig& config,
                          LayerGraph* roinet, LayerGraph& segnet) {
  config.validate();
  if (state.prev_frame && (state.prev_frame->width != frame.width || state.prev_frame->height != frame.height))
    throw std::invalid_argument("process_frame: frame dims changed mid-sequence");

  FrameResult result;
  const bool have_feedback = state.prev_seg && state.prev_roi && state.prev_edge && roinet != nullptr;
  if (!have_feedback) {
    // first frame, disabled predictor, or blink recovery (no usable prev ROI)
    result.mode = Mode::FullResolution;
    result.seg = full_res_step(state, frame, config, segnet);
    result.trace_roi = state.prev_roi.value_or(Roi{-1, -1, -1, -1});
  } else {
    BinaryMap events, events_ds, edges_ds;
    {
      StageTimer t(state.time_event);
      events = event_map(*state.prev_frame, frame, config.sigma, config.epsilon_div);
      events_ds = downsample_by_2(events);
      edges_ds = downsample_by_2(*state.prev_edge);
    }
    RoiPrediction pred;
    {
      StageTimer t(state.time_roinet);
      pred = predict_roi(*roinet, events_ds, edges_ds, *state.prev_roi, events, config.gamma);
    }
    result.prediction = pred;
    result.trace_roi = pred.roi;
    result.mode = decide_mode(pred, config.gamma);

    if (result.mode == Mode::RoiSegment) {
      const Roi clamped = roi_clamped(pred.roi);
      const PixelRect rect = roi_to_pixels(clamped, frame.width, frame.height);
      if (rect.area() == 0) {
        // a degenerate box cannot be segmented; treat like an infeasible one
        result.mode = Mode::FullResolution;
      } else {
        SegmentationMap canvas(frame.width, frame.height, 0);
        {
          StageTimer t(state.time_segnet);
          const Frame cropped = crop(frame, rect);
          const SegmentationMap seg_crop = segment_padded(segnet, cropped, config.roi_pad_multiple);
          for (int y = 0; y < seg_crop.height; ++y)
            for (int x = 0; x < seg_crop.width; ++x)
              canvas.at(rect.x0 + x, rect.y0 + y) = seg_crop.at(x, y);
        }
        result.seg = std::move(canvas);
        {
          StageTimer t(state.time_edge);
          state.prev_edge = seg_edge_map(result.seg);
        }
        state.prev_roi = clamped;
        state.processed_pixels += rect.area();
      }
    }
    if (result.mode == Mode::FullResolution) {
      result.seg = full_res_step(state, frame, config, segnet);
    } else if (result.mode == Mode::Extrapolate) {
      // reuse the previous segmentation result; edge feedback is unchanged by
      // construction, only the ROI feedback advances
      result.seg = *state.prev_seg;
      state.prev_roi = roi_clamped(pred.roi);
    }
  }

  state.mode_counts[static_cast<int>(result.mode)] += 1;
  state.frames += 1;
  state.prev_frame = frame;
  state.prev_seg = result.seg;
  return result;
}

SequenceMetrics compute_metrics(const std::vector<SegmentationMap>& pred,
                                const std::vector<SequenceFrame>& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("compute_metrics: prediction/truth length mismatch");
  SequenceMetrics m;
  double err_sum = 0, err_sq = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    m.per_frame_miou.push_back(miou(pred[i], truth[i].labels));
    const auto pc = pupil_center(pred[i]);
    const auto err = pupil_error(pc, truth[i].pupil);
    if (err) {
      err_sum += *err;
      err_sq += *err * *err;
      ++m.pupil_compared;
    } else {
      ++m.pupil_excluded;
    }
  }
  double miou_sum = 0;
  for (double v : m.per_frame_miou) miou_sum += v;
  m.miou_mean = m.per_frame_miou.empty() ? 0 : miou_sum / static_cast<double>(m.per_frame_miou.size());
  if (m.pupil_compared > 0) {
    m.pupil_error_mean = err_sum / static_cast<double>(m.pupil_compared);
    const double var = err_sq / static_cast<double>(m.pupil_compared) - m.pupil_error_mean * m.pupil_error_mean;
    m.pupil_error_std = std::sqrt(std::max(0.0, var));
  }
  return m;
}

SequenceResult run_sequence(const std::vector<Frame>& frames, const PipelineConfig& config,
                            LayerGraph* roinet, LayerGraph& segnet,
                            const std::vector<SequenceFrame>* ground_truth) {
  if (frames.empty()) throw std::invalid_argument("run_sequence: no frames");
  if (ground_truth && ground_truth->size() != frames.size())
    throw std::invalid_argument("run_sequence: ground truth length mismatch");

  SequenceResult result;
  PipelineState state;
  for (const Frame& f : frames) result.outputs.push_back(process_frame(state, f, config, roinet, segnet));

  SequenceReport& r = result.report;
  r.frames = state.frames;
  for (int i = 0; i < 3; ++i) r.mode_counts[i] = state.mode_counts[i];
  r.processed_pixels = state.processed_pixels;
  r.full_res_pixels = static_cast<long long>(frames[0].width) * frames[0].height;
  r.processed_pixel_fraction =
      static_cast<double>(r.processed_pixels) / (static_cast<double>(r.full_res_pixels) * static_cast<double>(r.frames));
  r.pixel_speedup_proxy = pixel_speedup_proxy(r);
  r.time_event = state.time_event;
  r.time_edge = state.time_edge;
  r.time_roinet = state.time_roinet;
  r.time_segnet = state.time_segnet;

  if (ground_truth) {
    std::vector<SegmentationMap> maps;
    maps.reserve(result.outputs.size());
    for (const FrameResult& fr : result.outputs) maps.push_back(fr.seg);
    r.metrics = compute_metrics(maps, *ground_truth);
  }
  return result;
}

double pixel_speedup_proxy(const SequenceReport& report) {
  if (report.processed_pixels <= 0) return 0.0;
  return static_cast<double>(report.full_res_pixels) * static_cast<double>(report.frames) /
         static_cast<double>(report.processed_pixels);
}

namespace {

nlohmann::json metrics_json(const SequenceMetrics& m, bool include_per_frame) {
  nlohmann::json j;
  j["miou_mean"] = m.miou_mean;
  if (include_per_frame) j["miou_per_frame"] = m.per_frame_miou;
  j["pupil_error_mean"] = m.pupil_error_mean;
  j["pupil_error_std"] = m.pupil_error_std;
  j["pupil_compared"] = m.pupil_compared;
  j["pupil_excluded"] = m.pupil_excluded;
  return j;
}

}  // namespace

std::string metrics_to_json(const SequenceMetrics& metrics, bool include_per_frame) {
  return metrics_json(metrics, include_per_frame).dump(2);
}

std::string report_to_json(const SequenceReport& report, const PipelineConfig& config,
                           bool include_per_frame) {
  nlohmann::json j;
  j["frames"] = report.frames;
  j["modes"]["extrapolate"] = report.mode_counts[static_cast<int>(Mode::Extrapolate)];
  j["modes"]["roi"] = report.mode_counts[static_cast<int>(Mode::RoiSegment)];
  j["modes"]["full"] = report.mode_counts[static_cast<int>(Mode::FullResolution)];
  j["processed_pixels"] = report.processed_pixels;
  j["full_res_pixels_per_frame"] = report.full_res_pixels;
  j["processed_pixel_fraction"] = report.processed_pixel_fraction;
  j["pixel_speedup_proxy"] = report.pixel_speedup_proxy;
  j["config"] = nlohmann::json::parse(config_to_json_text(config));
  if (report.metrics) j["metrics"] = metrics_json(*report.metrics, include_per_frame);
  return j.dump(2);
}

void write_run_outputs(const SequenceResult& result, const PipelineConfig& config,
                       const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "seg");
  std::ofstream trace(fs::path(out_dir) / "roi_trace.csv");
  if (!trace) throw std::runtime_error("write_run_outputs: cannot open roi_trace.csv");
  trace << "frame_index,x_min,y_min,x_max,y_max,mode\n";
  char buf[32];
  for (size_t i = 0; i < result.outputs.size(); ++i) {
    const FrameResult& fr = result.outputs[i];
    char name[16];
    std::snprintf(name, sizeof name, "%05zu.pgm", i);
    write_seg_pgm(fr.seg, (fs::path(out_dir) / "seg" / name).string());
    trace << i;
    for (double v : {fr.trace_roi.x_min, fr.trace_roi.y_min, fr.trace_roi.x_max, fr.trace_roi.y_max}) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      trace << "," << buf;
    }
    trace << "," << to_string(fr.mode) << "\n";
  }
  std::ofstream report(fs::path(out_dir) / "report.json");
  report << report_to_json(result.report, config) << "\n";
}

std::string evaluate_run_dir(const std::string& run_dir, const std::string& truth_dir) {
  const std::vector<SequenceFrame> truth = load_sequence_dir(truth_dir);
  std::vector<SegmentationMap> pred;
  pred.reserve(truth.size());
  for (size_t i = 0; i < truth.size(); ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%05zu.pgm", i);
    pred.push_back(read_seg_pgm((fs::path(run_dir) / "seg" / name).string()));
  }
  const SequenceMetrics metrics = compute_metrics(pred, truth);

  long long modes[3] = {0, 0, 0};
  std::ifstream trace(fs::path(run_dir) / "roi_trace.csv");
  if (!trace) throw std::runtime_error("evaluate_run_dir: missing roi_trace.csv in " + run_dir);
  std::string line;
  std::getline(trace, line);  // header
  while (std::getline(trace, line)) {
    if (line.empty()) continue;
    const size_t comma = line.rfind(',');
    const std::string mode = line.substr(comma + 1);
    if (mode == "extrapolate")
      ++modes[static_cast<int>(Mode::Extrapolate)];
    else if (mode == "roi")
      ++modes[static_cast<int>(Mode::RoiSegment)];
    else if (mode == "full")
      ++modes[static_cast<int>(Mode::FullResolution)];
    else
      throw std::runtime_error("evaluate_run_dir: unknown mode '" + mode + "' in trace");
  }

  nlohmann::json j;
  j["frames"] = truth.size();
  j["metrics"] = nlohmann::json::parse(metrics_to_json(metrics));
  j["modes"]["extrapolate"] = modes[static_cast<int>(Mode::Extrapolate)];
  j["modes"]["roi"] = modes[static_cast<int>(Mode::RoiSegment)];
  j["modes"]["full"] = modes[static_cast<int>(Mode::FullResolution)];
  return j.dump(2);
}

}  // namespace edar
