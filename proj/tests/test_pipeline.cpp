#include <doctest.h>

#include <filesystem>

#include "edar/pipeline.hpp"
#include "edar/segnet.hpp"
#include "edar/synth.hpp"

using namespace edar;

namespace {

PipelineConfig small_config() {
  PipelineConfig c;
  c.seg_variant = SegVariant::S;
  return c;
}

// zero weights: roi head is sigmoid(0) = (0.5,0.5,0.5,0.5), segmentation
// argmax ties to class 0
LayerGraph zero_roinet(int w, int h) {
  LayerGraph g = build_roinet(w / 2, h / 2);
  for (auto& [name, p] : g.params()) p.fill(0.0);
  return g;
}

LayerGraph zero_segnet() {
  LayerGraph g = build_segnet(SegVariant::S);
  for (auto& [name, p] : g.params()) p.fill(0.0);
  return g;
}

// constant class-1 output: gives the pipeline a full-frame ROI feedback so
// the prediction path actually runs
LayerGraph sclera_segnet() {
  LayerGraph g = zero_segnet();
  g.param("head.b").data = {0.0, 1.0, 0.0, 0.0};
  return g;
}

std::vector<Frame> static_frames(int n, int w, int h) {
  EyeSceneParams p;
  p.width = w;
  p.height = h;
  p.noise_sigma = 0;
  p.drift_amplitude = 0;
  p.saccade_rate = 0;
  p.rng_seed = 77;
  auto seq = render_sequence(p, 1);
  std::vector<Frame> frames(static_cast<size_t>(n), seq[0].frame);
  for (int t = 0; t < n; ++t) frames[static_cast<size_t>(t)].timestamp_index = t;
  return frames;
}

}  // namespace

TEST_CASE("decide_mode") {
  RoiPrediction pred;
  pred.roi = {0.9, 0.1, 0.1, 0.9};
  pred.feasible = false;
  pred.event_density = 0.0;
  CHECK(decide_mode(pred, 0.001) == Mode::FullResolution);  // infeasible wins over density

  pred.roi = {0.1, 0.1, 0.9, 0.9};
  pred.feasible = true;
  pred.event_density = 0.0005;
  CHECK(decide_mode(pred, 0.001) == Mode::Extrapolate);
  pred.event_density = 0.5;
  CHECK(decide_mode(pred, 0.001) == Mode::RoiSegment);

  SUBCASE("monotone in gamma") {
    pred.event_density = 0.01;
    bool extrapolated = false;
    for (double gamma : {0.0, 0.001, 0.005, 0.02, 0.1, 0.5}) {
      const bool now = decide_mode(pred, gamma) == Mode::Extrapolate;
      CHECK((now || !extrapolated));  // once extrapolating, higher gamma keeps extrapolating
      extrapolated = now;
    }
  }
  SUBCASE("gamma zero never extrapolates") {
    pred.event_density = 0.0;
    CHECK(decide_mode(pred, 0.0) == Mode::RoiSegment);
  }
}

TEST_CASE("static scene extrapolates after frame 0 bit-identically") {
  const auto frames = static_frames(10, 48, 48);
  LayerGraph roinet = zero_roinet(48, 48);
  LayerGraph segnet = sclera_segnet();
  PipelineConfig config = small_config();

  SequenceResult result = run_sequence(frames, config, &roinet, segnet);
  REQUIRE(result.outputs.size() == 10);
  CHECK(result.outputs[0].mode == Mode::FullResolution);
  for (size_t t = 1; t < 10; ++t) {
    CHECK(result.outputs[t].mode == Mode::Extrapolate);
    CHECK(result.outputs[t].seg == result.outputs[0].seg);
  }
  CHECK(result.report.mode_counts[static_cast<int>(Mode::Extrapolate)] == 9);
  // extrapolated frames cost zero pixels
  CHECK(result.report.processed_pixels == 48 * 48);
}

TEST_CASE("gamma zero disables extrapolation") {
  const auto frames = static_frames(6, 48, 48);
  LayerGraph roinet = zero_roinet(48, 48);
  LayerGraph segnet = sclera_segnet();
  PipelineConfig config = small_config();
  config.gamma = 0.0;

  SequenceResult result = run_sequence(frames, config, &roinet, segnet);
  CHECK(result.report.mode_counts[static_cast<int>(Mode::Extrapolate)] == 0);
}

TEST_CASE("full-res-only processes every pixel exactly once") {
  const auto frames = static_frames(5, 48, 48);
  LayerGraph segnet = zero_segnet();
  PipelineConfig config = small_config();
  SequenceResult result = run_sequence(frames, config, nullptr, segnet);
  CHECK(result.report.mode_counts[static_cast<int>(Mode::FullResolution)] == 5);
  CHECK(result.report.processed_pixel_fraction == doctest::Approx(1.0));
  CHECK(result.report.pixel_speedup_proxy == doctest::Approx(1.0));
}

TEST_CASE("mode counts always sum to the frame count") {
  EyeSceneParams p;
  p.width = 48;
  p.height = 48;
  p.rng_seed = 5;
  p.saccade_rate = 0.2;
  auto seq = render_sequence(p, 12);
  std::vector<Frame> frames;
  for (auto& f : seq) frames.push_back(f.frame);
  LayerGraph roinet = build_roinet(24, 24);
  roinet.init_params(3);
  LayerGraph segnet = build_segnet(SegVariant::S);
  segnet.init_params(4);
  SequenceResult result = run_sequence(frames, small_config(), &roinet, segnet);
  long long total = 0;
  for (long long c : result.report.mode_counts) total += c;
  CHECK(total == 12);
  CHECK(result.report.processed_pixel_fraction > 0.0);
  CHECK(result.report.processed_pixel_fraction <= 1.0);
}

TEST_CASE("roi segmentation pastes the crop into a background canvas") {
  // force RoiSegment by injecting state with a feasible ROI and using a
  // trained-ish roinet whose output we override via a moving scene
  EyeSceneParams p;
  p.width = 48;
  p.height = 48;
  p.noise_sigma = 0;
  p.rng_seed = 9;
  p.drift_amplitude = 0.08;
  auto seq = render_sequence(p, 2);

  PipelineState state;
  PipelineConfig config = small_config();
  config.gamma = 0.0;  // never extrapolate
  LayerGraph roinet = zero_roinet(48, 48);
  // make the head bias produce a fixed feasible box (sigmoid of the bias)
  // sigmoid(-1)=0.269, sigmoid(1)=0.731
  roinet.param("fc2.b").data = {-1.0, -1.0, 1.0, 1.0};
  LayerGraph segnet = sclera_segnet();

  (void)process_frame(state, seq[0].frame, config, &roinet, segnet);
  FrameResult second = process_frame(state, seq[1].frame, config, &roinet, segnet);
  REQUIRE(second.mode == Mode::RoiSegment);
  const PixelRect rect = roi_to_pixels(roi_clamped(second.prediction->roi), 48, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      if (x < rect.x0 || x >= rect.x1 || y < rect.y0 || y >= rect.y1)
        CHECK(second.seg.at(x, y) == 0);  // outside the crop is background
}

TEST_CASE("run outputs round trip through the directory format") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "edar_run_test";
  fs::remove_all(dir);

  EyeSceneParams p;
  p.width = 48;
  p.height = 48;
  p.rng_seed = 31;
  auto seq = render_sequence(p, 6);
  const fs::path truth_dir = dir / "truth";
  write_sequence_dir(seq, p, truth_dir.string());

  std::vector<Frame> frames;
  for (auto& f : seq) frames.push_back(f.frame);
  LayerGraph segnet = zero_segnet();
  PipelineConfig config = small_config();
  SequenceResult result = run_sequence(frames, config, nullptr, segnet, &seq);
  REQUIRE(result.report.metrics.has_value());
  write_run_outputs(result, config, (dir / "out").string());

  CHECK(fs::exists(dir / "out" / "seg" / "00005.pgm"));
  CHECK(fs::exists(dir / "out" / "roi_trace.csv"));
  CHECK(fs::exists(dir / "out" / "report.json"));

  // eval reproduces the metrics object embedded in the report
  const std::string eval_json = evaluate_run_dir((dir / "out").string(), truth_dir.string());
  const std::string report_metrics = metrics_to_json(*result.report.metrics);
  CHECK(eval_json.find("\"metrics\"") != std::string::npos);
  // byte-level: the metrics sub-document of eval matches the report's
  auto extract = [](const std::string& s, const std::string& key) {
    size_t at = s.find(key);
    REQUIRE(at != std::string::npos);
    size_t open = s.find('{', at);
    int depth = 0;
    for (size_t i = open; i < s.size(); ++i) {
      if (s[i] == '{') ++depth;
      if (s[i] == '}' && --depth == 0) return s.substr(open, i - open + 1);
    }
    return std::string();
  };
  std::string a = extract(eval_json, "\"metrics\"");
  // normalize whitespace: both documents are dumped with indent 2 but at
  // different nesting depths
  auto strip = [](std::string t) {
    std::string out;
    for (char c : t)
      if (c != ' ' && c != '\n') out.push_back(c);
    return out;
  };
  CHECK(strip(a) == strip(report_metrics));

  SequenceResult again = run_sequence(frames, config, nullptr, segnet, &seq);
  CHECK(report_to_json(again.report, config) == report_to_json(result.report, config));

  fs::remove_all(dir);
}

TEST_CASE("pipeline recovers via full resolution after an all-background frame") {
  PipelineState state;
  PipelineConfig config = small_config();
  LayerGraph segnet = zero_segnet();  // segments everything as background
  LayerGraph roinet = zero_roinet(48, 48);
  const auto frames = static_frames(3, 48, 48);
  FrameResult r0 = process_frame(state, frames[0], config, &roinet, segnet);
  CHECK(r0.mode == Mode::FullResolution);
  CHECK_FALSE(state.prev_roi.has_value());  // all-background map, no ROI feedback
  FrameResult r1 = process_frame(state, frames[1], config, &roinet, segnet);
  CHECK(r1.mode == Mode::FullResolution);  // recovery path
}
