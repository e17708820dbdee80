#include "edar/edar.h"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "edar/config.hpp"
#include "edar/energy.hpp"
#include "edar/graph.hpp"
#include "edar/pipeline.hpp"
#include "edar/pupil.hpp"
#include "edar/roinet.hpp"
#include "edar/segnet.hpp"
#include "edar/synth.hpp"
#include "edar/train.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_out(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

// Workflow failures default to data errors; config parsing and validation
// report config errors.
template <typename F>
edar_status guard(F&& fn, edar_status failure = EDAR_DATA_ERROR) {
  try {
    fn();
    return EDAR_OK;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return EDAR_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return failure;
  }
}

json default_config_json() {
  json j;
  j["pipeline"] = json::parse(edar::config_to_json_text(edar::PipelineConfig{}));
  j["synth"] = json::parse(edar::eye_scene_params_to_json(edar::EyeSceneParams{}));
  j["synth"]["n_frames"] = 64;
  j["roinet"] = {{"c1", 8}, {"c2", 16}, {"c3", 16}, {"fc_hidden", 64}};
  j["train_seg"] = {{"epochs", 250}, {"batch", 4}, {"lr", 0.001}};
  j["train_roi"] = {{"epochs", 100}, {"batch", 8}, {"lr", 0.001}};
  j["finetune"] = {{"epochs", 100}, {"lr", 0.0001}};
  return j;
}

std::vector<std::vector<edar::SequenceFrame>> load_sequences(const char* const* dirs, int n) {
  if (!dirs || n <= 0) throw std::runtime_error("no data directories given");
  std::vector<std::vector<edar::SequenceFrame>> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(edar::load_sequence_dir(dirs[i]));
  return out;
}

edar::LayerGraph build_segnet_for_weights(const std::string& path) {
  const std::string name = edar::read_weights_network_name(path);
  edar::SegVariant variant;
  if (name == "segnet-s-v1")
    variant = edar::SegVariant::S;
  else if (name == "segnet-l-v1")
    variant = edar::SegVariant::L;
  else
    throw std::runtime_error("weight file " + path + " does not hold a segmentation network (found '" +
                             name + "')");
  edar::LayerGraph net = edar::build_segnet(variant);
  edar::load_weights(net, path);
  return net;
}

edar::LayerGraph build_roinet_for_weights(const std::string& path) {
  const auto meta = edar::read_weights_meta(path);
  const auto hw = meta.find("input_hw");
  const auto ch = meta.find("channels");
  if (edar::read_weights_network_name(path) != "roinet-v1" || hw == meta.end() || ch == meta.end() ||
      hw->second.size() != 2 || ch->second.size() != 4)
    throw std::runtime_error("weight file " + path + " does not hold an ROI prediction network");
  edar::RoinetChannels channels;
  channels.c1 = static_cast<int>(ch->second[0]);
  channels.c2 = static_cast<int>(ch->second[1]);
  channels.c3 = static_cast<int>(ch->second[2]);
  channels.fc_hidden = static_cast<int>(ch->second[3]);
  edar::LayerGraph net =
      edar::build_roinet(static_cast<int>(hw->second[1]), static_cast<int>(hw->second[0]), channels);
  edar::load_weights(net, path);
  return net;
}

json train_summary(const edar::TrainReport& report, const edar::LayerGraph& net) {
  json j;
  j["epochs"] = report.train_loss.size();
  j["best_epoch"] = report.best_epoch;
  if (!report.train_loss.empty()) {
    j["first_train_loss"] = report.train_loss.front();
    j["final_train_loss"] = report.train_loss.back();
    j["best_val_loss"] = report.val_loss[static_cast<size_t>(report.best_epoch)];
  }
  j["param_count"] = net.param_count();
  j["network"] = net.name;
  return j;
}

}  // namespace

struct edar_config {
  json doc = default_config_json();

  edar::PipelineConfig pipeline() const {
    return edar::config_from_json_text(doc.at("pipeline").dump());
  }
  edar::EyeSceneParams synth() const {
    return edar::eye_scene_params_from_json(doc.at("synth").dump());
  }
  int synth_frames() const { return doc.at("synth").value("n_frames", 64); }
  edar::RoinetChannels roinet_channels() const {
    const json& r = doc.at("roinet");
    edar::RoinetChannels ch;
    ch.c1 = r.value("c1", ch.c1);
    ch.c2 = r.value("c2", ch.c2);
    ch.c3 = r.value("c3", ch.c3);
    ch.fc_hidden = r.value("fc_hidden", ch.fc_hidden);
    return ch;
  }
  edar::TrainOptions train_options(const char* section, int def_epochs, int def_batch) const {
    const json& t = doc.at(section);
    edar::TrainOptions o;
    o.epochs = t.value("epochs", def_epochs);
    o.batch = t.value("batch", def_batch);
    o.lr = t.value("lr", 0.001);
    o.seed = pipeline().rng_seed;
    return o;
  }
};

extern "C" {

const char* edar_last_error(void) { return g_last_error.c_str(); }

void edar_string_free(char* s) { std::free(s); }

edar_config* edar_config_create(void) {
  try {
    return new edar_config();
  } catch (...) {
    g_last_error = "out of memory";
    return nullptr;
  }
}

void edar_config_free(edar_config* config) { delete config; }

edar_status edar_config_load_file(edar_config* config, const char* path) {
  if (!config || !path) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard(
      [&] {
        std::ifstream in(path);
        if (!in) throw std::runtime_error(std::string("cannot open config file ") + path);
        json patch = json::parse(in);
        config->doc.update(patch, true);
        config->pipeline().validate();
        config->synth().validate();
      },
      EDAR_CONFIG_ERROR);
}

edar_status edar_config_merge_json(edar_config* config, const char* json_text) {
  if (!config || !json_text) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard(
      [&] {
        config->doc.update(json::parse(json_text), true);
        config->pipeline().validate();
        config->synth().validate();
      },
      EDAR_CONFIG_ERROR);
}

char* edar_config_json(const edar_config* config) {
  if (!config) return nullptr;
  return dup_string(config->doc.dump(2));
}

edar_status edar_config_set_seed(edar_config* config, unsigned long long seed) {
  if (!config) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  config->doc["pipeline"]["rng_seed"] = seed;
  config->doc["synth"]["rng_seed"] = seed;
  return EDAR_OK;
}

edar_status edar_synth_generate(const edar_config* config, const char* out_dir, char** summary_json) {
  if (!config || !out_dir) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard([&] {
    const edar::EyeSceneParams params = config->synth();
    const int n = config->synth_frames();
    const auto seq = edar::render_sequence(params, n);
    edar::write_sequence_dir(seq, params, out_dir);
    long long blinks = 0;
    for (const auto& f : seq)
      if (!f.roi) ++blinks;
    json j;
    j["frames"] = n;
    j["dir"] = out_dir;
    j["fully_closed_frames"] = blinks;
    set_out(summary_json, j.dump(2));
  });
}

edar_status edar_train_segnet(const edar_config* config, const char* const* data_dirs, int n_dirs,
                              const char* weights_out, const char* loss_csv, char** summary_json) {
  if (!config || !weights_out) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard([&] {
    const auto sequences = load_sequences(data_dirs, n_dirs);
    std::vector<edar::SegSample> samples;
    for (const auto& seq : sequences)
      for (const auto& f : seq) samples.push_back({f.frame, f.labels});
    const edar::PipelineConfig pc = config->pipeline();
    edar::LayerGraph net = edar::build_segnet(pc.seg_variant);
    net.init_params(pc.rng_seed);
    const edar::TrainReport report =
        edar::train_segnet(net, samples, config->train_options("train_seg", 250, 4));
    edar::save_weights(net, weights_out);
    if (loss_csv) edar::write_loss_csv(report, loss_csv);
    set_out(summary_json, train_summary(report, net).dump(2));
  });
}

edar_status edar_train_roinet(const edar_config* config, const char* const* data_dirs, int n_dirs,
                              const char* weights_out, const char* loss_csv, char** summary_json) {
  if (!config || !weights_out) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard([&] {
    const auto sequences = load_sequences(data_dirs, n_dirs);
    const edar::PipelineConfig pc = config->pipeline();
    std::vector<edar::RoiSample> samples;
    for (const auto& seq : sequences) {
      auto s = edar::roi_samples_from_sequence(seq, pc.sigma, pc.epsilon_div);
      samples.insert(samples.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }
    if (samples.empty()) throw std::runtime_error("no usable ROI training pairs in the given sequences");
    edar::LayerGraph net = edar::build_roinet(samples[0].events_ds.width, samples[0].events_ds.height,
                                              config->roinet_channels());
    net.init_params(pc.rng_seed);
    const edar::TrainReport report =
        edar::train_roinet(net, samples, config->train_options("train_roi", 100, 8));
    edar::save_weights(net, weights_out);
    if (loss_csv) edar::write_loss_csv(report, loss_csv);
    set_out(summary_json, train_summary(report, net).dump(2));
  });
}

edar_status edar_finetune_segnet(const edar_config* config, const char* const* data_dirs, int n_dirs,
                                 const char* seg_weights_in, const char* roi_weights_in,
                                 const char* weights_out, const char* loss_csv, char** summary_json) {
  if (!config || !seg_weights_in || !roi_weights_in || !weights_out) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard([&] {
    const auto sequences = load_sequences(data_dirs, n_dirs);
    edar::LayerGraph segnet = build_segnet_for_weights(seg_weights_in);
    edar::LayerGraph roinet = build_roinet_for_weights(roi_weights_in);
    const edar::PipelineConfig pc = config->pipeline();
    edar::FinetuneOptions opts;
    opts.epochs = config->doc.at("finetune").value("epochs", 100);
    opts.lr = config->doc.at("finetune").value("lr", 0.0001);
    opts.seed = pc.rng_seed;
    opts.sigma = pc.sigma;
    opts.epsilon_div = pc.epsilon_div;
    opts.pad_multiple = pc.roi_pad_multiple;
    const edar::TrainReport report = edar::finetune_segnet_on_rois(segnet, roinet, sequences, opts);
    edar::save_weights(segnet, weights_out);
    if (loss_csv) edar::write_loss_csv(report, loss_csv);
    set_out(summary_json, train_summary(report, segnet).dump(2));
  });
}

edar_status edar_run(const edar_config* config, const char* frames_dir, const char* roi_weights,
                     const char* seg_weights, const char* out_dir, int full_res_only,
                     char** report_json) {
  if (!config || !frames_dir || !seg_weights || !out_dir) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard([&] {
    const edar::PipelineConfig pc = config->pipeline();
    edar::LayerGraph segnet = build_segnet_for_weights(seg_weights);
    std::optional<edar::LayerGraph> roinet;
    if (roi_weights && !full_res_only) roinet = build_roinet_for_weights(roi_weights);

    // a sequence directory (frames/ + labels/ + gt.csv) provides metrics
    namespace fs = std::filesystem;
    const fs::path parent = fs::path(frames_dir).parent_path();
    std::optional<std::vector<edar::SequenceFrame>> truth;
    if (fs::path(frames_dir).filename() == "frames" && fs::exists(parent / "labels") &&
        fs::exists(parent / "gt.csv"))
      truth = edar::load_sequence_dir(parent.string());

    const std::vector<edar::Frame> frames = edar::load_frames_dir(frames_dir);
    const edar::SequenceResult result = edar::run_sequence(
        frames, pc, roinet ? &*roinet : nullptr, segnet, truth ? &*truth : nullptr);
    edar::write_run_outputs(result, pc, out_dir);
    set_out(report_json, edar::report_to_json(result.report, pc));
  });
}

edar_status edar_eval(const char* run_dir, const char* truth_dir, char** metrics_json) {
  if (!run_dir || !truth_dir) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard([&] { set_out(metrics_json, edar::evaluate_run_dir(run_dir, truth_dir)); });
}

edar_status edar_flops_report(const edar_config* config, int width, int height, char** json_out) {
  if (!config) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard(
      [&] {
        if (width <= 0 || height <= 0) throw std::invalid_argument("flops: dims must be positive");
        if (width % 16 != 0 || height % 16 != 0)
          throw std::invalid_argument("flops: dims must be multiples of 16");
        const edar::PipelineConfig pc = config->pipeline();
        const long long px = static_cast<long long>(width) * height;
        const int dw = (width + 1) / 2, dh = (height + 1) / 2;

        edar::LayerGraph segnet = edar::build_segnet(pc.seg_variant);
        edar::LayerGraph roinet = edar::build_roinet(dw, dh, config->roinet_channels());

        json j;
        j["input"] = {{"width", width}, {"height", height}};
        j["full_res_image_bytes"] = px;  // 1 byte per pixel
        j["segnet"] = {{"variant", edar::to_string(pc.seg_variant)},
                       {"flops", segnet.flops({{1, 1, height, width}})},
                       {"params", segnet.param_count()},
                       {"output_bytes", px * 2 / 8}};  // 2 bits per pixel
        j["roinet"] = {{"flops", roinet.flops({{1, 2, dh, dw}, {1, 4}})},
                       {"params", roinet.param_count()},
                       {"output_bytes", 16}};  // 4 float32 coordinates
        // emulation arithmetic: diff, guarded divide, compare per pixel
        j["event_map_gen"] = {{"flops", 3 * px},
                              {"output_bytes", (static_cast<long long>(dw) * dh + 7) / 8}};
        // blur (2x5 taps), sobel, magnitude, nms compares per pixel
        j["edge_map_gen"] = {{"flops", 40 * px},
                             {"output_bytes", (static_cast<long long>(dw) * dh + 7) / 8}};
        set_out(json_out, j.dump(2));
      },
      EDAR_CONFIG_ERROR);
}

edar_status edar_energy_report(const char* mode, double sensor_node, double processor_node,
                               double roi_fraction, double extrapolated_fraction, double tx_ratio,
                               char** json_out) {
  if (!mode) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard(
      [&] {
        const edar::ComponentCosts costs;
        auto fill = [&](edar::MappingScenario s) {
          s.sensor_node = sensor_node;
          s.processor_node = processor_node;
          s.roi_fraction = roi_fraction;
          s.extrapolated_fraction = extrapolated_fraction;
          s.tx_ratio = tx_ratio;
          return s;
        };
        auto breakdown_json = [&](const edar::MappingScenario& s) {
          const edar::EnergyBreakdown b = edar::scenario_energy(s, costs);
          json pj;
          for (int i = 0; i < edar::kNumComponents; ++i)
            pj[edar::to_string(static_cast<edar::Component>(i))] =
                s.placement[static_cast<size_t>(i)] == edar::Chip::Sensor ? "sensor" : "processor";
          return json{{"placement", pj},
                      {"compute_energy", b.compute_energy},
                      {"transmission_energy", b.transmission_energy},
                      {"total", b.total},
                      {"sensor_to_processor_bytes", b.sensor_to_processor_bytes},
                      {"processor_to_sensor_bytes", b.processor_to_sensor_bytes}};
        };

        json j;
        j["sensor_node_nm"] = sensor_node;
        j["processor_node_nm"] = processor_node;
        j["roi_fraction"] = roi_fraction;
        j["extrapolated_fraction"] = extrapolated_fraction;
        j["tx_ratio"] = tx_ratio;
        for (char m : {'a', 'b', 'c'})
          j["modes"][std::string(1, m)] = breakdown_json(fill(edar::make_mode_scenario(m)));
        const std::string want(mode);
        if (want == "search") {
          const edar::MappingScenario best = edar::optimal_mapping(
              costs, sensor_node, processor_node, roi_fraction, extrapolated_fraction, tx_ratio);
          j["search"] = breakdown_json(best);
        } else if (want == "a" || want == "b" || want == "c") {
          j["selected"] = want;
        } else {
          throw std::invalid_argument("energy: mode must be a, b, c or search");
        }
        set_out(json_out, j.dump(2));
      },
      EDAR_CONFIG_ERROR);
}

edar_status edar_bench(const edar_config* config, const char* frames_dir, const char* roi_weights,
                       const char* seg_weights, char** json_out) {
  if (!config || !frames_dir || !seg_weights) {
    g_last_error = "null argument";
    return EDAR_CONFIG_ERROR;
  }
  return guard([&] {
    const edar::PipelineConfig pc = config->pipeline();
    edar::LayerGraph segnet = build_segnet_for_weights(seg_weights);
    std::optional<edar::LayerGraph> roinet;
    if (roi_weights) roinet = build_roinet_for_weights(roi_weights);
    const std::vector<edar::Frame> frames = edar::load_frames_dir(frames_dir);

    const auto start = std::chrono::steady_clock::now();
    const edar::SequenceResult result = edar::run_sequence(frames, pc, roinet ? &*roinet : nullptr, segnet);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const edar::SequenceReport& r = result.report;
    const double accounted = r.time_event + r.time_edge + r.time_roinet + r.time_segnet;
    json stages;
    auto stage = [&](const char* name, double sec) {
      stages[name] = {{"seconds", sec}, {"fraction", total > 0 ? sec / total : 0.0}};
    };
    stage("event_map", r.time_event);
    stage("edge_map", r.time_edge);
    stage("roi_prediction", r.time_roinet);
    stage("segmentation", r.time_segnet);
    stage("other", std::max(0.0, total - accounted));
    json j;
    j["frames"] = r.frames;
    j["seconds"] = total;
    j["fps"] = total > 0 ? static_cast<double>(r.frames) / total : 0.0;
    j["stages"] = stages;
    j["modes"] = {{"extrapolate", r.mode_counts[0]}, {"roi", r.mode_counts[1]}, {"full", r.mode_counts[2]}};
    j["pixel_speedup_proxy"] = r.pixel_speedup_proxy;
    set_out(json_out, j.dump(2));
  });
}

}  // extern "C"
