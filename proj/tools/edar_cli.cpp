// Command-line front end for the edar shared library. Everything goes through
// the C API in edar/edar.h; this file owns only flag parsing and file output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edar/edar.h"

namespace {

struct ConfigHandle {
  edar_config* ptr;
  ConfigHandle() : ptr(edar_config_create()) {}
  ~ConfigHandle() { edar_config_free(ptr); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { edar_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

int status_to_exit(edar_status s) {
  switch (s) {
    case EDAR_OK: return 0;
    case EDAR_CONFIG_ERROR: return 2;
    default: return 3;
  }
}

int fail(edar_status s) {
  std::cerr << "error: " << edar_last_error() << "\n";
  return status_to_exit(s);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    out << text << "\n";
  }
}

// Collects `--flag value` pairs into a JSON merge document so explicit flags
// override config-file values.
class Overrides {
 public:
  void set(const std::string& section, const std::string& key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    add(section, key, buf);
  }
  void set(const std::string& section, const std::string& key, long long v) {
    add(section, key, std::to_string(v));
  }
  void set(const std::string& section, const std::string& key, const std::string& v) {
    add(section, key, "\"" + v + "\"");
  }
  bool empty() const { return sections_.empty(); }
  std::string json() const {
    std::ostringstream os;
    os << "{";
    bool first_section = true;
    for (const auto& [section, fields] : sections_) {
      os << (first_section ? "" : ",") << "\"" << section << "\":{";
      bool first = true;
      for (const auto& [k, v] : fields) {
        os << (first ? "" : ",") << "\"" << k << "\":" << v;
        first = false;
      }
      os << "}";
      first_section = false;
    }
    os << "}";
    return os.str();
  }

 private:
  void add(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& [s, fields] : sections_)
      if (s == section) {
        fields.emplace_back(key, value);
        return;
      }
    sections_.push_back({section, {{key, value}}});
  }
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-driven auto-ROI eye tracking pipeline"};
  app.require_subcommand(0, 1);

  std::string config_path;
  bool print_config = false;
  unsigned long long seed = 0;
  bool seed_given = false;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_flag("--print-config", print_config, "print the effective config as JSON and exit");
  app.add_option("--seed", seed, "seed every random stream")->each([&](const std::string&) {
    seed_given = true;
  });

  Overrides ov;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic annotated eye sequence");
  std::string synth_out;
  synth->add_option("--out", synth_out, "output directory")->required();
  int synth_frames = 0, synth_w = 0, synth_h = 0, blink_duration = 0;
  double noise = -1, blink_rate = -1, saccade_rate = -1, saccade_mag = -1, drift = -1;
  synth->add_option("--frames", synth_frames, "number of frames");
  synth->add_option("--width", synth_w, "frame width");
  synth->add_option("--height", synth_h, "frame height");
  synth->add_option("--noise", noise, "pixel noise sigma");
  synth->add_option("--blink-rate", blink_rate, "expected blink starts per frame");
  synth->add_option("--blink-duration", blink_duration, "blink length in frames");
  synth->add_option("--saccade-rate", saccade_rate, "expected saccades per frame");
  synth->add_option("--saccade-magnitude", saccade_mag, "saccade jump, fraction of width");
  synth->add_option("--drift", drift, "smooth drift amplitude, fraction of width");

  // train-seg / train-roi / finetune
  auto* train_seg = app.add_subcommand("train-seg", "train the segmentation network");
  auto* train_roi = app.add_subcommand("train-roi", "train the ROI prediction network");
  auto* finetune = app.add_subcommand("finetune", "fine-tune segmentation on predicted ROI crops");
  std::vector<std::string> data_dirs;
  std::string weights_out, loss_csv, variant, weights_seg, weights_roi;
  int epochs = -1, batch = -1;
  double lr = -1;
  for (CLI::App* t : {train_seg, train_roi, finetune}) {
    t->add_option("--data", data_dirs, "sequence directories (synth layout)")->required()->expected(-1);
    t->add_option("--out", weights_out, "output weight file")->required();
    t->add_option("--loss-csv", loss_csv, "write the per-epoch loss curve here");
    t->add_option("--epochs", epochs, "training epochs");
    t->add_option("--lr", lr, "learning rate");
  }
  train_seg->add_option("--batch", batch, "batch size");
  train_roi->add_option("--batch", batch, "batch size");
  train_seg->add_option("--variant", variant, "segmentation variant, S or L");
  finetune->add_option("--weights-seg", weights_seg, "segmentation weights to start from")->required();
  finetune->add_option("--weights-roi", weights_roi, "frozen ROI predictor weights")->required();

  // run
  auto* run = app.add_subcommand("run", "run the pipeline over a frame directory");
  std::string run_frames, run_out;
  bool full_res_only = false;
  double sigma = -1, gamma = -1;
  run->add_option("--frames", run_frames, "directory of PGM frames")->required();
  run->add_option("--weights-roi", weights_roi, "ROI predictor weights");
  run->add_option("--weights-seg", weights_seg, "segmentation weights")->required();
  run->add_option("--out", run_out, "output directory")->required();
  run->add_flag("--full-res-only", full_res_only, "segment every frame at full resolution");
  run->add_option("--sigma", sigma, "event activation threshold");
  run->add_option("--gamma", gamma, "event density threshold for extrapolation");

  // eval
  auto* eval = app.add_subcommand("eval", "metrics of a run directory against ground truth");
  std::string eval_run, eval_truth, eval_out;
  eval->add_option("--run", eval_run, "run output directory")->required();
  eval->add_option("--truth", eval_truth, "ground-truth sequence directory")->required();
  eval->add_option("--out", eval_out, "write metrics JSON here (default stdout)");

  // flops
  auto* flops = app.add_subcommand("flops", "analytic FLOP and parameter accounting");
  int fw = 640, fh = 400;
  flops->add_option("--width", fw, "input width");
  flops->add_option("--height", fh, "input height");
  flops->add_option("--variant", variant, "segmentation variant, S or L");

  // energy
  auto* energy = app.add_subcommand("energy", "in-sensor mapping energy model");
  std::string mode = "search";
  double sensor_node = 7, processor_node = 7, roi_fraction = 1.0 / 3.0, extrap_fraction = 0.5,
         tx_ratio = 800;
  energy->add_option("--mode", mode, "a | b | c | search");
  energy->add_option("--sensor-node", sensor_node, "sensor process node, nm");
  energy->add_option("--processor-node", processor_node, "processor process node, nm");
  energy->add_option("--roi-fraction", roi_fraction, "ROI image size over full resolution");
  energy->add_option("--extrapolated-fraction", extrap_fraction, "fraction of extrapolated frames");
  energy->add_option("--tx-ratio", tx_ratio, "per-byte transmission cost over per-FLOP compute cost");

  // bench
  auto* bench = app.add_subcommand("bench", "time the pipeline stages over a sequence");
  bench->add_option("--frames", run_frames, "directory of PGM frames")->required();
  bench->add_option("--weights-roi", weights_roi, "ROI predictor weights");
  bench->add_option("--weights-seg", weights_seg, "segmentation weights")->required();

  std::string json_out_path;
  for (CLI::App* s : {synth, train_seg, train_roi, finetune, run, flops, energy, bench})
    s->add_option("--json-out", json_out_path, "write the summary JSON here (default stdout)");
  // --config/--seed/--print-config may appear after the subcommand name
  for (CLI::App* s : {synth, train_seg, train_roi, finetune, run, eval, flops, energy, bench})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  ConfigHandle config;
  if (!config.ptr) return 3;
  if (!config_path.empty()) {
    edar_status s = edar_config_load_file(config.ptr, config_path.c_str());
    if (s != EDAR_OK) return fail(s);
  }

  // flag -> config overrides
  if (synth->parsed()) {
    if (synth_frames > 0) ov.set("synth", "n_frames", static_cast<long long>(synth_frames));
    if (synth_w > 0) ov.set("synth", "width", static_cast<long long>(synth_w));
    if (synth_h > 0) ov.set("synth", "height", static_cast<long long>(synth_h));
    if (noise >= 0) ov.set("synth", "noise_sigma", noise);
    if (blink_rate >= 0) ov.set("synth", "blink_rate", blink_rate);
    if (blink_duration > 0) ov.set("synth", "blink_duration", static_cast<long long>(blink_duration));
    if (saccade_rate >= 0) ov.set("synth", "saccade_rate", saccade_rate);
    if (saccade_mag >= 0) ov.set("synth", "saccade_magnitude", saccade_mag);
    if (drift >= 0) ov.set("synth", "drift_amplitude", drift);
  }
  if (train_seg->parsed() || flops->parsed()) {
    if (!variant.empty()) ov.set("pipeline", "seg_variant", variant);
  }
  if (train_seg->parsed() && epochs > 0) ov.set("train_seg", "epochs", static_cast<long long>(epochs));
  if (train_seg->parsed() && batch > 0) ov.set("train_seg", "batch", static_cast<long long>(batch));
  if (train_seg->parsed() && lr > 0) ov.set("train_seg", "lr", lr);
  if (train_roi->parsed() && epochs > 0) ov.set("train_roi", "epochs", static_cast<long long>(epochs));
  if (train_roi->parsed() && batch > 0) ov.set("train_roi", "batch", static_cast<long long>(batch));
  if (train_roi->parsed() && lr > 0) ov.set("train_roi", "lr", lr);
  if (finetune->parsed() && epochs > 0) ov.set("finetune", "epochs", static_cast<long long>(epochs));
  if (finetune->parsed() && lr > 0) ov.set("finetune", "lr", lr);
  if (run->parsed()) {
    if (sigma > 0) ov.set("pipeline", "sigma", sigma);
    if (gamma >= 0) ov.set("pipeline", "gamma", gamma);
  }

  if (!ov.empty()) {
    edar_status s = edar_config_merge_json(config.ptr, ov.json().c_str());
    if (s != EDAR_OK) return fail(s);
  }
  if (seed_given) edar_config_set_seed(config.ptr, seed);

  if (print_config) {
    OwnedString text{edar_config_json(config.ptr)};
    std::cout << text.str() << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help() << "\n";
    return 2;
  }

  std::vector<const char*> dirs;
  for (const std::string& d : data_dirs) dirs.push_back(d.c_str());

  OwnedString out;
  edar_status s = EDAR_OK;
  if (synth->parsed()) {
    s = edar_synth_generate(config.ptr, synth_out.c_str(), &out.ptr);
  } else if (train_seg->parsed()) {
    s = edar_train_segnet(config.ptr, dirs.data(), static_cast<int>(dirs.size()), weights_out.c_str(),
                          loss_csv.empty() ? nullptr : loss_csv.c_str(), &out.ptr);
  } else if (train_roi->parsed()) {
    s = edar_train_roinet(config.ptr, dirs.data(), static_cast<int>(dirs.size()), weights_out.c_str(),
                          loss_csv.empty() ? nullptr : loss_csv.c_str(), &out.ptr);
  } else if (finetune->parsed()) {
    s = edar_finetune_segnet(config.ptr, dirs.data(), static_cast<int>(dirs.size()), weights_seg.c_str(),
                             weights_roi.c_str(), weights_out.c_str(),
                             loss_csv.empty() ? nullptr : loss_csv.c_str(), &out.ptr);
  } else if (run->parsed()) {
    s = edar_run(config.ptr, run_frames.c_str(), weights_roi.empty() ? nullptr : weights_roi.c_str(),
                 weights_seg.c_str(), run_out.c_str(), full_res_only ? 1 : 0, &out.ptr);
  } else if (eval->parsed()) {
    s = edar_eval(eval_run.c_str(), eval_truth.c_str(), &out.ptr);
    json_out_path = eval_out;
  } else if (flops->parsed()) {
    s = edar_flops_report(config.ptr, fw, fh, &out.ptr);
  } else if (energy->parsed()) {
    s = edar_energy_report(mode.c_str(), sensor_node, processor_node, roi_fraction, extrap_fraction,
                           tx_ratio, &out.ptr);
  } else if (bench->parsed()) {
    s = edar_bench(config.ptr, run_frames.c_str(), weights_roi.empty() ? nullptr : weights_roi.c_str(),
                   weights_seg.c_str(), &out.ptr);
  }

  if (s != EDAR_OK) return fail(s);
  if (out.ptr) emit(out.str(), json_out_path);
  return 0;
}
