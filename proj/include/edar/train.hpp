#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edar/graph.hpp"
#include "edar/image.hpp"

namespace edar {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;  // the optimizer's momentum knob
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam with bias correction. Moment tensors are allocated lazily per
// parameter name; updates are elementwise and deterministic.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void step(std::map<std::string, Tensor>& params, std::map<std::string, Tensor>& grads);
  int64_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  int64_t step_ = 0;
  std::map<std::string, Tensor> m_, v_;
};

// --- losses -------------------------------------------------------------------

// Mean squared error over all elements; grad_out (same shape as pred) gets
// d(loss)/d(pred) when non-null.
double mse_loss(const Tensor& pred, const Tensor& target, Tensor* grad_out = nullptr);

// Per-pixel cross-entropy of class probabilities (N,C,H,W) against label
// maps, averaged over all pixels.
double cross_entropy(const Tensor& probs, const std::vector<const SegmentationMap*>& labels);

// Numerically stable cross-entropy on pre-softmax scores; gradient is
// (softmax - onehot) / pixel_count.
double cross_entropy_logits(const Tensor& logits, const std::vector<const SegmentationMap*>& labels,
                            Tensor* grad_out = nullptr);

// --- datasets -----------------------------------------------------------------

struct SegSample {
  Frame frame;
  SegmentationMap labels;
};

struct RoiSample {
  BinaryMap events_ds;
  BinaryMap edges_ds;
  Roi prev_roi;
  Roi target;
};

// One frame of an annotated sequence (the synthetic generator's output).
struct SequenceFrame {
  Frame frame;
  SegmentationMap labels;
  std::optional<Roi> roi;                          // empty while blinking
  std::optional<std::pair<double, double>> pupil;  // pixel coords, empty while blinking
};

// Builds (event map, edge map, previous ROI) -> ROI training triples from
// consecutive annotated frames. Pairs without a valid ROI on either side
// (blinks) are skipped; the previous ROI is the previous frame's ground truth.
std::vector<RoiSample> roi_samples_from_sequence(const std::vector<SequenceFrame>& seq, double sigma,
                                                 double epsilon_div);

// --- training loops -------------------------------------------------------------

struct TrainOptions {
  int epochs = 250;
  int batch = 4;
  double lr = 0.001;
  double val_fraction = 0.2;  // 80/20 train/validation split
  uint64_t seed = 1;
};

struct TrainReport {
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_loss;
  int best_epoch = -1;
};

void write_loss_csv(const TrainReport& report, const std::string& path);

// Cross-entropy on full frames; returns with the best-validation weights
// restored into the net.
TrainReport train_segnet(LayerGraph& net, const std::vector<SegSample>& data, TrainOptions opts = {});

// MSE on the four normalized ROI coordinates.
TrainReport train_roinet(LayerGraph& net, const std::vector<RoiSample>& data,
                         TrainOptions opts = {.epochs = 100, .batch = 8});

struct FinetuneOptions {
  int epochs = 100;
  double lr = 0.0001;
  double val_fraction = 0.2;
  uint64_t seed = 1;
  double sigma = 0.30;
  double epsilon_div = 1.0;
  int pad_multiple = 16;
};

// The frozen roinet predicts an ROI per consecutive-frame pair; the segnet
// trains on the padded crop with correspondingly cropped labels. An
// infeasible prediction trains that sample at full resolution, mirroring the
// pipeline fallback.
TrainReport finetune_segnet_on_rois(LayerGraph& segnet, LayerGraph& roinet,
                                    const std::vector<std::vector<SequenceFrame>>& sequences,
                                    FinetuneOptions opts = {});

}  // namespace edar
