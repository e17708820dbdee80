#include "edar/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "edar/edge.hpp"
#include "edar/event.hpp"
#include "edar/roinet.hpp"
#include "edar/segnet.hpp"

namespace edar {

void Adam::step(std::map<std::string, Tensor>& params, std::map<std::string, Tensor>& grads) {
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (auto& [name, p] : params) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const Tensor& g = git->second;
    if (!g.same_shape(p)) throw std::invalid_argument("Adam: gradient shape mismatch for " + name);
    Tensor& m = m_.try_emplace(name, Tensor(p.dims)).first->second;
    Tensor& v = v_.try_emplace(name, Tensor(p.dims)).first->second;
    for (size_t i = 0; i < p.data.size(); ++i) {
      m.data[i] = config_.beta1 * m.data[i] + (1.0 - config_.beta1) * g.data[i];
      v.data[i] = config_.beta2 * v.data[i] + (1.0 - config_.beta2) * g.data[i] * g.data[i];
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p.data[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

double mse_loss(const Tensor& pred, const Tensor& target, Tensor* grad_out) {
  if (!pred.same_shape(target)) throw std::invalid_argument("mse_loss: shape mismatch");
  const double n = static_cast<double>(pred.numel());
  double loss = 0;
  if (grad_out) *grad_out = Tensor(pred.dims);
  for (size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    loss += d * d;
    if (grad_out) grad_out->data[i] = 2.0 * d / n;
  }
  return loss / n;
}

static void check_label_batch(const Tensor& t, const std::vector<const SegmentationMap*>& labels) {
  if (t.dims.size() != 4 || t.dim(1) != SegmentationMap::kNumClasses)
    throw std::invalid_argument("cross_entropy: expected (N,4,H,W) tensor");
  if (static_cast<int>(labels.size()) != t.dim(0))
    throw std::invalid_argument("cross_entropy: batch size mismatch");
  for (const SegmentationMap* l : labels)
    if (l->width != t.dim(3) || l->height != t.dim(2))
      throw std::invalid_argument("cross_entropy: label dims mismatch");
}

double cross_entropy(const Tensor& probs, const std::vector<const SegmentationMap*>& labels) {
  check_label_batch(probs, labels);
  const int N = probs.dim(0), C = probs.dim(1);
  const size_t plane = static_cast<size_t>(probs.dim(2)) * probs.dim(3);
  double loss = 0;
  for (int n = 0; n < N; ++n)
    for (size_t p = 0; p < plane; ++p) {
      const int cls = labels[static_cast<size_t>(n)]->classes[p];
      loss += -std::log(std::max(probs.data[(static_cast<size_t>(n) * C + cls) * plane + p], 1e-300));
    }
  return loss / (static_cast<double>(N) * static_cast<double>(plane));
}

double cross_entropy_logits(const Tensor& logits, const std::vector<const SegmentationMap*>& labels,
                            Tensor* grad_out) {
  check_label_batch(logits, labels);
  const int N = logits.dim(0), C = logits.dim(1);
  const size_t plane = static_cast<size_t>(logits.dim(2)) * logits.dim(3);
  const double count = static_cast<double>(N) * static_cast<double>(plane);
  if (grad_out) *grad_out = Tensor(logits.dims);
  double loss = 0;
  for (int n = 0; n < N; ++n) {
    for (size_t p = 0; p < plane; ++p) {
      const size_t base = static_cast<size_t>(n) * C * plane + p;
      double mx = logits.data[base];
      for (int c = 1; c < C; ++c) mx = std::max(mx, logits.data[base + c * plane]);
      double sum = 0;
      for (int c = 0; c < C; ++c) sum += std::exp(logits.data[base + c * plane] - mx);
      const int cls = labels[static_cast<size_t>(n)]->classes[p];
      loss += -(logits.data[base + cls * plane] - mx - std::log(sum));
      if (grad_out) {
        for (int c = 0; c < C; ++c) {
          const double s = std::exp(logits.data[base + c * plane] - mx) / sum;
          grad_out->data[base + c * plane] = (s - (c == cls ? 1.0 : 0.0)) / count;
        }
      }
    }
  }
  return loss / count;
}

std::vector<RoiSample> roi_samples_from_sequence(const std::vector<SequenceFrame>& seq, double sigma,
                                                 double epsilon_div) {
  std::vector<RoiSample> out;
  for (size_t t = 1; t < seq.size(); ++t) {
    const SequenceFrame& prev = seq[t - 1];
    const SequenceFrame& curr = seq[t];
    if (!prev.roi || !curr.roi) continue;  // blinks have no ROI on record
    RoiSample s;
    s.events_ds = downsample_by_2(event_map(prev.frame, curr.frame, sigma, epsilon_div));
    s.edges_ds = downsample_by_2(seg_edge_map(prev.labels));
    s.prev_roi = *prev.roi;
    s.target = *curr.roi;
    out.push_back(std::move(s));
  }
  return out;
}

void write_loss_csv(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_loss_csv: cannot open " + path);
  out << "epoch,train_loss,val_loss\n";
  for (size_t e = 0; e < report.train_loss.size(); ++e)
    out << e << "," << report.train_loss[e] << "," << report.val_loss[e] << "\n";
}

namespace {

// Deterministic shuffled 80/20 index split.
std::pair<std::vector<size_t>, std::vector<size_t>> split_indices(size_t n, double val_fraction,
                                                                  std::mt19937_64& rng) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  size_t n_val = static_cast<size_t>(std::floor(static_cast<double>(n) * val_fraction));
  if (n_val == 0 && n > 4) n_val = 1;
  std::vector<size_t> val(idx.begin(), idx.begin() + static_cast<long>(n_val));
  std::vector<size_t> train(idx.begin() + static_cast<long>(n_val), idx.end());
  return {train, val};
}

Tensor frames_tensor(const std::vector<SegSample>& data, const std::vector<size_t>& idx, size_t lo,
                     size_t hi) {
  const Frame& f0 = data[idx[lo]].frame;
  Tensor t({static_cast<int>(hi - lo), 1, f0.height, f0.width});
  for (size_t b = lo; b < hi; ++b) {
    const Frame& f = data[idx[b]].frame;
    if (f.width != f0.width || f.height != f0.height)
      throw std::invalid_argument("train_segnet: all frames must share dims");
    for (size_t i = 0; i < f.pixels.size(); ++i)
      t.data[(b - lo) * f.pixels.size() + i] = f.pixels[i] / 255.0;
  }
  return t;
}

}  // namespace

TrainReport train_segnet(LayerGraph& net, const std::vector<SegSample>& data, TrainOptions opts) {
  if (data.empty()) throw std::invalid_argument("train_segnet: empty dataset");
  std::mt19937_64 rng(opts.seed);
  auto [train_idx, val_idx] = split_indices(data.size(), opts.val_fraction, rng);
  const int logits_node = segnet_logits_node(net);

  Adam adam({.lr = opts.lr});
  TrainReport report;
  double best_val = std::numeric_limits<double>::infinity();
  std::map<std::string, Tensor> best_params = net.params();

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double train_loss = 0;
    size_t batches = 0;
    for (size_t lo = 0; lo < train_idx.size(); lo += static_cast<size_t>(opts.batch)) {
      size_t hi = std::min(train_idx.size(), lo + static_cast<size_t>(opts.batch));
      Tensor input = frames_tensor(data, train_idx, lo, hi);
      std::vector<const SegmentationMap*> labels;
      for (size_t b = lo; b < hi; ++b) labels.push_back(&data[train_idx[b]].labels);
      net.forward({input});
      Tensor grad;
      train_loss += cross_entropy_logits(net.activation(logits_node), labels, &grad);
      net.zero_grad();
      net.backward(logits_node, grad);
      adam.step(net.params(), net.grads());
      ++batches;
    }
    train_loss /= static_cast<double>(std::max<size_t>(batches, 1));

    double val_loss = 0;
    if (!val_idx.empty()) {
      size_t vbatches = 0;
      for (size_t lo = 0; lo < val_idx.size(); lo += static_cast<size_t>(opts.batch)) {
        size_t hi = std::min(val_idx.size(), lo + static_cast<size_t>(opts.batch));
        Tensor input = frames_tensor(data, val_idx, lo, hi);
        std::vector<const SegmentationMap*> labels;
        for (size_t b = lo; b < hi; ++b) labels.push_back(&data[val_idx[b]].labels);
        net.forward({input});
        val_loss += cross_entropy_logits(net.activation(logits_node), labels, nullptr);
        ++vbatches;
      }
      val_loss /= static_cast<double>(vbatches);
    } else {
      val_loss = train_loss;
    }

    report.train_loss.push_back(train_loss);
    report.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params = net.params();
      report.best_epoch = epoch;
    }
  }
  net.params() = best_params;
  return report;
}

namespace {

void roi_batch(const std::vector<RoiSample>& data, const std::vector<size_t>& idx, size_t lo, size_t hi,
               Tensor& maps, Tensor& prev, Tensor& target) {
  const BinaryMap& m0 = data[idx[lo]].events_ds;
  const size_t plane = m0.bits.size();
  maps = Tensor({static_cast<int>(hi - lo), 2, m0.height, m0.width});
  prev = Tensor({static_cast<int>(hi - lo), 4});
  target = Tensor({static_cast<int>(hi - lo), 4});
  for (size_t b = lo; b < hi; ++b) {
    const RoiSample& s = data[idx[b]];
    if (s.events_ds.bits.size() != plane || s.edges_ds.bits.size() != plane)
      throw std::invalid_argument("train_roinet: all maps must share dims");
    const size_t base = (b - lo) * 2 * plane;
    for (size_t i = 0; i < plane; ++i) maps.data[base + i] = s.events_ds.bits[i];
    for (size_t i = 0; i < plane; ++i) maps.data[base + plane + i] = s.edges_ds.bits[i];
    const size_t rb = (b - lo) * 4;
    prev.data[rb + 0] = s.prev_roi.x_min;
    prev.data[rb + 1] = s.prev_roi.y_min;
    prev.data[rb + 2] = s.prev_roi.x_max;
    prev.data[rb + 3] = s.prev_roi.y_max;
    target.data[rb + 0] = s.target.x_min;
    target.data[rb + 1] = s.target.y_min;
    target.data[rb + 2] = s.target.x_max;
    target.data[rb + 3] = s.target.y_max;
  }
}

}  // namespace

TrainReport train_roinet(LayerGraph& net, const std::vector<RoiSample>& data, TrainOptions opts) {
  if (data.empty()) throw std::invalid_argument("train_roinet: empty dataset");
  std::mt19937_64 rng(opts.seed);
  auto [train_idx, val_idx] = split_indices(data.size(), opts.val_fraction, rng);

  Adam adam({.lr = opts.lr});
  TrainReport report;
  double best_val = std::numeric_limits<double>::infinity();
  std::map<std::string, Tensor> best_params = net.params();
  const int out_node = net.output_node();

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double train_loss = 0;
    size_t batches = 0;
    Tensor maps, prev, target;
    for (size_t lo = 0; lo < train_idx.size(); lo += static_cast<size_t>(opts.batch)) {
      size_t hi = std::min(train_idx.size(), lo + static_cast<size_t>(opts.batch));
      roi_batch(data, train_idx, lo, hi, maps, prev, target);
      const Tensor& out = net.forward({maps, prev});
      Tensor grad;
      train_loss += mse_loss(out, target, &grad);
      net.zero_grad();
      net.backward(out_node, grad);
      adam.step(net.params(), net.grads());
      ++batches;
    }
    train_loss /= static_cast<double>(std::max<size_t>(batches, 1));

    double val_loss = 0;
    if (!val_idx.empty()) {
      size_t vbatches = 0;
      for (size_t lo = 0; lo < val_idx.size(); lo += static_cast<size_t>(opts.batch)) {
        size_t hi = std::min(val_idx.size(), lo + static_cast<size_t>(opts.batch));
        roi_batch(data, val_idx, lo, hi, maps, prev, target);
        val_loss += mse_loss(net.forward({maps, prev}), target, nullptr);
        ++vbatches;
      }
      val_loss /= static_cast<double>(vbatches);
    } else {
      val_loss = train_loss;
    }

    report.train_loss.push_back(train_loss);
    report.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params = net.params();
      report.best_epoch = epoch;
    }
  }
  net.params() = best_params;
  return report;
}

TrainReport finetune_segnet_on_rois(LayerGraph& segnet, LayerGraph& roinet,
                                    const std::vector<std::vector<SequenceFrame>>& sequences,
                                    FinetuneOptions opts) {
  // Materialize (frame, labels, crop rect) samples with the frozen roinet.
  struct CropSample {
    const SequenceFrame* frame;
    PixelRect rect;  // full frame when the prediction was infeasible
  };
  std::vector<CropSample> samples;
  for (const auto& seq : sequences) {
    for (size_t t = 1; t < seq.size(); ++t) {
      if (!seq[t - 1].roi) continue;
      const Frame& fprev = seq[t - 1].frame;
      const Frame& fcurr = seq[t].frame;
      BinaryMap events_ds = downsample_by_2(event_map(fprev, fcurr, opts.sigma, opts.epsilon_div));
      BinaryMap edges_ds = downsample_by_2(seg_edge_map(seq[t - 1].labels));
      Roi raw = roinet_forward(roinet, events_ds, edges_ds, *seq[t - 1].roi);
      PixelRect rect{0, 0, fcurr.width, fcurr.height};
      if (roi_is_feasible(raw)) {
        PixelRect r = roi_to_pixels(roi_clamped(raw), fcurr.width, fcurr.height);
        if (r.area() > 0) rect = r;
      }
      samples.push_back({&seq[t], rect});
    }
  }
  if (samples.empty()) throw std::invalid_argument("finetune: no usable samples");

  std::mt19937_64 rng(opts.seed);
  auto [train_idx, val_idx] = split_indices(samples.size(), opts.val_fraction, rng);
  Adam adam({.lr = opts.lr});
  TrainReport report;
  double best_val = std::numeric_limits<double>::infinity();
  std::map<std::string, Tensor> best_params = segnet.params();
  const int logits_node = segnet_logits_node(segnet);

  auto padded_pair = [&](const CropSample& s, Tensor& input, SegmentationMap& labels) {
    Frame fc = crop(s.frame->frame, s.rect);
    SegmentationMap lc = crop(s.frame->labels, s.rect);
    const int pw = (fc.width + opts.pad_multiple - 1) / opts.pad_multiple * opts.pad_multiple;
    const int ph = (fc.height + opts.pad_multiple - 1) / opts.pad_multiple * opts.pad_multiple;
    input = Tensor({1, 1, ph, pw});
    labels = SegmentationMap(pw, ph, 0);  // padding is background
    for (int y = 0; y < fc.height; ++y)
      for (int x = 0; x < fc.width; ++x) {
        input.data[static_cast<size_t>(y) * pw + x] = fc.at(x, y) / 255.0;
        labels.at(x, y) = lc.at(x, y);
      }
  };

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double train_loss = 0;
    for (size_t i : train_idx) {
      Tensor input;
      SegmentationMap labels;
      padded_pair(samples[i], input, labels);
      segnet.forward({input});
      Tensor grad;
      train_loss += cross_entropy_logits(segnet.activation(logits_node), {&labels}, &grad);
      segnet.zero_grad();
      segnet.backward(logits_node, grad);
      adam.step(segnet.params(), segnet.grads());
    }
    train_loss /= static_cast<double>(std::max<size_t>(train_idx.size(), 1));

    double val_loss = 0;
    if (!val_idx.empty()) {
      for (size_t i : val_idx) {
        Tensor input;
        SegmentationMap labels;
        padded_pair(samples[i], input, labels);
        segnet.forward({input});
        val_loss += cross_entropy_logits(segnet.activation(logits_node), {&labels}, nullptr);
      }
      val_loss /= static_cast<double>(val_idx.size());
    } else {
      val_loss = train_loss;
    }

    report.train_loss.push_back(train_loss);
    report.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params = segnet.params();
      report.best_epoch = epoch;
    }
  }
  segnet.params() = best_params;
  return report;
}

}  // namespace edar
