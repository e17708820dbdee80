#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edar {

// Dense n-dimensional array of 64-bit reals, row-major. Activations use
// (N, C, H, W) order. Training and gradient oracles run at 64-bit precision;
// the on-disk weight format is 32-bit (see weights io in graph.hpp).
struct Tensor {
  std::vector<int> dims;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> d);
  Tensor(std::vector<int> d, std::vector<double> values);

  long long numel() const;
  int dim(int i) const { return dims[static_cast<size_t>(i)]; }
  bool same_shape(const Tensor& o) const { return dims == o.dims; }
  void fill(double v);

  // 4D accessor for (N,C,H,W) activations.
  double& at4(int n, int c, int y, int x) {
    return data[((static_cast<size_t>(n) * dims[1] + c) * dims[2] + y) * dims[3] + x];
  }
  double at4(int n, int c, int y, int x) const {
    return data[((static_cast<size_t>(n) * dims[1] + c) * dims[2] + y) * dims[3] + x];
  }
};

std::string shape_str(const Tensor& t);

// --- layer primitives --------------------------------------------------------
// All convolutions: stride 1, zero "same" padding, kernel 1x1 or 3x3.
// weights (C_out, C_in, K, K), bias (C_out).
Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias);
void conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                     Tensor& grad_in, Tensor& grad_w, Tensor& grad_b);

// Depthwise 3x3: one filter per channel, no cross-channel mixing.
// depth_weights (C, 3, 3), bias (C).
Tensor dwsconv2d(const Tensor& input, const Tensor& depth_weights, const Tensor& bias);
void dwsconv2d_backward(const Tensor& input, const Tensor& depth_weights, const Tensor& grad_out,
                        Tensor& grad_in, Tensor& grad_w, Tensor& grad_b);

// 2x2 max pooling, stride 2, ceil mode (odd dims padded with -inf). argmax
// receives the flat input index of each output's maximum when non-null.
Tensor maxpool2(const Tensor& input, std::vector<int64_t>* argmax = nullptr);
void maxpool2_backward(const std::vector<int64_t>& argmax, const Tensor& grad_out, Tensor& grad_in);

// Nearest-neighbor 2x replication.
Tensor upsample2(const Tensor& input);
void upsample2_backward(const Tensor& grad_out, Tensor& grad_in);

// input (N, F_in), weights (F_out, F_in), bias (F_out).
Tensor fully_connected(const Tensor& input, const Tensor& weights, const Tensor& bias);
void fully_connected_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                              Tensor& grad_in, Tensor& grad_w, Tensor& grad_b);

Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope);
Tensor sigmoid(const Tensor& x);
// Per-pixel softmax across the class channel of an (N,C,H,W) tensor.
Tensor softmax_channels(const Tensor& x);

// Channel concatenation (equal N,H,W) and elementwise skip addition.
Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor add_skip(const Tensor& a, const Tensor& b);

}  // namespace edar
