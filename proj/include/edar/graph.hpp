#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "edar/tensor.hpp"

namespace edar {

enum class LayerKind {
  Input,
  Conv,           // 1x1 or 3x3, stride 1, same padding
  DwsConv,        // depthwise 3x3
  MaxPool2,
  Upsample2,
  Fc,
  LeakyRelu,
  Sigmoid,
  SoftmaxChannels,
  ConcatChannels,
  ConcatVector,   // concat along dim 1 of (N,F) tensors
  AddSkip,
  Flatten,
};

struct LayerDesc {
  LayerKind kind = LayerKind::Input;
  std::vector<int> inputs;  // node ids; all precede this node
  std::string weights;      // parameter names, empty when the layer has none
  std::string bias;
  int k = 0;                // conv kernel size
  int c_in = 0, c_out = 0;  // conv channels / fc features
  double slope = 0.0;       // leaky relu
};

// Static network description: an ordered, acyclic list of layers plus a named
// parameter store. Forward caches per-node activations; backward produces
// gradients for every parameter and layer input. The node order is the
// topological order.
class LayerGraph {
 public:
  int add_input();
  int add_conv(int in, int c_in, int c_out, int k, const std::string& name);
  int add_dwsconv(int in, int c, const std::string& name);
  int add_fc(int in, int f_in, int f_out, const std::string& name);
  int add_maxpool2(int in);
  int add_upsample2(int in);
  int add_leaky_relu(int in, double slope = 0.01);
  int add_sigmoid(int in);
  int add_softmax_channels(int in);
  int add_concat_channels(int a, int b);
  int add_concat_vector(int a, int b);
  int add_add_skip(int a, int b);
  int add_flatten(int in);

  int output_node() const { return output_; }
  void set_output(int node) { output_ = node; }
  int num_nodes() const { return static_cast<int>(layers_.size()); }
  const std::vector<LayerDesc>& layers() const { return layers_; }

  // Kaiming-uniform fan-in init in graph order, biases zero.
  void init_params(uint64_t seed);

  // Inputs are consumed in the order add_input() was called.
  const Tensor& forward(const std::vector<Tensor>& inputs);
  const Tensor& activation(int node) const;
  bool has_forward_state() const { return !activations_.empty(); }

  // Seeds d(loss)/d(activation[node]) and propagates to all parameters and
  // inputs. Parameter gradients accumulate until zero_grad(); input gradients
  // are replaced on every call.
  void backward(int node, const Tensor& grad);
  void zero_grad();
  const Tensor& input_grad(int input_index) const;

  Tensor& param(const std::string& name);
  const Tensor& param(const std::string& name) const;
  Tensor& grad(const std::string& name);
  std::map<std::string, Tensor>& params() { return params_; }
  const std::map<std::string, Tensor>& params() const { return params_; }
  std::map<std::string, Tensor>& grads() { return grads_; }

  long long param_count() const;
  // Analytic FLOP count via shape inference (no forward pass needed).
  // input_dims: one dim vector per input node. Multiply-accumulate = 2 FLOPs.
  long long flops(const std::vector<std::vector<int>>& input_dims) const;
  std::vector<std::vector<int>> infer_shapes(const std::vector<std::vector<int>>& input_dims) const;

  // Identity and resolution binding, serialized with the weights.
  std::string name;
  std::map<std::string, std::vector<double>> meta;

 private:
  int push(LayerDesc desc);
  std::vector<LayerDesc> layers_;
  std::vector<int> input_nodes_;
  int output_ = -1;
  std::map<std::string, Tensor> params_;
  std::map<std::string, Tensor> grads_;
  std::vector<Tensor> activations_;
  std::vector<Tensor> input_grads_;
  std::vector<std::vector<int64_t>> pool_argmax_;
};

// Weight file format, little-endian: magic "EDAR", u32 version=1, u32 tensor
// count; per tensor: u16 name length, UTF-8 name, u8 ndim, u32 dims[ndim],
// raw float32 data. No alignment padding. The graph's name and meta entries
// are stored as reserved "__meta__." tensors.
void save_weights(const LayerGraph& graph, const std::string& path);
// Loads into an already-built graph; network name and every parameter shape
// must match.
void load_weights(LayerGraph& graph, const std::string& path);
// Peeks only the embedded network name.
std::string read_weights_network_name(const std::string& path);
// All "__meta__." entries of a weight file, without loading parameters.
std::map<std::string, std::vector<double>> read_weights_meta(const std::string& path);

}  // namespace edar
