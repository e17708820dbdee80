#include "edar/graph.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace edar {

namespace {
constexpr const char* kMetaPrefix = "__meta__.";
constexpr const char* kMetaName = "__meta__.network_name";
}  // namespace

int LayerGraph::push(LayerDesc desc) {
  for (int in : desc.inputs)
    if (in < 0 || in >= static_cast<int>(layers_.size()))
      throw std::invalid_argument("LayerGraph: input ref must precede consumer");
  layers_.push_back(std::move(desc));
  output_ = static_cast<int>(layers_.size()) - 1;
  return output_;
}

int LayerGraph::add_input() {
  LayerDesc d;
  d.kind = LayerKind::Input;
  int id = push(std::move(d));
  input_nodes_.push_back(id);
  return id;
}

int LayerGraph::add_conv(int in, int c_in, int c_out, int k, const std::string& name) {
  if (k != 1 && k != 3) throw std::invalid_argument("add_conv: kernel must be 1 or 3");
  LayerDesc d;
  d.kind = LayerKind::Conv;
  d.inputs = {in};
  d.k = k;
  d.c_in = c_in;
  d.c_out = c_out;
  d.weights = name + ".w";
  d.bias = name + ".b";
  if (!params_.emplace(d.weights, Tensor({c_out, c_in, k, k})).second)
    throw std::invalid_argument("add_conv: duplicate parameter name " + name);
  params_.emplace(d.bias, Tensor({c_out}));
  return push(std::move(d));
}

int LayerGraph::add_dwsconv(int in, int c, const std::string& name) {
  LayerDesc d;
  d.kind = LayerKind::DwsConv;
  d.inputs = {in};
  d.k = 3;
  d.c_in = c;
  d.c_out = c;
  d.weights = name + ".w";
  d.bias = name + ".b";
  if (!params_.emplace(d.weights, Tensor({c, 3, 3})).second)
    throw std::invalid_argument("add_dwsconv: duplicate parameter name " + name);
  params_.emplace(d.bias, Tensor({c}));
  return push(std::move(d));
}

int LayerGraph::add_fc(int in, int f_in, int f_out, const std::string& name) {
  LayerDesc d;
  d.kind = LayerKind::Fc;
  d.inputs = {in};
  d.c_in = f_in;
  d.c_out = f_out;
  d.weights = name + ".w";
  d.bias = name + ".b";
  if (!params_.emplace(d.weights, Tensor({f_out, f_in})).second)
    throw std::invalid_argument("add_fc: duplicate parameter name " + name);
  params_.emplace(d.bias, Tensor({f_out}));
  return push(std::move(d));
}

int LayerGraph::add_maxpool2(int in) {
  LayerDesc d;
  d.kind = LayerKind::MaxPool2;
  d.inputs = {in};
  return push(std::move(d));
}

int LayerGraph::add_upsample2(int in) {
  LayerDesc d;
  d.kind = LayerKind::Upsample2;
  d.inputs = {in};
  return push(std::move(d));
}

int LayerGraph::add_leaky_relu(int in, double slope) {
  LayerDesc d;
  d.kind = LayerKind::LeakyRelu;
  d.inputs = {in};
  d.slope = slope;
  return push(std::move(d));
}

int LayerGraph::add_sigmoid(int in) {
  LayerDesc d;
  d.kind = LayerKind::Sigmoid;
  d.inputs = {in};
  return push(std::move(d));
}

int LayerGraph::add_softmax_channels(int in) {
  LayerDesc d;
  d.kind = LayerKind::SoftmaxChannels;
  d.inputs = {in};
  return push(std::move(d));
}

int LayerGraph::add_concat_channels(int a, int b) {
  LayerDesc d;
  d.kind = LayerKind::ConcatChannels;
  d.inputs = {a, b};
  return push(std::move(d));
}

int LayerGraph::add_concat_vector(int a, int b) {
  LayerDesc d;
  d.kind = LayerKind::ConcatVector;
  d.inputs = {a, b};
  return push(std::move(d));
}

int LayerGraph::add_add_skip(int a, int b) {
  LayerDesc d;
  d.kind = LayerKind::AddSkip;
  d.inputs = {a, b};
  return push(std::move(d));
}

int LayerGraph::add_flatten(int in) {
  LayerDesc d;
  d.kind = LayerKind::Flatten;
  d.inputs = {in};
  return push(std::move(d));
}

void LayerGraph::init_params(uint64_t seed) {
  std::mt19937_64 rng(seed);
  // graph order, not map order, so adding an unrelated layer later does not
  // reshuffle earlier draws
  for (const LayerDesc& l : layers_) {
    if (l.weights.empty()) continue;
    Tensor& w = params_.at(l.weights);
    long long fan_in = 0;
    switch (l.kind) {
      case LayerKind::Conv: fan_in = static_cast<long long>(l.c_in) * l.k * l.k; break;
      case LayerKind::DwsConv: fan_in = 9; break;
      case LayerKind::Fc: fan_in = l.c_in; break;
      default: break;
    }
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : w.data) v = dist(rng);
    params_.at(l.bias).fill(0.0);
  }
}

const Tensor& LayerGraph::activation(int node) const {
  if (activations_.empty()) throw std::runtime_error("LayerGraph: no forward state");
  return activations_[static_cast<size_t>(node)];
}

const Tensor& LayerGraph::forward(const std::vector<Tensor>& inputs) {
  if (inputs.size() != input_nodes_.size())
    throw std::invalid_argument("forward: expected " + std::to_string(input_nodes_.size()) + " inputs");
  activations_.assign(layers_.size(), Tensor{});
  pool_argmax_.assign(layers_.size(), {});
  size_t next_input = 0;
  for (size_t i = 0; i < layers_.size(); ++i) {
    const LayerDesc& l = layers_[i];
    auto in = [&](int j) -> const Tensor& { return activations_[static_cast<size_t>(l.inputs[j])]; };
    switch (l.kind) {
      case LayerKind::Input: activations_[i] = inputs[next_input++]; break;
      case LayerKind::Conv: activations_[i] = conv2d(in(0), params_.at(l.weights), params_.at(l.bias)); break;
      case LayerKind::DwsConv:
        activations_[i] = dwsconv2d(in(0), params_.at(l.weights), params_.at(l.bias));
        break;
      case LayerKind::MaxPool2: activations_[i] = maxpool2(in(0), &pool_argmax_[i]); break;
      case LayerKind::Upsample2: activations_[i] = upsample2(in(0)); break;
      case LayerKind::Fc: activations_[i] = fully_connected(in(0), params_.at(l.weights), params_.at(l.bias)); break;
      case LayerKind::LeakyRelu: activations_[i] = leaky_relu(in(0), l.slope); break;
      case LayerKind::Sigmoid: activations_[i] = sigmoid(in(0)); break;
      case LayerKind::SoftmaxChannels: activations_[i] = softmax_channels(in(0)); break;
      case LayerKind::ConcatChannels: activations_[i] = concat_channels(in(0), in(1)); break;
      case LayerKind::ConcatVector: {
        const Tensor &a = in(0), &b = in(1);
        if (a.dims.size() != 2 || b.dims.size() != 2 || a.dim(0) != b.dim(0))
          throw std::invalid_argument("concat_vector: expected (N,F) tensors with equal N");
        Tensor out({a.dim(0), a.dim(1) + b.dim(1)});
        for (int n = 0; n < a.dim(0); ++n) {
          std::copy_n(&a.data[static_cast<size_t>(n) * a.dim(1)], a.dim(1),
                      &out.data[static_cast<size_t>(n) * out.dim(1)]);
          std::copy_n(&b.data[static_cast<size_t>(n) * b.dim(1)], b.dim(1),
                      &out.data[static_cast<size_t>(n) * out.dim(1) + a.dim(1)]);
        }
        activations_[i] = std::move(out);
        break;
      }
      case LayerKind::AddSkip: activations_[i] = add_skip(in(0), in(1)); break;
      case LayerKind::Flatten: {
        const Tensor& a = in(0);
        Tensor out = a;
        out.dims = {a.dim(0), static_cast<int>(a.numel() / a.dim(0))};
        activations_[i] = std::move(out);
        break;
      }
    }
  }
  return activations_[static_cast<size_t>(output_)];
}

void LayerGraph::zero_grad() {
  for (auto& [name, g] : grads_) g.fill(0.0);
}

Tensor& LayerGraph::grad(const std::string& name) {
  auto it = grads_.find(name);
  if (it == grads_.end()) {
    it = grads_.emplace(name, Tensor(params_.at(name).dims)).first;
  }
  return it->second;
}

void LayerGraph::backward(int node, const Tensor& grad_at_node) {
  if (activations_.empty()) throw std::runtime_error("backward: run forward first");
  if (!grad_at_node.same_shape(activations_[static_cast<size_t>(node)]))
    throw std::invalid_argument("backward: seed gradient shape mismatch");
  // ensure grad buffers exist
  for (const auto& [name, p] : params_) grad(name);

  std::vector<Tensor> node_grads(layers_.size());
  std::vector<bool> has_grad(layers_.size(), false);
  node_grads[static_cast<size_t>(node)] = grad_at_node;
  has_grad[static_cast<size_t>(node)] = true;

  auto ensure = [&](int id) -> Tensor& {
    if (!has_grad[static_cast<size_t>(id)]) {
      node_grads[static_cast<size_t>(id)] = Tensor(activations_[static_cast<size_t>(id)].dims);
      has_grad[static_cast<size_t>(id)] = true;
    }
    return node_grads[static_cast<size_t>(id)];
  };

  input_grads_.assign(input_nodes_.size(), Tensor{});
  for (int i = node; i >= 0; --i) {
    if (!has_grad[static_cast<size_t>(i)]) continue;
    const LayerDesc& l = layers_[static_cast<size_t>(i)];
    const Tensor& go = node_grads[static_cast<size_t>(i)];
    switch (l.kind) {
      case LayerKind::Input: break;
      case LayerKind::Conv:
        conv2d_backward(activations_[static_cast<size_t>(l.inputs[0])], params_.at(l.weights), go,
                        ensure(l.inputs[0]), grads_.at(l.weights), grads_.at(l.bias));
        break;
      case LayerKind::DwsConv:
        dwsconv2d_backward(activations_[static_cast<size_t>(l.inputs[0])], params_.at(l.weights), go,
                           ensure(l.inputs[0]), grads_.at(l.weights), grads_.at(l.bias));
        break;
      case LayerKind::MaxPool2:
        maxpool2_backward(pool_argmax_[static_cast<size_t>(i)], go, ensure(l.inputs[0]));
        break;
      case LayerKind::Upsample2: upsample2_backward(go, ensure(l.inputs[0])); break;
      case LayerKind::Fc:
        fully_connected_backward(activations_[static_cast<size_t>(l.inputs[0])], params_.at(l.weights), go,
                                 ensure(l.inputs[0]), grads_.at(l.weights), grads_.at(l.bias));
        break;
      case LayerKind::LeakyRelu: {
        const Tensor& x = activations_[static_cast<size_t>(l.inputs[0])];
        Tensor& gi = ensure(l.inputs[0]);
        for (size_t j = 0; j < x.data.size(); ++j)
          gi.data[j] += go.data[j] * (x.data[j] > 0 ? 1.0 : l.slope);
        break;
      }
      case LayerKind::Sigmoid: {
        const Tensor& s = activations_[static_cast<size_t>(i)];
        Tensor& gi = ensure(l.inputs[0]);
        for (size_t j = 0; j < s.data.size(); ++j)
          gi.data[j] += go.data[j] * s.data[j] * (1.0 - s.data[j]);
        break;
      }
      case LayerKind::SoftmaxChannels: {
        const Tensor& s = activations_[static_cast<size_t>(i)];
        Tensor& gi = ensure(l.inputs[0]);
        const int N = s.dim(0), C = s.dim(1);
        const size_t plane = static_cast<size_t>(s.dim(2)) * s.dim(3);
        for (int n = 0; n < N; ++n) {
          for (size_t p = 0; p < plane; ++p) {
            const size_t base = static_cast<size_t>(n) * C * plane + p;
            double dot = 0;
            for (int c = 0; c < C; ++c) dot += go.data[base + c * plane] * s.data[base + c * plane];
            for (int c = 0; c < C; ++c)
              gi.data[base + c * plane] += s.data[base + c * plane] * (go.data[base + c * plane] - dot);
          }
        }
        break;
      }
      case LayerKind::ConcatChannels: {
        const Tensor& a = activations_[static_cast<size_t>(l.inputs[0])];
        const Tensor& b = activations_[static_cast<size_t>(l.inputs[1])];
        Tensor& ga = ensure(l.inputs[0]);
        Tensor& gb = ensure(l.inputs[1]);
        const int N = a.dim(0), Ca = a.dim(1), Cb = b.dim(1);
        const size_t plane = static_cast<size_t>(a.dim(2)) * a.dim(3);
        for (int n = 0; n < N; ++n) {
          const double* src = &go.data[static_cast<size_t>(n) * (Ca + Cb) * plane];
          for (size_t j = 0; j < static_cast<size_t>(Ca) * plane; ++j)
            ga.data[static_cast<size_t>(n) * Ca * plane + j] += src[j];
          for (size_t j = 0; j < static_cast<size_t>(Cb) * plane; ++j)
            gb.data[static_cast<size_t>(n) * Cb * plane + j] += src[static_cast<size_t>(Ca) * plane + j];
        }
        break;
      }
      case LayerKind::ConcatVector: {
        const Tensor& a = activations_[static_cast<size_t>(l.inputs[0])];
        const Tensor& b = activations_[static_cast<size_t>(l.inputs[1])];
        Tensor& ga = ensure(l.inputs[0]);
        Tensor& gb = ensure(l.inputs[1]);
        const int N = a.dim(0), Fa = a.dim(1), Fb = b.dim(1);
        for (int n = 0; n < N; ++n) {
          const double* src = &go.data[static_cast<size_t>(n) * (Fa + Fb)];
          for (int j = 0; j < Fa; ++j) ga.data[static_cast<size_t>(n) * Fa + j] += src[j];
          for (int j = 0; j < Fb; ++j) gb.data[static_cast<size_t>(n) * Fb + j] += src[Fa + j];
        }
        break;
      }
      case LayerKind::AddSkip: {
        Tensor& ga = ensure(l.inputs[0]);
        Tensor& gb = ensure(l.inputs[1]);
        for (size_t j = 0; j < go.data.size(); ++j) {
          ga.data[j] += go.data[j];
          gb.data[j] += go.data[j];
        }
        break;
      }
      case LayerKind::Flatten: {
        Tensor& gi = ensure(l.inputs[0]);
        for (size_t j = 0; j < go.data.size(); ++j) gi.data[j] += go.data[j];
        break;
      }
    }
  }
  for (size_t k = 0; k < input_nodes_.size(); ++k) {
    const int id = input_nodes_[k];
    input_grads_[k] = has_grad[static_cast<size_t>(id)] ? node_grads[static_cast<size_t>(id)]
                                                        : Tensor(activations_[static_cast<size_t>(id)].dims);
  }
}

const Tensor& LayerGraph::input_grad(int input_index) const {
  if (input_index < 0 || input_index >= static_cast<int>(input_grads_.size()) ||
      input_grads_[static_cast<size_t>(input_index)].dims.empty())
    throw std::runtime_error("input_grad: run backward first");
  return input_grads_[static_cast<size_t>(input_index)];
}

long long LayerGraph::param_count() const {
  long long n = 0;
  for (const auto& [name, p] : params_) n += p.numel();
  return n;
}

std::vector<std::vector<int>> LayerGraph::infer_shapes(
    const std::vector<std::vector<int>>& input_dims) const {
  if (input_dims.size() != input_nodes_.size())
    throw std::invalid_argument("infer_shapes: wrong number of input dims");
  std::vector<std::vector<int>> shapes(layers_.size());
  size_t next_input = 0;
  for (size_t i = 0; i < layers_.size(); ++i) {
    const LayerDesc& l = layers_[i];
    auto in = [&](int j) -> const std::vector<int>& { return shapes[static_cast<size_t>(l.inputs[j])]; };
    switch (l.kind) {
      case LayerKind::Input: shapes[i] = input_dims[next_input++]; break;
      case LayerKind::Conv:
      case LayerKind::DwsConv: {
        auto s = in(0);
        s[1] = l.c_out;
        shapes[i] = s;
        break;
      }
      case LayerKind::MaxPool2: {
        auto s = in(0);
        s[2] = (s[2] + 1) / 2;
        s[3] = (s[3] + 1) / 2;
        shapes[i] = s;
        break;
      }
      case LayerKind::Upsample2: {
        auto s = in(0);
        s[2] *= 2;
        s[3] *= 2;
        shapes[i] = s;
        break;
      }
      case LayerKind::Fc: shapes[i] = {in(0)[0], l.c_out}; break;
      case LayerKind::LeakyRelu:
      case LayerKind::Sigmoid:
      case LayerKind::SoftmaxChannels: shapes[i] = in(0); break;
      case LayerKind::ConcatChannels: {
        auto s = in(0);
        s[1] += in(1)[1];
        shapes[i] = s;
        break;
      }
      case LayerKind::ConcatVector: shapes[i] = {in(0)[0], in(0)[1] + in(1)[1]}; break;
      case LayerKind::AddSkip: shapes[i] = in(0); break;
      case LayerKind::Flatten: {
        long long f = 1;
        for (size_t j = 1; j < in(0).size(); ++j) f *= in(0)[j];
        shapes[i] = {in(0)[0], static_cast<int>(f)};
        break;
      }
    }
  }
  return shapes;
}

long long LayerGraph::flops(const std::vector<std::vector<int>>& input_dims) const {
  auto shapes = infer_shapes(input_dims);
  auto numel = [](const std::vector<int>& s) {
    long long n = 1;
    for (int e : s) n *= e;
    return n;
  };
  long long total = 0;
  for (size_t i = 0; i < layers_.size(); ++i) {
    const LayerDesc& l = layers_[i];
    const auto& out = shapes[i];
    switch (l.kind) {
      case LayerKind::Conv:
        // 2 * K^2 * C_in * C_out * H * W (MAC = 2 FLOPs, bias not counted)
        total += 2LL * l.k * l.k * l.c_in * l.c_out * out[2] * out[3] * out[0];
        break;
      case LayerKind::DwsConv: total += 18LL * l.c_out * out[2] * out[3] * out[0]; break;
      case LayerKind::Fc: total += 2LL * l.c_in * l.c_out * out[0]; break;
      case LayerKind::LeakyRelu: total += numel(out); break;
      case LayerKind::Sigmoid: total += 4 * numel(out); break;
      case LayerKind::SoftmaxChannels: total += 5 * numel(out); break;
      case LayerKind::MaxPool2: total += 3 * numel(out); break;
      case LayerKind::AddSkip: total += numel(out); break;
      default: break;  // inputs, copies and reshapes are free
    }
  }
  return total;
}

Tensor& LayerGraph::param(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::invalid_argument("param: no parameter named " + name);
  return it->second;
}

const Tensor& LayerGraph::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::invalid_argument("param: no parameter named " + name);
  return it->second;
}

// --- weights io ---------------------------------------------------------------

namespace {

void put_u16(std::ostream& out, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

uint16_t get_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_entry(std::ostream& out, const std::string& name, const std::vector<int>& dims,
                 const std::vector<double>& data) {
  if (name.size() > 0xffff) throw std::runtime_error("save_weights: name too long");
  put_u16(out, static_cast<uint16_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  out.put(static_cast<char>(dims.size()));
  for (int d : dims) put_u32(out, static_cast<uint32_t>(d));
  std::vector<float> f(data.begin(), data.end());
  out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * 4));
}

struct Entry {
  std::string name;
  std::vector<int> dims;
  std::vector<double> data;
};

std::vector<Entry> read_entries(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_weights: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EDAR", 4) != 0)
    throw std::runtime_error("load_weights: bad magic in " + path);
  uint32_t version = get_u32(in);
  if (version != 1) throw std::runtime_error("load_weights: unsupported version in " + path);
  uint32_t count = get_u32(in);
  std::vector<Entry> entries;
  entries.reserve(count);
  for (uint32_t t = 0; t < count; ++t) {
    Entry e;
    uint16_t name_len = get_u16(in);
    e.name.resize(name_len);
    in.read(e.name.data(), name_len);
    int ndim = in.get();
    long long n = 1;
    for (int i = 0; i < ndim; ++i) {
      e.dims.push_back(static_cast<int>(get_u32(in)));
      n *= e.dims.back();
    }
    std::vector<float> f(static_cast<size_t>(n));
    in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(f.size() * 4));
    if (!in) throw std::runtime_error("load_weights: truncated file " + path);
    e.data.assign(f.begin(), f.end());
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

void save_weights(const LayerGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_weights: cannot open " + path);
  out.write("EDAR", 4);
  put_u32(out, 1);
  uint32_t count = static_cast<uint32_t>(graph.params().size() + graph.meta.size() + (graph.name.empty() ? 0 : 1));
  put_u32(out, count);
  if (!graph.name.empty()) {
    std::vector<double> chars(graph.name.begin(), graph.name.end());
    write_entry(out, kMetaName, {static_cast<int>(chars.size())}, chars);
  }
  for (const auto& [key, values] : graph.meta)
    write_entry(out, kMetaPrefix + key, {static_cast<int>(values.size())}, values);
  for (const auto& [name, tensor] : graph.params()) write_entry(out, name, tensor.dims, tensor.data);
  if (!out) throw std::runtime_error("save_weights: write failed " + path);
}

void load_weights(LayerGraph& graph, const std::string& path) {
  auto entries = read_entries(path);
  size_t loaded = 0;
  std::string file_name;
  std::map<std::string, std::vector<double>> file_meta;
  for (auto& e : entries) {
    if (e.name == kMetaName) {
      file_name.assign(e.data.size(), ' ');
      for (size_t i = 0; i < e.data.size(); ++i) file_name[i] = static_cast<char>(e.data[i]);
      continue;
    }
    if (e.name.rfind(kMetaPrefix, 0) == 0) {
      file_meta[e.name.substr(std::strlen(kMetaPrefix))] = std::move(e.data);
      continue;
    }
    auto it = graph.params().find(e.name);
    if (it == graph.params().end())
      throw std::runtime_error("load_weights: unexpected tensor " + e.name + " in " + path);
    if (it->second.dims != e.dims)
      throw std::runtime_error("load_weights: shape mismatch for " + e.name + " in " + path);
    it->second.data = std::move(e.data);
    ++loaded;
  }
  if (!graph.name.empty() && !file_name.empty() && graph.name != file_name)
    throw std::runtime_error("load_weights: file holds '" + file_name + "', expected '" + graph.name + "'");
  if (loaded != graph.params().size())
    throw std::runtime_error("load_weights: missing tensors in " + path);
  if (!file_name.empty()) graph.name = file_name;
  for (auto& [k, v] : file_meta) graph.meta[k] = std::move(v);
}

std::string read_weights_network_name(const std::string& path) {
  for (const auto& e : read_entries(path)) {
    if (e.name == kMetaName) {
      std::string s(e.data.size(), ' ');
      for (size_t i = 0; i < e.data.size(); ++i) s[i] = static_cast<char>(e.data[i]);
      return s;
    }
  }
  return "";
}

std::map<std::string, std::vector<double>> read_weights_meta(const std::string& path) {
  std::map<std::string, std::vector<double>> meta;
  for (auto& e : read_entries(path))
    if (e.name != kMetaName && e.name.rfind(kMetaPrefix, 0) == 0)
      meta[e.name.substr(std::strlen(kMetaPrefix))] = std::move(e.data);
  return meta;
}

}  // namespace edar
