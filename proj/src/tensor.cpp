#include "edar/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "edar/parallel.hpp"

namespace edar {

Tensor::Tensor(std::vector<int> d) : dims(std::move(d)) {
  long long n = 1;
  for (int e : dims) {
    if (e <= 0) throw std::invalid_argument("Tensor: non-positive extent");
    n *= e;
  }
  data.assign(static_cast<size_t>(n), 0.0);
}

Tensor::Tensor(std::vector<int> d, std::vector<double> values) : Tensor(std::move(d)) {
  if (values.size() != data.size()) throw std::invalid_argument("Tensor: data length mismatch");
  data = std::move(values);
}

long long Tensor::numel() const {
  long long n = 1;
  for (int e : dims) n *= e;
  return n;
}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

std::string shape_str(const Tensor& t) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < t.dims.size(); ++i) os << (i ? "," : "") << t.dims[i];
  os << ")";
  return os.str();
}

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_nchw(const Tensor& t, const char* who) {
  if (t.dims.size() != 4) throw std::invalid_argument(std::string(who) + ": expected 4D (N,C,H,W) tensor");
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  require_nchw(input, "conv2d");
  require(weights.dims.size() == 4, "conv2d: weights must be (C_out,C_in,K,K)");
  const int N = input.dim(0), Cin = input.dim(1), H = input.dim(2), W = input.dim(3);
  const int Cout = weights.dim(0), K = weights.dim(2);
  require(K == 1 || K == 3, "conv2d: kernel must be 1x1 or 3x3");
  require(weights.dim(1) == Cin && weights.dim(3) == K, "conv2d: weight shape mismatch");
  require(bias.dims.size() == 1 && bias.dim(0) == Cout, "conv2d: bias shape mismatch");
  const int off = K / 2;

  Tensor out({N, Cout, H, W});
  const size_t plane = static_cast<size_t>(H) * W;
  // One (n, oc) output plane per task. Accumulation order per output pixel is
  // fixed at (ic, ky, kx), so results are bit-identical at any thread count.
  parallel_for(static_cast<long long>(N) * Cout, [&](long long t) {
    const int n = static_cast<int>(t / Cout), oc = static_cast<int>(t % Cout);
    double* o = &out.data[(static_cast<size_t>(n) * Cout + oc) * plane];
    std::fill(o, o + plane, bias.data[oc]);
    for (int ic = 0; ic < Cin; ++ic) {
      const double* in = &input.data[(static_cast<size_t>(n) * Cin + ic) * plane];
      for (int ky = 0; ky < K; ++ky) {
        for (int kx = 0; kx < K; ++kx) {
          const double wv = weights.data[((static_cast<size_t>(oc) * Cin + ic) * K + ky) * K + kx];
          const int dy = ky - off, dx = kx - off;
          const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          for (int y = y0; y < y1; ++y) {
            double* orow = o + static_cast<size_t>(y) * W;
            const double* irow = in + static_cast<size_t>(y + dy) * W + dx;
            for (int x = x0; x < x1; ++x) orow[x] += wv * irow[x];
          }
        }
      }
    }
  });
  return out;
}

void conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                     Tensor& grad_in, Tensor& grad_w, Tensor& grad_b) {
  const int N = input.dim(0), Cin = input.dim(1), H = input.dim(2), W = input.dim(3);
  const int Cout = weights.dim(0), K = weights.dim(2), off = K / 2;
  require(grad_out.dims == std::vector<int>({N, Cout, H, W}), "conv2d_backward: grad_out shape");
  require(grad_in.same_shape(input) && grad_w.same_shape(weights) && grad_b.dim(0) == Cout,
          "conv2d_backward: grad buffer shape");
  const size_t plane = static_cast<size_t>(H) * W;

  // weight and bias grads, partitioned by output channel
  parallel_for(Cout, [&](long long oc) {
    double gb = 0;
    for (int n = 0; n < N; ++n) {
      const double* go = &grad_out.data[(static_cast<size_t>(n) * Cout + oc) * plane];
      for (size_t i = 0; i < plane; ++i) gb += go[i];
    }
    grad_b.data[oc] += gb;
    for (int ic = 0; ic < Cin; ++ic) {
      for (int ky = 0; ky < K; ++ky) {
        for (int kx = 0; kx < K; ++kx) {
          const int dy = ky - off, dx = kx - off;
          double gw = 0;
          for (int n = 0; n < N; ++n) {
            const double* go = &grad_out.data[(static_cast<size_t>(n) * Cout + oc) * plane];
            const double* in = &input.data[(static_cast<size_t>(n) * Cin + ic) * plane];
            const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
            const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
            for (int y = y0; y < y1; ++y) {
              const double* grow = go + static_cast<size_t>(y) * W;
              const double* irow = in + static_cast<size_t>(y + dy) * W + dx;
              for (int x = x0; x < x1; ++x) gw += grow[x] * irow[x];
            }
          }
          grad_w.data[((static_cast<size_t>(oc) * Cin + ic) * K + ky) * K + kx] += gw;
        }
      }
    }
  });

  // input grads, partitioned by (n, ic) plane
  parallel_for(static_cast<long long>(N) * Cin, [&](long long t) {
    const int n = static_cast<int>(t / Cin), ic = static_cast<int>(t % Cin);
    double* gi = &grad_in.data[(static_cast<size_t>(n) * Cin + ic) * plane];
    for (int oc = 0; oc < Cout; ++oc) {
      const double* go = &grad_out.data[(static_cast<size_t>(n) * Cout + oc) * plane];
      for (int ky = 0; ky < K; ++ky) {
        for (int kx = 0; kx < K; ++kx) {
          const double wv = weights.data[((static_cast<size_t>(oc) * Cin + ic) * K + ky) * K + kx];
          const int dy = ky - off, dx = kx - off;
          // out(y,x) consumed in(y+dy, x+dx): scatter transposed
          const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          for (int y = y0; y < y1; ++y) {
            const double* grow = go + static_cast<size_t>(y) * W;
            double* irow = gi + static_cast<size_t>(y + dy) * W + dx;
            for (int x = x0; x < x1; ++x) irow[x] += wv * grow[x];
          }
        }
      }
    }
  });
}

Tensor dwsconv2d(const Tensor& input, const Tensor& depth_weights, const Tensor& bias) {
  require_nchw(input, "dwsconv2d");
  const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  require(depth_weights.dims == std::vector<int>({C, 3, 3}), "dwsconv2d: weights must be (C,3,3)");
  require(bias.dims.size() == 1 && bias.dim(0) == C, "dwsconv2d: bias shape mismatch");
  const size_t plane = static_cast<size_t>(H) * W;

  Tensor out({N, C, H, W});
  parallel_for(static_cast<long long>(N) * C, [&](long long t) {
    const int n = static_cast<int>(t / C), c = static_cast<int>(t % C);
    double* o = &out.data[(static_cast<size_t>(n) * C + c) * plane];
    const double* in = &input.data[(static_cast<size_t>(n) * C + c) * plane];
    std::fill(o, o + plane, bias.data[c]);
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double wv = depth_weights.data[(static_cast<size_t>(c) * 3 + ky) * 3 + kx];
        const int dy = ky - 1, dx = kx - 1;
        const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
        const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
        for (int y = y0; y < y1; ++y) {
          double* orow = o + static_cast<size_t>(y) * W;
          const double* irow = in + static_cast<size_t>(y + dy) * W + dx;
          for (int x = x0; x < x1; ++x) orow[x] += wv * irow[x];
        }
      }
    }
  });
  return out;
}

void dwsconv2d_backward(const Tensor& input, const Tensor& depth_weights, const Tensor& grad_out,
                        Tensor& grad_in, Tensor& grad_w, Tensor& grad_b) {
  const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  require(grad_out.same_shape(input), "dwsconv2d_backward: grad_out shape");
  const size_t plane = static_cast<size_t>(H) * W;

  parallel_for(C, [&](long long c) {
    double gb = 0;
    for (int n = 0; n < N; ++n) {
      const double* go = &grad_out.data[(static_cast<size_t>(n) * C + c) * plane];
      for (size_t i = 0; i < plane; ++i) gb += go[i];
    }
    grad_b.data[c] += gb;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int dy = ky - 1, dx = kx - 1;
        double gw = 0;
        for (int n = 0; n < N; ++n) {
          const double* go = &grad_out.data[(static_cast<size_t>(n) * C + c) * plane];
          const double* in = &input.data[(static_cast<size_t>(n) * C + c) * plane];
          const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          for (int y = y0; y < y1; ++y) {
            const double* grow = go + static_cast<size_t>(y) * W;
            const double* irow = in + static_cast<size_t>(y + dy) * W + dx;
            for (int x = x0; x < x1; ++x) gw += grow[x] * irow[x];
          }
        }
        grad_w.data[(static_cast<size_t>(c) * 3 + ky) * 3 + kx] += gw;
      }
    }
  });

  parallel_for(static_cast<long long>(N) * C, [&](long long t) {
    const int n = static_cast<int>(t / C), c = static_cast<int>(t % C);
    double* gi = &grad_in.data[(static_cast<size_t>(n) * C + c) * plane];
    const double* go = &grad_out.data[(static_cast<size_t>(n) * C + c) * plane];
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double wv = depth_weights.data[(static_cast<size_t>(c) * 3 + ky) * 3 + kx];
        const int dy = ky - 1, dx = kx - 1;
        const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
        const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
        for (int y = y0; y < y1; ++y) {
          const double* grow = go + static_cast<size_t>(y) * W;
          double* irow = gi + static_cast<size_t>(y + dy) * W + dx;
          for (int x = x0; x < x1; ++x) irow[x] += wv * grow[x];
        }
      }
    }
  });
}

Tensor maxpool2(const Tensor& input, std::vector<int64_t>* argmax) {
  require_nchw(input, "maxpool2");
  const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  const int OH = (H + 1) / 2, OW = (W + 1) / 2;
  Tensor out({N, C, OH, OW});
  if (argmax) argmax->assign(out.data.size(), -1);
  for (int n = 0; n < N; ++n) {
    for (int c = 0; c < C; ++c) {
      for (int oy = 0; oy < OH; ++oy) {
        for (int ox = 0; ox < OW; ++ox) {
          double best = -std::numeric_limits<double>::infinity();
          int64_t best_i = -1;
          for (int dy = 0; dy < 2 && 2 * oy + dy < H; ++dy) {
            for (int dx = 0; dx < 2 && 2 * ox + dx < W; ++dx) {
              size_t i = ((static_cast<size_t>(n) * C + c) * H + 2 * oy + dy) * W + 2 * ox + dx;
              if (input.data[i] > best) {
                best = input.data[i];
                best_i = static_cast<int64_t>(i);
              }
            }
          }
          size_t o = ((static_cast<size_t>(n) * C + c) * OH + oy) * OW + ox;
          out.data[o] = best;
          if (argmax) (*argmax)[o] = best_i;
        }
      }
    }
  }
  return out;
}

void maxpool2_backward(const std::vector<int64_t>& argmax, const Tensor& grad_out, Tensor& grad_in) {
  require(argmax.size() == grad_out.data.size(), "maxpool2_backward: argmax size");
  for (size_t o = 0; o < argmax.size(); ++o) grad_in.data[static_cast<size_t>(argmax[o])] += grad_out.data[o];
}

Tensor upsample2(const Tensor& input) {
  require_nchw(input, "upsample2");
  const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  Tensor out({N, C, 2 * H, 2 * W});
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < 2 * H; ++y) {
        const double* irow = &input.data[((static_cast<size_t>(n) * C + c) * H + y / 2) * W];
        double* orow = &out.data[((static_cast<size_t>(n) * C + c) * 2 * H + y) * 2 * W];
        for (int x = 0; x < 2 * W; ++x) orow[x] = irow[x / 2];
      }
  return out;
}

void upsample2_backward(const Tensor& grad_out, Tensor& grad_in) {
  const int N = grad_in.dim(0), C = grad_in.dim(1), H = grad_in.dim(2), W = grad_in.dim(3);
  require(grad_out.dims == std::vector<int>({N, C, 2 * H, 2 * W}), "upsample2_backward: shape");
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < 2 * H; ++y) {
        double* irow = &grad_in.data[((static_cast<size_t>(n) * C + c) * H + y / 2) * W];
        const double* orow = &grad_out.data[((static_cast<size_t>(n) * C + c) * 2 * H + y) * 2 * W];
        for (int x = 0; x < 2 * W; ++x) irow[x / 2] += orow[x];
      }
}

Tensor fully_connected(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  require(input.dims.size() == 2, "fully_connected: input must be (N,F)");
  const int N = input.dim(0), Fin = input.dim(1);
  require(weights.dims.size() == 2 && weights.dim(1) == Fin, "fully_connected: weight shape mismatch");
  const int Fout = weights.dim(0);
  require(bias.dims.size() == 1 && bias.dim(0) == Fout, "fully_connected: bias shape mismatch");
  Tensor out({N, Fout});
  parallel_for(static_cast<long long>(N) * Fout, [&](long long t) {
    const int n = static_cast<int>(t / Fout), o = static_cast<int>(t % Fout);
    const double* in = &input.data[static_cast<size_t>(n) * Fin];
    const double* w = &weights.data[static_cast<size_t>(o) * Fin];
    double acc = bias.data[o];
    for (int i = 0; i < Fin; ++i) acc += w[i] * in[i];
    out.data[static_cast<size_t>(n) * Fout + o] = acc;
  });
  return out;
}

void fully_connected_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                              Tensor& grad_in, Tensor& grad_w, Tensor& grad_b) {
  const int N = input.dim(0), Fin = input.dim(1), Fout = weights.dim(0);
  require(grad_out.dims == std::vector<int>({N, Fout}), "fully_connected_backward: grad_out shape");
  parallel_for(Fout, [&](long long o) {
    double gb = 0;
    for (int n = 0; n < N; ++n) {
      const double g = grad_out.data[static_cast<size_t>(n) * Fout + o];
      gb += g;
      const double* in = &input.data[static_cast<size_t>(n) * Fin];
      double* gw = &grad_w.data[static_cast<size_t>(o) * Fin];
      for (int i = 0; i < Fin; ++i) gw[i] += g * in[i];
    }
    grad_b.data[o] += gb;
  });
  for (int n = 0; n < N; ++n) {
    double* gi = &grad_in.data[static_cast<size_t>(n) * Fin];
    for (int o = 0; o < Fout; ++o) {
      const double g = grad_out.data[static_cast<size_t>(n) * Fout + o];
      const double* w = &weights.data[static_cast<size_t>(o) * Fin];
      for (int i = 0; i < Fin; ++i) gi[i] += g * w[i];
    }
  }
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data) v = v > 0 ? v : 0.0;
  return out;
}

Tensor leaky_relu(const Tensor& x, double slope) {
  Tensor out = x;
  for (double& v : out.data) v = v > 0 ? v : slope * v;
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  return out;
}

Tensor softmax_channels(const Tensor& x) {
  require_nchw(x, "softmax_channels");
  const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  Tensor out = x;
  const size_t plane = static_cast<size_t>(H) * W;
  for (int n = 0; n < N; ++n) {
    for (size_t p = 0; p < plane; ++p) {
      size_t base = static_cast<size_t>(n) * C * plane + p;
      double mx = x.data[base];
      for (int c = 1; c < C; ++c) mx = std::max(mx, x.data[base + c * plane]);
      double sum = 0;
      for (int c = 0; c < C; ++c) {
        double e = std::exp(x.data[base + c * plane] - mx);
        out.data[base + c * plane] = e;
        sum += e;
      }
      for (int c = 0; c < C; ++c) out.data[base + c * plane] /= sum;
    }
  }
  return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  require_nchw(a, "concat_channels");
  require_nchw(b, "concat_channels");
  require(a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) && a.dim(3) == b.dim(3),
          "concat_channels: N,H,W must match");
  const int N = a.dim(0), Ca = a.dim(1), Cb = b.dim(1), H = a.dim(2), W = a.dim(3);
  const size_t plane = static_cast<size_t>(H) * W;
  Tensor out({N, Ca + Cb, H, W});
  for (int n = 0; n < N; ++n) {
    std::copy_n(&a.data[static_cast<size_t>(n) * Ca * plane], static_cast<size_t>(Ca) * plane,
                &out.data[static_cast<size_t>(n) * (Ca + Cb) * plane]);
    std::copy_n(&b.data[static_cast<size_t>(n) * Cb * plane], static_cast<size_t>(Cb) * plane,
                &out.data[(static_cast<size_t>(n) * (Ca + Cb) + Ca) * plane]);
  }
  return out;
}

Tensor add_skip(const Tensor& a, const Tensor& b) {
  require(a.same_shape(b), "add_skip: dims must match");
  Tensor out = a;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

}  // namespace edar
