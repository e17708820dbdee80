#include <doctest.h>

#include <random>

#include "edar/train.hpp"
#include "grad_check.hpp"

using namespace edar;
using namespace edar::testing;

TEST_CASE("every layer kind passes central finite differences") {
  std::mt19937_64 rng(2024);
  for (int kind = 0; kind < kNumGradCases; ++kind) {
    CAPTURE(grad_case_name(kind));
    for (int trial = 0; trial < 3; ++trial) {  // the acceptance suite runs >= 20 each
      GradCheck r = run_grad_case(kind, rng);
      CHECK(r.ok());
      CHECK(r.max_rel_err < kFdTol);
    }
  }
}

TEST_CASE("single FC layer matches the closed-form MSE gradient") {
  // loss = mean((Wx + b - y)^2); dL/dW = 2 (Wx + b - y) x^T / numel
  std::mt19937_64 rng(31);
  const int N = 3, Fin = 4, Fout = 2;
  LayerGraph g;
  int in = g.add_input();
  g.set_output(g.add_fc(in, Fin, Fout, "fc"));
  g.init_params(7);
  Tensor x = random_uniform({N, Fin}, rng);
  Tensor y = random_uniform({N, Fout}, rng);

  const Tensor& out = g.forward({x});
  Tensor grad;
  mse_loss(out, y, &grad);
  g.zero_grad();
  g.backward(g.output_node(), grad);

  const Tensor& w = g.param("fc.w");
  const Tensor& gw = g.grad("fc.w");
  const Tensor& gb = g.grad("fc.b");
  const double scale = 2.0 / (N * Fout);
  for (int o = 0; o < Fout; ++o) {
    double want_b = 0;
    for (int n = 0; n < N; ++n) {
      double r = g.param("fc.b").data[static_cast<size_t>(o)];
      for (int i = 0; i < Fin; ++i)
        r += w.data[static_cast<size_t>(o) * Fin + i] * x.data[static_cast<size_t>(n) * Fin + i];
      r -= y.data[static_cast<size_t>(n) * Fout + o];
      want_b += scale * r;
    }
    CHECK(gb.data[static_cast<size_t>(o)] == doctest::Approx(want_b).epsilon(1e-10));
    for (int i = 0; i < Fin; ++i) {
      double want_w = 0;
      for (int n = 0; n < N; ++n) {
        double r = g.param("fc.b").data[static_cast<size_t>(o)];
        for (int k = 0; k < Fin; ++k)
          r += w.data[static_cast<size_t>(o) * Fin + k] * x.data[static_cast<size_t>(n) * Fin + k];
        r -= y.data[static_cast<size_t>(n) * Fout + o];
        want_w += scale * r * x.data[static_cast<size_t>(n) * Fin + i];
      }
      CHECK(gw.data[static_cast<size_t>(o) * Fin + i] == doctest::Approx(want_w).epsilon(1e-10));
    }
  }
}

TEST_CASE("zero loss gradient gives all-zero parameter gradients") {
  LayerGraph g;
  int in = g.add_input();
  int x = g.add_conv(in, 2, 3, 3, "c");
  x = g.add_leaky_relu(x);
  g.set_output(g.add_dwsconv(x, 3, "d"));
  g.init_params(3);
  std::mt19937_64 rng(4);
  g.forward({random_uniform({1, 2, 5, 5}, rng)});
  Tensor zero(g.activation(g.output_node()).dims);
  g.zero_grad();
  g.backward(g.output_node(), zero);
  for (auto& [name, grad] : g.grads())
    for (double v : grad.data) CHECK(v == 0.0);
}

TEST_CASE("composite graph with softmax cross-entropy matches finite differences") {
  // a miniature encoder/decoder with skip, pool, upsample and concat
  LayerGraph g;
  int in = g.add_input();
  int e1 = g.add_conv(in, 1, 4, 3, "e1");
  e1 = g.add_leaky_relu(e1);
  int p = g.add_maxpool2(e1);
  int e2 = g.add_dwsconv(p, 4, "e2");
  e2 = g.add_leaky_relu(e2);
  int u = g.add_upsample2(e2);
  int cat = g.add_concat_channels(u, e1);
  int head = g.add_conv(cat, 8, 4, 1, "head");
  g.set_output(head);
  g.init_params(11);

  std::mt19937_64 rng(12);
  Tensor input = random_uniform({1, 1, 6, 6}, rng);
  SegmentationMap labels(6, 6);
  for (auto& c : labels.classes) c = static_cast<uint8_t>(rng() % 4);

  const Tensor& logits = g.forward({input});
  Tensor grad;
  cross_entropy_logits(logits, {&labels}, &grad);
  g.zero_grad();
  g.backward(g.output_node(), grad);

  auto loss_at = [&] {
    return cross_entropy_logits(g.forward({input}), {&labels}, nullptr);
  };
  double max_err = 0;
  for (const char* name : {"e1.w", "e1.b", "e2.w", "e2.b", "head.w", "head.b"}) {
    Tensor& par = g.param(name);
    const Tensor analytic = g.grad(name);
    for (size_t i = 0; i < par.data.size(); ++i) {
      const double saved = par.data[i];
      par.data[i] = saved + kFdStep;
      const double lp = loss_at();
      par.data[i] = saved - kFdStep;
      const double lm = loss_at();
      par.data[i] = saved;
      max_err = std::max(max_err, rel_err(analytic.data[i], (lp - lm) / (2 * kFdStep)));
    }
  }
  CHECK(max_err < kFdTol);
}
