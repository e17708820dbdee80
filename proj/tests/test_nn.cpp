#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "edar/graph.hpp"
#include "edar/tensor.hpp"

using namespace edar;

namespace {

Tensor random_tensor(std::vector<int> dims, std::mt19937_64& rng) {
  Tensor t(std::move(dims));
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (double& v : t.data) v = uni(rng);
  return t;
}

// direct convolution, no loop tricks
Tensor conv_oracle(const Tensor& in, const Tensor& w, const Tensor& b) {
  const int N = in.dim(0), Cin = in.dim(1), H = in.dim(2), W = in.dim(3);
  const int Cout = w.dim(0), K = w.dim(2), off = K / 2;
  Tensor out({N, Cout, H, W});
  for (int n = 0; n < N; ++n)
    for (int oc = 0; oc < Cout; ++oc)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          double acc = b.data[static_cast<size_t>(oc)];
          for (int ic = 0; ic < Cin; ++ic)
            for (int ky = 0; ky < K; ++ky)
              for (int kx = 0; kx < K; ++kx) {
                int sy = y + ky - off, sx = x + kx - off;
                if (sy < 0 || sx < 0 || sy >= H || sx >= W) continue;
                acc += w.data[((static_cast<size_t>(oc) * Cin + ic) * K + ky) * K + kx] * in.at4(n, ic, sy, sx);
              }
          out.at4(n, oc, y, x) = acc;
        }
  return out;
}

}  // namespace

TEST_CASE("conv2d identity and one-hot") {
  SUBCASE("1x1 identity kernel") {
    std::mt19937_64 rng(1);
    Tensor in = random_tensor({2, 1, 5, 7}, rng);
    Tensor w({1, 1, 1, 1}, {1.0});
    Tensor b({1});
    CHECK(conv2d(in, w, b).data == in.data);
  }
  SUBCASE("3x3 all-ones kernel spreads a one-hot input") {
    Tensor in({1, 1, 5, 5});
    in.at4(0, 0, 2, 2) = 1.0;
    Tensor w({1, 1, 3, 3});
    w.fill(1.0);
    Tensor b({1});
    Tensor out = conv2d(in, w, b);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x)
        CHECK(out.at4(0, 0, y, x) == (std::abs(y - 2) <= 1 && std::abs(x - 2) <= 1 ? 1.0 : 0.0));
  }
  SUBCASE("matches the direct oracle on random shapes") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      int cin = 1 + static_cast<int>(rng() % 3), cout = 1 + static_cast<int>(rng() % 4);
      int k = rng() % 2 ? 3 : 1;
      Tensor in = random_tensor({2, cin, 4 + int(rng() % 4), 3 + int(rng() % 5)}, rng);
      Tensor w = random_tensor({cout, cin, k, k}, rng);
      Tensor b = random_tensor({cout}, rng);
      Tensor got = conv2d(in, w, b);
      Tensor want = conv_oracle(in, w, b);
      for (size_t i = 0; i < got.data.size(); ++i)
        CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
    }
  }
  SUBCASE("shape mismatch throws") {
    Tensor in({1, 2, 4, 4});
    CHECK_THROWS(conv2d(in, Tensor({3, 1, 3, 3}), Tensor({3})));
  }
}

TEST_CASE("dwsconv2d") {
  SUBCASE("center-one kernels are the identity") {
    std::mt19937_64 rng(3);
    Tensor in = random_tensor({1, 3, 6, 6}, rng);
    Tensor w({3, 3, 3});
    for (int c = 0; c < 3; ++c) w.data[static_cast<size_t>(c) * 9 + 4] = 1.0;
    Tensor b({3});
    CHECK(dwsconv2d(in, w, b).data == in.data);
  }
  SUBCASE("channels transform independently") {
    std::mt19937_64 rng(4);
    Tensor in = random_tensor({1, 2, 5, 5}, rng);
    Tensor w = random_tensor({2, 3, 3}, rng);
    Tensor b = random_tensor({2}, rng);
    Tensor out_full = dwsconv2d(in, w, b);
    Tensor in_zeroed = in;
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) in_zeroed.at4(0, 1, y, x) = 0.0;
    Tensor out_zeroed = dwsconv2d(in_zeroed, w, b);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x)
        CHECK(out_full.at4(0, 0, y, x) == out_zeroed.at4(0, 0, y, x));  // channel 0 untouched
  }
}

TEST_CASE("maxpool2") {
  SUBCASE("constant input stays constant at half dims") {
    Tensor in({1, 1, 6, 8});
    in.fill(3.5);
    Tensor out = maxpool2(in);
    CHECK(out.dims == std::vector<int>({1, 1, 3, 4}));
    for (double v : out.data) CHECK(v == 3.5);
  }
  SUBCASE("2x2 block max") {
    Tensor in({1, 1, 2, 2}, {1, 2, 3, 4});
    Tensor out = maxpool2(in);
    CHECK(out.data == std::vector<double>({4}));
  }
  SUBCASE("ceil mode on odd dims") {
    Tensor in({1, 1, 5, 5});
    for (int i = 0; i < 25; ++i) in.data[static_cast<size_t>(i)] = i;
    Tensor out = maxpool2(in);
    CHECK(out.dims == std::vector<int>({1, 1, 3, 3}));
    // windowed-max oracle
    CHECK(out.at4(0, 0, 0, 0) == 6);    // max of rows 0-1, cols 0-1
    CHECK(out.at4(0, 0, 2, 2) == 24);   // the lone corner element
    CHECK(out.at4(0, 0, 1, 2) == 19);   // 2x1 window
  }
}

TEST_CASE("upsample2 nearest neighbor") {
  SUBCASE("constant stays constant at double dims") {
    Tensor in({1, 2, 3, 3});
    in.fill(-1.25);
    Tensor out = upsample2(in);
    CHECK(out.dims == std::vector<int>({1, 2, 6, 6}));
    for (double v : out.data) CHECK(v == -1.25);
  }
  SUBCASE("replication oracle") {
    Tensor in({1, 1, 1, 2}, {1, 2});
    Tensor out = upsample2(in);
    CHECK(out.dims == std::vector<int>({1, 1, 2, 4}));
    CHECK(out.data == std::vector<double>({1, 1, 2, 2, 1, 1, 2, 2}));
  }
}

TEST_CASE("fully_connected") {
  SUBCASE("identity weights pass the input through") {
    Tensor in({2, 3}, {1, 2, 3, 4, 5, 6});
    Tensor w({3, 3});
    for (int i = 0; i < 3; ++i) w.data[static_cast<size_t>(i) * 3 + i] = 1.0;
    Tensor b({3});
    CHECK(fully_connected(in, w, b).data == in.data);
  }
  SUBCASE("zero weights give the bias") {
    Tensor in({2, 3});
    in.fill(9.0);
    Tensor w({4, 3});
    Tensor b({4}, {1, 2, 3, 4});
    Tensor out = fully_connected(in, w, b);
    for (int n = 0; n < 2; ++n)
      for (int o = 0; o < 4; ++o) CHECK(out.data[static_cast<size_t>(n) * 4 + o] == b.data[static_cast<size_t>(o)]);
  }
  SUBCASE("random case against the double-loop oracle") {
    std::mt19937_64 rng(5);
    Tensor in = random_tensor({3, 7}, rng);
    Tensor w = random_tensor({5, 7}, rng);
    Tensor b = random_tensor({5}, rng);
    Tensor out = fully_connected(in, w, b);
    for (int n = 0; n < 3; ++n)
      for (int o = 0; o < 5; ++o) {
        double acc = b.data[static_cast<size_t>(o)];
        for (int i = 0; i < 7; ++i)
          acc += w.data[static_cast<size_t>(o) * 7 + i] * in.data[static_cast<size_t>(n) * 7 + i];
        CHECK(out.data[static_cast<size_t>(n) * 5 + o] == doctest::Approx(acc).epsilon(1e-14));
      }
  }
}

TEST_CASE("activations") {
  Tensor x({1, 1, 1, 3}, {-1.0, 0.0, 2.0});
  CHECK(relu(x).data == std::vector<double>({0, 0, 2}));
  CHECK(leaky_relu(x, 0.01).data == std::vector<double>({-0.01, 0, 2}));
  CHECK(sigmoid(Tensor({1, 1}, {0.0})).data[0] == doctest::Approx(0.5));

  SUBCASE("softmax of equal logits is uniform, sums to one") {
    Tensor t({1, 4, 2, 2});
    t.fill(1.7);
    Tensor s = softmax_channels(t);
    for (double v : s.data) CHECK(v == doctest::Approx(0.25));
  }
  SUBCASE("softmax per-pixel sums are 1 and entries non-negative") {
    std::mt19937_64 rng(6);
    Tensor t = random_tensor({2, 4, 3, 5}, rng);
    Tensor s = softmax_channels(t);
    for (int n = 0; n < 2; ++n)
      for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) {
          double sum = 0;
          for (int c = 0; c < 4; ++c) {
            CHECK(s.at4(n, c, y, x) >= 0.0);
            sum += s.at4(n, c, y, x);
          }
          CHECK(std::abs(sum - 1.0) < 1e-6);
        }
  }
}

TEST_CASE("concat and skip") {
  std::mt19937_64 rng(7);
  Tensor a = random_tensor({2, 3, 4, 4}, rng);
  Tensor b = random_tensor({2, 2, 4, 4}, rng);
  Tensor c = concat_channels(a, b);
  CHECK(c.dims == std::vector<int>({2, 5, 4, 4}));
  CHECK(c.at4(0, 0, 1, 1) == a.at4(0, 0, 1, 1));
  CHECK(c.at4(1, 4, 2, 3) == b.at4(1, 1, 2, 3));
  CHECK_THROWS(concat_channels(a, random_tensor({2, 2, 5, 4}, rng)));

  Tensor d = add_skip(a, a);
  for (size_t i = 0; i < a.data.size(); ++i) CHECK(d.data[i] == 2 * a.data[i]);
  CHECK_THROWS(add_skip(a, b));
}

TEST_CASE("weight files round trip bit-exactly") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "edar_weights_test";
  fs::create_directories(dir);
  const std::string p1 = (dir / "a.bin").string();
  const std::string p2 = (dir / "b.bin").string();

  LayerGraph g;
  int in = g.add_input();
  int x = g.add_conv(in, 2, 3, 3, "c1");
  x = g.add_leaky_relu(x);
  x = g.add_dwsconv(x, 3, "d1");
  g.set_output(x);
  g.name = "test-net-v1";
  g.meta["input_hw"] = {8, 8};
  g.init_params(99);

  save_weights(g, p1);

  LayerGraph h;
  in = h.add_input();
  x = h.add_conv(in, 2, 3, 3, "c1");
  x = h.add_leaky_relu(x);
  x = h.add_dwsconv(x, 3, "d1");
  h.set_output(x);
  h.name = "test-net-v1";
  load_weights(h, p1);
  CHECK(h.meta.at("input_hw") == std::vector<double>({8, 8}));

  // float32 storage: save(load(file)) must be byte-identical
  save_weights(h, p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(b1.substr(0, 4) == "EDAR");

  // reloaded parameters produce bit-identical inference
  std::mt19937_64 rng(8);
  Tensor input = random_tensor({1, 2, 8, 8}, rng);
  // g holds float32-rounded values only after a round trip
  LayerGraph g2 = g;
  load_weights(g2, p1);
  Tensor out_a = g2.forward({input});
  Tensor out_b = h.forward({input});
  CHECK(out_a.data == out_b.data);

  SUBCASE("name mismatch is an error") {
    LayerGraph wrong;
    in = wrong.add_input();
    x = wrong.add_conv(in, 2, 3, 3, "c1");
    x = wrong.add_dwsconv(x, 3, "d1");
    wrong.set_output(x);
    wrong.name = "other-net";
    CHECK_THROWS(load_weights(wrong, p1));
  }
  SUBCASE("shape mismatch is an error") {
    LayerGraph wrong;
    in = wrong.add_input();
    x = wrong.add_conv(in, 2, 4, 3, "c1");
    x = wrong.add_dwsconv(x, 4, "d1");
    wrong.set_output(x);
    wrong.name = "test-net-v1";
    CHECK_THROWS(load_weights(wrong, p1));
  }
  fs::remove_all(dir);
}

TEST_CASE("seeded init is deterministic") {
  auto build = [] {
    LayerGraph g;
    int in = g.add_input();
    int x = g.add_conv(in, 1, 4, 3, "c");
    x = g.add_fc(g.add_flatten(x), 4 * 6 * 6, 3, "f");
    g.set_output(x);
    return g;
  };
  LayerGraph a = build(), b = build();
  a.init_params(1234);
  b.init_params(1234);
  CHECK(a.param("c.w").data == b.param("c.w").data);
  CHECK(a.param("f.w").data == b.param("f.w").data);
  b.init_params(1235);
  CHECK(a.param("c.w").data != b.param("c.w").data);
}
