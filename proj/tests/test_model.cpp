#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "linbp/model.hpp"
#include "oracles.hpp"

using namespace linbp;

namespace {

Matrix identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("relu_mask basics") {
  CHECK(relu_mask(identity(2), {2, -3}) == Vec{1, 0});
  CHECK(relu_mask(identity(3), {0, 0, 0}) == Vec{0, 0, 0});  // strict at zero
  CHECK_THROWS_AS(relu_mask(identity(2), {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("relu_mask matches the entrywise sign oracle and is idempotent") {
  auto eng = oracle::engine(21);
  for (int k = 0; k < 100; ++k) {
    Matrix W = oracle::random_matrix(6, 4, eng);
    Vec x = oracle::random_vec(4, eng);
    Vec mask = relu_mask(W, x);
    Vec z = oracle::matvec(W, x);
    for (std::size_t i = 0; i < z.size(); ++i)
      CHECK(mask[i] == (z[i] > 0.0 ? 1.0 : 0.0));
    // masking the pre-activations and recomputing the mask is a fixed point
    Vec masked(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) masked[i] = mask[i] * z[i];
    Vec mask2(masked.size());
    for (std::size_t i = 0; i < masked.size(); ++i)
      mask2[i] = masked[i] > 0.0 ? 1.0 : 0.0;
    CHECK(mask2 == mask);
  }
}

TEST_CASE("two_layer_forward basics") {
  TwoLayerModel m{identity(2), identity(2)};
  CHECK(two_layer_forward(m, {1, -2}) == Vec{1, 0});
  CHECK(two_layer_forward(m, {0, 0}) == Vec{0, 0});
  CHECK_THROWS_AS(two_layer_forward(m, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("two_layer_forward matches a two-step hand evaluation") {
  auto eng = oracle::engine(33);
  for (int k = 0; k < 100; ++k) {
    TwoLayerModel m{oracle::random_matrix(5, 3, eng),
                    oracle::random_matrix(4, 5, eng)};
    Vec x = oracle::random_vec(3, eng);
    Vec hidden = oracle::relu(oracle::matvec(m.W, x));
    Vec want = oracle::matvec(m.V, hidden);
    CHECK(oracle::max_abs_diff(two_layer_forward(m, x), want) < 1e-12);
  }
}

TEST_CASE("mlp_forward with identity weights passes nonnegative inputs through") {
  MlpModel m;
  m.weights = {identity(3), identity(3)};
  Vec x{0.5, 0.0, 2.0};
  CHECK(mlp_forward(m, x) == x);
}

TEST_CASE("mlp_forward at depth 2 agrees with two_layer_forward transposed") {
  auto eng = oracle::engine(55);
  Matrix W = oracle::random_matrix(5, 3, eng);   // d2 x d1
  Matrix V = oracle::random_matrix(4, 5, eng);   // d3 x d2
  TwoLayerModel two{W, V};
  // the MLP stores W_i and applies W_i^T, so transpose both
  MlpModel mlp;
  Matrix Wt(3, 5), Vt(5, 4);
  for (std::size_t r = 0; r < W.rows(); ++r)
    for (std::size_t c = 0; c < W.cols(); ++c) Wt(c, r) = W(r, c);
  for (std::size_t r = 0; r < V.rows(); ++r)
    for (std::size_t c = 0; c < V.cols(); ++c) Vt(c, r) = V(r, c);
  mlp.weights = {Wt, Vt};
  Vec x = oracle::random_vec(3, eng);
  CHECK(oracle::max_abs_diff(mlp_forward(mlp, x), two_layer_forward(two, x)) <
        1e-13);
}

TEST_CASE("mlp_forward random 3-layer net matches a layer-by-layer oracle") {
  auto eng = oracle::engine(77);
  for (int k = 0; k < 50; ++k) {
    MlpModel m;
    m.weights = {oracle::random_matrix(4, 6, eng),
                 oracle::random_matrix(6, 5, eng),
                 oracle::random_matrix(5, 3, eng)};
    Vec x = oracle::random_vec(4, eng);
    Vec a1 = oracle::relu(oracle::matvec_t(m.weights[0], x));
    Vec a2 = oracle::relu(oracle::matvec_t(m.weights[1], a1));
    Vec want = oracle::matvec_t(m.weights[2], a2);
    ActivationTrace trace;
    Vec got = mlp_forward(m, x, &trace);
    CHECK(oracle::max_abs_diff(got, want) < 1e-12);
    REQUIRE(trace.pre.size() == 3);
    REQUIRE(trace.post.size() == 3);
    // post = relu(pre) = mask .* pre at every layer
    for (std::size_t layer = 0; layer < 3; ++layer) {
      for (std::size_t i = 0; i < trace.pre[layer].size(); ++i) {
        const double pre = trace.pre[layer][i];
        const double mask = pre > 0.0 ? 1.0 : 0.0;
        CHECK(trace.post[layer][i] == mask * pre);
      }
    }
  }
}

TEST_CASE("mlp_forward dimension mismatch") {
  MlpModel m;
  m.weights = {Matrix(3, 4), Matrix(5, 2)};  // 4 != 5: does not chain
  CHECK_THROWS_AS(mlp_forward(m, Vec(3, 1.0)), std::invalid_argument);
}

TEST_CASE("mlp_forward first-order expansion on a fixed-mask neighborhood") {
  auto eng = oracle::engine(99);
  int tested = 0;
  for (int k = 0; k < 60 && tested < 25; ++k) {
    MlpModel m;
    m.weights = {oracle::random_matrix(4, 6, eng),
                 oracle::random_matrix(6, 3, eng)};
    Vec x = oracle::random_vec(4, eng);
    ActivationTrace trace;
    mlp_forward(m, x, &trace);
    // skip inputs near a kink so alpha in [0.99, 1.01] keeps every mask
    bool safe = true;
    for (const Vec& pre : trace.pre)
      for (double v : pre)
        if (std::fabs(v) < 1e-2) safe = false;
    if (!safe) continue;
    ++tested;
    Vec out = mlp_forward(m, x);
    for (double alpha : {0.995, 1.005}) {
      Vec xs = x;
      for (double& v : xs) v *= alpha;
      Vec scaled = mlp_forward(m, xs);
      for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(scaled[i] == doctest::Approx(alpha * out[i]).epsilon(1e-9));
    }
  }
  CHECK(tested > 0);
}

TEST_CASE("one_layer_forward basics and oracle") {
  CHECK(one_layer_forward(identity(2), {0, 0}) == Vec{0, 0});
  CHECK(one_layer_forward(identity(2), {1, -1}) == Vec{1, 0});
  auto eng = oracle::engine(13);
  for (int k = 0; k < 100; ++k) {
    Matrix X = oracle::random_matrix(8, 5, eng);
    Vec w = oracle::random_vec(5, eng);
    CHECK(oracle::max_abs_diff(one_layer_forward(X, w),
                               oracle::relu(oracle::matvec(X, w))) < 1e-12);
  }
}

TEST_CASE("plain-text weight files round-trip") {
  auto eng = oracle::engine(2024);
  Matrix m = oracle::random_matrix(4, 7, eng);
  std::stringstream ss;
  write_matrix_text(m, ss);
  Matrix back = read_matrix_text(ss);
  CHECK(back == m);

  std::stringstream bad("3 4\n1.0 2.0");
  CHECK_THROWS_AS(read_matrix_text(bad), std::runtime_error);
}
