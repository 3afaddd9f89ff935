#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "linbp/linalg.hpp"

namespace linbp {

// Two-layer analysis network g(W, V, x) = V relu(W x).
// W is d2 x d1, V is d3 x d2.
struct TwoLayerModel {
  Matrix W;
  Matrix V;

  std::size_t d1() const { return W.cols(); }
  std::size_t d2() const { return W.rows(); }
  std::size_t d3() const { return V.rows(); }
};

// Dense ReLU MLP with the transposed-weight convention: layer i computes
// f_i = W_i^T a_{i-1} with a_0 = x, a_i = relu(f_i), and the network output
// is f_d (no activation on the last layer). W_i is dims[i-1] x dims[i].
struct MlpModel {
  std::vector<Matrix> weights;
  // Default LinBP split point m in [0, depth]: backward ReLU factors at
  // layers > m are skipped. m = depth reproduces plain backprop.
  int linbp_from = 0;

  std::size_t depth() const { return weights.size(); }
  std::size_t input_dim() const { return weights.front().rows(); }
  std::size_t output_dim() const { return weights.back().cols(); }
};

// Pre-activations f_i and post-activations relu(f_i), one entry per layer.
struct ActivationTrace {
  std::vector<Vec> pre;
  std::vector<Vec> post;
};

// diag(Wx > 0) as a 0/1 vector; strictly positive entries only.
Vec relu_mask(const Matrix& W, const Vec& x);

// V relu(W x)
Vec two_layer_forward(const TwoLayerModel& m, const Vec& x);

// Returns f_d; when trace is non-null it is filled with every f_i, relu(f_i).
Vec mlp_forward(const MlpModel& m, const Vec& x, ActivationTrace* trace = nullptr);

// relu(X w), one entry per row of X.
Vec one_layer_forward(const Matrix& X, const Vec& w);

// Plain-text weight files: header line "rows cols", then row-major
// whitespace-separated decimals.
void write_matrix_text(const Matrix& m, std::ostream& out);
Matrix read_matrix_text(std::istream& in);
void save_matrix(const Matrix& m, const std::string& path);
Matrix load_matrix(const std::string& path);

}  // namespace linbp
