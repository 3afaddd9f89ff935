#pragma once

#include <functional>
#include <string>

#include "linbp/linalg.hpp"
#include "linbp/model.hpp"

namespace linbp {

// Which backward ReLU-derivative factors are kept. linbp_from(m) keeps the
// factors at layers 1..m and skips the rest; linbp_from(depth) is exactly
// bp and linbp_from(0) is exactly linbp.
struct GradientMode {
  enum class Kind { Bp, Linbp, LinbpFrom };
  Kind kind = Kind::Bp;
  int from = 0;

  static GradientMode bp() { return {Kind::Bp, 0}; }
  static GradientMode linbp() { return {Kind::Linbp, 0}; }
  static GradientMode linbp_from(int m) { return {Kind::LinbpFrom, m}; }

  bool keeps_relu_factor(std::size_t layer) const {
    switch (kind) {
      case Kind::Bp: return true;
      case Kind::Linbp: return false;
      case Kind::LinbpFrom: return layer <= static_cast<std::size_t>(from);
    }
    return true;
  }

  std::string name() const;
  bool operator==(const GradientMode&) const = default;
};

// Parse "bp", "linbp" or "linbp-from=M"; throws std::invalid_argument.
GradientMode parse_gradient_mode(const std::string& text);

enum class NormalizeMode { None, L2, Linf, Sign };
NormalizeMode parse_normalize_mode(const std::string& text);
std::string to_string(NormalizeMode mode);

enum class LossKind { SquaredError, SoftmaxCrossEntropy };

// 0.5 * || g(W,V,x) - g(W,V,x*) ||_2^2
double attack_loss(const TwoLayerModel& m, const Vec& x, const Vec& x_star);

// W^T D(W,x) V^T V (D(W,x) W x - D(W,x*) W x*)
Vec grad_x_bp(const TwoLayerModel& m, const Vec& x, const Vec& x_star);
// W^T V^T V (D(W,x) W x - D(W,x*) W x*)
Vec grad_x_linbp(const TwoLayerModel& m, const Vec& x, const Vec& x_star);
Vec grad_x(const TwoLayerModel& m, const Vec& x, const Vec& x_star,
           GradientMode mode);

// 0.5 * || relu(Xw) - relu(Xw*) ||_2^2
double train_loss(const Matrix& X, const Vec& w, const Vec& w_star);

// bp:    X^T D(X,w) (D(X,w) X w - D(X,w*) X w*)
// linbp: X^T (D(X,w) X w - D(X,w*) X w*)
Vec grad_w_train(const Matrix& X, const Vec& w, const Vec& w_star,
                 GradientMode mode);

double mlp_loss(const MlpModel& m, const Vec& x, const Vec& target,
                LossKind kind);

// Per-layer loss gradients dL/dW_i; under linbp_from(m) the backward ReLU
// factor at every layer with index > m is replaced by the identity.
std::vector<Matrix> mlp_grad_weights(const MlpModel& m, const Vec& x,
                                     const Vec& target, LossKind kind,
                                     GradientMode mode);

// Adds one sample's weight gradients into accum (one matrix per layer,
// shaped like the weights) and returns the sample loss.
double mlp_accumulate_grad(const MlpModel& m, const Vec& x, const Vec& target,
                           LossKind kind, GradientMode mode,
                           std::vector<Matrix>& accum);

// g / ||g||_2, g / ||g||_inf, sign(g) or g itself; a zero vector is
// returned unchanged in every mode.
Vec normalize_update(const Vec& g, NormalizeMode mode);

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x,
                     double h);

Vec softmax(const Vec& logits);

}  // namespace linbp
