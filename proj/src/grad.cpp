#include "linbp/grad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "linbp/kernels.hpp"

namespace linbp {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// relu(W x) - relu(W x*) together with the mask at x.
struct HiddenResidual {
  Vec residual;
  Vec mask;
};

HiddenResidual hidden_residual(const Matrix& W, const Vec& x, const Vec& x_star) {
  require(W.cols() == x.size() && x.size() == x_star.size(),
          "gradient: dimension mismatch");
  const std::size_t rows = W.rows();
  Vec z(rows), z_star(rows);
  kernels::matvec(W.data(), rows, W.cols(), x.data(), z.data());
  kernels::matvec(W.data(), rows, W.cols(), x_star.data(), z_star.data());
  HiddenResidual h;
  h.mask.resize(rows);
  kernels::relu_mask(z.data(), h.mask.data(), rows);
  Vec a(rows), a_star(rows);
  kernels::relu(z.data(), a.data(), rows);
  kernels::relu(z_star.data(), a_star.data(), rows);
  h.residual.resize(rows);
  kernels::sub(a.data(), a_star.data(), h.residual.data(), rows);
  return h;
}

}  // namespace

std::string GradientMode::name() const {
  switch (kind) {
    case Kind::Bp: return "bp";
    case Kind::Linbp: return "linbp";
    case Kind::LinbpFrom: return "linbp-from-" + std::to_string(from);
  }
  return "bp";
}

GradientMode parse_gradient_mode(const std::string& text) {
  if (text == "bp") return GradientMode::bp();
  if (text == "linbp") return GradientMode::linbp();
  const std::string prefix = "linbp-from=";
  if (text.rfind(prefix, 0) == 0) {
    int m = std::stoi(text.substr(prefix.size()));
    if (m < 0) throw std::invalid_argument("linbp-from: negative layer index");
    return GradientMode::linbp_from(m);
  }
  throw std::invalid_argument("unknown gradient mode: " + text);
}

NormalizeMode parse_normalize_mode(const std::string& text) {
  if (text == "none") return NormalizeMode::None;
  if (text == "l2") return NormalizeMode::L2;
  if (text == "linf") return NormalizeMode::Linf;
  if (text == "sign") return NormalizeMode::Sign;
  throw std::invalid_argument("unknown normalize mode: " + text);
}

std::string to_string(NormalizeMode mode) {
  switch (mode) {
    case NormalizeMode::None: return "none";
    case NormalizeMode::L2: return "l2";
    case NormalizeMode::Linf: return "linf";
    case NormalizeMode::Sign: return "sign";
  }
  return "none";
}

double attack_loss(const TwoLayerModel& m, const Vec& x, const Vec& x_star) {
  Vec out = two_layer_forward(m, x);
  Vec out_star = two_layer_forward(m, x_star);
  Vec diff(out.size());
  kernels::sub(out.data(), out_star.data(), diff.data(), diff.size());
  return 0.5 * kernels::sum_sq(diff.data(), diff.size());
}

Vec grad_x(const TwoLayerModel& m, const Vec& x, const Vec& x_star,
           GradientMode mode) {
  require(m.V.cols() == m.W.rows(), "grad_x: V does not match W");
  HiddenResidual h = hidden_residual(m.W, x, x_star);
  const std::size_t d2 = m.d2(), d3 = m.d3();
  Vec t(d3);
  kernels::matvec(m.V.data(), d3, d2, h.residual.data(), t.data());
  Vec s(d2);
  kernels::matvec_t(m.V.data(), d3, d2, t.data(), s.data());
  if (mode.keeps_relu_factor(1))
    kernels::hadamard(s.data(), h.mask.data(), s.data(), d2);
  Vec g(m.d1());
  kernels::matvec_t(m.W.data(), d2, m.d1(), s.data(), g.data());
  return g;
}

Vec grad_x_bp(const TwoLayerModel& m, const Vec& x, const Vec& x_star) {
  return grad_x(m, x, x_star, GradientMode::bp());
}

Vec grad_x_linbp(const TwoLayerModel& m, const Vec& x, const Vec& x_star) {
  return grad_x(m, x, x_star, GradientMode::linbp());
}

double train_loss(const Matrix& X, const Vec& w, const Vec& w_star) {
  HiddenResidual h = hidden_residual(X, w, w_star);
  return 0.5 * kernels::sum_sq(h.residual.data(), h.residual.size());
}

Vec grad_w_train(const Matrix& X, const Vec& w, const Vec& w_star,
                 GradientMode mode) {
  HiddenResidual h = hidden_residual(X, w, w_star);
  if (mode.keeps_relu_factor(1))
    kernels::hadamard(h.residual.data(), h.mask.data(), h.residual.data(),
                      h.residual.size());
  Vec g(X.cols());
  kernels::matvec_t(X.data(), X.rows(), X.cols(), h.residual.data(), g.data());
  return g;
}

Vec softmax(const Vec& logits) {
  Vec p(logits.size());
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double mlp_loss(const MlpModel& m, const Vec& x, const Vec& target,
                LossKind kind) {
  Vec out = mlp_forward(m, x);
  require(out.size() == target.size(), "mlp_loss: target dimension mismatch");
  if (kind == LossKind::SquaredError) {
    Vec diff(out.size());
    kernels::sub(out.data(), target.data(), diff.data(), diff.size());
    return 0.5 * kernels::sum_sq(diff.data(), diff.size());
  }
  // -sum_j target_j * log softmax(out)_j, evaluated via log-sum-exp
  const double mx = *std::max_element(out.begin(), out.end());
  double lse = 0.0;
  for (double v : out) lse += std::exp(v - mx);
  lse = mx + std::log(lse);
  double loss = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j)
    loss += target[j] * (lse - out[j]);
  return loss;
}

double mlp_accumulate_grad(const MlpModel& m, const Vec& x, const Vec& target,
                           LossKind kind, GradientMode mode,
                           std::vector<Matrix>& accum) {
  ActivationTrace trace;
  Vec out = mlp_forward(m, x, &trace);
  require(out.size() == target.size(),
          "mlp_grad_weights: target dimension mismatch");
  require(accum.size() == m.depth(),
          "mlp_accumulate_grad: accumulator layer count mismatch");

  const std::size_t depth = m.depth();
  double loss;
  Vec delta(out.size());
  if (kind == LossKind::SquaredError) {
    kernels::sub(out.data(), target.data(), delta.data(), delta.size());
    loss = 0.5 * kernels::sum_sq(delta.data(), delta.size());
  } else {
    const double mx = *std::max_element(out.begin(), out.end());
    double lse = 0.0;
    for (double v : out) lse += std::exp(v - mx);
    lse = mx + std::log(lse);
    loss = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j)
      loss += target[j] * (lse - out[j]);
    Vec p = softmax(out);
    kernels::sub(p.data(), target.data(), delta.data(), delta.size());
  }

  for (std::size_t i = depth; i >= 1; --i) {
    const Matrix& w = m.weights[i - 1];
    const Vec& input = (i == 1) ? x : trace.post[i - 2];
    kernels::rank1_update(accum[i - 1].data(), w.rows(), w.cols(),
                          input.data(), delta.data(), 1.0);
    if (i == 1) break;
    Vec prev(w.rows());
    kernels::matvec(w.data(), w.rows(), w.cols(), delta.data(), prev.data());
    if (mode.keeps_relu_factor(i - 1)) {
      Vec mask(prev.size());
      kernels::relu_mask(trace.pre[i - 2].data(), mask.data(), mask.size());
      kernels::hadamard(prev.data(), mask.data(), prev.data(), prev.size());
    }
    delta = std::move(prev);
  }
  return loss;
}

std::vector<Matrix> mlp_grad_weights(const MlpModel& m, const Vec& x,
                                     const Vec& target, LossKind kind,
                                     GradientMode mode) {
  std::vector<Matrix> grads;
  grads.reserve(m.depth());
  for (const Matrix& w : m.weights) grads.emplace_back(w.rows(), w.cols());
  mlp_accumulate_grad(m, x, target, kind, mode, grads);
  return grads;
}

Vec normalize_update(const Vec& g, NormalizeMode mode) {
  if (mode == NormalizeMode::None) return g;
  Vec out(g.size());
  if (mode == NormalizeMode::Sign) {
    for (std::size_t i = 0; i < g.size(); ++i)
      out[i] = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
    return out;
  }
  const double norm = mode == NormalizeMode::L2
                          ? std::sqrt(kernels::sum_sq(g.data(), g.size()))
                          : kernels::max_abs(g.data(), g.size());
  if (norm == 0.0) return g;
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] / norm;
  return out;
}

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x,
                     double h) {
  if (h <= 0.0) throw std::domain_error("finite_diff_grad: h must be positive");
  Vec g(x.size());
  Vec probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double fp = f(probe);
    probe[i] = xi - h;
    const double fm = f(probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace linbp
