#include "linbp/kernels.hpp"

#include <cmath>

namespace linbp::kernels {
namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void matvec_t(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy(x[r], a + r * cols, y, cols);
}

void relu(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask(const double* x, double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) m[i] = x[i] > 0.0 ? 1.0 : 0.0;
}

void hadamard(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void sub(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}

void clip_box(const double* v, const double* lo, const double* hi, double* y,
              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double t = v[i] < lo[i] ? lo[i] : v[i];
    y[i] = t > hi[i] ? hi[i] : t;
  }
}

double sum_abs(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

double sum_sq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double max_abs(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::fabs(x[i]);
    if (v > acc) acc = v;
  }
  return acc;
}

void rank1_update(double* a_mat, std::size_t rows, std::size_t cols,
                  const double* a, const double* b, double alpha) {
  for (std::size_t r = 0; r < rows; ++r)
    axpy(alpha * a[r], b, a_mat + r * cols, cols);
}

}  // namespace scalar

const Backend& scalar_backend() {
  static const Backend backend = {
      "scalar",
      scalar::dot,
      scalar::axpy,
      scalar::matvec,
      scalar::matvec_t,
      scalar::relu,
      scalar::relu_mask,
      scalar::hadamard,
      scalar::sub,
      scalar::clip_box,
      scalar::sum_abs,
      scalar::sum_sq,
      scalar::max_abs,
      scalar::rank1_update,
  };
  return backend;
}

}  // namespace linbp::kernels
