#pragma once

#include <cstddef>
#include <string_view>

namespace linbp::kernels {

// One entry per inner-loop primitive. The scalar backend defines the
// reference semantics; SIMD variants must agree within rounding and are
// equivalence-tested against it. All matrices are row-major.
struct Backend {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A is rows x cols, x has cols entries, y has rows entries
  void (*matvec)(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  // y = A^T x, x has rows entries, y has cols entries
  void (*matvec_t)(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
  // y = max(x, 0)
  void (*relu)(const double* x, double* y, std::size_t n);
  // m[i] = 1.0 if x[i] > 0 else 0.0 (strict at zero)
  void (*relu_mask)(const double* x, double* m, std::size_t n);
  // y = a .* b
  void (*hadamard)(const double* a, const double* b, double* y, std::size_t n);
  // y = a - b
  void (*sub)(const double* a, const double* b, double* y, std::size_t n);
  // y = min(hi, max(lo, v)) elementwise
  void (*clip_box)(const double* v, const double* lo, const double* hi,
                   double* y, std::size_t n);
  double (*sum_abs)(const double* x, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // A += alpha * a b^T, a has rows entries, b has cols entries
  void (*rank1_update)(double* a_mat, std::size_t rows, std::size_t cols,
                       const double* a, const double* b, double alpha);
};

const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr when not compiled in
bool cpu_has_avx2();

// Runtime-selected backend; defaults to the widest supported variant.
const Backend& active();
// "scalar", "avx2" or "auto"; returns false if the request is unavailable.
bool select_backend(std::string_view name);

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void matvec(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  active().matvec(a, rows, cols, x, y);
}
inline void matvec_t(const double* a, std::size_t rows, std::size_t cols,
                     const double* x, double* y) {
  active().matvec_t(a, rows, cols, x, y);
}
inline void relu(const double* x, double* y, std::size_t n) {
  active().relu(x, y, n);
}
inline void relu_mask(const double* x, double* m, std::size_t n) {
  active().relu_mask(x, m, n);
}
inline void hadamard(const double* a, const double* b, double* y, std::size_t n) {
  active().hadamard(a, b, y, n);
}
inline void sub(const double* a, const double* b, double* y, std::size_t n) {
  active().sub(a, b, y, n);
}
inline void clip_box(const double* v, const double* lo, const double* hi,
                     double* y, std::size_t n) {
  active().clip_box(v, lo, hi, y, n);
}
inline double sum_abs(const double* x, std::size_t n) {
  return active().sum_abs(x, n);
}
inline double sum_sq(const double* x, std::size_t n) {
  return active().sum_sq(x, n);
}
inline double max_abs(const double* x, std::size_t n) {
  return active().max_abs(x, n);
}
inline void rank1_update(double* a_mat, std::size_t rows, std::size_t cols,
                         const double* a, const double* b, double alpha) {
  active().rank1_update(a_mat, rows, cols, a, b, alpha);
}

}  // namespace linbp::kernels
