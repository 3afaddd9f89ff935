#include "linbp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "linbp/kernels.hpp"

namespace linbp {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw std::invalid_argument("Matrix: data length does not match rows*cols");
}

Norms norms(const Vec& v) {
  Norms n;
  n.l1 = kernels::sum_abs(v.data(), v.size());
  n.l2 = std::sqrt(kernels::sum_sq(v.data(), v.size()));
  n.linf = kernels::max_abs(v.data(), v.size());
  return n;
}

double angle_between(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("angle_between: length mismatch");
  const double na = std::sqrt(kernels::sum_sq(a.data(), a.size()));
  const double nb = std::sqrt(kernels::sum_sq(b.data(), b.size()));
  if (na == 0.0 || nb == 0.0)
    throw std::domain_error("angle_between: zero-norm input");
  double c = kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 RngStream::engine() const {
  return std::mt19937_64(splitmix64(splitmix64(seed) + stream));
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double mean,
                       double stddev, const RngStream& rng) {
  if (stddev < 0.0) throw std::domain_error("gaussian_matrix: negative stddev");
  Matrix m(rows, cols);
  if (stddev == 0.0) {
    std::fill(m.data(), m.data() + m.size(), mean);
    return m;
  }
  auto eng = rng.engine();
  std::normal_distribution<double> dist(mean, stddev);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = dist(eng);
  return m;
}

Vec gaussian_vector(std::size_t n, double mean, double stddev,
                    const RngStream& rng) {
  Matrix m = gaussian_matrix(1, n, mean, stddev, rng);
  return Vec(m.data(), m.data() + n);
}

std::uint64_t fnv1a(const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
std::uint64_t chain(std::uint64_t h, const double* data, std::size_t n) {
  std::uint64_t block = fnv1a(data, n * sizeof(double));
  return splitmix64(h ^ block);
}
}  // namespace

std::uint64_t checksum(std::uint64_t h, const Vec& v) {
  return chain(h, v.data(), v.size());
}

std::uint64_t checksum(std::uint64_t h, const Matrix& m) {
  return chain(h, m.data(), m.size());
}

}  // namespace linbp
