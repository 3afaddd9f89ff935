#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace linbp {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

Norms norms(const Vec& v);

// Angle in [0, pi]; the cosine is clamped to [-1, 1] before acos.
// Throws std::domain_error on a zero-norm input.
double angle_between(const Vec& a, const Vec& b);

// Seeded stream of random draws. Identical (seed, stream) pairs give
// identical draw sequences within one build. Streams split as
// stream_seed = splitmix64(splitmix64(seed) + stream).
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::mt19937_64 engine() const;
};

std::uint64_t splitmix64(std::uint64_t x);

// i.i.d. N(mean, stddev^2) entries; stddev = 0 yields exactly `mean`.
// Throws std::domain_error on negative stddev.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double mean,
                       double stddev, const RngStream& rng);
Vec gaussian_vector(std::size_t n, double mean, double stddev,
                    const RngStream& rng);

// FNV-1a over raw bytes; used to checksum sampled draws in paired trials.
std::uint64_t fnv1a(const void* bytes, std::size_t len);
std::uint64_t checksum(std::uint64_t h, const Vec& v);
std::uint64_t checksum(std::uint64_t h, const Matrix& m);

}  // namespace linbp
