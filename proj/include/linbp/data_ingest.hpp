#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "linbp/linalg.hpp"

namespace linbp {

class IdxError : public std::runtime_error {
 public:
  enum class Kind { Format, Length };
  IdxError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind(kind) {}
  Kind kind;
};

struct LabeledDataset {
  Matrix features;          // n x pixels, values in [0, 1]
  std::vector<int> labels;  // one class index per row
  int class_count = 0;
};

// IDX image file: big-endian magic 0x00000803, dims [n, rows, cols], then
// one unsigned byte per pixel. Pixels are scaled by 1/255.
Matrix read_idx_images(std::span<const std::uint8_t> bytes);
// IDX label file: magic 0x00000801, dims [n], one unsigned byte per label.
std::vector<int> read_idx_labels(std::span<const std::uint8_t> bytes);

// Exact inverses of the readers for valid inputs.
std::vector<std::uint8_t> write_idx_images(const Matrix& features,
                                           std::size_t img_rows,
                                           std::size_t img_cols);
std::vector<std::uint8_t> write_idx_labels(const std::vector<int>& labels);

// Loads an image/label pair from disk; subset > 0 keeps only the first
// subset samples.
LabeledDataset load_idx_dataset(const std::string& images_path,
                                const std::string& labels_path,
                                std::size_t subset = 0);

// Class-conditional noisy prototypes, clamped to [0, 1]; label of sample i
// is i mod classes.
LabeledDataset synthetic_dataset(std::size_t n, std::size_t pixels,
                                 int classes, const RngStream& rng);

// One epoch of index batches: seeded shuffle, contiguous chunks, final
// short batch included.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n,
                                                    std::size_t batch_size,
                                                    std::mt19937_64& eng);

}  // namespace linbp
