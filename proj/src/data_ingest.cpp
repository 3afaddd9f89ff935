#include "linbp/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace linbp {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_u32be(std::span<const std::uint8_t> bytes, std::size_t off) {
  if (off + 4 > bytes.size())
    throw IdxError(IdxError::Kind::Length, "idx: truncated header");
  return (std::uint32_t(bytes[off]) << 24) | (std::uint32_t(bytes[off + 1]) << 16) |
         (std::uint32_t(bytes[off + 2]) << 8) | std::uint32_t(bytes[off + 3]);
}

void write_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

}  // namespace

Matrix read_idx_images(std::span<const std::uint8_t> bytes) {
  if (read_u32be(bytes, 0) != kImageMagic)
    throw IdxError(IdxError::Kind::Format, "idx: bad image magic");
  const std::size_t n = read_u32be(bytes, 4);
  const std::size_t rows = read_u32be(bytes, 8);
  const std::size_t cols = read_u32be(bytes, 12);
  const std::size_t expected = 16 + n * rows * cols;
  if (bytes.size() != expected)
    throw IdxError(IdxError::Kind::Length,
                   "idx: payload length does not match header");
  Matrix m(n, rows * cols);
  for (std::size_t i = 0; i < n * rows * cols; ++i)
    m.data()[i] = static_cast<double>(bytes[16 + i]) / 255.0;
  return m;
}

std::vector<int> read_idx_labels(std::span<const std::uint8_t> bytes) {
  if (read_u32be(bytes, 0) != kLabelMagic)
    throw IdxError(IdxError::Kind::Format, "idx: bad label magic");
  const std::size_t n = read_u32be(bytes, 4);
  if (bytes.size() != 8 + n)
    throw IdxError(IdxError::Kind::Length,
                   "idx: payload length does not match header");
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = bytes[8 + i];
  return labels;
}

std::vector<std::uint8_t> write_idx_images(const Matrix& features,
                                           std::size_t img_rows,
                                           std::size_t img_cols) {
  if (features.cols() != img_rows * img_cols)
    throw std::invalid_argument("write_idx_images: pixel count mismatch");
  std::vector<std::uint8_t> out;
  out.reserve(16 + features.size());
  write_u32be(out, kImageMagic);
  write_u32be(out, static_cast<std::uint32_t>(features.rows()));
  write_u32be(out, static_cast<std::uint32_t>(img_rows));
  write_u32be(out, static_cast<std::uint32_t>(img_cols));
  for (std::size_t i = 0; i < features.size(); ++i) {
    const long v = std::lround(features.data()[i] * 255.0);
    out.push_back(static_cast<std::uint8_t>(std::clamp(v, 0L, 255L)));
  }
  return out;
}

std::vector<std::uint8_t> write_idx_labels(const std::vector<int>& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  write_u32be(out, kLabelMagic);
  write_u32be(out, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) out.push_back(static_cast<std::uint8_t>(l));
  return out;
}

LabeledDataset load_idx_dataset(const std::string& images_path,
                                const std::string& labels_path,
                                std::size_t subset) {
  const std::vector<std::uint8_t> image_bytes = read_file(images_path);
  const std::vector<std::uint8_t> label_bytes = read_file(labels_path);
  LabeledDataset ds;
  ds.features = read_idx_images(image_bytes);
  ds.labels = read_idx_labels(label_bytes);
  if (ds.features.rows() != ds.labels.size())
    throw std::runtime_error("idx: image/label counts differ");
  if (subset > 0 && subset < ds.features.rows()) {
    Matrix trimmed(subset, ds.features.cols());
    std::copy(ds.features.data(), ds.features.data() + trimmed.size(),
              trimmed.data());
    ds.features = std::move(trimmed);
    ds.labels.resize(subset);
  }
  ds.class_count =
      ds.labels.empty()
          ? 0
          : *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  return ds;
}

LabeledDataset synthetic_dataset(std::size_t n, std::size_t pixels,
                                 int classes, const RngStream& rng) {
  if (classes < 1) throw std::invalid_argument("synthetic_dataset: classes < 1");
  auto eng = rng.engine();
  // Sparse class prototypes with a mostly-zero background, similar to
  // handwritten-digit statistics.
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uniform_real_distribution<double> amplitude(0.35, 0.95);
  Matrix prototypes(classes, pixels);
  for (std::size_t i = 0; i < prototypes.size(); ++i)
    prototypes.data()[i] = uniform(eng) < 0.15 ? amplitude(eng) : 0.0;
  std::normal_distribution<double> noise(0.0, 0.1);
  LabeledDataset ds;
  ds.features = Matrix(n, pixels);
  ds.labels.resize(n);
  ds.class_count = classes;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % classes);
    ds.labels[i] = label;
    for (std::size_t j = 0; j < pixels; ++j) {
      const double v = prototypes(label, j) + noise(eng);
      ds.features(i, j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return ds;
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n,
                                                    std::size_t batch_size,
                                                    std::mt19937_64& eng) {
  if (batch_size < 1) throw std::invalid_argument("epoch_batches: batch < 1");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), eng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

}  // namespace linbp
