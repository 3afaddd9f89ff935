#include "linbp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "linbp/kernels.hpp"

namespace linbp {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_csv(std::vector<RunRecord> records, const std::string& path) {
  std::stable_sort(records.begin(), records.end(),
                   [](const RunRecord& a, const RunRecord& b) {
                     return std::tie(a.experiment, a.seed, a.step, a.method) <
                            std::tie(b.experiment, b.seed, b.step, b.method);
                   });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "experiment,step,seed,method,l1_dist,loss,grad_l2,grad_linf,acc\n";
  for (const RunRecord& r : records) {
    out << csv_quote(r.experiment) << ',' << r.step << ',' << r.seed << ','
        << csv_quote(r.method) << ','
        << (r.l1_dist ? format_double(*r.l1_dist) : "") << ','
        << format_double(r.loss) << ',' << format_double(r.grad_l2) << ','
        << format_double(r.grad_linf) << ','
        << (r.acc ? format_double(*r.acc) : "") << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

namespace {

constexpr double kSvgWidth = 800.0;
constexpr double kSvgHeight = 520.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 170.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_svg_lineplot(const std::vector<Series>& series,
                        const std::string& path) {
  if (series.empty())
    throw std::invalid_argument("write_svg_lineplot: no series");
  for (const Series& s : series)
    if (s.second.empty())
      throw std::invalid_argument("write_svg_lineplot: empty series " + s.first);

  double xmin = series[0].second[0].first, xmax = xmin;
  double ymin = series[0].second[0].second, ymax = ymin;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.second) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmin == xmax) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymin == ymax) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double plot_w = kSvgWidth - kMarginLeft - kMarginRight;
  const double plot_h = kSvgHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) {
    return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w;
  };
  auto py = [&](double y) {
    return kMarginTop + plot_h - (y - ymin) / (ymax - ymin) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSvgWidth
      << "\" height=\"" << kSvgHeight << "\" viewBox=\"0 0 " << kSvgWidth
      << ' ' << kSvgHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
      << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
      << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    svg << "<text x=\"" << px(fx) << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_tick(fx)
        << "</text>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py(fy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_tick(fy)
        << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    char buf[48];
    for (const auto& [x, y] : series[i].second) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
      svg << buf;
    }
    svg << "\"/>\n";
    // legend entry
    const double ly = kMarginTop + 14.0 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << kMarginLeft + plot_w + 12 << "\" y1=\"" << ly
        << "\" x2=\"" << kMarginLeft + plot_w + 36 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    svg << "<text class=\"legend\" x=\"" << kMarginLeft + plot_w + 42
        << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << series[i].first
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_svg_lineplot: cannot open " + path);
  out << svg.str();
  if (!out)
    throw std::runtime_error("write_svg_lineplot: write failed for " + path);
}

namespace {

Vec one_hot(int label, std::size_t classes) {
  Vec t(classes, 0.0);
  t[static_cast<std::size_t>(label)] = 1.0;
  return t;
}

Vec sample_row(const LabeledDataset& ds, std::size_t i) {
  return Vec(ds.features.row(i), ds.features.row(i) + ds.features.cols());
}

}  // namespace

std::pair<double, double> mlp_evaluate(const MlpModel& model,
                                       const LabeledDataset& ds) {
  const std::size_t n = ds.features.rows();
  double loss_sum = 0.0;
  std::size_t correct = 0;
  const std::size_t classes = model.output_dim();
  for (std::size_t i = 0; i < n; ++i) {
    Vec x = sample_row(ds, i);
    Vec out = mlp_forward(model, x);
    const double mx = *std::max_element(out.begin(), out.end());
    double lse = 0.0;
    for (double v : out) lse += std::exp(v - mx);
    lse = mx + std::log(lse);
    loss_sum += lse - out[static_cast<std::size_t>(ds.labels[i])];
    std::size_t arg = 0;
    for (std::size_t j = 1; j < classes; ++j)
      if (out[j] > out[arg]) arg = j;
    if (static_cast<int>(arg) == ds.labels[i]) ++correct;
  }
  return {loss_sum / static_cast<double>(n),
          static_cast<double>(correct) / static_cast<double>(n)};
}

MlpTrainResult mlp_train_loop(const LabeledDataset& ds,
                              const MlpTrainConfig& cfg) {
  if (cfg.dims.size() < 2)
    throw std::invalid_argument("mlp_train_loop: need at least two dims");
  if (cfg.dims.front() != ds.features.cols())
    throw std::invalid_argument("mlp_train_loop: input dim mismatch");
  if (cfg.dims.back() < static_cast<std::size_t>(ds.class_count))
    throw std::invalid_argument("mlp_train_loop: output dim below class count");
  if (cfg.batch < 1) throw std::invalid_argument("mlp_train_loop: batch < 1");

  MlpTrainResult result;
  // Gaussian init with stddev 1/sqrt(fan-in); streams 1.. keep the batch
  // stream (0) stable when the depth changes.
  for (std::size_t i = 1; i < cfg.dims.size(); ++i) {
    const double stddev = 1.0 / std::sqrt(static_cast<double>(cfg.dims[i - 1]));
    result.model.weights.push_back(gaussian_matrix(
        cfg.dims[i - 1], cfg.dims[i], 0.0, stddev, RngStream{cfg.seed, i}));
  }
  result.model.linbp_from =
      cfg.mode.kind == GradientMode::Kind::LinbpFrom
          ? cfg.mode.from
          : (cfg.mode.kind == GradientMode::Kind::Bp
                 ? static_cast<int>(result.model.depth())
                 : 0);

  const std::size_t n = ds.features.rows();
  const std::size_t classes = cfg.dims.back();
  auto [loss0, acc0] = mlp_evaluate(result.model, ds);
  result.init_acc = acc0;
  result.traj.steps.push_back(
      {std::numeric_limits<double>::quiet_NaN(), loss0, 0.0, 0.0});

  std::mt19937_64 batch_eng = RngStream{cfg.seed, 0}.engine();
  std::vector<Matrix> accum;
  for (const Matrix& w : result.model.weights) accum.emplace_back(w.rows(), w.cols());

  for (std::size_t epoch = 0; epoch < cfg.epochs && !result.diverged; ++epoch) {
    const auto batches = epoch_batches(n, cfg.batch, batch_eng);
    for (const auto& batch : batches) {
      for (Matrix& g : accum)
        std::fill(g.data(), g.data() + g.size(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t idx : batch) {
        Vec x = sample_row(ds, idx);
        batch_loss += mlp_accumulate_grad(result.model, x,
                                          one_hot(ds.labels[idx], classes),
                                          LossKind::SoftmaxCrossEntropy,
                                          cfg.mode, accum);
      }
      const double inv = 1.0 / static_cast<double>(batch.size());
      batch_loss *= inv;

      double sq = 0.0, linf = 0.0;
      for (Matrix& g : accum) {
        for (std::size_t j = 0; j < g.size(); ++j) g.data()[j] *= inv;
        sq += kernels::sum_sq(g.data(), g.size());
        linf = std::max(linf, kernels::max_abs(g.data(), g.size()));
      }
      result.traj.steps.push_back({std::numeric_limits<double>::quiet_NaN(),
                                   batch_loss, std::sqrt(sq), linf});
      if (!std::isfinite(batch_loss) || batch_loss > cfg.divergence_loss) {
        result.diverged = true;
        break;
      }
      for (std::size_t i = 0; i < accum.size(); ++i)
        kernels::axpy(-cfg.eta, accum[i].data(), result.model.weights[i].data(),
                      accum[i].size());
    }
    auto [loss, acc] = mlp_evaluate(result.model, ds);
    result.epoch_loss.push_back(loss);
    result.epoch_acc.push_back(acc);
  }
  return result;
}

}  // namespace linbp
