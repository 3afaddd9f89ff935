#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linbp/data_ingest.hpp"
#include "linbp/grad.hpp"
#include "linbp/model.hpp"
#include "linbp/trajectory.hpp"

namespace linbp {

struct RunRecord {
  std::string experiment;
  std::size_t step = 0;
  std::uint64_t seed = 0;  // trial stream index within the run
  std::string method;      // "bp", "linbp" or "linbp-from-M"
  std::optional<double> l1_dist;
  double loss = 0.0;
  double grad_l2 = 0.0;
  double grad_linf = 0.0;
  std::optional<double> acc;
};

// Header "experiment,step,seed,method,l1_dist,loss,grad_l2,grad_linf,acc";
// empty nullable fields, RFC-4180 quoting, rows sorted by
// (experiment, seed, step, method). Throws std::runtime_error on I/O failure.
void write_csv(std::vector<RunRecord> records, const std::string& path);

using Series = std::pair<std::string, std::vector<std::pair<double, double>>>;

// Standalone SVG with axes, one polyline per series and a legend.
// Throws std::invalid_argument when any series is empty.
void write_svg_lineplot(const std::vector<Series>& series,
                        const std::string& path);

struct MlpTrainConfig {
  std::vector<std::size_t> dims;  // e.g. 784, 400, 200, 100, 10
  double eta = 1e-3;
  std::size_t batch = 64;
  std::size_t epochs = 2;
  GradientMode mode = GradientMode::bp();
  std::uint64_t seed = 1;
  // A batch loss above this (or a non-finite one) marks the run diverged
  // and stops further updates.
  double divergence_loss = 1e3;
};

struct MlpTrainResult {
  // Step 0 is the initial full-train loss; later steps are one record per
  // mini-batch update (batch loss before the update). l1_dist is NaN -- the
  // classifier has no teacher vector.
  Trajectory traj;
  double init_acc = 0.0;
  std::vector<double> epoch_loss;  // full-train loss after each epoch
  std::vector<double> epoch_acc;
  MlpModel model;
  bool diverged = false;
};

// Mini-batch gradient descent with softmax cross-entropy. A fixed seed
// fixes the initialization and the batch order, independent of the mode.
MlpTrainResult mlp_train_loop(const LabeledDataset& ds,
                              const MlpTrainConfig& cfg);

// Mean cross-entropy loss and accuracy over the whole dataset.
std::pair<double, double> mlp_evaluate(const MlpModel& model,
                                       const LabeledDataset& ds);

}  // namespace linbp
