#pragma once

#include <string>
#include <vector>

#include "linbp/closedform.hpp"
#include "linbp/grad.hpp"
#include "linbp/model.hpp"
#include "linbp/trajectory.hpp"

namespace linbp {

struct TrainConfig {
  std::size_t n_samples = 100;
  std::size_t dim = 10;
  double eta = 1e-3;
  std::size_t iters = 10000;
  std::size_t trials = 10;
  double mu1 = 1.0;    // w* ~ N(mu1, sigma1^2)
  double sigma1 = 3.0;
  double sigma2 = 1.0; // w0 ~ N(0, sigma2^2)
  NormalizeMode normalize = NormalizeMode::None;
  GradientMode mode = GradientMode::linbp();
  std::uint64_t seed = 1;
  bool record_iterates = false;
};

// w_t - eta * normalize(grad_w_train(X, w_t, w*, mode) / N). The stochastic
// trainer steps along the per-sample mean gradient; the closed-form
// analysis uses the sample sum, which only rescales the time axis by N.
Vec train_step(const Matrix& X, const Vec& w_t, const Vec& w_star,
               const TrainConfig& cfg);

struct TrainSimResult {
  std::vector<std::string> methods;
  std::vector<std::vector<Trajectory>> trials;  // [method][trial]
  std::vector<Trajectory> mean;
};
TrainSimResult run_train_sim(const TrainConfig& cfg);

struct TrainExpectedResult {
  std::vector<std::string> methods;
  std::vector<Trajectory> arms;  // iterate snapshots always kept
  Vec w_star;
  Vec w0;
};
TrainExpectedResult run_train_expected(const TrainConfig& cfg);

}  // namespace linbp
