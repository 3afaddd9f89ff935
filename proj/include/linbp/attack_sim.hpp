#pragma once

#include <string>
#include <vector>

#include "linbp/closedform.hpp"
#include "linbp/grad.hpp"
#include "linbp/model.hpp"
#include "linbp/trajectory.hpp"

namespace linbp {

struct AttackConfig {
  std::size_t d1 = 100;
  std::size_t d2 = 20;
  std::size_t d3 = 10;
  double eta = 1e-3;
  double eps = 0.25;
  std::size_t steps = 100;
  std::size_t trials = 10;
  double mu1 = 1.0;    // x* ~ N(mu1, sigma1^2)
  double sigma1 = 2.0;
  double sigma2 = 1.0; // x0 ~ N(0, sigma2^2)
  NormalizeMode normalize = NormalizeMode::None;
  GradientMode mode = GradientMode::linbp();  // arm compared against bp
  std::uint64_t seed = 1;
  bool record_iterates = false;
};

// min(x0 + eps, max(x0 - eps, candidate)) per coordinate.
Vec clip(const Vec& candidate, const Vec& center, double eps);

// clip(x_t - eta * normalize(grad), x0, eps) with the gradient and
// normalization taken from the config.
Vec attack_step(const TwoLayerModel& model, const Vec& x_t, const Vec& x0,
                const Vec& x_star, const AttackConfig& cfg);

// Paired stochastic trials: each trial samples one (W, V, x*, x0) set and
// runs every method on it.
struct AttackSimResult {
  std::vector<std::string> methods;              // "bp" first
  std::vector<std::vector<Trajectory>> trials;   // [method][trial]
  std::vector<Trajectory> mean;                  // [method]
};
AttackSimResult run_attack_sim(const AttackConfig& cfg);

// Deterministic iteration of the expected gradients from one sampled
// (x*, x0) pair; iterate snapshots are always kept.
struct AttackExpectedResult {
  std::vector<std::string> methods;
  std::vector<Trajectory> arms;
  Vec x_star;
  Vec x0;
};
AttackExpectedResult run_attack_expected(const AttackConfig& cfg);

// Method list for a config: "bp" plus the configured comparison arm.
std::vector<GradientMode> paired_modes(GradientMode mode);

}  // namespace linbp
