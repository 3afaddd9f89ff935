#include "linbp/train_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "linbp/attack_sim.hpp"
#include "linbp/kernels.hpp"
#include "linbp/parallel.hpp"

namespace linbp {

Vec train_step(const Matrix& X, const Vec& w_t, const Vec& w_star,
               const TrainConfig& cfg) {
  Vec g = grad_w_train(X, w_t, w_star, cfg.mode);
  const double inv_n = 1.0 / static_cast<double>(X.rows());
  for (double& v : g) v *= inv_n;
  Vec u = normalize_update(g, cfg.normalize);
  Vec next = w_t;
  kernels::axpy(-cfg.eta, u.data(), next.data(), next.size());
  return next;
}

namespace {

void validate(const TrainConfig& cfg) {
  if (cfg.n_samples < 1 || cfg.dim < 1)
    throw std::invalid_argument("train: N and d must be >= 1");
  if (cfg.eta < 0.0) throw std::invalid_argument("train: eta must be >= 0");
  if (cfg.trials < 1) throw std::invalid_argument("train: trials must be >= 1");
}

Trajectory run_arm(const Matrix& X, const Vec& w_star, const Vec& w0,
                   GradientMode mode, const TrainConfig& cfg,
                   std::uint64_t draw_checksum) {
  Trajectory traj;
  traj.draw_checksum = draw_checksum;
  traj.steps.reserve(cfg.iters + 1);
  const double inv_n = 1.0 / static_cast<double>(X.rows());
  Vec w = w0;
  Vec diff(w.size());
  for (std::size_t t = 0; t <= cfg.iters; ++t) {
    StepRecord rec;
    kernels::sub(w_star.data(), w.data(), diff.data(), diff.size());
    rec.l1_dist = kernels::sum_abs(diff.data(), diff.size());
    rec.loss = train_loss(X, w, w_star);
    Vec g = grad_w_train(X, w, w_star, mode);
    for (double& v : g) v *= inv_n;  // per-sample mean, as in train_step
    rec.grad_l2 = std::sqrt(kernels::sum_sq(g.data(), g.size()));
    rec.grad_linf = kernels::max_abs(g.data(), g.size());
    traj.steps.push_back(rec);
    if (cfg.record_iterates) traj.iterates.push_back(w);
    if (t == cfg.iters) break;
    Vec u = normalize_update(g, cfg.normalize);
    kernels::axpy(-cfg.eta, u.data(), w.data(), w.size());
  }
  return traj;
}

}  //  namespace

TrainSimResult run_train_sim(const TrainConfig& cfg) {
  validate(cfg);
  const std::vector<GradientMode> modes = paired_modes(cfg.mode);
  TrainSimResult result;
  for (const GradientMode& m : modes) result.methods.push_back(m.name());
  result.trials.assign(modes.size(), std::vector<Trajectory>(cfg.trials));

  parallel_for(cfg.trials, [&](std::size_t k) {
    Matrix X = gaussian_matrix(cfg.n_samples, cfg.dim, 0.0, 1.0,
                               RngStream{cfg.seed, 3 * k});
    Vec w_star = gaussian_vector(cfg.dim, cfg.mu1, cfg.sigma1,
                                 RngStream{cfg.seed, 3 * k + 1});
    Vec w0 = gaussian_vector(cfg.dim, 0.0, cfg.sigma2,
                             RngStream{cfg.seed, 3 * k + 2});
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      std::uint64_t h = checksum(0, X);
      h = checksum(h, w_star);
      h = checksum(h, w0);
      result.trials[mi][k] = run_arm(X, w_star, w0, modes[mi], cfg, h);
    }
  });

  for (const auto& arm : result.trials)
    result.mean.push_back(mean_trajectory(arm));
  return result;
}

TrainExpectedResult run_train_expected(const TrainConfig& cfg) {
  validate(cfg);
  const std::vector<GradientMode> modes = paired_modes(cfg.mode);
  TrainExpectedResult result;
  result.w_star = gaussian_vector(cfg.dim, cfg.mu1, cfg.sigma1,
                                  RngStream{cfg.seed, 0});
  result.w0 = gaussian_vector(cfg.dim, 0.0, cfg.sigma2, RngStream{cfg.seed, 1});

  for (const GradientMode& mode : modes) {
    result.methods.push_back(mode.name());
    Trajectory traj;
    traj.steps.reserve(cfg.iters + 1);
    Vec w = result.w0;
    Vec diff(w.size());
    for (std::size_t t = 0; t <= cfg.iters; ++t) {
      kernels::sub(result.w_star.data(), w.data(), diff.data(), diff.size());
      Vec g = detail::expected_grad_total(w, result.w_star, cfg.n_samples, mode);
      StepRecord rec;
      rec.l1_dist = kernels::sum_abs(diff.data(), diff.size());
      rec.loss = 0.5 * kernels::sum_sq(diff.data(), diff.size());
      rec.grad_l2 = std::sqrt(kernels::sum_sq(g.data(), g.size()));
      rec.grad_linf = kernels::max_abs(g.data(), g.size());
      traj.steps.push_back(rec);
      traj.iterates.push_back(w);
      if (t == cfg.iters) break;
      kernels::axpy(-cfg.eta, g.data(), w.data(), w.size());
    }
    result.arms.push_back(std::move(traj));
  }
  return result;
}

}  // namespace linbp
