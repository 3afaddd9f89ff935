#include "linbp/attack_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "linbp/kernels.hpp"
#include "linbp/parallel.hpp"

namespace linbp {

Vec clip(const Vec& candidate, const Vec& center, double eps) {
  if (candidate.size() != center.size())
    throw std::invalid_argument("clip: length mismatch");
  Vec lo(center.size()), hi(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    lo[i] = center[i] - eps;
    hi[i] = center[i] + eps;
  }
  Vec out(candidate.size());
  kernels::clip_box(candidate.data(), lo.data(), hi.data(), out.data(),
                    out.size());
  return out;
}

Vec attack_step(const TwoLayerModel& model, const Vec& x_t, const Vec& x0,
                const Vec& x_star, const AttackConfig& cfg) {
  Vec g = grad_x(model, x_t, x_star, cfg.mode);
  Vec u = normalize_update(g, cfg.normalize);
  Vec candidate = x_t;
  kernels::axpy(-cfg.eta, u.data(), candidate.data(), candidate.size());
  return clip(candidate, x0, cfg.eps);
}

std::vector<GradientMode> paired_modes(GradientMode mode) {
  std::vector<GradientMode> modes{GradientMode::bp()};
  if (mode.name() != "bp") modes.push_back(mode);
  return modes;
}

namespace {

void validate(const AttackConfig& cfg) {
  if (cfg.eps <= 0.0) throw std::invalid_argument("attack: eps must be > 0");
  if (cfg.eta < 0.0) throw std::invalid_argument("attack: eta must be >= 0");
  if (cfg.trials < 1) throw std::invalid_argument("attack: trials must be >= 1");
}

Trajectory run_arm(const TwoLayerModel& model, const Vec& x_star,
                   const Vec& x0, GradientMode mode, const AttackConfig& cfg,
                   std::uint64_t draw_checksum) {
  Trajectory traj;
  traj.draw_checksum = draw_checksum;
  traj.steps.reserve(cfg.steps + 1);
  AttackConfig arm_cfg = cfg;
  arm_cfg.mode = mode;
  Vec x = x0;
  Vec diff(x.size());
  for (std::size_t t = 0; t <= cfg.steps; ++t) {
    StepRecord rec;
    kernels::sub(x_star.data(), x.data(), diff.data(), diff.size());
    rec.l1_dist = kernels::sum_abs(diff.data(), diff.size());
    rec.loss = attack_loss(model, x, x_star);
    Vec g = grad_x(model, x, x_star, mode);
    rec.grad_l2 = std::sqrt(kernels::sum_sq(g.data(), g.size()));
    rec.grad_linf = kernels::max_abs(g.data(), g.size());
    traj.steps.push_back(rec);
    if (cfg.record_iterates) traj.iterates.push_back(x);
    if (t == cfg.steps) break;
    Vec u = normalize_update(g, cfg.normalize);
    kernels::axpy(-cfg.eta, u.data(), x.data(), x.size());
    x = clip(x, x0, cfg.eps);
  }
  return traj;
}

}  // namespace

AttackSimResult run_attack_sim(const AttackConfig& cfg) {
  validate(cfg);
  const std::vector<GradientMode> modes = paired_modes(cfg.mode);
  AttackSimResult result;
  for (const GradientMode& m : modes) result.methods.push_back(m.name());
  result.trials.assign(modes.size(), std::vector<Trajectory>(cfg.trials));

  parallel_for(cfg.trials, [&](std::size_t k) {
    TwoLayerModel model;
    model.W = gaussian_matrix(cfg.d2, cfg.d1, 0.0, 1.0,
                              RngStream{cfg.seed, 4 * k});
    model.V = gaussian_matrix(cfg.d3, cfg.d2, 0.0, 1.0,
                              RngStream{cfg.seed, 4 * k + 1});
    Vec x_star = gaussian_vector(cfg.d1, cfg.mu1, cfg.sigma1,
                                 RngStream{cfg.seed, 4 * k + 2});
    Vec x0 = gaussian_vector(cfg.d1, 0.0, cfg.sigma2,
                             RngStream{cfg.seed, 4 * k + 3});
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      std::uint64_t h = checksum(0, model.W);
      h = checksum(h, model.V);
      h = checksum(h, x_star);
      h = checksum(h, x0);
      result.trials[mi][k] = run_arm(model, x_star, x0, modes[mi], cfg, h);
    }
  });

  for (const auto& arm : result.trials)
    result.mean.push_back(mean_trajectory(arm));
  return result;
}

AttackExpectedResult run_attack_expected(const AttackConfig& cfg) {
  validate(cfg);
  const std::vector<GradientMode> modes = paired_modes(cfg.mode);
  AttackExpectedResult result;
  result.x_star = gaussian_vector(cfg.d1, cfg.mu1, cfg.sigma1,
                                  RngStream{cfg.seed, 0});
  result.x0 = gaussian_vector(cfg.d1, 0.0, cfg.sigma2, RngStream{cfg.seed, 1});

  for (const GradientMode& mode : modes) {
    result.methods.push_back(mode.name());
    Trajectory traj;
    traj.steps.reserve(cfg.steps + 1);
    Vec x = result.x0;
    Vec diff(x.size());
    for (std::size_t t = 0; t <= cfg.steps; ++t) {
      kernels::sub(result.x_star.data(), x.data(), diff.data(), diff.size());
      Vec g = detail::expected_grad_total(x, result.x_star, cfg.d2, mode);
      StepRecord rec;
      rec.l1_dist = kernels::sum_abs(diff.data(), diff.size());
      rec.loss = 0.5 * kernels::sum_sq(diff.data(), diff.size());
      rec.grad_l2 = std::sqrt(kernels::sum_sq(g.data(), g.size()));
      rec.grad_linf = kernels::max_abs(g.data(), g.size());
      traj.steps.push_back(rec);
      traj.iterates.push_back(x);
      if (t == cfg.steps) break;
      kernels::axpy(-cfg.eta, g.data(), x.data(), x.size());
      x = clip(x, result.x0, cfg.eps);
    }
    result.arms.push_back(std::move(traj));
  }
  return result;
}

}  // namespace linbp
