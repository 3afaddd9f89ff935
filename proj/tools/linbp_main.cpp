#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linbp/attack_sim.hpp"
#include "linbp/closedform.hpp"
#include "linbp/data_ingest.hpp"
#include "linbp/grad.hpp"
#include "linbp/harness.hpp"
#include "linbp/montecarlo.hpp"
#include "linbp/train_sim.hpp"

namespace {

using namespace linbp;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

GradientMode checked_mode(const std::string& text) {
  try {
    return parse_gradient_mode(text);
  } catch (const std::exception& e) {
    throw CLI::ValidationError("--mode", e.what());
  }
}

NormalizeMode checked_normalize(const std::string& text) {
  try {
    return parse_normalize_mode(text);
  } catch (const std::exception& e) {
    throw CLI::ValidationError("--normalize", e.what());
  }
}

void append_sim_records(std::vector<RunRecord>& records,
                        const std::string& experiment,
                        const std::vector<std::string>& methods,
                        const std::vector<std::vector<Trajectory>>& trials) {
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t k = 0; k < trials[mi].size(); ++k) {
      const Trajectory& traj = trials[mi][k];
      for (std::size_t s = 0; s < traj.steps.size(); ++s) {
        const StepRecord& r = traj.steps[s];
        records.push_back({experiment, s, k, methods[mi], r.l1_dist, r.loss,
                           r.grad_l2, r.grad_linf, std::nullopt});
      }
    }
  }
}

void append_expected_records(std::vector<RunRecord>& records,
                             const std::string& experiment,
                             const std::vector<std::string>& methods,
                             const std::vector<Trajectory>& arms) {
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t s = 0; s < arms[mi].steps.size(); ++s) {
      const StepRecord& r = arms[mi].steps[s];
      records.push_back({experiment, s, 0, methods[mi], r.l1_dist, r.loss,
                         r.grad_l2, r.grad_linf, std::nullopt});
    }
  }
}

void maybe_write_csv(const std::vector<RunRecord>& records,
                     const std::string& path) {
  if (path.empty()) return;
  write_csv(records, path);
  std::cout << "wrote " << records.size() << " rows to " << path << "\n";
}

void maybe_plot_mean_l1(const std::vector<std::string>& methods,
                        const std::vector<Trajectory>& curves,
                        const std::string& path) {
  if (path.empty()) return;
  std::vector<Series> series;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    Series s{methods[mi], {}};
    for (std::size_t t = 0; t < curves[mi].steps.size(); ++t)
      s.second.emplace_back(static_cast<double>(t), curves[mi].steps[t].l1_dist);
    series.push_back(std::move(s));
  }
  write_svg_lineplot(series, path);
  std::cout << "wrote plot to " << path << "\n";
}

struct SimFlags {
  std::string mode = "linbp";
  std::string normalize = "none";
  std::string out;
  std::string plot;
};

void run_attack_sim_cmd(AttackConfig cfg, const SimFlags& flags) {
  cfg.mode = checked_mode(flags.mode);
  cfg.normalize = checked_normalize(flags.normalize);
  AttackSimResult res = run_attack_sim(cfg);
  std::cout << "attack-sim: d1=" << cfg.d1 << " d2=" << cfg.d2
            << " d3=" << cfg.d3 << " eta=" << fmt(cfg.eta)
            << " eps=" << fmt(cfg.eps) << " steps=" << cfg.steps
            << " trials=" << cfg.trials << " seed=" << cfg.seed << "\n";
  for (std::size_t mi = 0; mi < res.methods.size(); ++mi)
    std::cout << "  " << res.methods[mi]
              << ": mean l1 start=" << fmt(res.mean[mi].steps.front().l1_dist)
              << " end=" << fmt(res.mean[mi].steps.back().l1_dist) << "\n";
  if (res.methods.size() == 2) {
    NormRatio ratio =
        mean_norm_ratio(res.trials[1], res.trials[0], 0, cfg.steps + 1);
    std::cout << "  grad-norm mean ratio " << res.methods[1] << "/bp: l2="
              << fmt(ratio.l2) << " linf=" << fmt(ratio.linf) << "\n";
  }
  std::vector<RunRecord> records;
  append_sim_records(records, "attack-sim", res.methods, res.trials);
  maybe_write_csv(records, flags.out);
  maybe_plot_mean_l1(res.methods, res.mean, flags.plot);
}

void run_attack_expected_cmd(AttackConfig cfg, const SimFlags& flags) {
  cfg.mode = checked_mode(flags.mode);
  AttackExpectedResult res = run_attack_expected(cfg);
  std::cout << "attack-expected: d1=" << cfg.d1 << " d2=" << cfg.d2
            << " eta=" << fmt(cfg.eta) << " eps=" << fmt(cfg.eps)
            << " steps=" << cfg.steps << " seed=" << cfg.seed << "\n";
  for (std::size_t mi = 0; mi < res.methods.size(); ++mi)
    std::cout << "  " << res.methods[mi]
              << ": l1 start=" << fmt(res.arms[mi].steps.front().l1_dist)
              << " end=" << fmt(res.arms[mi].steps.back().l1_dist) << "\n";
  std::vector<RunRecord> records;
  append_expected_records(records, "attack-expected", res.methods, res.arms);
  maybe_write_csv(records, flags.out);
  maybe_plot_mean_l1(res.methods, res.arms, flags.plot);
}

void run_train_sim_cmd(TrainConfig cfg, const SimFlags& flags) {
  cfg.mode = checked_mode(flags.mode);
  cfg.normalize = checked_normalize(flags.normalize);
  TrainSimResult res = run_train_sim(cfg);
  std::cout << "train-sim: N=" << cfg.n_samples << " d=" << cfg.dim
            << " eta=" << fmt(cfg.eta) << " iters=" << cfg.iters
            << " trials=" << cfg.trials << " seed=" << cfg.seed << "\n";
  for (std::size_t mi = 0; mi < res.methods.size(); ++mi)
    std::cout << "  " << res.methods[mi]
              << ": mean l1 start=" << fmt(res.mean[mi].steps.front().l1_dist)
              << " end=" << fmt(res.mean[mi].steps.back().l1_dist) << "\n";
  if (res.methods.size() == 2) {
    const std::size_t early = std::min<std::size_t>(100, cfg.iters + 1);
    NormRatio first = mean_norm_ratio(res.trials[1], res.trials[0], 0, early);
    NormRatio all =
        mean_norm_ratio(res.trials[1], res.trials[0], 0, cfg.iters + 1);
    std::cout << "  grad-norm mean l2 ratio " << res.methods[1]
              << "/bp: first " << early << " iters=" << fmt(first.l2)
              << " all iters=" << fmt(all.l2) << "\n";
  }
  std::vector<RunRecord> records;
  append_sim_records(records, "train-sim", res.methods, res.trials);
  maybe_write_csv(records, flags.out);
  maybe_plot_mean_l1(res.methods, res.mean, flags.plot);
}

void run_train_expected_cmd(TrainConfig cfg, const SimFlags& flags) {
  cfg.mode = checked_mode(flags.mode);
  TrainExpectedResult res = run_train_expected(cfg);
  std::cout << "train-expected: N=" << cfg.n_samples << " d=" << cfg.dim
            << " eta=" << fmt(cfg.eta) << " iters=" << cfg.iters
            << " seed=" << cfg.seed << "\n";
  for (std::size_t mi = 0; mi < res.methods.size(); ++mi)
    std::cout << "  " << res.methods[mi]
              << ": l1 start=" << fmt(res.arms[mi].steps.front().l1_dist)
              << " end=" << fmt(res.arms[mi].steps.back().l1_dist) << "\n";
  std::vector<RunRecord> records;
  append_expected_records(records, "train-expected", res.methods, res.arms);
  maybe_write_csv(records, flags.out);
  maybe_plot_mean_l1(res.methods, res.arms, flags.plot);
}

struct Lemma1Flags {
  std::size_t d1 = 3, d2 = 5, d3 = 2;
  std::size_t pairs = 10;
  std::uint64_t seed = 1;
};

void run_lemma1_check(const Lemma1Flags& f) {
  constexpr std::size_t kDraws = 100000;
  constexpr double kTol = 0.02;
  std::cout << "lemma1-check: d1=" << f.d1 << " d2=" << f.d2 << " d3=" << f.d3
            << " pairs=" << f.pairs << " draws=" << kDraws << "\n";
  double worst = 0.0;
  std::size_t kept = 0;
  for (std::size_t p = 0; kept < f.pairs && p < 100 * (f.pairs + 1); ++p) {
    Vec e = gaussian_vector(f.d1, 0.0, 1.0, RngStream{f.seed, 2 * p});
    const double ne = norms(e).l2;
    for (double& v : e) v /= ne;
    Vec x = gaussian_vector(f.d1, 0.0, 1.0, RngStream{f.seed, 2 * p + 1});
    // keep the angle away from pi, where the expectation vanishes and the
    // relative error of a finite-draw mean is ill-conditioned
    const double theta = angle_between(e, x);
    if (theta < 0.15 || theta > 2.2) continue;
    ++kept;
    Vec closed = lemma1_expectation(e, x, f.d2);
    Vec mc = mc_lemma1_mean(e, x, f.d2, f.d3, kDraws,
                            RngStream{f.seed, 1000 + 100 * p});
    const double err = relative_l2_error(mc, closed);
    worst = std::max(worst, err);
    std::cout << "  pair " << kept - 1 << " (angle " << fmt(theta)
              << "): relative l2 error " << fmt(err)
              << (err < kTol ? "  ok" : "  EXCEEDS 2%") << "\n";
  }
  std::cout << "  worst error " << fmt(worst) << " (tolerance " << fmt(kTol)
            << ")\n";
}

struct Lemma2Flags {
  std::size_t sets = 20;
  std::uint64_t seed = 1;
};

void run_lemma2_check(const Lemma2Flags& f) {
  constexpr std::size_t kDraws = 1000000;
  constexpr double kTol = 1e-2;
  std::cout << "lemma2-check: sets=" << f.sets << " draws=" << kDraws << "\n";
  auto eng = RngStream{f.seed, 0}.engine();
  std::uniform_real_distribution<double> coeff(-1.5, 1.5);
  std::uniform_real_distribution<double> mean(-1.0, 1.0);
  std::uniform_real_distribution<double> sigma(0.3, 1.2);
  double worst = 0.0;
  for (std::size_t s = 0; s < f.sets; ++s) {
    Lemma2Params params;
    params.u = coeff(eng);
    params.v = coeff(eng);
    params.mu1 = mean(eng);
    params.mu2 = mean(eng);
    params.sigma1 = sigma(eng);
    params.sigma2 = sigma(eng);
    const double closed = lemma2_expectation(params);
    const double mc =
        mc_lemma2_mean(params, kDraws, RngStream{f.seed, 100 + 100 * s});
    const double err = std::fabs(mc - closed);
    worst = std::max(worst, err);
    std::cout << "  set " << s << ": closed=" << fmt(closed) << " mc="
              << fmt(mc) << " abs error " << fmt(err)
              << (err < kTol ? "  ok" : "  EXCEEDS 1e-2") << "\n";
  }
  std::cout << "  worst error " << fmt(worst) << " (tolerance " << fmt(kTol)
            << ")\n";
}

void print_constraint(const char* label, const ConstraintReport& report,
                      bool inequality_ok) {
  std::cout << "  " << label << ": constraint "
            << (report.overall ? "holds at every (step, coordinate)"
                               : "VIOLATED")
            << "\n";
  if (report.first_violation) {
    std::cout << "    first violation at step m=" << report.first_violation->first
              << " coordinate i=" << report.first_violation->second << "\n";
  }
  if (report.overall) {
    std::cout << "    expected-dynamics l1 inequality (linbp <= bp): "
              << (inequality_ok ? "holds at every step" : "VIOLATED") << "\n";
  } else {
    std::cout << "    expected-dynamics l1 inequality (linbp <= bp) "
              << (inequality_ok ? "held" : "did not hold")
              << " (reported, not asserted: constraint is violated)\n";
  }
}

struct ConstraintFlags {
  AttackConfig attack;
  TrainConfig train;
  bool sigma1_set = false;
  bool sigma2_set = false;
  bool mu1_set = false;
  double mu1 = 1.0, sigma1 = 2.0, sigma2 = 1.0;
  std::string out;
};

void run_constraint_check(ConstraintFlags f) {
  f.attack.mode = GradientMode::linbp();
  f.train.mode = GradientMode::linbp();
  if (f.mu1_set) f.attack.mu1 = f.train.mu1 = f.mu1;
  if (f.sigma1_set) f.attack.sigma1 = f.train.sigma1 = f.sigma1;
  if (f.sigma2_set) f.attack.sigma2 = f.train.sigma2 = f.sigma2;

  AttackExpectedResult attack = run_attack_expected(f.attack);
  ConstraintReport attack_report = eta_constraint_attack(
      attack.arms[0].iterates, attack.x_star, f.attack.eta, f.attack.d2);
  bool attack_ok = true;
  for (std::size_t t = 0; t < attack.arms[0].steps.size(); ++t)
    attack_ok = attack_ok && attack.arms[1].steps[t].l1_dist <=
                                 attack.arms[0].steps[t].l1_dist + 1e-12;
  std::cout << "constraint-check (attack): d1=" << f.attack.d1
            << " d2=" << f.attack.d2 << " eta=" << fmt(f.attack.eta)
            << " eps=" << fmt(f.attack.eps) << " steps=" << f.attack.steps
            << " seed=" << f.attack.seed << "\n";
  print_constraint("attack", attack_report, attack_ok);

  TrainExpectedResult train = run_train_expected(f.train);
  ConstraintReport train_report = eta_constraint_train(
      train.arms[0].iterates, train.w_star, f.train.eta, f.train.n_samples);
  bool train_ok = true;
  for (std::size_t t = 0; t < train.arms[0].steps.size(); ++t)
    train_ok = train_ok && train.arms[1].steps[t].l1_dist <=
                               train.arms[0].steps[t].l1_dist + 1e-12;
  std::cout << "constraint-check (train): N=" << f.train.n_samples
            << " d=" << f.train.dim << " eta=" << fmt(f.train.eta)
            << " iters=" << f.train.iters << " seed=" << f.train.seed << "\n";
  print_constraint("train", train_report, train_ok);

  if (!f.out.empty()) {
    std::vector<RunRecord> records;
    append_expected_records(records, "constraint-check-attack", attack.methods,
                            attack.arms);
    append_expected_records(records, "constraint-check-train", train.methods,
                            train.arms);
    maybe_write_csv(records, f.out);
  }
}

struct MlpFlags {
  std::string images;
  std::string labels;
  std::size_t subset = 0;
  std::size_t epochs = 2;
  std::size_t batch = 64;
  double eta = 1e-3;
  std::uint64_t seed = 1;
  std::string mode = "linbp";
  std::string out;
  std::string plot;
};

void run_mlp_train(const MlpFlags& f) {
  const GradientMode mode = checked_mode(f.mode);
  LabeledDataset ds;
  if (!f.images.empty() || !f.labels.empty()) {
    if (f.images.empty() || f.labels.empty())
      throw CLI::ValidationError("--images",
                                 "--images and --labels must be given together");
    ds = load_idx_dataset(f.images, f.labels, f.subset);
    std::cout << "mlp-train: loaded " << ds.features.rows() << " samples x "
              << ds.features.cols() << " pixels, " << ds.class_count
              << " classes\n";
  } else {
    const std::size_t n = f.subset > 0 ? f.subset : 10000;
    ds = synthetic_dataset(n, 784, 10, RngStream{f.seed, 9000});
    std::cout << "mlp-train: synthetic dataset, " << n << " samples x 784 "
              << "pixels, 10 classes\n";
  }

  MlpTrainConfig cfg;
  cfg.dims = {ds.features.cols(), 400, 200, 100,
              std::max<std::size_t>(10, ds.class_count)};
  cfg.eta = f.eta;
  cfg.batch = f.batch;
  cfg.epochs = f.epochs;
  cfg.seed = f.seed;

  const std::vector<GradientMode> modes = paired_modes(mode);
  std::vector<RunRecord> records;
  std::vector<Series> loss_series;
  const std::size_t n = ds.features.rows();
  const std::size_t batches_per_epoch = (n + f.batch - 1) / f.batch;
  for (const GradientMode& m : modes) {
    cfg.mode = m;
    MlpTrainResult res = mlp_train_loop(ds, cfg);
    std::cout << "  " << m.name() << ": init loss "
              << fmt(res.traj.steps.front().loss) << "\n";
    for (std::size_t e = 0; e < res.epoch_loss.size(); ++e)
      std::cout << "    epoch " << e + 1 << ": train loss "
                << fmt(res.epoch_loss[e]) << ", train acc "
                << fmt(res.epoch_acc[e]) << "\n";
    if (res.diverged) std::cout << "    diverged (loss blew up); stopped\n";

    Series series{m.name(), {}};
    for (std::size_t s = 0; s < res.traj.steps.size(); ++s) {
      RunRecord rec{"mlp-train", s,       0,
                    m.name(),    std::nullopt, res.traj.steps[s].loss,
                    res.traj.steps[s].grad_l2, res.traj.steps[s].grad_linf,
                    std::nullopt};
      if (s == 0) {
        rec.acc = res.init_acc;
      } else if (s % batches_per_epoch == 0 &&
                 s / batches_per_epoch <= res.epoch_loss.size()) {
        // epoch boundary: report the full-train evaluation instead of the
        // last batch loss
        const std::size_t epoch_idx = s / batches_per_epoch;
        rec.loss = res.epoch_loss[epoch_idx - 1];
        rec.acc = res.epoch_acc[epoch_idx - 1];
      }
      records.push_back(std::move(rec));
      series.second.emplace_back(static_cast<double>(s),
                                 res.traj.steps[s].loss);
    }
    loss_series.push_back(std::move(series));
  }
  maybe_write_csv(records, f.out);
  if (!f.plot.empty()) {
    write_svg_lineplot(loss_series, f.plot);
    std::cout << "wrote plot to " << f.plot << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LinBP numerical laboratory: linear-backpropagation vs "
               "backpropagation attack/training simulators and closed-form "
               "expectation checks"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // attack-sim
  AttackConfig attack_cfg;
  SimFlags attack_flags;
  CLI::App* attack = app.add_subcommand(
      "attack-sim", "Paired stochastic white-box attack trials");
  attack->add_option("--d1", attack_cfg.d1, "input dimension");
  attack->add_option("--d2", attack_cfg.d2, "hidden dimension");
  attack->add_option("--d3", attack_cfg.d3, "output dimension");
  attack->add_option("--eta", attack_cfg.eta, "step size");
  attack->add_option("--eps", attack_cfg.eps, "l-inf budget");
  attack->add_option("--steps", attack_cfg.steps, "iteration count");
  attack->add_option("--trials", attack_cfg.trials, "paired trials");
  attack->add_option("--seed", attack_cfg.seed, "base seed");
  attack->add_option("--mu1", attack_cfg.mu1, "x* mean");
  attack->add_option("--sigma1", attack_cfg.sigma1, "x* stddev");
  attack->add_option("--sigma2", attack_cfg.sigma2, "x0 stddev");
  attack->add_option("--mode", attack_flags.mode,
                     "comparison arm: bp|linbp|linbp-from=M");
  attack->add_option("--normalize", attack_flags.normalize,
                     "update normalization: none|l2|linf|sign");
  attack->add_option("--out", attack_flags.out, "CSV output path");
  attack->add_option("--plot", attack_flags.plot, "SVG plot path");
  attack->callback([&] { run_attack_sim_cmd(attack_cfg, attack_flags); });

  // attack-expected
  AttackConfig attack_exp_cfg;
  SimFlags attack_exp_flags;
  CLI::App* attack_exp = app.add_subcommand(
      "attack-expected", "Deterministic expected-gradient attack dynamics");
  attack_exp->add_option("--d1", attack_exp_cfg.d1, "input dimension");
  attack_exp->add_option("--d2", attack_exp_cfg.d2, "hidden dimension");
  attack_exp->add_option("--d3", attack_exp_cfg.d3, "output dimension (unused by the closed form)");
  attack_exp->add_option("--eta", attack_exp_cfg.eta, "step size");
  attack_exp->add_option("--eps", attack_exp_cfg.eps, "l-inf budget");
  attack_exp->add_option("--steps", attack_exp_cfg.steps, "iteration count");
  attack_exp->add_option("--seed", attack_exp_cfg.seed, "base seed");
  attack_exp->add_option("--mu1", attack_exp_cfg.mu1, "x* mean");
  attack_exp->add_option("--sigma1", attack_exp_cfg.sigma1, "x* stddev");
  attack_exp->add_option("--sigma2", attack_exp_cfg.sigma2, "x0 stddev");
  attack_exp->add_option("--mode", attack_exp_flags.mode,
                         "comparison arm: bp|linbp|linbp-from=M");
  attack_exp->add_option("--out", attack_exp_flags.out, "CSV output path");
  attack_exp->add_option("--plot", attack_exp_flags.plot, "SVG plot path");
  attack_exp->callback(
      [&] { run_attack_expected_cmd(attack_exp_cfg, attack_exp_flags); });

  // train-sim
  TrainConfig train_cfg;
  SimFlags train_flags;
  CLI::App* train = app.add_subcommand(
      "train-sim", "Paired stochastic teacher-student training trials");
  train->add_option("--n", train_cfg.n_samples, "training samples N");
  train->add_option("--d", train_cfg.dim, "weight dimension");
  train->add_option("--eta", train_cfg.eta, "learning rate");
  train->add_option("--steps", train_cfg.iters, "iteration count");
  train->add_option("--trials", train_cfg.trials, "paired trials");
  train->add_option("--seed", train_cfg.seed, "base seed");
  train->add_option("--mu1", train_cfg.mu1, "w* mean");
  train->add_option("--sigma1", train_cfg.sigma1, "w* stddev");
  train->add_option("--sigma2", train_cfg.sigma2, "w0 stddev");
  train->add_option("--mode", train_flags.mode,
                    "comparison arm: bp|linbp|linbp-from=M");
  train->add_option("--normalize", train_flags.normalize,
                    "update normalization: none|l2|linf|sign");
  train->add_option("--out", train_flags.out, "CSV output path");
  train->add_option("--plot", train_flags.plot, "SVG plot path");
  train->callback([&] { run_train_sim_cmd(train_cfg, train_flags); });

  // train-expected
  TrainConfig train_exp_cfg;
  SimFlags train_exp_flags;
  CLI::App* train_exp = app.add_subcommand(
      "train-expected", "Deterministic expected-gradient training dynamics");
  train_exp->add_option("--n", train_exp_cfg.n_samples, "training samples N");
  train_exp->add_option("--d", train_exp_cfg.dim, "weight dimension");
  train_exp->add_option("--eta", train_exp_cfg.eta, "learning rate");
  train_exp->add_option("--steps", train_exp_cfg.iters, "iteration count");
  train_exp->add_option("--seed", train_exp_cfg.seed, "base seed");
  train_exp->add_option("--mu1", train_exp_cfg.mu1, "w* mean");
  train_exp->add_option("--sigma1", train_exp_cfg.sigma1, "w* stddev");
  train_exp->add_option("--sigma2", train_exp_cfg.sigma2, "w0 stddev");
  train_exp->add_option("--mode", train_exp_flags.mode,
                        "comparison arm: bp|linbp|linbp-from=M");
  train_exp->add_option("--out", train_exp_flags.out, "CSV output path");
  train_exp->add_option("--plot", train_exp_flags.plot, "SVG plot path");
  train_exp->callback(
      [&] { run_train_expected_cmd(train_exp_cfg, train_exp_flags); });

  // lemma1-check
  Lemma1Flags lemma1_flags;
  CLI::App* lemma1 = app.add_subcommand(
      "lemma1-check",
      "Monte Carlo check of the expected-G closed form (1e5 draws per pair)");
  lemma1->add_option("--d1", lemma1_flags.d1, "input dimension");
  lemma1->add_option("--d2", lemma1_flags.d2, "hidden dimension");
  lemma1->add_option("--d3", lemma1_flags.d3, "output dimension");
  lemma1->add_option("--trials", lemma1_flags.pairs, "number of (e, x) pairs");
  lemma1->add_option("--seed", lemma1_flags.seed, "base seed");
  lemma1->callback([&] { run_lemma1_check(lemma1_flags); });

  // lemma2-check
  Lemma2Flags lemma2_flags;
  CLI::App* lemma2 = app.add_subcommand(
      "lemma2-check",
      "Monte Carlo check of the signed-pair expectation (1e6 draws per set)");
  lemma2->add_option("--trials", lemma2_flags.sets, "number of parameter sets");
  lemma2->add_option("--seed", lemma2_flags.seed, "base seed");
  lemma2->callback([&] { run_lemma2_check(lemma2_flags); });

  // constraint-check
  ConstraintFlags constraint_flags;
  CLI::App* constraint = app.add_subcommand(
      "constraint-check",
      "Step-size constraint diagnostics on expected-dynamics trajectories");
  constraint->add_option("--d1", constraint_flags.attack.d1, "attack input dimension");
  constraint->add_option("--d2", constraint_flags.attack.d2, "attack hidden dimension");
  constraint->add_option("--d3", constraint_flags.attack.d3, "attack output dimension");
  constraint->add_option("--eps", constraint_flags.attack.eps, "attack l-inf budget");
  constraint->add_option("--n", constraint_flags.train.n_samples, "training samples N");
  constraint->add_option("--d", constraint_flags.train.dim, "training weight dimension");
  CLI::Option* eta_opt =
      constraint->add_option("--eta", "step size for both sides");
  CLI::Option* steps_opt =
      constraint->add_option("--steps", "iteration count for both sides");
  CLI::Option* seed_opt = constraint->add_option("--seed", "base seed");
  CLI::Option* mu1_opt =
      constraint->add_option("--mu1", constraint_flags.mu1, "target mean");
  CLI::Option* sigma1_opt = constraint->add_option(
      "--sigma1", constraint_flags.sigma1, "target stddev");
  CLI::Option* sigma2_opt = constraint->add_option(
      "--sigma2", constraint_flags.sigma2, "start stddev");
  constraint->add_option("--out", constraint_flags.out, "CSV output path");
  constraint->callback([&] {
    if (eta_opt->count()) {
      constraint_flags.attack.eta = eta_opt->as<double>();
      constraint_flags.train.eta = eta_opt->as<double>();
    }
    if (steps_opt->count()) {
      constraint_flags.attack.steps = steps_opt->as<std::size_t>();
      constraint_flags.train.iters = steps_opt->as<std::size_t>();
    } else {
      constraint_flags.train.iters = 100;
    }
    if (seed_opt->count()) {
      constraint_flags.attack.seed = seed_opt->as<std::uint64_t>();
      constraint_flags.train.seed = seed_opt->as<std::uint64_t>();
    }
    constraint_flags.mu1_set = mu1_opt->count() > 0;
    constraint_flags.sigma1_set = sigma1_opt->count() > 0;
    constraint_flags.sigma2_set = sigma2_opt->count() > 0;
    run_constraint_check(constraint_flags);
  });

  // mlp-train
  MlpFlags mlp_flags;
  CLI::App* mlp = app.add_subcommand(
      "mlp-train", "Mini-batch MLP training mirror (IDX files or synthetic)");
  mlp->add_option("--images", mlp_flags.images, "IDX image file");
  mlp->add_option("--labels", mlp_flags.labels, "IDX label file");
  mlp->add_option("--subset", mlp_flags.subset, "restrict to first N samples");
  mlp->add_option("--epochs", mlp_flags.epochs, "training epochs");
  mlp->add_option("--batch", mlp_flags.batch, "mini-batch size");
  mlp->add_option("--eta", mlp_flags.eta, "learning rate");
  mlp->add_option("--seed", mlp_flags.seed, "base seed");
  mlp->add_option("--mode", mlp_flags.mode,
                  "comparison arm: bp|linbp|linbp-from=M");
  mlp->add_option("--out", mlp_flags.out, "CSV output path");
  mlp->add_option("--plot", mlp_flags.plot, "SVG plot path");
  mlp->callback([&] { run_mlp_train(mlp_flags); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
