#include "linbp/montecarlo.hpp"

#include <cmath>

#include "linbp/kernels.hpp"
#include "linbp/model.hpp"
#include "linbp/parallel.hpp"

namespace linbp {

namespace {

constexpr std::size_t kShards = 64;

// Mean of a per-draw vector statistic over `draws` samples: shards fan out
// across threads, partial sums merge in shard order.
template <typename Body>
Vec sharded_vec_mean(std::size_t dim, std::size_t draws, const RngStream& rng,
                     const Body& body) {
  const std::size_t shards = draws < kShards ? (draws > 0 ? draws : 1) : kShards;
  std::vector<Vec> partial(shards, Vec(dim, 0.0));
  parallel_for(shards, [&](std::size_t s) {
    const std::size_t lo = draws * s / shards;
    const std::size_t hi = draws * (s + 1) / shards;
    auto eng = RngStream{rng.seed, rng.stream + s}.engine();
    body(hi - lo, eng, partial[s]);
  });
  Vec mean(dim, 0.0);
  for (const Vec& p : partial)
    kernels::axpy(1.0, p.data(), mean.data(), dim);
  for (double& v : mean) v /= static_cast<double>(draws);
  return mean;
}

}  // namespace

Vec mc_lemma1_mean(const Vec& e_unit, const Vec& x, std::size_t d2,
                   std::size_t d3, std::size_t draws, const RngStream& rng) {
  const std::size_t d1 = x.size();
  Vec mean = sharded_vec_mean(
      d1, draws, rng,
      [&](std::size_t count, std::mt19937_64& eng, Vec& sum) {
        std::normal_distribution<double> normal(0.0, 1.0);
        Matrix W(d2, d1), V(d3, d2);
        Vec ze(d2), zx(d2), masked(d2), t(d3), s(d2), g(d1);
        for (std::size_t k = 0; k < count; ++k) {
          for (std::size_t i = 0; i < W.size(); ++i) W.data()[i] = normal(eng);
          for (std::size_t i = 0; i < V.size(); ++i) V.data()[i] = normal(eng);
          kernels::matvec(W.data(), d2, d1, e_unit.data(), ze.data());
          kernels::matvec(W.data(), d2, d1, x.data(), zx.data());
          // D(W,x) W x
          for (std::size_t i = 0; i < d2; ++i)
            masked[i] = zx[i] > 0.0 ? zx[i] : 0.0;
          kernels::matvec(V.data(), d3, d2, masked.data(), t.data());
          kernels::matvec_t(V.data(), d3, d2, t.data(), s.data());
          // D(W,e)
          for (std::size_t i = 0; i < d2; ++i)
            if (!(ze[i] > 0.0)) s[i] = 0.0;
          kernels::matvec_t(W.data(), d2, d1, s.data(), g.data());
          kernels::axpy(1.0, g.data(), sum.data(), d1);
        }
      });
  // Gram normalization: E[V^T V] = d3 I for standard-Gaussian V, so the
  // raw mean carries a d3 factor relative to the per-unit-Gram closed form.
  for (double& v : mean) v /= static_cast<double>(d3);
  return mean;
}

Vec mc_grad_x_mean(const Vec& x, const Vec& x_star, std::size_t d2,
                   std::size_t d3, std::size_t draws, GradientMode mode,
                   const RngStream& rng) {
  const std::size_t d1 = x.size();
  Vec mean = sharded_vec_mean(
      d1, draws, rng,
      [&](std::size_t count, std::mt19937_64& eng, Vec& sum) {
        std::normal_distribution<double> normal(0.0, 1.0);
        TwoLayerModel model{Matrix(d2, d1), Matrix(d3, d2)};
        for (std::size_t k = 0; k < count; ++k) {
          for (std::size_t i = 0; i < model.W.size(); ++i)
            model.W.data()[i] = normal(eng);
          for (std::size_t i = 0; i < model.V.size(); ++i)
            model.V.data()[i] = normal(eng);
          Vec g = grad_x(model, x, x_star, mode);
          kernels::axpy(1.0, g.data(), sum.data(), d1);
        }
      });
  // same Gram normalization as mc_lemma1_mean
  for (double& v : mean) v /= static_cast<double>(d3);
  return mean;
}

Vec mc_grad_w_mean(const Vec& w, const Vec& w_star, std::size_t n_samples,
                   std::size_t draws, GradientMode mode, const RngStream& rng) {
  const std::size_t dim = w.size();
  return sharded_vec_mean(
      dim, draws, rng,
      [&](std::size_t count, std::mt19937_64& eng, Vec& sum) {
        std::normal_distribution<double> normal(0.0, 1.0);
        Matrix X(n_samples, dim);
        for (std::size_t k = 0; k < count; ++k) {
          for (std::size_t i = 0; i < X.size(); ++i) X.data()[i] = normal(eng);
          Vec g = grad_w_train(X, w, w_star, mode);
          kernels::axpy(1.0, g.data(), sum.data(), dim);
        }
      });
}

double mc_lemma2_mean(const Lemma2Params& params, std::size_t draws,
                      const RngStream& rng) {
  Vec mean = sharded_vec_mean(
      1, draws, rng,
      [&](std::size_t count, std::mt19937_64& eng, Vec& sum) {
        std::normal_distribution<double> d1(params.mu1, params.sigma1);
        std::normal_distribution<double> d2(params.mu2, params.sigma2);
        double acc = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
          const double x1 = d1(eng);
          const double x2 = d2(eng);
          const double alpha = params.u * x1 - params.v * x2;
          acc += x1 > x2 ? alpha : (x1 < x2 ? -alpha : 0.0);
        }
        sum[0] += acc;
      });
  return mean[0];
}

double relative_l2_error(const Vec& actual, const Vec& reference) {
  Vec diff(actual.size());
  kernels::sub(actual.data(), reference.data(), diff.data(), diff.size());
  const double num = std::sqrt(kernels::sum_sq(diff.data(), diff.size()));
  const double den =
      std::sqrt(kernels::sum_sq(reference.data(), reference.size()));
  return den > 0.0 ? num / den : num;
}

}  // namespace linbp
