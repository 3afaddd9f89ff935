#pragma once

#include <cstddef>

#include "linbp/closedform.hpp"
#include "linbp/grad.hpp"
#include "linbp/linalg.hpp"

namespace linbp {

// Monte Carlo means over fresh standard-Gaussian weight draws. Work is
// sharded; shard s consumes RngStream{rng.seed, rng.stream + s} and the
// reduction order is fixed, so results do not depend on scheduling.

// Mean of G(e, x) = W^T D(W,e) V^T V D(W,x) W x, computed from the
// definition and divided by d3. A standard-Gaussian V has E[V^T V] = d3 I,
// so the Gram-normalized mean is the quantity the closed forms describe;
// the raw mean is exactly d3 times larger.
Vec mc_lemma1_mean(const Vec& e_unit, const Vec& x, std::size_t d2,
                   std::size_t d3, std::size_t draws, const RngStream& rng);

// Mean of grad_x(model, x, x*, mode) over (W, V) draws, Gram-normalized by
// d3 as above.
Vec mc_grad_x_mean(const Vec& x, const Vec& x_star, std::size_t d2,
                   std::size_t d3, std::size_t draws, GradientMode mode,
                   const RngStream& rng);

// Mean of grad_w_train(X, w, w*, mode) over X draws.
Vec mc_grad_w_mean(const Vec& w, const Vec& w_star, std::size_t n_samples,
                   std::size_t draws, GradientMode mode, const RngStream& rng);

// Mean of (u X1 - v X2) sgn(X1 - X2) over paired scalar draws.
double mc_lemma2_mean(const Lemma2Params& params, std::size_t draws,
                      const RngStream& rng);

double relative_l2_error(const Vec& actual, const Vec& reference);

}  // namespace linbp
