#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "linbp/grad.hpp"
#include "linbp/linalg.hpp"

namespace linbp {

// E[G(e, x)] over standard-Gaussian (W, V):
// (d2 / 2pi) * [(pi - Theta) x + ||x|| sin(Theta) e], Theta = angle(e, x).
// e must be unit within 1e-9.
Vec lemma1_expectation(const Vec& e_unit, const Vec& x, std::size_t d2);

// Theta x* - (||x*|| / ||x||) sin(Theta) x. Same formula computes the q
// vectors of the training analysis. For 0 < ||x|| < 1e-12 the sin term is
// defined as 0 and Theta as pi/2.
Vec correction_p(const Vec& x, const Vec& x_star);

// Expected attack gradient over (W, V) draws:
// bp:    (d2/2)(x - x*) + (d2/2pi) correction_p(x, x*)
// linbp: (d2/2)(x - x*)
Vec expected_grad_x(const Vec& x, const Vec& x_star, std::size_t d2,
                    GradientMode mode);

// Expected training gradient over X draws; same shape with d2 -> N.
Vec expected_grad_w(const Vec& w, const Vec& w_star, std::size_t n_samples,
                    GradientMode mode);

// Standard normal CDF, absolute error well below 1e-7.
double normal_cdf(double z);

struct Lemma2Params {
  double u = 0.0;
  double v = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
};

// E[(u X1 - v X2) sgn(X1 - X2)] for X1 ~ N(mu1, sigma1^2), X2 ~ N(mu2,
// sigma2^2): 2 gamma (u sigma1^2 + v sigma2^2) + (u mu1 - v mu2)(2P - 1)
// with P = P(X2 < X1).
double lemma2_expectation(const Lemma2Params& p);

// Per-(step m, coordinate i) table of the step-size smallness condition
// |sum_{j<m} (eta K / 2pi)(1 - eta K / 2)^{m-1-j} p_{ji}|
//   < |(1 - eta K / 2)^m (target_i - x0_i)|.
struct ConstraintReport {
  std::size_t steps = 0;
  std::size_t dim = 0;
  std::vector<std::uint8_t> cells;  // (m-1) * dim + i, m in 1..steps
  bool overall = true;
  // (m, i) of the first violated cell, m 1-based, i 0-based.
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;

  bool holds(std::size_t m, std::size_t i) const {
    return cells[(m - 1) * dim + i] != 0;
  }
};

// iterates = x^(0), ..., x^(t); correction vectors are evaluated along it.
ConstraintReport eta_constraint_attack(const std::vector<Vec>& iterates,
                                       const Vec& x_star, double eta,
                                       std::size_t d2);
ConstraintReport eta_constraint_train(const std::vector<Vec>& iterates,
                                      const Vec& w_star, double eta,
                                      std::size_t n_samples);

namespace detail {
// Total variants used by the expected-dynamics iterators: exact zero-norm
// iterates take the same degenerate value as the tiny-norm rule.
Vec correction_p_total(const Vec& x, const Vec& x_star);
Vec expected_grad_total(const Vec& x, const Vec& x_star, std::size_t count,
                        GradientMode mode);
}  // namespace detail

}  // namespace linbp
