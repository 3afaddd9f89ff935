#include "linbp/closedform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "linbp/kernels.hpp"

namespace linbp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateNorm = 1e-12;

double l2norm(const Vec& v) {
  return std::sqrt(kernels::sum_sq(v.data(), v.size()));
}

}  // namespace

Vec lemma1_expectation(const Vec& e_unit, const Vec& x, std::size_t d2) {
  if (e_unit.size() != x.size())
    throw std::invalid_argument("lemma1_expectation: length mismatch");
  const double ne = l2norm(e_unit);
  if (std::fabs(ne - 1.0) > 1e-9)
    throw std::domain_error("lemma1_expectation: e is not a unit vector");
  const double nx = l2norm(x);
  if (nx == 0.0) throw std::domain_error("lemma1_expectation: zero-norm x");
  const double theta = angle_between(e_unit, x);
  const double scale = static_cast<double>(d2) / (2.0 * kPi);
  Vec out(x.size());
  const double cx = scale * (kPi - theta);
  const double ce = scale * nx * std::sin(theta);
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = cx * x[i] + ce * e_unit[i];
  return out;
}

namespace detail {

Vec correction_p_total(const Vec& x, const Vec& x_star) {
  if (x.size() != x_star.size())
    throw std::invalid_argument("correction_p: length mismatch");
  const double ns = l2norm(x_star);
  if (ns == 0.0) throw std::domain_error("correction_p: zero-norm x_star");
  const double nx = l2norm(x);
  double theta, sin_coeff;
  if (nx < kDegenerateNorm) {
    theta = kPi / 2.0;
    sin_coeff = 0.0;
  } else {
    double c = kernels::dot(x.data(), x_star.data(), x.size()) / (nx * ns);
    c = c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
    theta = std::acos(c);
    sin_coeff = (ns / nx) * std::sin(theta);
  }
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = theta * x_star[i] - sin_coeff * x[i];
  return out;
}

Vec expected_grad_total(const Vec& x, const Vec& x_star, std::size_t count,
                        GradientMode mode) {
  if (x.size() != x_star.size())
    throw std::invalid_argument("expected_grad: length mismatch");
  const double half = static_cast<double>(count) / 2.0;
  Vec out(x.size());
  kernels::sub(x.data(), x_star.data(), out.data(), out.size());
  for (double& v : out) v *= half;
  if (mode.keeps_relu_factor(1)) {
    Vec p = correction_p_total(x, x_star);
    kernels::axpy(half / kPi, p.data(), out.data(), out.size());
  }
  return out;
}

}  // namespace detail

Vec correction_p(const Vec& x, const Vec& x_star) {
  if (l2norm(x) == 0.0) throw std::domain_error("correction_p: zero-norm x");
  return detail::correction_p_total(x, x_star);
}

Vec expected_grad_x(const Vec& x, const Vec& x_star, std::size_t d2,
                    GradientMode mode) {
  if (x.size() != x_star.size())
    throw std::invalid_argument("expected_grad_x: length mismatch");
  if (l2norm(x) == 0.0 || l2norm(x_star) == 0.0)
    throw std::domain_error("expected_grad_x: zero-norm input");
  return detail::expected_grad_total(x, x_star, d2, mode);
}

Vec expected_grad_w(const Vec& w, const Vec& w_star, std::size_t n_samples,
                    GradientMode mode) {
  return expected_grad_x(w, w_star, n_samples, mode);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double lemma2_expectation(const Lemma2Params& p) {
  if (p.sigma1 <= 0.0 || p.sigma2 <= 0.0)
    throw std::domain_error("lemma2_expectation: nonpositive sigma");
  const double var = p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2;
  const double dmu = p.mu1 - p.mu2;
  const double gamma =
      std::exp(-dmu * dmu / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
  // P(X2 < X1) = 1 - F(0) for X1 - X2 ~ N(dmu, var)
  const double prob = normal_cdf(dmu / std::sqrt(var));
  return 2.0 * gamma * (p.u * p.sigma1 * p.sigma1 + p.v * p.sigma2 * p.sigma2) +
         (p.u * p.mu1 - p.v * p.mu2) * (2.0 * prob - 1.0);
}

namespace {

ConstraintReport contraction_constraint(const std::vector<Vec>& iterates,
                                        const Vec& target, double eta,
                                        std::size_t count) {
  if (iterates.empty())
    throw std::invalid_argument("eta constraint: empty trajectory");
  const std::size_t t = iterates.size() - 1;
  const std::size_t dim = target.size();
  ConstraintReport report;
  report.steps = t;
  report.dim = dim;
  report.cells.assign(t * dim, 1);
  if (t == 0) return report;

  const double rate = 1.0 - eta * static_cast<double>(count) / 2.0;
  const double coeff = eta * static_cast<double>(count) / (2.0 * kPi);

  // lhs_m = sum_{j<m} coeff * rate^{m-1-j} p_j, built incrementally.
  Vec lhs(dim, 0.0);
  double rate_pow = 1.0;
  for (std::size_t m = 1; m <= t; ++m) {
    Vec p = detail::correction_p_total(iterates[m - 1], target);
    for (std::size_t i = 0; i < dim; ++i) lhs[i] = rate * lhs[i] + coeff * p[i];
    rate_pow *= rate;
    for (std::size_t i = 0; i < dim; ++i) {
      const double rhs = std::fabs(rate_pow * (target[i] - iterates[0][i]));
      const bool ok = std::fabs(lhs[i]) < rhs;
      if (!ok) {
        report.cells[(m - 1) * dim + i] = 0;
        report.overall = false;
        if (!report.first_violation) report.first_violation = {m, i};
      }
    }
  }
  return report;
}

}  // namespace

ConstraintReport eta_constraint_attack(const std::vector<Vec>& iterates,
                                       const Vec& x_star, double eta,
                                       std::size_t d2) {
  return contraction_constraint(iterates, x_star, eta, d2);
}

ConstraintReport eta_constraint_train(const std::vector<Vec>& iterates,
                                      const Vec& w_star, double eta,
                                      std::size_t n_samples) {
  return contraction_constraint(iterates, w_star, eta, n_samples);
}

}  // namespace linbp
