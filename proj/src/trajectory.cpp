#include "linbp/trajectory.hpp"

#include <stdexcept>

namespace linbp {

Trajectory mean_trajectory(const std::vector<Trajectory>& trials) {
  if (trials.empty()) throw std::invalid_argument("mean_trajectory: no trials");
  const std::size_t len = trials.front().steps.size();
  Trajectory mean;
  mean.steps.assign(len, StepRecord{});
  for (const Trajectory& t : trials) {
    if (t.steps.size() != len)
      throw std::invalid_argument("mean_trajectory: length mismatch");
    for (std::size_t s = 0; s < len; ++s) {
      mean.steps[s].l1_dist += t.steps[s].l1_dist;
      mean.steps[s].loss += t.steps[s].loss;
      mean.steps[s].grad_l2 += t.steps[s].grad_l2;
      mean.steps[s].grad_linf += t.steps[s].grad_linf;
    }
  }
  const double inv = 1.0 / static_cast<double>(trials.size());
  for (StepRecord& s : mean.steps) {
    s.l1_dist *= inv;
    s.loss *= inv;
    s.grad_l2 *= inv;
    s.grad_linf *= inv;
  }
  return mean;
}

NormRatio mean_norm_ratio(const std::vector<Trajectory>& num,
                          const std::vector<Trajectory>& den,
                          std::size_t begin, std::size_t end) {
  if (num.size() != den.size())
    throw std::invalid_argument("mean_norm_ratio: trial count mismatch");
  NormRatio ratio;
  std::size_t count_l2 = 0, count_linf = 0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    for (std::size_t s = begin; s < end && s < num[k].steps.size(); ++s) {
      const StepRecord& a = num[k].steps[s];
      const StepRecord& b = den[k].steps[s];
      if (b.grad_l2 > 0.0) {
        ratio.l2 += a.grad_l2 / b.grad_l2;
        ++count_l2;
      }
      if (b.grad_linf > 0.0) {
        ratio.linf += a.grad_linf / b.grad_linf;
        ++count_linf;
      }
    }
  }
  if (count_l2 > 0) ratio.l2 /= static_cast<double>(count_l2);
  if (count_linf > 0) ratio.linf /= static_cast<double>(count_linf);
  return ratio;
}

}  // namespace linbp
