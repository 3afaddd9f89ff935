#pragma once

#include <cstdint>
#include <vector>

#include "linbp/linalg.hpp"

namespace linbp {

// One record per step, including step 0.
struct StepRecord {
  double l1_dist = 0.0;
  double loss = 0.0;
  double grad_l2 = 0.0;
  double grad_linf = 0.0;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  std::vector<Vec> iterates;  // snapshots, only kept when requested
  std::uint64_t draw_checksum = 0;
};

Trajectory mean_trajectory(const std::vector<Trajectory>& trials);

// Mean over trials and steps [begin, end) of the per-step gradient-norm
// ratio num/den; steps where the denominator norm is zero are skipped.
struct NormRatio {
  double l2 = 0.0;
  double linf = 0.0;
};
NormRatio mean_norm_ratio(const std::vector<Trajectory>& num,
                          const std::vector<Trajectory>& den,
                          std::size_t begin, std::size_t end);

}  // namespace linbp
