#pragma once

#include <vector>

#include "boxfollow/box_tree.hpp"

namespace boxfollow {

struct DimensionEstimate {
  std::vector<int> depths;
  std::vector<std::size_t> counts;  // N_k
  std::vector<double> sizes;        // eps_k, max box diameter
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square deviation of the fit
};

// Least-squares slope of log N_k against log(1/eps_k) over depths
// [first, last]. Depths below the dimension are skipped so that every
// coordinate has been bisected at least once. Needs three usable depths.
DimensionEstimate box_counting_dimension(const BoxTree& tree, int first, int last);
DimensionEstimate box_counting_dimension(const BoxTree& tree);

}  // namespace boxfollow
