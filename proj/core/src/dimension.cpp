#include "boxfollow/dimension.hpp"

#include <cmath>

namespace boxfollow {

DimensionEstimate box_counting_dimension(const BoxTree& tree, int first, int last) {
  if (first > last) throw ValidationError("dimension: empty depth range");
  if (!tree.has_depth(last)) {
    throw ValidationError("dimension: no snapshot at depth " + std::to_string(last));
  }
  DimensionEstimate est;
  const int lowest = std::max(first, static_cast<int>(tree.dimension()));
  for (int k = lowest; k <= last; ++k) {
    if (tree.size(k) == 0) continue;
    est.depths.push_back(k);
    est.counts.push_back(tree.size(k));
    est.sizes.push_back(tree.box_diameter(k));
  }
  if (est.depths.size() < 3) {
    throw ValidationError("dimension: need at least 3 usable depths, got " +
                          std::to_string(est.depths.size()));
  }
  const double m = static_cast<double>(est.depths.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < est.depths.size(); ++i) {
    xs.push_back(-std::log(est.sizes[i]));
    ys.push_back(std::log(static_cast<double>(est.counts[i])));
    sx += xs.back();
    sy += ys.back();
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (est.intercept + est.slope * xs[i]);
    ss += r * r;
  }
  est.residual = std::sqrt(ss / m);
  return est;
}

DimensionEstimate box_counting_dimension(const BoxTree& tree) {
  return box_counting_dimension(tree, 0, tree.deepest());
}

}  // namespace boxfollow
