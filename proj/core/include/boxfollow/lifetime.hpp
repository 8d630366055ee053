#pragma once

#include <vector>

#include "boxfollow/box_tree.hpp"
#include "boxfollow/sampler.hpp"
#include "boxfollow/system.hpp"

namespace boxfollow {

// Closed ball that absorbs trajectories.
struct LifetimeTarget {
  Vector center;
  double radius = 0.05;
};

struct LifetimeOptions {
  double t_max = 300.0;
  double sample_dt = 0.1;  // entry is checked on this grid of dense-output times
  SamplerSpec spec{};
  unsigned workers = 0;
};

struct LifetimeField {
  int depth = 0;
  double lambda = 0.0;
  LifetimeTarget target;
  double t_max = 0.0;
  double sample_dt = 0.0;
  std::vector<PathBits> paths;        // sorted, as in the snapshot
  std::vector<double> lifetime;       // mean over the box's test points
  std::vector<std::size_t> failures;  // points whose integration failed
  std::size_t failed_points = 0;

  // Share of boxes whose lifetime is at least ratio * t_max.
  double saturated_fraction(double ratio = 0.95) const;
};

// First sample time at which the trajectory from x0 is within the target,
// or t_max. `failed` is set when integration broke down (lifetime t_max).
double point_lifetime(const ParametricSystem& system, std::span<const double> x0, double lambda,
                      const LifetimeTarget& target, double t_max, double sample_dt,
                      bool* failed = nullptr);

LifetimeField lifetime_field(const BoxTree& tree, int depth, const ParametricSystem& system,
                             double lambda, const LifetimeTarget& target,
                             const LifetimeOptions& options = {});

}  // namespace boxfollow
