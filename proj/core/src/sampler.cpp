#include "boxfollow/sampler.hpp"

#include <cmath>

namespace boxfollow {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t box_key(std::uint64_t seed, int depth, PathBits path) {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(depth))) ^ path);
}

// The inset is relative to the box width, so for |lo| >> hi - lo the sum
// can still round up onto the excluded upper face.
double below(double x, double lo, double hi) { return x < hi ? x : std::nextafter(hi, lo); }

}  // namespace

double unit_uniform(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t z = splitmix64(key ^ splitmix64(counter));
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::string to_string(SamplerStrategy s) {
  switch (s) {
    case SamplerStrategy::kGrid: return "grid";
    case SamplerStrategy::kRandom: return "random";
    case SamplerStrategy::kCenterVerticesEdges: return "center-vertices-edges";
  }
  return "grid";
}

SamplerStrategy parse_sampler_strategy(const std::string& name) {
  if (name == "grid") return SamplerStrategy::kGrid;
  if (name == "random") return SamplerStrategy::kRandom;
  if (name == "center-vertices-edges") return SamplerStrategy::kCenterVerticesEdges;
  throw ValidationError("unknown sampler strategy '" + name +
                        "' (supported: grid, random, center-vertices-edges)");
}

SamplerSpec SamplerSpec::default_for(std::size_t dimension) {
  SamplerSpec s;
  if (dimension > 4) {
    s.strategy = SamplerStrategy::kRandom;
    s.total_points = 200;
  }
  return s;
}

std::size_t SamplerSpec::points_per_box(std::size_t n) const {
  switch (strategy) {
    case SamplerStrategy::kGrid: {
      std::size_t c = 1;
      for (std::size_t i = 0; i < n; ++i) c *= static_cast<std::size_t>(points_per_axis);
      return c;
    }
    case SamplerStrategy::kRandom: return static_cast<std::size_t>(total_points);
    case SamplerStrategy::kCenterVerticesEdges: return 1 + (std::size_t{1} << n) + 2 * n;
  }
  return 0;
}

void SamplerSpec::validate(std::size_t n) const {
  if (strategy == SamplerStrategy::kGrid && points_per_axis <= 0) {
    throw ValidationError("sampler: points_per_axis must be positive");
  }
  if (strategy == SamplerStrategy::kRandom && total_points <= 0) {
    throw ValidationError("sampler: total_points must be positive");
  }
  if (strategy == SamplerStrategy::kCenterVerticesEdges && n > 20) {
    throw ValidationError("sampler: center-vertices-edges needs 2^n vertices; n too large");
  }
  if (points_per_box(n) > 10'000'000) throw ValidationError("sampler: too many points per box");
}

void sample_test_points(std::span<const double> lo, std::span<const double> hi, int depth,
                        PathBits path, const SamplerSpec& spec, PointCloud& out) {
  const std::size_t n = lo.size();
  out.reset(n);
  switch (spec.strategy) {
    case SamplerStrategy::kGrid: {
      if (spec.points_per_axis <= 0) throw ValidationError("sampler: zero points requested");
      const auto p = static_cast<std::size_t>(spec.points_per_axis);
      std::vector<std::size_t> idx(n, 0);
      out.reserve(spec.points_per_box(n));
      while (true) {
        auto x = out.append();
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = below(lo[i] + (hi[i] - lo[i]) *
                                   ((static_cast<double>(idx[i]) + 0.5) / static_cast<double>(p)),
                       lo[i], hi[i]);
        }
        std::size_t a = n;
        while (a > 0) {
          --a;
          if (++idx[a] < p) break;
          idx[a] = 0;
          if (a == 0) return;
        }
        if (n == 0) return;
      }
    }
    case SamplerStrategy::kRandom: {
      if (spec.total_points <= 0) throw ValidationError("sampler: zero points requested");
      const std::uint64_t key = box_key(spec.seed, depth, path);
      out.reserve(static_cast<std::size_t>(spec.total_points));
      std::uint64_t counter = 0;
      for (int j = 0; j < spec.total_points; ++j) {
        auto x = out.append();
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = below(lo[i] + (hi[i] - lo[i]) * unit_uniform(key, counter++), lo[i], hi[i]);
        }
      }
      return;
    }
    case SamplerStrategy::kCenterVerticesEdges: {
      const double shrink = 1.0 - SamplerSpec::kInset;
      std::vector<double> c(n), r(n);
      for (std::size_t i = 0; i < n; ++i) {
        c[i] = 0.5 * (lo[i] + hi[i]);
        r[i] = 0.5 * (hi[i] - lo[i]) * shrink;
      }
      out.reserve(spec.points_per_box(n));
      {
        auto x = out.append();
        for (std::size_t i = 0; i < n; ++i) x[i] = c[i];
      }
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        auto x = out.append();
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = below(c[i] + (((mask >> i) & 1U) ? r[i] : -r[i]), lo[i], hi[i]);
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (double s : {-1.0, 1.0}) {
          auto x = out.append();
          for (std::size_t j = 0; j < n; ++j) x[j] = c[j];
          x[i] = below(c[i] + s * r[i], lo[i], hi[i]);
        }
      }
      return;
    }
  }
}

PointCloud sample_test_points(const Box& box, const SamplerSpec& spec) {
  const std::size_t n = box.dimension();
  Vector lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = box.center[i] - box.radius[i];
    hi[i] = box.center[i] + box.radius[i];
  }
  PointCloud out(n);
  sample_test_points(lo, hi, box.depth, box.path, spec, out);
  return out;
}

}  // namespace boxfollow
