#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "boxfollow/box_tree.hpp"

namespace boxfollow {

enum class SamplerStrategy { kGrid, kRandom, kCenterVerticesEdges };

std::string to_string(SamplerStrategy s);
SamplerStrategy parse_sampler_strategy(const std::string& name);

// Deterministic test-point rule. grid uses points_per_axis^n points at
// relative positions (i + 0.5) / p; random uses total_points i.i.d. uniform
// points keyed by (seed, depth, path); center-vertices-edges uses the
// center, the 2^n vertices and the 2n face midpoints, pulled inward by a
// relative inset so they stay inside the half-open box.
struct SamplerSpec {
  SamplerStrategy strategy = SamplerStrategy::kGrid;
  int points_per_axis = 3;
  int total_points = 200;
  std::uint64_t seed = 0;

  static constexpr double kInset = 1e-12;

  // grid p=3 up to four dimensions, random with 200 points above.
  static SamplerSpec default_for(std::size_t dimension);
  std::size_t points_per_box(std::size_t dimension) const;
  void validate(std::size_t dimension) const;
};

// Flat row-major storage of points in R^n.
class PointCloud {
 public:
  explicit PointCloud(std::size_t dimension = 0) : n_(dimension) {}
  std::size_t dimension() const { return n_; }
  std::size_t size() const { return n_ == 0 ? 0 : data_.size() / n_; }
  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * n_, n_}; }
  void clear() { data_.clear(); }
  void reset(std::size_t dimension) {
    n_ = dimension;
    data_.clear();
  }
  std::span<double> append() {
    data_.resize(data_.size() + n_);
    return {data_.data() + data_.size() - n_, n_};
  }
  void reserve(std::size_t points) { data_.reserve(points * n_); }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

// Test points of the box [lo, hi) with identity (depth, path).
void sample_test_points(std::span<const double> lo, std::span<const double> hi, int depth,
                        PathBits path, const SamplerSpec& spec, PointCloud& out);
PointCloud sample_test_points(const Box& box, const SamplerSpec& spec);

// Counter-based generator: uniform double in [0, 1) from a 64-bit key.
double unit_uniform(std::uint64_t key, std::uint64_t counter);

}  // namespace boxfollow
