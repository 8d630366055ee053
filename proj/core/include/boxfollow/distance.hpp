#pragma once

#include <span>
#include <vector>

#include "boxfollow/box_tree.hpp"

namespace boxfollow {

// Flat list of closed axis-aligned boxes, independent of any tree.
class BoxSet {
 public:
  explicit BoxSet(std::size_t dimension = 0) : n_(dimension) {}
  static BoxSet from_tree(const BoxTree& tree, int k);
  static BoxSet from_boxes(const std::vector<Box>& boxes);

  std::size_t dimension() const { return n_; }
  std::size_t size() const { return n_ == 0 ? 0 : lo_.size() / n_; }
  bool empty() const { return size() == 0; }
  void add(std::span<const double> lo, std::span<const double> hi);
  std::span<const double> lo(std::size_t i) const { return {lo_.data() + i * n_, n_}; }
  std::span<const double> hi(std::size_t i) const { return {hi_.data() + i * n_, n_}; }

 private:
  std::size_t n_;
  std::vector<double> lo_, hi_;
};

double point_box_distance(std::span<const double> x, std::span<const double> lo,
                          std::span<const double> hi);

// Bounding-volume hierarchy over a BoxSet answering exact Euclidean
// point-to-union distances.
class BoxIndex {
 public:
  explicit BoxIndex(BoxSet boxes);
  double distance(std::span<const double> x) const;

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range in order_ for leaves
    int left = -1, right = -1;
  };
  int build(std::size_t begin, std::size_t end, std::vector<double>& centers);
  double node_distance2(int node, std::span<const double> x) const;
  void query(int node, std::span<const double> x, double& best2) const;

  BoxSet boxes_;
  std::size_t n_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> node_lo_, node_hi_;
};

// Source boxes are sampled with a grid of points_per_axis^n interior points
// plus their 2^n vertices. The sampled sup-inf approaches the exact value
// from below as the density grows and is exact for the vertices-only cases
// of interval geometry.
struct DistanceSampling {
  int points_per_axis = 4;
  bool vertices = true;
};

// sup over sampled x in A of inf over y in B of |x - y|.
double directed_distance(const BoxSet& a, const BoxSet& b, const DistanceSampling& sampling = {},
                         unsigned workers = 0);
double hausdorff(const BoxSet& a, const BoxSet& b, const DistanceSampling& sampling = {},
                 unsigned workers = 0);

}  // namespace boxfollow
