#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "boxfollow/distance.hpp"

using namespace boxfollow;

namespace {

BoxSet intervals(std::initializer_list<std::pair<double, double>> list) {
  BoxSet s(1);
  for (auto [a, b] : list) s.add(Vector{a}, Vector{b});
  return s;
}

BoxSet random_boxes(std::mt19937_64& rng, std::size_t n, std::size_t count, double spread) {
  std::uniform_real_distribution<double> c(-spread, spread), w(0.01, 0.5);
  BoxSet s(n);
  Vector lo(n), hi(n);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      lo[a] = c(rng);
      hi[a] = lo[a] + w(rng);
    }
    s.add(lo, hi);
  }
  return s;
}

double max_diameter(const BoxSet& s) {
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double q = 0.0;
    for (std::size_t a = 0; a < s.dimension(); ++a) q += std::pow(s.hi(i)[a] - s.lo(i)[a], 2);
    d = std::max(d, std::sqrt(q));
  }
  return d;
}

}  // namespace

TEST(Distance, PointBox) {
  EXPECT_EQ(point_box_distance(Vector{0.5, 0.5}, Vector{0, 0}, Vector{1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(point_box_distance(Vector{4, 5}, Vector{0, 0}, Vector{1, 1}), 5.0);
  EXPECT_DOUBLE_EQ(point_box_distance(Vector{-2, 0.5}, Vector{0, 0}, Vector{1, 1}), 2.0);
}

TEST(Distance, IdenticalSetsAreAtZero) {
  std::mt19937_64 rng(1);
  const auto a = random_boxes(rng, 3, 200, 2.0);
  EXPECT_EQ(hausdorff(a, a), 0.0);
}

TEST(Distance, DisjointIntervals) {
  const auto a = intervals({{2, 3}});
  const auto b = intervals({{0, 1}});
  EXPECT_DOUBLE_EQ(directed_distance(a, b), 2.0);
  EXPECT_DOUBLE_EQ(directed_distance(b, a), 2.0);
  EXPECT_DOUBLE_EQ(hausdorff(a, b), 2.0);
}

TEST(Distance, SubsetHasZeroDirectedDistance) {
  const auto small = intervals({{0.25, 0.5}});
  const auto big = intervals({{0, 1}});
  EXPECT_EQ(directed_distance(small, big), 0.0);
  EXPECT_DOUBLE_EQ(directed_distance(big, small), 0.5);
  EXPECT_DOUBLE_EQ(hausdorff(small, big), 0.5);
}

TEST(Distance, NestedUnions) {
  // A = [0,1] u [4,5], B = [0,5]: the gap midpoint 2.5 is 1.5 from A.
  const auto a = intervals({{0, 1}, {4, 5}});
  const auto b = intervals({{0, 5}});
  EXPECT_EQ(directed_distance(a, b), 0.0);
  DistanceSampling fine;
  fine.points_per_axis = 64;
  EXPECT_NEAR(directed_distance(b, a, fine), 1.5, 5.0 / 128);
  EXPECT_LE(directed_distance(b, a, fine), 1.5);
}

TEST(Distance, ApproximatesFromBelowWithDensity) {
  const auto a = intervals({{0, 1}, {4, 5}});
  const auto b = intervals({{0, 5}});
  double last = 0.0;
  for (int p : {1, 2, 4, 8, 16}) {
    DistanceSampling s;
    s.points_per_axis = p;
    s.vertices = false;
    const double d = directed_distance(b, a, s);
    EXPECT_LE(d, 1.5 + 1e-15);
    EXPECT_GE(d + 5.0 / p, 1.5);
    last = d;
  }
  EXPECT_GT(last, 1.3);
}

TEST(Distance, SymmetryAndTriangleInequality) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_boxes(rng, 2, 60, 1.0 + trial);
    const auto b = random_boxes(rng, 2, 60, 1.0);
    const auto c = random_boxes(rng, 2, 60, 2.0);
    EXPECT_EQ(hausdorff(a, b), hausdorff(b, a));
    // Sampling underestimates each term by at most a sample spacing.
    const double slack = max_diameter(a) + max_diameter(b) + max_diameter(c);
    EXPECT_LE(hausdorff(a, c), hausdorff(a, b) + hausdorff(b, c) + slack / 4);
  }
}

TEST(Distance, IndexAgreesWithBruteForce) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 4u}) {
    const auto boxes = random_boxes(rng, n, 500, 3.0);
    const BoxIndex index(boxes);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int q = 0; q < 300; ++q) {
      Vector x(n);
      for (auto& v : x) v = u(rng);
      double best = INFINITY;
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        best = std::min(best, point_box_distance(x, boxes.lo(i), boxes.hi(i)));
      }
      EXPECT_DOUBLE_EQ(index.distance(x), best);
    }
  }
}

TEST(Distance, IndexOwnsItsBoxes) {
  const BoxIndex index(intervals({{0, 1}, {5, 6}}));
  EXPECT_DOUBLE_EQ(index.distance(Vector{3.0}), 2.0);
  EXPECT_EQ(index.distance(Vector{5.5}), 0.0);
}

TEST(Distance, WorkerCountDoesNotMatter) {
  std::mt19937_64 rng(5);
  const auto a = random_boxes(rng, 3, 300, 2.0);
  const auto b = random_boxes(rng, 3, 300, 1.5);
  EXPECT_EQ(hausdorff(a, b, {}, 1), hausdorff(a, b, {}, 4));
}

TEST(Distance, FromTreeMatchesBoxes) {
  auto t = BoxTree::create_root({0, 0}, {1, 2});
  t.subdivide_depth(0);
  t.mark_final(1);
  const auto s = BoxSet::from_tree(t, 1);
  const auto r = BoxSet::from_boxes(t.boxes(1));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(hausdorff(s, r), 0.0);
  EXPECT_EQ(s.hi(0)[0], 0.5);
}

TEST(Distance, Errors) {
  BoxSet empty(2);
  const auto a = intervals({{0, 1}});
  EXPECT_THROW(BoxIndex{empty}, ValidationError);
  EXPECT_THROW(directed_distance(a, BoxSet(1)), ValidationError);
  BoxSet two(2);
  two.add(Vector{0, 0}, Vector{1, 1});
  EXPECT_THROW(hausdorff(a, two), ValidationError);
  EXPECT_THROW(two.add(Vector{0}, Vector{1}), ValidationError);
}
