#include <gtest/gtest.h>

#include <set>

#include "boxfollow/sampler.hpp"

using namespace boxfollow;

namespace {

std::vector<Vector> rows(const PointCloud& c) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.emplace_back(c[i].begin(), c[i].end());
  return out;
}

}  // namespace

TEST(Sampler, GridSinglePointIsCenter) {
  SamplerSpec s;
  s.points_per_axis = 1;
  PointCloud out;
  sample_test_points(Vector{0, 0}, Vector{2, 4}, 0, 0, s, out);
  EXPECT_EQ(rows(out), (std::vector<Vector>{{1, 2}}));
}

TEST(Sampler, GridTwoPerAxisQuarterPoints) {
  SamplerSpec s;
  s.points_per_axis = 2;
  PointCloud out;
  sample_test_points(Vector{0, 0}, Vector{1, 1}, 0, 0, s, out);
  const auto r = rows(out);
  EXPECT_EQ(std::set<Vector>(r.begin(), r.end()),
            (std::set<Vector>{{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.25}, {0.75, 0.75}}));
}

TEST(Sampler, PointCountsMatchSpec) {
  PointCloud out;
  SamplerSpec grid;
  grid.points_per_axis = 3;
  sample_test_points(Vector(4, 0.0), Vector(4, 1.0), 2, 1, grid, out);
  EXPECT_EQ(out.size(), 81u);
  EXPECT_EQ(grid.points_per_box(4), 81u);

  SamplerSpec cve;
  cve.strategy = SamplerStrategy::kCenterVerticesEdges;
  for (std::size_t n : {1u, 2u, 3u, 4u}) {
    sample_test_points(Vector(n, 0.0), Vector(n, 1.0), 0, 0, cve, out);
    EXPECT_EQ(out.size(), 1 + (std::size_t{1} << n) + 2 * n);
  }

  SamplerSpec rnd;
  rnd.strategy = SamplerStrategy::kRandom;
  rnd.total_points = 37;
  sample_test_points(Vector(9, 0.0), Vector(9, 1.0), 5, 17, rnd, out);
  EXPECT_EQ(out.size(), 37u);
}

TEST(Sampler, PointsStayInsideHalfOpenBox) {
  const Vector lo{-3.0, 1e6, -1e-9};
  const Vector hi{-2.5, 1e6 + 1.0, 1e-9};
  std::vector<SamplerSpec> specs(3);
  specs[0].points_per_axis = 5;
  specs[1].strategy = SamplerStrategy::kRandom;
  specs[1].total_points = 500;
  specs[2].strategy = SamplerStrategy::kCenterVerticesEdges;
  for (const auto& s : specs) {
    PointCloud out;
    sample_test_points(lo, hi, 7, 99, s, out);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t a = 0; a < 3; ++a) {
        EXPECT_GE(out[i][a], lo[a]) << to_string(s.strategy);
        EXPECT_LT(out[i][a], hi[a]) << to_string(s.strategy);
      }
    }
  }
}

TEST(Sampler, CenterVerticesEdgesStrictlyInside) {
  SamplerSpec s;
  s.strategy = SamplerStrategy::kCenterVerticesEdges;
  PointCloud out;
  sample_test_points(Vector{0, 0, 0}, Vector{1, 2, 4}, 0, 0, s, out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_GT(out[i][0], 0.0);
    EXPECT_LT(out[i][0], 1.0);
    EXPECT_LT(out[i][2], 4.0);
  }
  EXPECT_EQ(rows(out).front(), (Vector{0.5, 1.0, 2.0}));
}

TEST(Sampler, RandomIsKeyedByIdentityNotCallOrder) {
  SamplerSpec s;
  s.strategy = SamplerStrategy::kRandom;
  s.total_points = 10;
  s.seed = 42;
  PointCloud a, b, c, d;
  sample_test_points(Vector{0, 0}, Vector{1, 1}, 3, 5, s, a);
  sample_test_points(Vector{0, 0}, Vector{1, 1}, 3, 6, s, c);
  sample_test_points(Vector{0, 0}, Vector{1, 1}, 3, 5, s, b);
  EXPECT_EQ(rows(a), rows(b));
  EXPECT_NE(rows(a), rows(c));
  s.seed = 43;
  sample_test_points(Vector{0, 0}, Vector{1, 1}, 3, 5, s, d);
  EXPECT_NE(rows(a), rows(d));
}

TEST(Sampler, UnitUniformRange) {
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const double u = unit_uniform(7, i);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Sampler, ZeroPointsRejected) {
  SamplerSpec s;
  s.points_per_axis = 0;
  PointCloud out;
  EXPECT_THROW(sample_test_points(Vector{0}, Vector{1}, 0, 0, s, out), ValidationError);
  EXPECT_THROW(s.validate(1), ValidationError);
  s.strategy = SamplerStrategy::kRandom;
  s.total_points = 0;
  EXPECT_THROW(s.validate(1), ValidationError);
}

TEST(Sampler, StrategyNames) {
  for (auto st : {SamplerStrategy::kGrid, SamplerStrategy::kRandom,
                  SamplerStrategy::kCenterVerticesEdges}) {
    EXPECT_EQ(parse_sampler_strategy(to_string(st)), st);
  }
  EXPECT_THROW(parse_sampler_strategy("sobol"), ValidationError);
  EXPECT_EQ(SamplerSpec::default_for(3).strategy, SamplerStrategy::kGrid);
  EXPECT_EQ(SamplerSpec::default_for(9).strategy, SamplerStrategy::kRandom);
}

TEST(Sampler, BoxOverloadUsesBoxExtent) {
  Box b{{1.0, 1.0}, {0.5, 0.25}, 2, 3};
  SamplerSpec s;
  s.points_per_axis = 1;
  const auto out = sample_test_points(b, s);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0][0], 1.0);
  EXPECT_EQ(out[0][1], 1.0);
}
