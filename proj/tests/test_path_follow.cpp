#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "boxfollow/models.hpp"
#include "boxfollow/path_follow.hpp"

using namespace boxfollow;

namespace {

SamplerSpec grid(int p) {
  SamplerSpec s;
  s.points_per_axis = p;
  return s;
}

// Hénon map with a = lambda, b = 0.3.
FunctionMap henon() {
  return FunctionMap(2, [](std::span<const double> x, double a, std::span<double> y) {
    y[0] = 1 - a * x[0] * x[0] + x[1];
    y[1] = 0.3 * x[0];
  });
}

BoxTree henon_root() { return BoxTree::create_root({-2, -0.5}, {2, 0.5}); }

const TimeTMap& relaxation() {
  static const TimeTMap map(linear_relaxation_system(1));
  return map;
}

}  // namespace

TEST(Continuation, SameParameterWithoutReintroductionReproducesParent) {
  const auto parent = compute_attractor(henon_root(), henon(), 1.4, 10, grid(2));
  FollowOptions o;
  o.reintroduce = false;
  for (int K : {0, 3, 7, 10}) {
    const auto child = continue_step(parent, 1.4, K, henon(), grid(2), o);
    EXPECT_EQ(child.tree, parent.tree) << "K=" << K;
    ASSERT_TRUE(child.provenance.has_value());
    EXPECT_EQ(child.provenance->reuse_depth, K);
    EXPECT_EQ(child.provenance->parent_lambda, 1.4);
    EXPECT_EQ(child.reports.size(), static_cast<std::size_t>(10 - K));
  }
}

TEST(Continuation, ParameterFreeMapGivesIdenticalFamilies) {
  const FunctionMap map(2, [](std::span<const double> x, double, std::span<double> y) {
    y[0] = 0.5 * x[1] + 0.1;
    y[1] = -0.8 * x[0];
  });
  const auto parent = compute_attractor(BoxTree::create_root({-1, -1}, {1, 1}), map, 0.0, 12, grid(3));
  const auto child = continue_step(parent, 5.0, 6, map, grid(3));
  EXPECT_EQ(child.tree, parent.tree);
  EXPECT_EQ(child.reintroduced(), 0u);
}

TEST(Continuation, PrefixIsShared) {
  const auto parent = compute_attractor(henon_root(), henon(), 1.4, 12, grid(2));
  const int K = 6;
  const auto child = continue_step(parent, 1.38, K, henon(), grid(2));
  for (int k = 0; k <= K; ++k) EXPECT_EQ(child.tree.snapshot(k), parent.tree.snapshot(k));
  EXPECT_EQ(child.depth(), 12);
  EXPECT_TRUE(child.tree.ancestors_closure().empty());
}

TEST(Continuation, RelaxationFollowsMovingFixedPoint) {
  const auto parent = compute_attractor(BoxTree::create_root({-1}, {1}), relaxation(), 0.0, 6, grid(3));
  const auto child = continue_step(parent, 0.1, 4, relaxation(), grid(3));
  EXPECT_TRUE(child.tree.locate(Vector{0.1}, 6).has_value());
  EXPECT_FALSE(child.tree.locate(Vector{0.0}, 6).has_value());
}

TEST(Continuation, InfeasibleStepLosesAttractorButSmallerKRecovers) {
  const auto parent = compute_attractor(BoxTree::create_root({-1}, {1}), relaxation(), 0.0, 8, grid(3));
  EXPECT_THROW(continue_step(parent, 0.3, 4, relaxation(), grid(3)), AttractorLost);
  const auto child = continue_step(parent, 0.3, 0, relaxation(), grid(3));
  EXPECT_TRUE(child.tree.locate(Vector{0.3}, 8).has_value());
}

TEST(Continuation, ParameterFreeNonlinearMap) {
  // Without reintroduction the continued run repeats the scratch run from
  // depth K+1 on, at exactly the scratch cost of those depths. With it, the
  // extra candidates can only add hits, so every snapshot contains the
  // scratch one.
  const FunctionMap map(2, [](std::span<const double> x, double, std::span<double> y) {
    y[0] = 1 - 1.4 * x[0] * x[0] + x[1];
    y[1] = 0.3 * x[0];
  });
  const auto parent = compute_attractor(henon_root(), map, 0.0, 14, grid(2));
  FollowOptions off;
  off.reintroduce = false;
  for (int K : {1, 6, 13}) {
    const auto child = continue_step(parent, 1.0, K, map, grid(2), off);
    EXPECT_EQ(child.tree, parent.tree);
    std::size_t tail = 0;
    for (std::size_t k = static_cast<std::size_t>(K); k < parent.reports.size(); ++k) {
      tail += parent.reports[k].map_evaluations;
    }
    EXPECT_EQ(child.map_evaluations(), tail);

    const auto with = continue_step(parent, 1.0, K, map, grid(2));
    for (int k = 0; k <= 14; ++k) {
      const auto& big = with.tree.snapshot(k);
      const auto& small = parent.tree.snapshot(k);
      EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end())) << k;
    }
  }
}

TEST(Continuation, FrozenSnapshotsNeverChangeUnderReintroduction) {
  const auto parent = compute_attractor(henon_root(), henon(), 1.4, 12, grid(2));
  const auto child = continue_step(parent, 1.3, 8, henon(), grid(2));
  for (int k = 0; k <= 8; ++k) EXPECT_EQ(child.tree.snapshot(k), parent.tree.snapshot(k));
  EXPECT_TRUE(child.tree.ancestors_closure().empty());
}

TEST(Continuation, RejectsBadK) {
  const auto parent = compute_attractor(BoxTree::create_root({-1}, {1}), relaxation(), 0.0, 4, grid(2));
  EXPECT_THROW(continue_step(parent, 0.0, 5, relaxation(), grid(2)), ValidationError);
  EXPECT_THROW(continue_step(parent, 0.0, -1, relaxation(), grid(2)), ValidationError);
}

TEST(Schedule, FixedPolicyRunsEveryStep) {
  Schedule s;
  s.lambda0 = 1.4;
  s.step = -0.01;
  s.count = 3;
  s.m = 10;
  s.policy = KPolicy::fixed(6);
  int calls = 0;
  const auto run = run_schedule(s, henon(), grid(2), {-2, -0.5}, {2, 0.5}, {},
                                [&](const CoveringFamily&, const StepDiagnostics& d) {
                                  EXPECT_EQ(d.index, calls);
                                  ++calls;
                                });
  EXPECT_EQ(calls, 4);
  ASSERT_EQ(run.families.size(), 4u);
  EXPECT_FALSE(run.steps[0].K.has_value());
  for (int j = 1; j <= 3; ++j) {
    EXPECT_NEAR(run.families[static_cast<std::size_t>(j)].lambda, 1.4 - 0.01 * j, 1e-15);
    EXPECT_EQ(run.steps[static_cast<std::size_t>(j)].K, 6);
    EXPECT_EQ(run.steps[static_cast<std::size_t>(j)].box_counts,
              run.families[static_cast<std::size_t>(j)].box_counts());
  }
}

TEST(Schedule, AdaptivePolicyRetriesWithSmallerK) {
  Schedule s;
  s.lambda0 = 0.0;
  s.step = 0.3;
  s.count = 1;
  s.m = 8;
  s.policy = KPolicy::adaptive(4, 1e-3);
  const auto run = run_schedule(s, relaxation(), grid(3), {-1}, {1});
  ASSERT_EQ(run.steps.size(), 2u);
  EXPECT_EQ(run.steps[1].K, 0);
  EXPECT_EQ(run.steps[1].retries, 1);
  EXPECT_TRUE(run.families[1].tree.locate(Vector{0.3}, 8).has_value());
}

TEST(Schedule, AdaptivePolicyKeepsLargeKForSmallSteps) {
  Schedule s;
  s.lambda0 = 0.0;
  s.step = 0.001;
  s.count = 2;
  s.m = 8;
  s.policy = KPolicy::adaptive(4, 1e-3);
  const auto run = run_schedule(s, relaxation(), grid(3), {-1}, {1});
  EXPECT_EQ(run.steps[1].K, 4);
  EXPECT_EQ(run.steps[1].retries, 0);
}

TEST(Schedule, ResumeMatchesUninterruptedRun) {
  Schedule s;
  s.lambda0 = 1.4;
  s.step = -0.02;
  s.count = 4;
  s.m = 10;
  s.policy = KPolicy::fixed(5);
  const auto full = run_schedule(s, henon(), grid(2), {-2, -0.5}, {2, 0.5});
  const auto resumed = run_schedule(s, henon(), grid(2), {-2, -0.5}, {2, 0.5}, {}, {},
                                    std::make_pair(2, full.families[2]));
  ASSERT_EQ(resumed.families.size(), 2u);
  EXPECT_EQ(resumed.families[0].tree, full.families[3].tree);
  EXPECT_EQ(resumed.families[1].tree, full.families[4].tree);
  EXPECT_EQ(resumed.steps[1].index, 4);
}

TEST(Schedule, Validation) {
  Schedule s;
  s.step = 0.1;
  s.m = 4;
  s.policy = KPolicy::fixed(5);
  EXPECT_THROW(s.validate(), ValidationError);
  s.policy = KPolicy::fixed(2);
  s.count = 0;
  EXPECT_THROW(s.validate(), ValidationError);
  s.count = 1;
  s.step = 0.0;
  EXPECT_THROW(s.validate(), ValidationError);
  s.step = 0.1;
  EXPECT_NO_THROW(s.validate());
}

TEST(Feasibility, ContractionHasNoEscape) {
  const FunctionMap half(1, [](std::span<const double> x, double, std::span<double> y) {
    y[0] = 0.5 * x[0];
  });
  const auto fam = compute_attractor(BoxTree::create_root({-1}, {1}), half, 0.0, 8, grid(3));
  const auto r = feasibility_diagnostics(fam, 4, half, 0.0, grid(3));
  EXPECT_EQ(r.escaped, 0u);
  EXPECT_EQ(r.escape_fraction, 0.0);
  EXPECT_FALSE(r.flagged);
  EXPECT_EQ(r.source_depth, 4);
}

TEST(Feasibility, ShiftIsFlagged) {
  const FunctionMap shift(1, [](std::span<const double> x, double l, std::span<double> y) {
    y[0] = 0.5 * x[0] + l;
  });
  const auto fam = compute_attractor(BoxTree::create_root({-1}, {1}), shift, 0.0, 8, grid(3));
  const auto r = feasibility_diagnostics(fam, 6, shift, 0.5, grid(3), 1e-3, 0, 8);
  EXPECT_EQ(r.source_depth, 8);
  EXPECT_EQ(r.escape_fraction, 1.0);
  EXPECT_TRUE(r.flagged);
  EXPECT_NEAR(r.max_escape_distance, 0.5 - 2.0 / 64, 0.02);
  EXPECT_THROW(feasibility_diagnostics(fam, 9, shift, 0.5, grid(3)), ValidationError);
}
