#include <gtest/gtest.h>

#include <cmath>

#include "boxfollow/equilibria.hpp"
#include "boxfollow/models.hpp"

using namespace boxfollow;

namespace {

const Vector kWaleffeLower{-0.9, -0.8, -1.0, -0.8};
const Vector kWaleffeUpper{1.1, 1.2, 1.0, 1.2};

ParametricSystem one_parameter(std::size_t n, RhsFn rhs) {
  ParametricSystem s;
  s.name = "normal_form";
  s.dimension = n;
  s.param_names = {"lambda"};
  s.params = {0.0};
  s.rhs = std::move(rhs);
  return s;
}

// x' = lambda + x^2
ParametricSystem saddle_node() {
  return one_parameter(1, [](std::span<const double> x, std::span<const double> p,
                             std::span<double> dx) { dx[0] = p[0] + x[0] * x[0]; });
}

// Supercritical Hopf normal form; eigenvalues lambda +- i at the origin.
ParametricSystem hopf_normal_form() {
  return one_parameter(2, [](std::span<const double> x, std::span<const double> p,
                             std::span<double> dx) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    dx[0] = p[0] * x[0] - x[1] - x[0] * r2;
    dx[1] = x[0] + p[0] * x[1] - x[1] * r2;
  });
}

FoldOptions waleffe_region() {
  FoldOptions o;
  o.lower = kWaleffeLower;
  o.upper = kWaleffeUpper;
  o.per_axis = 6;
  return o;
}

}  // namespace

TEST(Equilibria, LorenzHasThree) {
  const auto s = lorenz_system();
  const double beta = 8.0 / 3.0;
  const auto r = find_equilibria(s, beta, {-30, -30, -13}, {30, 30, 67}, 5);
  ASSERT_EQ(r.equilibria.size(), 3u);
  const double c = std::sqrt(beta * 27.0);
  EXPECT_NEAR(r.equilibria[0].location[0], -c, 1e-8);
  EXPECT_NEAR(r.equilibria[1].location[0], 0.0, 1e-8);
  EXPECT_NEAR(r.equilibria[2].location[0], c, 1e-8);
  EXPECT_NEAR(r.equilibria[2].location[2], 27.0, 1e-8);
  for (const auto& e : r.equilibria) {
    EXPECT_EQ(e.stability, Stability::kSaddle);
    EXPECT_LT(e.residual, 1e-10);
  }
  EXPECT_EQ(r.seeds, 125u);
}

TEST(Equilibria, WaleffeLaminarOnlyBelowFold) {
  const auto r = find_equilibria(waleffe_system(), 98.0, kWaleffeLower, kWaleffeUpper, 6);
  ASSERT_EQ(r.equilibria.size(), 1u);
  const auto& e = r.equilibria[0];
  EXPECT_NEAR(e.location[3], 1.0, 1e-8);
  EXPECT_EQ(e.stability, Stability::kStable);
  // Laminar eigenvalues are -10/R (twice), -15/R and -10/R.
  EXPECT_NEAR(e.eigenvalues.front().real(), -10.0 / 98.0, 1e-6);
  EXPECT_NEAR(e.eigenvalues.back().real(), -15.0 / 98.0, 1e-6);
}

TEST(Equilibria, WaleffeFiveAboveFold) {
  const auto s = waleffe_system();
  const auto r = find_equilibria(s, 99.0, kWaleffeLower, kWaleffeUpper, 6);
  ASSERT_EQ(r.equilibria.size(), 5u);
  // Non-laminar states come in pairs under w -> -w.
  int mirrored = 0;
  for (const auto& a : r.equilibria) {
    for (const auto& b : r.equilibria) {
      if (&a != &b && std::abs(a.location[2] + b.location[2]) < 1e-8 && std::abs(a.location[2]) > 1e-3 &&
          std::abs(a.location[0] - b.location[0]) < 1e-8) {
        ++mirrored;
      }
    }
  }
  EXPECT_EQ(mirrored, 4);
  for (const auto& e : r.equilibria) {
    EXPECT_LT(e.residual, 1e-10);
    // Fixed points of the flow are fixed points of the time-T map.
    const Vector y = integrate(s, e.location, 99.0, s.T);
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(y[i] - e.location[i]));
    EXPECT_LT(d, 1e-6);
  }
}

TEST(Equilibria, WaleffeFold) {
  const double fold = detect_fold(waleffe_system(), 98.0, 99.0, 1e-4, waleffe_region());
  EXPECT_NEAR(fold, 98.6325, 0.01);
}

TEST(Equilibria, FoldNeedsABracket) {
  EXPECT_THROW(detect_fold(waleffe_system(), 200.0, 201.0, 1e-3, waleffe_region()), ValidationError);
}

TEST(Equilibria, SaddleNodeNormalForm) {
  FoldOptions o;
  o.lower = {-2.0};
  o.upper = {2.0};
  o.per_axis = 9;
  const double fold = detect_fold(saddle_node(), -1.0, 0.5, 1e-7, o);
  EXPECT_NEAR(fold, 0.0, 1e-3);

  const auto r = find_equilibria(saddle_node(), -0.25, {-2.0}, {2.0}, 9);
  ASSERT_EQ(r.equilibria.size(), 2u);
  EXPECT_NEAR(r.equilibria[0].location[0], -0.5, 1e-10);
  EXPECT_EQ(r.equilibria[0].stability, Stability::kStable);
  EXPECT_EQ(r.equilibria[1].stability, Stability::kUnstable);
  EXPECT_TRUE(find_equilibria(saddle_node(), 0.25, {-2.0}, {2.0}, 9).equilibria.empty());
}

TEST(Equilibria, HopfNormalForm) {
  const auto h = detect_hopf(hopf_normal_form(), {0.01, 0.0}, -0.5, 0.3, 1e-8);
  EXPECT_NEAR(h.lambda, 0.0, 1e-6);
  EXPECT_NEAR(std::abs(h.eigenvalue.imag()), 1.0, 1e-6);
  EXPECT_NEAR(h.location[0], 0.0, 1e-8);
}

TEST(Equilibria, HopfNeedsComplexPair) {
  EXPECT_THROW(detect_hopf(linear_relaxation_system(2), {0, 0}, -1.0, 1.0, 1e-6), ValidationError);
  // The complex pair never crosses the axis on [0.1, 0.5].
  EXPECT_THROW(detect_hopf(hopf_normal_form(), {0, 0}, 0.1, 0.5, 1e-6), ValidationError);
}

TEST(Equilibria, WaleffeHopf) {
  const auto h = detect_hopf(waleffe_system(), {0.4648, 0.0817, 0.0906, 0.6224}, 99.5, 100.5, 1e-4);
  EXPECT_NEAR(h.lambda, 100.0232, 0.01);
  EXPECT_GT(std::abs(h.eigenvalue.imag()), 1e-3);
}

TEST(Equilibria, NewtonFromNearbySeed) {
  const auto s = lorenz_system();
  const auto x = newton_equilibrium(s, {8, 8, 26}, 8.0 / 3.0);
  ASSERT_TRUE(x.has_value());
  EXPECT_NEAR((*x)[2], 27.0, 1e-9);
  EXPECT_FALSE(newton_equilibrium(one_parameter(1, [](std::span<const double>, std::span<const double>,
                                                      std::span<double> dx) { dx[0] = 1.0; }),
                                  {0.0}, 0.0)
                   .has_value());
}

TEST(Equilibria, StabilityNames) {
  EXPECT_EQ(to_string(Stability::kStable), "stable");
  EXPECT_EQ(to_string(Stability::kSaddle), "saddle");
  EXPECT_EQ(to_string(Stability::kUnstable), "unstable");
}
