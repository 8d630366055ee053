#include <benchmark/benchmark.h>

#include <random>

#include "boxfollow/distance.hpp"
#include "boxfollow/models.hpp"
#include "boxfollow/subdivision.hpp"

using namespace boxfollow;

namespace {

const BoxTree& lorenz_covering() {
  static const BoxTree tree = [] {
    auto s = lorenz_system();
    s.T = 0.05;
    const TimeTMap map(s);
    return compute_attractor(BoxTree::create_root({-30, -30, -13}, {30, 30, 67}), map,
                             s.default_lambda(), 15, SamplerSpec{})
        .tree;
  }();
  return tree;
}

void BM_TimeTMapLorenz(benchmark::State& state) {
  auto s = lorenz_system();
  s.T = 0.05;
  const TimeTMap map(s);
  auto eval = map.bind(s.default_lambda());
  Vector x{1.0, 2.0, 20.0}, y(3);
  for (auto _ : state) {
    eval->apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_TimeTMapLorenz);

void BM_TimeTMapWaleffe(benchmark::State& state) {
  const TimeTMap map(waleffe_system({}, 101.0));
  auto eval = map.bind(101.0);
  Vector x{0.3, 0.05, 0.2, 0.6}, y(4);
  for (auto _ : state) {
    eval->apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_TimeTMapWaleffe);

void BM_Locate(benchmark::State& state) {
  const BoxTree& tree = lorenz_covering();
  const int depth = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20, 20), z(0, 50);
  std::vector<Vector> pts(4096);
  for (auto& p : pts) p = {u(rng), u(rng), z(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.locate(pts[i++ & 4095], depth));
  }
}
BENCHMARK(BM_Locate)->Arg(6)->Arg(15);

void BM_SelectionHenon(benchmark::State& state) {
  const FunctionMap henon(2, [](std::span<const double> x, double a, std::span<double> y) {
    y[0] = 1 - a * x[0] * x[0] + x[1];
    y[1] = 0.3 * x[0];
  });
  SelectOptions o;
  o.workers = 1;
  for (auto _ : state) {
    auto fam = compute_attractor(BoxTree::create_root({-2, -0.5}, {2, 0.5}), henon, 1.4,
                                 static_cast<int>(state.range(0)), SamplerSpec{}, o);
    benchmark::DoNotOptimize(fam.tree.size(fam.depth()));
    state.counters["evaluations"] = static_cast<double>(fam.map_evaluations());
  }
}
BENCHMARK(BM_SelectionHenon)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_BoxIndexQuery(benchmark::State& state) {
  const BoxSet set = BoxSet::from_tree(lorenz_covering(), 15);
  const BoxIndex index(set);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-30, 30);
  Vector x(3);
  for (auto _ : state) {
    x = {u(rng), u(rng), u(rng) + 27};
    benchmark::DoNotOptimize(index.distance(x));
  }
}
BENCHMARK(BM_BoxIndexQuery);

}  // namespace

BENCHMARK_MAIN();
