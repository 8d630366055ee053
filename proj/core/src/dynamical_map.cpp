#include "boxfollow/dynamical_map.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace boxfollow {

namespace {

class TimeTEvaluator final : public MapEvaluator {
 public:
  TimeTEvaluator(const ParametricSystem& s, double lambda)
      : system_(s), field_(s.field(lambda)), stepper_(s.dimension, s.tolerances) {}

  bool apply(std::span<const double> x, std::span<double> y) override {
    std::copy(x.begin(), x.end(), y.begin());
    try {
      stepper_.integrate(field_, y, system_.T);
    } catch (const IntegrationError&) {
      return false;
    }
    return true;
  }

 private:
  const ParametricSystem& system_;
  VectorField field_;
  DormandPrince45 stepper_;
};

class FunctionEvaluator final : public MapEvaluator {
 public:
  FunctionEvaluator(const FunctionMap::Fn& fn, double lambda) : fn_(fn), lambda_(lambda) {}
  bool apply(std::span<const double> x, std::span<double> y) override {
    fn_(x, lambda_, y);
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  const FunctionMap::Fn& fn_;
  double lambda_;
};

}  // namespace

TimeTMap::TimeTMap(ParametricSystem system) : system_(std::move(system)) { system_.validate(); }

std::unique_ptr<MapEvaluator> TimeTMap::bind(double lambda) const {
  return std::make_unique<TimeTEvaluator>(system_, lambda);
}

FunctionMap::FunctionMap(std::size_t dimension, Fn fn) : dimension_(dimension), fn_(std::move(fn)) {}

std::unique_ptr<MapEvaluator> FunctionMap::bind(double lambda) const {
  return std::make_unique<FunctionEvaluator>(fn_, lambda);
}

unsigned resolve_workers(unsigned workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(unsigned, std::size_t)>& body) {
  workers = resolve_workers(workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(0, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](unsigned w) {
    try {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(w, i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::jthread> threads;
  threads.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(run, w);
  run(0);
  threads.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace boxfollow
