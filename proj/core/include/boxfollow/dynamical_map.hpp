#pragma once

#include <functional>
#include <memory>
#include <span>

#include "boxfollow/system.hpp"
#include "boxfollow/types.hpp"

namespace boxfollow {

// Evaluates y = f_lambda(x) for one fixed lambda. Not thread safe; each
// worker binds its own evaluator.
class MapEvaluator {
 public:
  virtual ~MapEvaluator() = default;
  // Returns false when the image could not be computed (integration failure).
  virtual bool apply(std::span<const double> x, std::span<double> y) = 0;
};

// A parameter-dependent map f: R^n x Lambda -> R^n driving subdivision.
class DynamicalMap {
 public:
  virtual ~DynamicalMap() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::unique_ptr<MapEvaluator> bind(double lambda) const = 0;
};

// Time-T map of a ParametricSystem. Holds a copy of the system.
class TimeTMap final : public DynamicalMap {
 public:
  explicit TimeTMap(ParametricSystem system);
  std::size_t dimension() const override { return system_.dimension; }
  std::unique_ptr<MapEvaluator> bind(double lambda) const override;
  const ParametricSystem& system() const { return system_; }

 private:
  ParametricSystem system_;
};

// Explicit map given as a callable, e.g. x -> x/2.
class FunctionMap final : public DynamicalMap {
 public:
  using Fn = std::function<void(std::span<const double> x, double lambda, std::span<double> y)>;
  FunctionMap(std::size_t dimension, Fn fn);
  std::size_t dimension() const override { return dimension_; }
  std::unique_ptr<MapEvaluator> bind(double lambda) const override;

 private:
  std::size_t dimension_;
  Fn fn_;
};

// Runs body(worker, index) for index in [0, count) on `workers` threads
// (0 = hardware concurrency). Index assignment to workers is dynamic, so
// callers must reduce per-worker results in an order-independent way.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(unsigned worker, std::size_t index)>& body);

unsigned resolve_workers(unsigned workers);

}  // namespace boxfollow
