#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "boxfollow/types.hpp"

namespace boxfollow {

struct Tolerances {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
};

using VectorField = std::function<void(std::span<const double> x, std::span<double> dxdt)>;

// Called at t = 0, dt, 2dt, ...; return true to stop the integration.
using SampleObserver = std::function<bool(double t, std::span<const double> x)>;

// Dormand-Prince 5(4) pair with local extrapolation, PI step-size control
// and the 4th-order continuous extension. One instance owns its stage
// buffers; use one per thread.
class DormandPrince45 {
 public:
  explicit DormandPrince45(std::size_t dimension, Tolerances tol = {},
                           std::size_t max_steps = 5'000'000);

  // Advances x in place over [0, duration]. Throws IntegrationError.
  void integrate(const VectorField& f, std::span<double> x, double duration);

  // Like integrate(), but reports dense-output states every sample_dt.
  // Returns the sample time at which the observer asked to stop.
  std::optional<double> integrate_sampled(const VectorField& f, std::span<double> x,
                                          double duration, double sample_dt,
                                          const SampleObserver& observer);

  std::size_t rhs_evaluations() const { return rhs_evaluations_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }
  // Sum over accepted steps of the max-norm local error estimate of the
  // last call; a crude a-posteriori bound for the global error.
  double error_estimate() const { return error_estimate_; }
  const Tolerances& tolerances() const { return tol_; }

 private:
  std::optional<double> run(const VectorField& f, std::span<double> x, double duration,
                            double sample_dt, const SampleObserver* observer);
  double initial_step(const VectorField& f, std::span<const double> x, double duration);
  void eval(const VectorField& f, std::span<const double> x, std::vector<double>& out);

  std::size_t n_;
  Tolerances tol_;
  std::size_t max_steps_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_, yerr_;
  std::vector<double> r1_, r2_, r3_, r4_, r5_, ysample_;
  std::size_t rhs_evaluations_ = 0;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  double error_estimate_ = 0.0;
};

}  // namespace boxfollow
