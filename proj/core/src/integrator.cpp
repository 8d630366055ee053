#include "boxfollow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace boxfollow {

namespace {

// Butcher tableau of the Dormand-Prince 5(4) pair (autonomous fields only,
// so the c_i nodes are not needed).
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants.
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;   // largest shrink: h_new >= 0.2 h
constexpr double kFacMax = 10.0;  // largest growth

}  // namespace

DormandPrince45::DormandPrince45(std::size_t dimension, Tolerances tol, std::size_t max_steps)
    : n_(dimension), tol_(tol), max_steps_(max_steps) {
  if (dimension == 0) throw ValidationError("integrator dimension must be positive");
  if (!(tol.abs_tol > 0.0) || !(tol.rel_tol > 0.0)) {
    throw ValidationError("integrator tolerances must be positive");
  }
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &ynew_, &yerr_, &r1_, &r2_,
                  &r3_, &r4_, &r5_, &ysample_}) {
    v->assign(n_, 0.0);
  }
}

void DormandPrince45::eval(const VectorField& f, std::span<const double> x,
                           std::vector<double>& out) {
  f(x, out);
  ++rhs_evaluations_;
}

double DormandPrince45::initial_step(const VectorField& f, std::span<const double> x,
                                     double duration) {
  // Hairer, Norsett & Wanner, "Solving ODEs I", II.4.
  double d0 = 0.0, d1n = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sk = tol_.abs_tol + tol_.rel_tol * std::abs(x[i]);
    d0 += (x[i] / sk) * (x[i] / sk);
    d1n += (k1_[i] / sk) * (k1_[i] / sk);
  }
  d0 = std::sqrt(d0 / n_);
  d1n = std::sqrt(d1n / n_);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, duration);
  for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = x[i] + h0 * k1_[i];
  eval(f, ytmp_, k2_);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sk = tol_.abs_tol + tol_.rel_tol * std::abs(x[i]);
    const double q = (k2_[i] - k1_[i]) / sk;
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / n_) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  double h = std::min(100.0 * h0, h1);
  if (!std::isfinite(h) || h <= 0.0) h = 1e-6;
  return std::min(h, duration);
}

void DormandPrince45::integrate(const VectorField& f, std::span<double> x, double duration) {
  run(f, x, duration, 0.0, nullptr);
}

std::optional<double> DormandPrince45::integrate_sampled(const VectorField& f,
                                                         std::span<double> x, double duration,
                                                         double sample_dt,
                                                         const SampleObserver& observer) {
  if (!(sample_dt > 0.0)) throw ValidationError("sample interval must be positive");
  return run(f, x, duration, sample_dt, &observer);
}

std::optional<double> DormandPrince45::run(const VectorField& f, std::span<double> x,
                                           double duration, double sample_dt,
                                           const SampleObserver* observer) {
  if (x.size() != n_) throw ValidationError("integrator state has wrong dimension");
  if (!(duration >= 0.0)) throw ValidationError("integration time must be non-negative");
  for (double v : x) {
    if (!std::isfinite(v)) throw IntegrationError("non-finite initial state", 0.0);
  }
  error_estimate_ = 0.0;

  double t = 0.0;
  std::size_t next_sample = 0;
  if (observer) {
    if ((*observer)(0.0, x)) return 0.0;
    next_sample = 1;
  }
  if (duration == 0.0) return std::nullopt;

  eval(f, x, k1_);
  for (double v : k1_) {
    if (!std::isfinite(v)) throw IntegrationError("non-finite vector field", 0.0);
  }
  double h = initial_step(f, x, duration);
  double facold = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;
  const double eps = std::numeric_limits<double>::epsilon();

  while (t < duration) {
    if (++steps > max_steps_) throw IntegrationError("step limit exceeded", t);
    if (!std::isfinite(h) || h <= 16.0 * eps * std::abs(t) || h < 1e-300) {
      throw IntegrationError("step size underflow", t);
    }
    bool final_step = false;
    if (t + h >= duration) {
      h = duration - t;
      final_step = true;
    }

    for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = x[i] + h * a21 * k1_[i];
    eval(f, ytmp_, k2_);
    for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = x[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    eval(f, ytmp_, k3_);
    for (std::size_t i = 0; i < n_; ++i)
      ytmp_[i] = x[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    eval(f, ytmp_, k4_);
    for (std::size_t i = 0; i < n_; ++i)
      ytmp_[i] = x[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    eval(f, ytmp_, k5_);
    for (std::size_t i = 0; i < n_; ++i)
      ytmp_[i] =
          x[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    eval(f, ytmp_, k6_);
    for (std::size_t i = 0; i < n_; ++i)
      ynew_[i] =
          x[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    eval(f, ynew_, k7_);

    double err = 0.0;
    double err_max = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      yerr_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                      e7 * k7_[i]);
      const double sk = tol_.abs_tol + tol_.rel_tol * std::max(std::abs(x[i]), std::abs(ynew_[i]));
      const double q = yerr_[i] / sk;
      err += q * q;
      err_max = std::max(err_max, std::abs(yerr_[i]));
    }
    err = std::sqrt(err / n_);

    if (!std::isfinite(err)) {
      h *= kFacMin;
      last_rejected = true;
      ++rejected_;
      continue;
    }

    const double fac11 = std::pow(err, kExpo);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
      double hnew = h / fac;
      facold = std::max(err, 1e-4);
      if (last_rejected) hnew = std::min(hnew, h);
      ++accepted_;
      error_estimate_ += err_max;

      const double t_new = final_step ? duration : t + h;
      if (observer) {
        // Dense output on [t, t_new] before the state is overwritten.
        for (std::size_t i = 0; i < n_; ++i) {
          r1_[i] = x[i];
          r2_[i] = ynew_[i] - x[i];
          r3_[i] = h * k1_[i] - r2_[i];
          r4_[i] = r2_[i] - h * k7_[i] - r3_[i];
          r5_[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] +
                        d7 * k7_[i]);
        }
        while (true) {
          const double ts = static_cast<double>(next_sample) * sample_dt;
          if (ts > t_new || ts > duration) break;
          const double th = h > 0.0 ? (ts - t) / h : 1.0;
          const double th1 = 1.0 - th;
          for (std::size_t i = 0; i < n_; ++i) {
            ysample_[i] = r1_[i] + th * (r2_[i] + th1 * (r3_[i] + th * (r4_[i] + th1 * r5_[i])));
          }
          ++next_sample;
          if ((*observer)(ts, ysample_)) {
            std::copy(ysample_.begin(), ysample_.end(), x.begin());
            return ts;
          }
        }
      }

      std::copy(ynew_.begin(), ynew_.end(), x.begin());
      std::swap(k1_, k7_);  // FSAL
      t = t_new;
      h = hnew;
      last_rejected = false;
      if (final_step) break;
    } else {
      h /= std::min(1.0 / kFacMin, fac11 / kSafety);
      last_rejected = true;
      ++rejected_;
    }
  }
  return std::nullopt;
}

}  // namespace boxfollow
