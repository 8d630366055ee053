#include "boxfollow/lifetime.hpp"

#include <cmath>

#include "boxfollow/dynamical_map.hpp"

namespace boxfollow {

double LifetimeField::saturated_fraction(double ratio) const {
  if (lifetime.empty()) return 0.0;
  std::size_t c = 0;
  for (double v : lifetime) {
    if (v >= ratio * t_max) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(lifetime.size());
}

namespace {

bool inside_target(std::span<const double> x, const LifetimeTarget& target) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - target.center[i];
    s += d * d;
  }
  return s <= target.radius * target.radius;
}

void check_inputs(const ParametricSystem& system, const LifetimeTarget& target, double t_max,
                  double sample_dt) {
  if (target.center.size() != system.dimension) {
    throw ValidationError("lifetime: target center has dimension " +
                          std::to_string(target.center.size()) + ", system has " +
                          std::to_string(system.dimension));
  }
  if (!(target.radius > 0.0)) throw ValidationError("lifetime: target radius must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("lifetime: t_max must be positive");
  if (!(sample_dt > 0.0)) throw ValidationError("lifetime: sample_dt must be positive");
}

double lifetime_with(DormandPrince45& solver, const VectorField& field, std::span<const double> x0,
                     const LifetimeTarget& target, double t_max, double sample_dt, Vector& state,
                     bool* failed) {
  if (failed) *failed = false;
  if (inside_target(x0, target)) return 0.0;
  state.assign(x0.begin(), x0.end());
  try {
    auto hit = solver.integrate_sampled(field, state, t_max, sample_dt,
                                        [&](double, std::span<const double> x) {
                                          return inside_target(x, target);
                                        });
    return hit ? std::min(*hit, t_max) : t_max;
  } catch (const IntegrationError&) {
    if (failed) *failed = true;
    return t_max;
  }
}

}  // namespace

double point_lifetime(const ParametricSystem& system, std::span<const double> x0, double lambda,
                      const LifetimeTarget& target, double t_max, double sample_dt, bool* failed) {
  check_inputs(system, target, t_max, sample_dt);
  if (x0.size() != system.dimension) throw ValidationError("lifetime: point dimension mismatch");
  DormandPrince45 solver(system.dimension, system.tolerances);
  const auto field = system.field(lambda);
  Vector state;
  return lifetime_with(solver, field, x0, target, t_max, sample_dt, state, failed);
}

LifetimeField lifetime_field(const BoxTree& tree, int depth, const ParametricSystem& system,
                             double lambda, const LifetimeTarget& target,
                             const LifetimeOptions& options) {
  check_inputs(system, target, options.t_max, options.sample_dt);
  const std::size_t n = tree.dimension();
  if (n != system.dimension) throw ValidationError("lifetime: tree and system dimensions differ");
  for (std::size_t i = 0; i < n; ++i) {
    if (target.center[i] < tree.lower()[i] || target.center[i] > tree.upper()[i]) {
      throw ValidationError("lifetime: target center lies outside Q");
    }
  }
  if (!tree.has_depth(depth)) throw ValidationError("lifetime: no snapshot at depth " + std::to_string(depth));
  options.spec.validate(n);

  LifetimeField out;
  out.depth = depth;
  out.lambda = lambda;
  out.target = target;
  out.t_max = options.t_max;
  out.sample_dt = options.sample_dt;
  out.paths = tree.snapshot(depth);
  out.lifetime.assign(out.paths.size(), 0.0);
  out.failures.assign(out.paths.size(), 0);

  struct State {
    std::unique_ptr<DormandPrince45> solver;
    VectorField field;
    PointCloud points;
    Vector lo, hi, x;
  };
  const unsigned w = resolve_workers(options.workers);
  std::vector<State> states(w);
  parallel_for(out.paths.size(), w, [&](unsigned wi, std::size_t i) {
    State& st = states[wi];
    if (!st.solver) {
      st.solver = std::make_unique<DormandPrince45>(n, system.tolerances);
      st.field = system.field(lambda);
      st.lo.resize(n);
      st.hi.resize(n);
    }
    tree.box_bounds(depth, out.paths[i], st.lo, st.hi);
    sample_test_points(st.lo, st.hi, depth, out.paths[i], options.spec, st.points);
    double sum = 0.0;
    for (std::size_t p = 0; p < st.points.size(); ++p) {
      bool failed = false;
      sum += lifetime_with(*st.solver, st.field, st.points[p], target, options.t_max,
                           options.sample_dt, st.x, &failed);
      if (failed) ++out.failures[i];
    }
    out.lifetime[i] = sum / static_cast<double>(st.points.size());
  });
  for (auto f : out.failures) out.failed_points += f;
  return out;
}

}  // namespace boxfollow
