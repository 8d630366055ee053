#include "boxfollow/equilibria.hpp"

#include <algorithm>
#include <cmath>

namespace boxfollow {

std::string to_string(Stability s) {
  switch (s) {
    case Stability::kStable:
      return "stable";
    case Stability::kSaddle:
      return "saddle";
    case Stability::kUnstable:
      return "unstable";
  }
  return "unknown";
}

namespace {

double max_norm(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool inside(const Vector& x, const Vector& lower, const Vector& upper) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

}  // namespace

std::optional<Vector> newton_equilibrium(const ParametricSystem& system, Vector x, double lambda,
                                         const NewtonOptions& options) {
  const std::size_t n = system.dimension;
  if (x.size() != n) throw ValidationError("newton: seed dimension mismatch");
  Vector f = system.evaluate(x, lambda);
  if (!finite(f)) return std::nullopt;
  double norm = max_norm(f);
  Vector trial(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    if (norm < options.tol) return x;
    Eigen::MatrixXd J;
    try {
      J = jacobian_fd(system, x, lambda, options.fd_step);
    } catch (const ValidationError&) {
      return std::nullopt;
    }
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(n));
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd dx = lu.solve(-rhs);
    double step = 1.0;
    bool accepted = false;
    while (step > 1e-4) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * dx[static_cast<Eigen::Index>(i)];
      Vector ft = system.evaluate(trial, lambda);
      const double nt = finite(ft) ? max_norm(ft) : HUGE_VAL;
      if (nt < norm) {
        x = trial;
        f = std::move(ft);
        norm = nt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return norm < options.tol ? std::optional<Vector>(x) : std::nullopt;
  }
  return norm < options.tol ? std::optional<Vector>(x) : std::nullopt;
}

EquilibriumRecord classify_equilibrium(const ParametricSystem& system, const Vector& x,
                                       double lambda, const NewtonOptions& options) {
  EquilibriumRecord r;
  r.location = x;
  r.lambda = lambda;
  r.residual = max_norm(system.evaluate(x, lambda));
  const Eigen::EigenSolver<Eigen::MatrixXd> es(jacobian_fd(system, x, lambda, options.fd_step),
                                               false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r.eigenvalues.push_back(es.eigenvalues()[i]);
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
            [](const auto& p, const auto& q) {
              return p.real() != q.real() ? p.real() > q.real() : p.imag() > q.imag();
            });
  const bool any_pos = std::any_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                                   [](const auto& e) { return e.real() > 0.0; });
  const bool all_pos = std::all_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                                   [](const auto& e) { return e.real() > 0.0; });
  r.stability = !any_pos ? Stability::kStable : (all_pos ? Stability::kUnstable : Stability::kSaddle);
  return r;
}

EquilibriumSearch find_equilibria(const ParametricSystem& system, double lambda,
                                  const Vector& lower, const Vector& upper, int per_axis,
                                  const NewtonOptions& options) {
  const std::size_t n = system.dimension;
  if (lower.size() != n || upper.size() != n) throw ValidationError("equilibria: region dimension mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] < upper[i])) throw ValidationError("equilibria: degenerate search region");
  }
  if (per_axis < 1) throw ValidationError("equilibria: per_axis must be positive");

  EquilibriumSearch out;
  std::vector<Vector> roots;
  std::vector<int> idx(n, 0);
  Vector seed(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      seed[i] = lower[i] + (upper[i] - lower[i]) * (idx[i] + 0.5) / per_axis;
    }
    ++out.seeds;
    auto root = newton_equilibrium(system, seed, lambda, options);
    if (root && inside(*root, lower, upper)) {
      const bool known = std::any_of(roots.begin(), roots.end(), [&](const Vector& r) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(r[i] - (*root)[i]));
        return d < options.dedup_tol;
      });
      if (!known) roots.push_back(*root);
    } else {
      ++out.nonconvergent;
    }
    std::size_t a = 0;
    while (a < n && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == n) break;
  }
  std::sort(roots.begin(), roots.end());
  for (const auto& r : roots) out.equilibria.push_back(classify_equilibrium(system, r, lambda, options));
  return out;
}

double detect_fold(const ParametricSystem& system, double a, double b, double tol,
                   const FoldOptions& options) {
  if (!(a < b)) throw ValidationError("fold: interval must satisfy a < b");
  if (!(tol > 0.0)) throw ValidationError("fold: tol must be positive");
  auto count = [&](double lambda) {
    return find_equilibria(system, lambda, options.lower, options.upper, options.per_axis,
                           options.newton)
        .equilibria.size();
  };
  const std::size_t ca = count(a);
  const std::size_t cb = count(b);
  if (ca == cb) {
    throw ValidationError("fold: [" + std::to_string(a) + ", " + std::to_string(b) +
                          "] does not bracket a change in the equilibrium count (" +
                          std::to_string(ca) + " at both ends)");
  }
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (count(mid) == ca) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

namespace {

std::optional<std::complex<double>> leading_complex(const EquilibriumRecord& r) {
  for (const auto& e : r.eigenvalues) {
    if (std::abs(e.imag()) > 1e-9) return e;  // sorted by real part
  }
  return std::nullopt;
}

}  // namespace

HopfResult detect_hopf(const ParametricSystem& system, const Vector& seed, double a, double b,
                       double tol, int continuation_steps, const NewtonOptions& options) {
  if (!(a < b)) throw ValidationError("hopf: interval must satisfy a < b");
  if (!(tol > 0.0)) throw ValidationError("hopf: tol must be positive");
  if (continuation_steps < 1) throw ValidationError("hopf: continuation_steps must be positive");

  std::vector<double> lambdas;
  std::vector<Vector> branch;
  auto start = newton_equilibrium(system, seed, a, options);
  if (!start) throw ValidationError("hopf: Newton did not converge from the seed at " + std::to_string(a));
  lambdas.push_back(a);
  branch.push_back(*start);
  for (int s = 1; s <= continuation_steps; ++s) {
    const double l = a + (b - a) * s / continuation_steps;
    auto x = newton_equilibrium(system, branch.back(), l, options);
    if (!x) throw ValidationError("hopf: branch continuation failed at " + std::to_string(l));
    lambdas.push_back(l);
    branch.push_back(*x);
  }

  auto indicator = [&](double l, const Vector& x) {
    const auto e = leading_complex(classify_equilibrium(system, x, l, options));
    if (!e) throw ValidationError("hopf: no complex eigenvalue pair on the branch at " + std::to_string(l));
    return *e;
  };
  const double ga = indicator(a, branch.front()).real();
  const double gb = indicator(b, branch.back()).real();
  if ((ga < 0.0) == (gb < 0.0)) {
    throw ValidationError("hopf: real part of the complex pair does not change sign on [" +
                          std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  // Narrow to one continuation interval, then bisect inside it.
  std::size_t lo = 0, hi = branch.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if ((indicator(lambdas[mid], branch[mid]).real() < 0.0) == (ga < 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double l0 = lambdas[lo], l1 = lambdas[hi];
  Vector x = branch[lo];
  while (l1 - l0 > tol) {
    const double mid = 0.5 * (l0 + l1);
    auto xm = newton_equilibrium(system, x, mid, options);
    if (!xm) throw ValidationError("hopf: branch continuation failed at " + std::to_string(mid));
    if ((indicator(mid, *xm).real() < 0.0) == (ga < 0.0)) {
      l0 = mid;
      x = *xm;
    } else {
      l1 = mid;
    }
  }
  HopfResult r;
  r.lambda = 0.5 * (l0 + l1);
  auto xr = newton_equilibrium(system, x, r.lambda, options);
  r.location = xr ? *xr : x;
  r.eigenvalue = indicator(r.lambda, r.location);
  return r;
}

}  // namespace boxfollow
