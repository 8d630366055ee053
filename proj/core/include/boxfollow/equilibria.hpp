#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "boxfollow/system.hpp"

namespace boxfollow {

enum class Stability { kStable, kSaddle, kUnstable };
std::string to_string(Stability s);

struct EquilibriumRecord {
  Vector location;
  double lambda = 0.0;
  std::vector<std::complex<double>> eigenvalues;  // sorted by descending real part
  Stability stability = Stability::kSaddle;
  double residual = 0.0;  // |rhs| at location
};

struct NewtonOptions {
  double tol = 1e-10;  // on the max-norm of the right-hand side
  int max_iterations = 60;
  double fd_step = 1e-6;
  double dedup_tol = 1e-6;
};

// Damped Newton iteration on rhs(., lambda) = 0 with backtracking on the
// residual norm.
std::optional<Vector> newton_equilibrium(const ParametricSystem& system, Vector x0, double lambda,
                                         const NewtonOptions& options = {});

EquilibriumRecord classify_equilibrium(const ParametricSystem& system, const Vector& x,
                                       double lambda, const NewtonOptions& options = {});

struct EquilibriumSearch {
  std::vector<EquilibriumRecord> equilibria;  // sorted lexicographically by location
  std::size_t seeds = 0;
  std::size_t nonconvergent = 0;  // seeds without a converged iterate inside the region
};

// Newton from every node of a per_axis^n grid over [lower, upper]; keeps
// distinct roots inside the region.
EquilibriumSearch find_equilibria(const ParametricSystem& system, double lambda,
                                  const Vector& lower, const Vector& upper, int per_axis,
                                  const NewtonOptions& options = {});

struct FoldOptions {
  Vector lower, upper;  // search region
  int per_axis = 6;
  NewtonOptions newton{};
};

// Bisection on the parameter where the number of equilibria inside the
// region changes. Throws ValidationError when [a, b] does not bracket one.
double detect_fold(const ParametricSystem& system, double a, double b, double tol,
                   const FoldOptions& options);

struct HopfResult {
  double lambda = 0.0;
  Vector location;
  std::complex<double> eigenvalue;
};

// Continues the equilibrium found from `seed` at lambda = a across [a, b]
// and bisects on the largest real part among non-real eigenvalues.
// Throws ValidationError when the branch has no complex pair, Newton fails,
// or the real part does not change sign.
HopfResult detect_hopf(const ParametricSystem& system, const Vector& seed, double a, double b,
                       double tol, int continuation_steps = 20, const NewtonOptions& options = {});

}  // namespace boxfollow
