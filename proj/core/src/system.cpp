#include "boxfollow/system.hpp"

#include <cmath>

namespace boxfollow {

Vector ParametricSystem::params_at(double lambda) const {
  Vector p = params;
  p.at(lambda_index) = lambda;
  return p;
}

void ParametricSystem::evaluate(std::span<const double> x, double lambda,
                                std::span<double> dxdt) const {
  const Vector p = params_at(lambda);
  rhs(x, p, dxdt);
}

Vector ParametricSystem::evaluate(std::span<const double> x, double lambda) const {
  Vector out(dimension);
  evaluate(x, lambda, out);
  return out;
}

VectorField ParametricSystem::field(double lambda) const {
  return [this, p = params_at(lambda)](std::span<const double> x, std::span<double> dxdt) {
    rhs(x, p, dxdt);
  };
}

void ParametricSystem::set_param(const std::string& pname, double value) {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == pname) {
      params[i] = value;
      return;
    }
  }
  std::string known;
  for (const auto& n : param_names) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("model '" + name + "' has no parameter '" + pname + "' (known: " + known +
                        ")");
}

void ParametricSystem::validate() const {
  if (dimension == 0) throw ValidationError("model '" + name + "': dimension must be positive");
  if (!rhs) throw ValidationError("model '" + name + "': missing right-hand side");
  if (param_names.size() != params.size()) {
    throw ValidationError("model '" + name + "': parameter names and values differ in length");
  }
  if (lambda_index >= params.size()) {
    throw ValidationError("model '" + name + "': continued parameter index out of range");
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ValidationError("model '" + name + "': integration time T must be positive");
  }
  if (!(tolerances.abs_tol > 0.0) || !(tolerances.rel_tol > 0.0)) {
    throw ValidationError("model '" + name + "': tolerances must be positive");
  }
}

Vector integrate(const ParametricSystem& system, std::span<const double> x0, double lambda,
                 double T) {
  if (x0.size() != system.dimension) {
    throw ValidationError("integrate: initial state has dimension " + std::to_string(x0.size()) +
                          ", system has " + std::to_string(system.dimension));
  }
  Vector x(x0.begin(), x0.end());
  DormandPrince45 stepper(system.dimension, system.tolerances);
  stepper.integrate(system.field(lambda), x, T);
  return x;
}

Eigen::MatrixXd jacobian_fd(const ParametricSystem& system, std::span<const double> x,
                            double lambda, double h) {
  if (!(h > 0.0)) throw ValidationError("jacobian_fd: step must be positive");
  const std::size_t n = system.dimension;
  if (x.size() != n) throw ValidationError("jacobian_fd: state dimension mismatch");
  const Vector p = system.params_at(lambda);
  Eigen::MatrixXd J(n, n);
  Vector xp(x.begin(), x.end()), xm(x.begin(), x.end()), fp(n), fm(n);
  for (std::size_t j = 0; j < n; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    system.rhs(xp, p, fp);
    system.rhs(xm, p, fm);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (fp[i] - fm[i]) / (2.0 * h);
      if (!std::isfinite(d)) throw ValidationError("jacobian_fd: non-finite right-hand side");
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
    }
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

}  // namespace boxfollow
