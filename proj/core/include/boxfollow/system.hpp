#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "boxfollow/integrator.hpp"
#include "boxfollow/types.hpp"

namespace boxfollow {

// Right-hand side F(x; p). Must be deterministic and free of side effects.
using RhsFn = std::function<void(std::span<const double> x, std::span<const double> params,
                                 std::span<double> dxdt)>;

// An ODE x' = F(x, lambda) together with the integration time T that turns
// it into the time-T map f_lambda. Exactly one named parameter is continued;
// `params[lambda_index]` holds its default value.
struct ParametricSystem {
  std::string name;
  std::size_t dimension = 0;
  std::vector<std::string> param_names;
  Vector params;
  std::size_t lambda_index = 0;
  double T = 1.0;
  Tolerances tolerances{};
  RhsFn rhs;

  const std::string& lambda_name() const { return param_names.at(lambda_index); }
  double default_lambda() const { return params.at(lambda_index); }
  Vector params_at(double lambda) const;
  void evaluate(std::span<const double> x, double lambda, std::span<double> dxdt) const;
  Vector evaluate(std::span<const double> x, double lambda) const;
  // Vector field with lambda bound; the returned closure borrows *this.
  VectorField field(double lambda) const;

  void set_param(const std::string& name, double value);
  // Throws ValidationError when a field is inconsistent.
  void validate() const;
};

// Flow of the system from x0 over time T at parameter lambda.
Vector integrate(const ParametricSystem& system, std::span<const double> x0, double lambda,
                 double T);

// Central finite-difference Jacobian of the right-hand side.
Eigen::MatrixXd jacobian_fd(const ParametricSystem& system, std::span<const double> x,
                            double lambda, double h = 1e-6);

}  // namespace boxfollow
