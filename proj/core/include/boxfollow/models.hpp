#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boxfollow/system.hpp"

namespace boxfollow {

std::array<double, 3> lorenz_rhs(std::span<const double> x, double sigma, double rho,
                                 double beta);

// Four-mode self-sustaining-process model of Waleffe for (u, v, w, m).
struct WaleffeParams {
  double lambda = 10.0;
  double mu = 10.0;
  double nu = 15.0;
  double sigma = 10.0;
  double gamma = 0.5;
  double delta = 1.0;
};

std::array<double, 4> waleffe_rhs(std::span<const double> x, const WaleffeParams& p, double R);

// Coefficient tables for
//   x'_i = c_i + (a_i + sum_j B_ij x_j) / lambda + sum_j L_ij x_j + sum_{j<=k} N_ijk x_j x_k
// where lambda is the continued parameter (a Reynolds number). This is the
// plug-in slot for externally supplied Galerkin models such as the
// nine-mode shear-flow model.
struct QuadraticCoefficients {
  std::size_t dimension = 0;
  Vector constant;            // c, size n
  Vector scaled_constant;     // a, size n
  std::vector<Vector> scaled_linear;  // B, n x n
  std::vector<Vector> linear;         // L, n x n
  struct Term {
    std::size_t i, j, k;
    double value;
  };
  std::vector<Term> quadratic;  // sparse N

  static QuadraticCoefficients from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

ParametricSystem lorenz_system(double sigma = 10.0, double rho = 28.0, double beta = 8.0 / 3.0);
ParametricSystem waleffe_system(const WaleffeParams& p = {}, double R = 400.0);
ParametricSystem quadratic_system(QuadraticCoefficients coeffs, double lambda,
                                  std::string name = "quadratic");
// x' = 0; the time-T map is the identity.
ParametricSystem zero_system(std::size_t dimension);
// x' = -x + lambda (componentwise); fixed point x* = lambda.
ParametricSystem linear_relaxation_system(std::size_t dimension, double lambda = 0.0);

// Construction options passed through from the run configuration.
struct ModelOptions {
  std::size_t dimension = 0;  // for dimension-generic models
  nlohmann::json extra;       // model specific, e.g. coefficient tables
};

using ModelFactory = std::function<ParametricSystem(const ModelOptions&)>;

// Named constructors: lorenz, waleffe4, quadratic, zero, linear_relaxation.
// Additional models may be registered at startup.
class ModelRegistry {
 public:
  static ModelRegistry& instance();

  void add(const std::string& name, ModelFactory factory);
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;
  ParametricSystem make(const std::string& name, const ModelOptions& options = {}) const;

 private:
  ModelRegistry();
  std::map<std::string, ModelFactory> factories_;
};

}  // namespace boxfollow
