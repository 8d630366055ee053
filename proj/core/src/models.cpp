#include "boxfollow/models.hpp"

#include <algorithm>

namespace boxfollow {

std::array<double, 3> lorenz_rhs(std::span<const double> x, double sigma, double rho,
                                 double beta) {
  return {sigma * (x[1] - x[0]), x[0] * (rho - x[2]) - x[1], x[0] * x[1] - beta * x[2]};
}

std::array<double, 4> waleffe_rhs(std::span<const double> x, const WaleffeParams& p, double R) {
  if (!(R > 0.0)) throw ValidationError("waleffe_rhs: Reynolds number must be positive");
  const double u = x[0], v = x[1], w = x[2], m = x[3];
  const double inv_r = 1.0 / R;
  return {
      -p.lambda * u * inv_r - p.gamma * w * w + v * m,
      -p.mu * v * inv_r + p.delta * w * w,
      -p.nu * w * inv_r + p.gamma * w * u - p.delta * w * v,
      p.sigma * inv_r - p.sigma * m * inv_r - v * u,
  };
}

ParametricSystem lorenz_system(double sigma, double rho, double beta) {
  ParametricSystem s;
  s.name = "lorenz";
  s.dimension = 3;
  s.param_names = {"sigma", "rho", "beta"};
  s.params = {sigma, rho, beta};
  s.lambda_index = 2;
  s.T = 0.2;
  s.rhs = [](std::span<const double> x, std::span<const double> p, std::span<double> dx) {
    const auto f = lorenz_rhs(x, p[0], p[1], p[2]);
    std::copy(f.begin(), f.end(), dx.begin());
  };
  return s;
}

ParametricSystem waleffe_system(const WaleffeParams& wp, double R) {
  ParametricSystem s;
  s.name = "waleffe4";
  s.dimension = 4;
  s.param_names = {"lambda", "mu", "nu", "sigma", "gamma", "delta", "R"};
  s.params = {wp.lambda, wp.mu, wp.nu, wp.sigma, wp.gamma, wp.delta, R};
  s.lambda_index = 6;
  s.T = 20.0;
  s.rhs = [](std::span<const double> x, std::span<const double> p, std::span<double> dx) {
    const WaleffeParams q{p[0], p[1], p[2], p[3], p[4], p[5]};
    const auto f = waleffe_rhs(x, q, p[6]);
    std::copy(f.begin(), f.end(), dx.begin());
  };
  return s;
}

namespace {

Vector read_vector(const nlohmann::json& j, const char* key, std::size_t n) {
  if (!j.contains(key)) return Vector(n, 0.0);
  auto v = j.at(key).get<Vector>();
  if (v.size() != n) {
    throw ValidationError(std::string("quadratic model: '") + key + "' must have " +
                          std::to_string(n) + " entries");
  }
  return v;
}

std::vector<Vector> read_matrix(const nlohmann::json& j, const char* key, std::size_t n) {
  if (!j.contains(key)) return std::vector<Vector>(n, Vector(n, 0.0));
  auto m = j.at(key).get<std::vector<Vector>>();
  bool ok = m.size() == n;
  for (const auto& row : m) ok = ok && row.size() == n;
  if (!ok) {
    throw ValidationError(std::string("quadratic model: '") + key + "' must be " +
                          std::to_string(n) + "x" + std::to_string(n));
  }
  return m;
}

}  // namespace

QuadraticCoefficients QuadraticCoefficients::from_json(const nlohmann::json& j) {
  QuadraticCoefficients c;
  if (!j.contains("dimension")) throw ValidationError("quadratic model: missing 'dimension'");
  c.dimension = j.at("dimension").get<std::size_t>();
  if (c.dimension == 0) throw ValidationError("quadratic model: dimension must be positive");
  const std::size_t n = c.dimension;
  c.constant = read_vector(j, "constant", n);
  c.scaled_constant = read_vector(j, "scaled_constant", n);
  c.linear = read_matrix(j, "linear", n);
  c.scaled_linear = read_matrix(j, "scaled_linear", n);
  if (j.contains("quadratic")) {
    for (const auto& t : j.at("quadratic")) {
      if (!t.is_array() || t.size() != 4) {
        throw ValidationError("quadratic model: terms are [i, j, k, value]");
      }
      Term term{t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<std::size_t>(),
                t[3].get<double>()};
      if (term.i >= n || term.j >= n || term.k >= n) {
        throw ValidationError("quadratic model: term index out of range");
      }
      c.quadratic.push_back(term);
    }
  }
  return c;
}

nlohmann::json QuadraticCoefficients::to_json() const {
  nlohmann::json j;
  j["dimension"] = dimension;
  j["constant"] = constant;
  j["scaled_constant"] = scaled_constant;
  j["linear"] = linear;
  j["scaled_linear"] = scaled_linear;
  auto terms = nlohmann::json::array();
  for (const auto& t : quadratic) terms.push_back({t.i, t.j, t.k, t.value});
  j["quadratic"] = terms;
  return j;
}

ParametricSystem quadratic_system(QuadraticCoefficients coeffs, double lambda, std::string name) {
  ParametricSystem s;
  s.name = std::move(name);
  s.dimension = coeffs.dimension;
  s.param_names = {"R"};
  s.params = {lambda};
  s.lambda_index = 0;
  s.T = 1.0;
  s.rhs = [c = std::move(coeffs)](std::span<const double> x, std::span<const double> p,
                                  std::span<double> dx) {
    const std::size_t n = c.dimension;
    const double inv = 1.0 / p[0];
    for (std::size_t i = 0; i < n; ++i) {
      double scaled = c.scaled_constant[i];
      double lin = c.constant[i];
      for (std::size_t j = 0; j < n; ++j) {
        scaled += c.scaled_linear[i][j] * x[j];
        lin += c.linear[i][j] * x[j];
      }
      dx[i] = lin + scaled * inv;
    }
    for (const auto& t : c.quadratic) dx[t.i] += t.value * x[t.j] * x[t.k];
  };
  return s;
}

ParametricSystem zero_system(std::size_t dimension) {
  ParametricSystem s;
  s.name = "zero";
  s.dimension = dimension;
  s.param_names = {"lambda"};
  s.params = {0.0};
  s.T = 1.0;
  s.rhs = [](std::span<const double>, std::span<const double>, std::span<double> dx) {
    std::fill(dx.begin(), dx.end(), 0.0);
  };
  return s;
}

ParametricSystem linear_relaxation_system(std::size_t dimension, double lambda) {
  ParametricSystem s;
  s.name = "linear_relaxation";
  s.dimension = dimension;
  s.param_names = {"lambda"};
  s.params = {lambda};
  s.T = 1.0;
  s.rhs = [](std::span<const double> x, std::span<const double> p, std::span<double> dx) {
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = -x[i] + p[0];
  };
  return s;
}

ModelRegistry::ModelRegistry() {
  factories_["lorenz"] = [](const ModelOptions&) { return lorenz_system(); };
  factories_["waleffe4"] = [](const ModelOptions&) { return waleffe_system(); };
  factories_["quadratic"] = [](const ModelOptions& o) {
    if (o.extra.is_null() || !o.extra.contains("coefficients")) {
      throw ValidationError("model 'quadratic' needs model.extra.coefficients");
    }
    auto c = QuadraticCoefficients::from_json(o.extra.at("coefficients"));
    return quadratic_system(std::move(c), 1.0);
  };
  factories_["zero"] = [](const ModelOptions& o) {
    if (o.dimension == 0) throw ValidationError("model 'zero' needs model.dimension");
    return zero_system(o.dimension);
  };
  factories_["linear_relaxation"] = [](const ModelOptions& o) {
    if (o.dimension == 0) {
      throw ValidationError("model 'linear_relaxation' needs model.dimension");
    }
    return linear_relaxation_system(o.dimension);
  };
}

ModelRegistry& ModelRegistry::instance() {
  static ModelRegistry registry;
  return registry;
}

void ModelRegistry::add(const std::string& name, ModelFactory factory) {
  factories_[name] = std::move(factory);
}

bool ModelRegistry::contains(const std::string& name) const { return factories_.count(name) > 0; }

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : factories_) out.push_back(k);
  return out;
}

ParametricSystem ModelRegistry::make(const std::string& name, const ModelOptions& options) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) {
    std::string known;
    for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("unknown model '" + name + "' (known: " + known + ")");
  }
  return it->second(options);
}

}  // namespace boxfollow
