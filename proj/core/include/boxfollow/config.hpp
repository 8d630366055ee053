#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "boxfollow/path_follow.hpp"
#include "boxfollow/system.hpp"

namespace boxfollow {

struct ModelSpec {
  std::string name;
  std::map<std::string, double> params;  // overrides of the model defaults
  std::size_t dimension = 0;             // dimension-generic models only
  nlohmann::json extra = nlohmann::json::object();
};

struct ScheduleSpec {
  double lambda0 = 0.0;
  double step = 0.0;
  int count = 1;
  KPolicy policy;
  bool reintroduce = true;
};

struct LifetimeRequest {
  std::optional<Vector> center;  // defaults to the laminar state for waleffe4
  double radius = 0.05;
  double t_max = 300.0;
  double sample_dt = 0.1;
  std::optional<int> depth;
  std::optional<std::string> family;
  std::optional<SamplerSpec> sampler;  // defaults to the run sampler
};

struct DimensionRequest {
  int first = 0;
  std::optional<int> last;
  std::optional<std::string> family;
};

struct EquilibriaRequest {
  std::optional<Vector> lower, upper;  // default: Q
  int per_axis = 6;
  std::optional<std::pair<double, double>> fold_interval;
  double tol = 1e-3;
  std::optional<std::pair<double, double>> hopf_interval;
  std::optional<Vector> hopf_seed;
};

struct DistanceRequest {
  std::vector<std::string> families;
  std::optional<int> depth;
  int points_per_axis = 4;
};

struct RunConfig {
  ModelSpec model;
  double lambda = 0.0;  // parameter value for single computations
  double T = 1.0;
  Tolerances tolerances{};
  Vector lower, upper;
  int depth = 0;
  SamplerSpec sampler{};
  std::optional<ScheduleSpec> schedule;
  LifetimeRequest lifetime;
  DimensionRequest dimension;
  EquilibriaRequest equilibria;
  DistanceRequest distance;
  unsigned workers = 0;
  std::filesystem::path output = "out";
};

// Parses and validates a configuration; missing values take model or
// library defaults. Errors name the offending field, e.g. "schedule.step".
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& c);

// The model with overrides, T and tolerances applied.
ParametricSystem build_system(const RunConfig& c);

}  // namespace boxfollow
