#include "boxfollow/config.hpp"

#include <fstream>
#include <set>

#include "boxfollow/models.hpp"

namespace boxfollow {

namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so that
// misspelled keys are reported instead of silently ignored.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(where("") + ": expected an object");
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) throw ValidationError(where(key) + ": required");
    return j_.at(key);
  }

  Section section(const std::string& key) { return Section(raw(key), where(key)); }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ValidationError(where(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(where(key) + ": must be finite");
    return d;
  }

  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ValidationError(where(key) + ": expected an integer");
    return v.get<long>();
  }

  long integer(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ValidationError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ValidationError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  Vector vector(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ValidationError(where(key) + ": expected an array of numbers");
    Vector out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ValidationError(where(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::pair<double, double> interval(const std::string& key) {
    Vector v = vector(key);
    if (v.size() != 2 || !(v[0] < v[1])) {
      throw ValidationError(where(key) + ": expected [a, b] with a < b");
    }
    return {v[0], v[1]};
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ValidationError(where(key) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

SamplerSpec parse_sampler(Section s, const SamplerSpec& base, std::size_t n) {
  SamplerSpec spec = base;
  if (s.has("strategy")) {
    try {
      spec.strategy = parse_sampler_strategy(s.string("strategy"));
    } catch (const ValidationError& e) {
      throw ValidationError(s.where("strategy") + ": " + e.what());
    }
  }
  spec.points_per_axis = static_cast<int>(s.integer("points_per_axis", spec.points_per_axis));
  spec.total_points = static_cast<int>(s.integer("total_points", spec.total_points));
  if (s.has("seed")) {
    const long seed = s.integer("seed");
    if (seed < 0) throw ValidationError(s.where("seed") + ": must be non-negative");
    spec.seed = static_cast<std::uint64_t>(seed);
  }
  s.finish();
  try {
    spec.validate(n);
  } catch (const ValidationError& e) {
    throw ValidationError(s.where("") + ": " + e.what());
  }
  return spec;
}

json sampler_json(const SamplerSpec& s) {
  return {{"strategy", to_string(s.strategy)},
          {"points_per_axis", s.points_per_axis},
          {"total_points", s.total_points},
          {"seed", s.seed}};
}

void check_region(const Vector& lower, const Vector& upper, std::size_t n, const std::string& where) {
  if (lower.size() != n || upper.size() != n) {
    throw ValidationError(where + ": bounds need " + std::to_string(n) + " entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] < upper[i])) {
      throw ValidationError(where + ": lower[" + std::to_string(i) + "] must be below upper[" +
                            std::to_string(i) + "]");
    }
  }
}

}  // namespace

ParametricSystem build_system(const RunConfig& c) {
  ModelOptions opts;
  opts.dimension = c.model.dimension;
  opts.extra = c.model.extra;
  ParametricSystem sys = ModelRegistry::instance().make(c.model.name, opts);
  for (const auto& [name, value] : c.model.params) sys.set_param(name, value);
  sys.T = c.T;
  sys.tolerances = c.tolerances;
  sys.validate();
  return sys;
}

RunConfig parse_config(const json& j) {
  Section root(j, "");
  RunConfig c;
  bool explicit_dimension = false;

  {
    Section m = root.section("model");
    c.model.name = m.string("name");
    if (!ModelRegistry::instance().contains(c.model.name)) {
      std::string known;
      for (const auto& name : ModelRegistry::instance().names()) known += (known.empty() ? "" : ", ") + name;
      throw ValidationError("model.name: unknown model '" + c.model.name + "' (known: " + known + ")");
    }
    if (m.has("dimension")) {
      explicit_dimension = true;
      const long d = m.integer("dimension");
      if (d < 1) throw ValidationError("model.dimension: must be positive");
      c.model.dimension = static_cast<std::size_t>(d);
    } else if (j.contains("domain") && j["domain"].is_object() && j["domain"].contains("lower") &&
               j["domain"]["lower"].is_array()) {
      c.model.dimension = j["domain"]["lower"].size();
    }
    if (m.has("params")) {
      Section p = m.section("params");
      for (const auto& [key, value] : m.raw("params").items()) c.model.params[key] = p.number(key);
      p.finish();
    }
    if (m.has("extra")) c.model.extra = m.raw("extra");
    m.finish();
  }

  // Resolve model defaults so the echo is complete.
  ParametricSystem base;
  try {
    ModelOptions opts;
    opts.dimension = c.model.dimension;
    opts.extra = c.model.extra;
    base = ModelRegistry::instance().make(c.model.name, opts);
    for (const auto& [name, value] : c.model.params) {
      try {
        base.set_param(name, value);
      } catch (const ValidationError& e) {
        throw ValidationError("model.params." + name + ": " + e.what());
      }
    }
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    throw ValidationError(msg.rfind("model.", 0) == 0 ? msg : "model: " + msg);
  }
  for (std::size_t i = 0; i < base.param_names.size(); ++i) {
    c.model.params[base.param_names[i]] = base.params[i];
  }
  if (explicit_dimension && c.model.dimension != base.dimension) {
    throw ValidationError("model.dimension: model '" + c.model.name + "' has dimension " +
                          std::to_string(base.dimension));
  }
  c.model.dimension = base.dimension;
  const std::size_t n = base.dimension;

  c.lambda = root.number("lambda", base.default_lambda());
  c.T = root.number("T", base.T);
  if (!(c.T > 0.0)) throw ValidationError("T: must be positive");
  c.tolerances = base.tolerances;
  if (root.has("tolerances")) {
    Section t = root.section("tolerances");
    c.tolerances.abs_tol = t.number("abs", c.tolerances.abs_tol);
    c.tolerances.rel_tol = t.number("rel", c.tolerances.rel_tol);
    t.finish();
  }
  if (!(c.tolerances.abs_tol > 0.0)) throw ValidationError("tolerances.abs: must be positive");
  if (!(c.tolerances.rel_tol > 0.0)) throw ValidationError("tolerances.rel: must be positive");

  {
    Section d = root.section("domain");
    c.lower = d.vector("lower");
    c.upper = d.vector("upper");
    d.finish();
    check_region(c.lower, c.upper, n, "domain");
  }

  c.depth = static_cast<int>(root.integer("depth"));
  if (c.depth < 0 || c.depth > kMaxDepth) {
    throw ValidationError("depth: must lie in 0.." + std::to_string(kMaxDepth));
  }

  c.sampler = SamplerSpec::default_for(n);
  if (root.has("sampler")) c.sampler = parse_sampler(root.section("sampler"), c.sampler, n);

  if (root.has("schedule")) {
    Section s = root.section("schedule");
    ScheduleSpec sc;
    sc.lambda0 = s.number("lambda0", c.lambda);
    sc.step = s.number("step");
    if (sc.step == 0.0) throw ValidationError("schedule.step: must be non-zero");
    sc.count = static_cast<int>(s.integer("count"));
    if (sc.count < 1) throw ValidationError("schedule.count: must be at least 1");
    const std::string kind = s.has("K_policy") ? s.string("K_policy") : std::string("fixed");
    if (kind == "fixed") {
      sc.policy = KPolicy::fixed(static_cast<int>(s.integer("K")));
      if (sc.policy.K < 0 || sc.policy.K > c.depth) {
        throw ValidationError("schedule.K: must satisfy 0 <= K <= depth");
      }
    } else if (kind == "adaptive") {
      sc.policy = KPolicy::adaptive(static_cast<int>(s.integer("stride", 4)),
                                    s.number("escape_threshold", 1e-3));
      if (sc.policy.stride < 1) throw ValidationError("schedule.stride: must be positive");
      if (!(sc.policy.escape_threshold >= 0.0)) {
        throw ValidationError("schedule.escape_threshold: must be non-negative");
      }
    } else {
      throw ValidationError("schedule.K_policy: expected 'fixed' or 'adaptive', got '" + kind + "'");
    }
    sc.reintroduce = s.boolean("reintroduce", true);
    s.finish();
    c.schedule = sc;
  }

  if (root.has("analysis")) {
    Section a = root.section("analysis");
    if (a.has("lifetime")) {
      Section l = a.section("lifetime");
      if (l.has("center")) {
        c.lifetime.center = l.vector("center");
        if (c.lifetime.center->size() != n) {
          throw ValidationError("analysis.lifetime.center: needs " + std::to_string(n) + " entries");
        }
      }
      c.lifetime.radius = l.number("radius", c.lifetime.radius);
      c.lifetime.t_max = l.number("t_max", c.lifetime.t_max);
      c.lifetime.sample_dt = l.number("sample_dt", c.lifetime.sample_dt);
      if (!(c.lifetime.radius > 0.0)) throw ValidationError("analysis.lifetime.radius: must be positive");
      if (!(c.lifetime.t_max > 0.0)) throw ValidationError("analysis.lifetime.t_max: must be positive");
      if (!(c.lifetime.sample_dt > 0.0)) {
        throw ValidationError("analysis.lifetime.sample_dt: must be positive");
      }
      if (l.has("depth")) c.lifetime.depth = static_cast<int>(l.integer("depth"));
      if (l.has("family")) c.lifetime.family = l.string("family");
      if (l.has("sampler")) c.lifetime.sampler = parse_sampler(l.section("sampler"), c.sampler, n);
      l.finish();
    }
    if (a.has("dimension")) {
      Section d = a.section("dimension");
      c.dimension.first = static_cast<int>(d.integer("first", 0));
      if (d.has("last")) c.dimension.last = static_cast<int>(d.integer("last"));
      if (d.has("family")) c.dimension.family = d.string("family");
      d.finish();
    }
    if (a.has("equilibria")) {
      Section e = a.section("equilibria");
      if (e.has("lower")) c.equilibria.lower = e.vector("lower");
      if (e.has("upper")) c.equilibria.upper = e.vector("upper");
      check_region(c.equilibria.lower.value_or(c.lower), c.equilibria.upper.value_or(c.upper), n,
                   "analysis.equilibria");
      c.equilibria.per_axis = static_cast<int>(e.integer("per_axis", c.equilibria.per_axis));
      if (c.equilibria.per_axis < 1) throw ValidationError("analysis.equilibria.per_axis: must be positive");
      if (e.has("fold_interval")) c.equilibria.fold_interval = e.interval("fold_interval");
      if (e.has("hopf_interval")) c.equilibria.hopf_interval = e.interval("hopf_interval");
      if (e.has("hopf_seed")) {
        c.equilibria.hopf_seed = e.vector("hopf_seed");
        if (c.equilibria.hopf_seed->size() != n) {
          throw ValidationError("analysis.equilibria.hopf_seed: needs " + std::to_string(n) + " entries");
        }
      }
      if (c.equilibria.hopf_interval && !c.equilibria.hopf_seed) {
        throw ValidationError("analysis.equilibria.hopf_seed: required with hopf_interval");
      }
      c.equilibria.tol = e.number("tol", c.equilibria.tol);
      if (!(c.equilibria.tol > 0.0)) throw ValidationError("analysis.equilibria.tol: must be positive");
      e.finish();
    }
    if (a.has("distance")) {
      Section d = a.section("distance");
      if (d.has("families")) {
        const json& f = d.raw("families");
        if (!f.is_array() || f.size() != 2 || !f[0].is_string() || !f[1].is_string()) {
          throw ValidationError("analysis.distance.families: expected two file names");
        }
        c.distance.families = {f[0].get<std::string>(), f[1].get<std::string>()};
      }
      if (d.has("depth")) c.distance.depth = static_cast<int>(d.integer("depth"));
      c.distance.points_per_axis = static_cast<int>(d.integer("points_per_axis", 4));
      if (c.distance.points_per_axis < 0) {
        throw ValidationError("analysis.distance.points_per_axis: must be non-negative");
      }
      d.finish();
    }
    a.finish();
  }

  const long workers = root.integer("workers", 0);
  if (workers < 0) throw ValidationError("workers: must be non-negative");
  c.workers = static_cast<unsigned>(workers);
  if (root.has("output")) c.output = root.string("output");
  root.finish();

  try {
    build_system(c);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"name", c.model.name}, {"dimension", c.model.dimension}, {"params", c.model.params}};
  if (!c.model.extra.empty()) j["model"]["extra"] = c.model.extra;
  j["lambda"] = c.lambda;
  j["T"] = c.T;
  j["tolerances"] = {{"abs", c.tolerances.abs_tol}, {"rel", c.tolerances.rel_tol}};
  j["domain"] = {{"lower", c.lower}, {"upper", c.upper}};
  j["depth"] = c.depth;
  j["sampler"] = sampler_json(c.sampler);
  if (c.schedule) {
    const auto& s = *c.schedule;
    json sj = {{"lambda0", s.lambda0}, {"step", s.step}, {"count", s.count}, {"reintroduce", s.reintroduce}};
    if (s.policy.kind == KPolicy::Kind::kFixed) {
      sj["K_policy"] = "fixed";
      sj["K"] = s.policy.K;
    } else {
      sj["K_policy"] = "adaptive";
      sj["stride"] = s.policy.stride;
      sj["escape_threshold"] = s.policy.escape_threshold;
    }
    j["schedule"] = sj;
  }
  json a;
  json l = {{"radius", c.lifetime.radius}, {"t_max", c.lifetime.t_max}, {"sample_dt", c.lifetime.sample_dt}};
  if (c.lifetime.center) l["center"] = *c.lifetime.center;
  if (c.lifetime.depth) l["depth"] = *c.lifetime.depth;
  if (c.lifetime.family) l["family"] = *c.lifetime.family;
  if (c.lifetime.sampler) l["sampler"] = sampler_json(*c.lifetime.sampler);
  a["lifetime"] = l;
  json d = {{"first", c.dimension.first}};
  if (c.dimension.last) d["last"] = *c.dimension.last;
  if (c.dimension.family) d["family"] = *c.dimension.family;
  a["dimension"] = d;
  json e = {{"per_axis", c.equilibria.per_axis}, {"tol", c.equilibria.tol}};
  if (c.equilibria.lower) e["lower"] = *c.equilibria.lower;
  if (c.equilibria.upper) e["upper"] = *c.equilibria.upper;
  if (c.equilibria.fold_interval) {
    e["fold_interval"] = {c.equilibria.fold_interval->first, c.equilibria.fold_interval->second};
  }
  if (c.equilibria.hopf_interval) {
    e["hopf_interval"] = {c.equilibria.hopf_interval->first, c.equilibria.hopf_interval->second};
  }
  if (c.equilibria.hopf_seed) e["hopf_seed"] = *c.equilibria.hopf_seed;
  a["equilibria"] = e;
  json dist = {{"points_per_axis", c.distance.points_per_axis}};
  if (!c.distance.families.empty()) dist["families"] = c.distance.families;
  if (c.distance.depth) dist["depth"] = *c.distance.depth;
  a["distance"] = dist;
  j["analysis"] = a;
  j["workers"] = c.workers;
  j["output"] = c.output.string();
  return j;
}

}  // namespace boxfollow
