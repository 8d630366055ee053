#include "boxfollow/commands.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "boxfollow/dimension.hpp"
#include "boxfollow/distance.hpp"
#include "boxfollow/equilibria.hpp"
#include "boxfollow/family_io.hpp"
#include "boxfollow/lifetime.hpp"
#include "boxfollow/manifest.hpp"

namespace boxfollow {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const AttractorLost*>(&e)) return kExitAttractorLost;
  if (dynamic_cast<const ValidationError*>(&e)) return kExitValidation;
  return kExitRuntime;
}

namespace {

constexpr const char* kManifest = "manifest.jsonl";
constexpr const char* kEcho = "config.resolved.json";

struct Run {
  RunConfig config;
  fs::path dir;
  unsigned workers = 0;
  std::string hash;
};

Run prepare(const RunConfig& config, const CommandOptions& options) {
  Run r;
  r.config = config;
  if (options.out) r.config.output = *options.out;
  if (options.workers) r.config.workers = *options.workers;
  r.dir = r.config.output;
  r.workers = r.config.workers;
  fs::create_directories(r.dir);
  // The echo leaves out the worker count, which never affects results; the
  // hash also ignores where the results go.
  json echo = to_json(r.config);
  echo.erase("workers");
  json hashed = echo;
  hashed.erase("output");
  r.hash = config_hash(hashed);
  std::ofstream(r.dir / kEcho) << echo.dump(2) << '\n';
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_csv(const fs::path& path, const BoxTree& tree, int depth,
               std::span<const double> lifetime = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_boxes_csv(out, tree, depth, lifetime);
}

std::string csv_name(int index, int depth) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "boxes_%05d_d%d.csv", index, depth);
  return buf;
}

void persist(const Run& run, ManifestWriter& manifest, const CoveringFamily& family,
             const StepDiagnostics& step) {
  const std::string file = family_filename(step.index);
  save_family(run.dir / file, family);
  write_csv(run.dir / csv_name(step.index, family.depth()), family.tree, family.depth());
  manifest.write(family_record(step, family, file));
}

fs::path default_family(const RunConfig& config, const std::optional<std::string>& configured,
                        const CommandOptions& options) {
  if (!options.families.empty()) return options.families.front();
  if (configured) {
    fs::path p(*configured);
    return p.is_absolute() ? p : fs::path(config.output) / p;
  }
  return fs::path(options.out.value_or(config.output)) / family_filename(0);
}

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw ValidationError("family file not found: " + p.string());
}

std::string stem_of(const fs::path& p) { return p.stem().string(); }

}  // namespace

void cmd_compute(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  RunConfig cfg = config;
  if (options.depth) {
    if (*options.depth < 0 || *options.depth > kMaxDepth) throw ValidationError("--depth out of range");
    cfg.depth = *options.depth;
  }
  Run run = prepare(cfg, options);
  const ParametricSystem system = build_system(run.config);
  const TimeTMap map(system);
  ManifestWriter manifest(run.dir / kManifest);
  manifest.write(header_record("compute", run.hash, false));

  SelectOptions sel;
  sel.workers = run.workers;
  log << "compute: " << system.name << " at " << system.lambda_name() << "="
      << run.config.lambda << ", depth " << run.config.depth << '\n';
  CoveringFamily family;
  try {
    family = compute_attractor(BoxTree::create_root(run.config.lower, run.config.upper), map,
                               run.config.lambda, run.config.depth, run.config.sampler, sel);
  } catch (const AttractorLost& e) {
    manifest.write(end_record("attractor_lost", e.what(), std::nullopt));
    throw;
  }
  StepDiagnostics step;
  step.index = 0;
  step.lambda = family.lambda;
  step.map_evaluations = family.map_evaluations();
  step.wall_time = family.wall_time();
  step.box_counts = family.box_counts();
  persist(run, manifest, family, step);
  manifest.write(end_record("ok", "", family.lambda));
  log << "compute: " << family.tree.size(family.depth()) << " boxes at depth " << family.depth()
      << ", " << step.map_evaluations << " map evaluations, " << std::fixed
      << std::setprecision(2) << step.wall_time << " s\n"
      << std::defaultfloat;
}

void cmd_follow(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  if (!config.schedule) throw ValidationError("schedule: required by follow");
  Run run = prepare(config, options);
  const ScheduleSpec& sc = *run.config.schedule;
  const ParametricSystem system = build_system(run.config);
  const TimeTMap map(system);

  Schedule schedule{sc.lambda0, sc.step, sc.count, run.config.depth, sc.policy};
  FollowOptions fo;
  fo.reintroduce = sc.reintroduce;
  fo.workers = run.workers;
  fo.keep_families = false;

  std::optional<std::pair<int, CoveringFamily>> resume;
  const fs::path manifest_path = run.dir / kManifest;
  if (options.resume && fs::exists(manifest_path)) {
    std::optional<int> last;
    for (const auto& rec : read_manifest(manifest_path)) {
      if (rec.value("record", "") == "header" && rec.value("config_hash", "") != run.hash) {
        throw ValidationError("--resume: " + manifest_path.string() +
                              " was written for a different configuration");
      }
      if (rec.value("record", "") == "family" && fs::exists(run.dir / rec.at("file").get<std::string>())) {
        last = std::max(last.value_or(-1), rec.at("index").get<int>());
      }
    }
    if (last) {
      CoveringFamily f = load_family(run.dir / family_filename(*last));
      if (f.lambda != schedule.lambda_at(*last)) {
        throw ValidationError("--resume: family " + std::to_string(*last) +
                              " does not match the schedule");
      }
      if (*last >= schedule.count) {
        log << "follow: schedule already complete (" << *last + 1 << " families)\n";
        return;
      }
      log << "follow: resuming after family " << *last << " (" << system.lambda_name() << "="
          << f.lambda << ")\n";
      resume.emplace(*last, std::move(f));
    }
  } else if (!options.resume && fs::exists(manifest_path)) {
    fs::remove(manifest_path);
  }

  ManifestWriter manifest(manifest_path);
  manifest.write(header_record("follow", run.hash, resume.has_value()));
  std::optional<double> last_good;
  if (resume) last_good = resume->second.lambda;
  const auto observer = [&](const CoveringFamily& f, const StepDiagnostics& d) {
    persist(run, manifest, f, d);
    last_good = f.lambda;
    log << "follow: [" << d.index << "/" << schedule.count << "] " << system.lambda_name() << "="
        << d.lambda << " K=" << (d.K ? std::to_string(*d.K) : std::string("-"))
        << " boxes=" << d.box_counts.back() << " escape=" << d.escape_fraction
        << " reintroduced=" << d.reintroduced << " evals=" << d.map_evaluations << '\n';
  };
  try {
    run_schedule(schedule, map, run.config.sampler, run.config.lower, run.config.upper, fo,
                 observer, std::move(resume));
  } catch (const AttractorLost& e) {
    manifest.write(end_record("attractor_lost", e.what(), last_good));
    throw;
  } catch (const std::exception& e) {
    manifest.write(end_record("failed", e.what(), last_good));
    throw;
  }
  manifest.write(end_record("ok", "", last_good));
}

namespace {

void analyze_lifetime(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  const fs::path file = default_family(config, config.lifetime.family, options);
  require_file(file);
  const CoveringFamily family = load_family(file);
  const int depth = options.depth.value_or(config.lifetime.depth.value_or(family.depth()));
  if (!family.tree.has_depth(depth)) {
    throw ValidationError("--depth: " + file.string() + " has no depth " + std::to_string(depth));
  }
  const ParametricSystem system = build_system(config);
  LifetimeTarget target;
  target.radius = config.lifetime.radius;
  if (config.lifetime.center) {
    target.center = *config.lifetime.center;
  } else if (config.model.name == "waleffe4") {
    target.center = {0.0, 0.0, 0.0, 1.0};
  } else {
    throw ValidationError("analysis.lifetime.center: required for model " + config.model.name);
  }
  LifetimeOptions lo;
  lo.t_max = config.lifetime.t_max;
  lo.sample_dt = config.lifetime.sample_dt;
  lo.spec = config.lifetime.sampler.value_or(config.sampler);
  lo.workers = options.workers.value_or(config.workers);
  log << "lifetime: " << family.tree.size(depth) << " boxes at depth " << depth << ", "
      << system.lambda_name() << "=" << family.lambda << ", t_max=" << lo.t_max << '\n';
  const LifetimeField field = lifetime_field(family.tree, depth, system, family.lambda, target, lo);

  const fs::path dir = file.parent_path();
  const std::string base = "lifetime_" + stem_of(file) + "_d" + std::to_string(depth);
  write_csv(dir / (base + ".csv"), family.tree, depth, field.lifetime);
  json meta = {{"family", file.filename().string()},
               {"depth", depth},
               {"lambda", family.lambda},
               {"target_center", target.center},
               {"target_radius", target.radius},
               {"entry_rule", "first dense-output sample within the closed target ball"},
               {"t_max", field.t_max},
               {"sample_dt", field.sample_dt},
               {"boxes", field.paths.size()},
               {"saturated_fraction", field.saturated_fraction(0.95)},
               {"failed_points", field.failed_points}};
  write_text(dir / (base + ".json"), meta.dump(2) + "\n");
  log << "lifetime: saturated fraction " << field.saturated_fraction(0.95) << ", wrote "
      << (dir / (base + ".csv")).string() << '\n';
}

void analyze_dimension(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  const fs::path file = default_family(config, config.dimension.family, options);
  require_file(file);
  const CoveringFamily family = load_family(file);
  const int last = options.depth.value_or(config.dimension.last.value_or(family.depth()));
  const DimensionEstimate est = box_counting_dimension(family.tree, config.dimension.first, last);
  json j = {{"family", file.filename().string()},
            {"lambda", family.lambda},
            {"depths", est.depths},
            {"counts", est.counts},
            {"sizes", est.sizes},
            {"slope", est.slope},
            {"intercept", est.intercept},
            {"residual", est.residual}};
  const fs::path out = file.parent_path() / ("dimension_" + stem_of(file) + ".json");
  write_text(out, j.dump(2) + "\n");
  log << "dimension: slope " << est.slope << " (residual " << est.residual << ") over depths "
      << est.depths.front() << ".." << est.depths.back() << '\n';
}

json complex_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

void analyze_equilibria(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  const ParametricSystem system = build_system(config);
  double lambda = config.lambda;
  fs::path dir = options.out.value_or(config.output);
  if (!options.families.empty()) {
    require_file(options.families.front());
    lambda = load_family(options.families.front()).lambda;
    dir = options.families.front().parent_path();
  }
  fs::create_directories(dir);
  const Vector lower = config.equilibria.lower.value_or(config.lower);
  const Vector upper = config.equilibria.upper.value_or(config.upper);
  const auto search = find_equilibria(system, lambda, lower, upper, config.equilibria.per_axis);
  json list = json::array();
  for (const auto& e : search.equilibria) {
    json ev = json::array();
    for (const auto& z : e.eigenvalues) ev.push_back(complex_json(z));
    list.push_back({{"location", e.location},
                    {"residual", e.residual},
                    {"stability", to_string(e.stability)},
                    {"eigenvalues", ev}});
  }
  json j = {{"model", config.model.name},
            {"parameter", system.lambda_name()},
            {"lambda", lambda},
            {"seeds", search.seeds},
            {"nonconvergent_seeds", search.nonconvergent},
            {"equilibria", list}};
  log << "equilibria: " << search.equilibria.size() << " at " << system.lambda_name() << "="
      << lambda << '\n';
  if (config.equilibria.fold_interval) {
    FoldOptions fo;
    fo.lower = lower;
    fo.upper = upper;
    fo.per_axis = config.equilibria.per_axis;
    const auto [a, b] = *config.equilibria.fold_interval;
    const double fold = detect_fold(system, a, b, config.equilibria.tol, fo);
    j["fold"] = fold;
    log << "equilibria: fold at " << system.lambda_name() << "=" << std::setprecision(8) << fold
        << std::setprecision(6) << '\n';
  }
  if (config.equilibria.hopf_interval) {
    const auto [a, b] = *config.equilibria.hopf_interval;
    const HopfResult h = detect_hopf(system, *config.equilibria.hopf_seed, a, b, config.equilibria.tol);
    j["hopf"] = {{"lambda", h.lambda}, {"location", h.location}, {"eigenvalue", complex_json(h.eigenvalue)}};
    log << "equilibria: Hopf at " << system.lambda_name() << "=" << std::setprecision(8) << h.lambda
        << std::setprecision(6) << '\n';
  }
  const fs::path out = dir / ("equilibria_" + format_double(lambda) + ".json");
  write_text(out, j.dump(2) + "\n");
}

void analyze_distance(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  std::vector<fs::path> files = options.families;
  if (files.empty()) {
    for (const auto& f : config.distance.families) {
      fs::path p(f);
      files.push_back(p.is_absolute() ? p : fs::path(config.output) / p);
    }
  }
  if (files.size() != 2) throw ValidationError("distance: needs exactly two family files");
  for (const auto& f : files) require_file(f);
  const CoveringFamily a = load_family(files[0]);
  const CoveringFamily b = load_family(files[1]);
  const int depth =
      options.depth.value_or(config.distance.depth.value_or(std::min(a.depth(), b.depth())));
  if (!a.tree.has_depth(depth) || !b.tree.has_depth(depth)) {
    throw ValidationError("distance: depth " + std::to_string(depth) + " missing in a family");
  }
  DistanceSampling sampling;
  sampling.points_per_axis = config.distance.points_per_axis;
  const unsigned w = options.workers.value_or(config.workers);
  const BoxSet sa = BoxSet::from_tree(a.tree, depth);
  const BoxSet sb = BoxSet::from_tree(b.tree, depth);
  const double ab = directed_distance(sa, sb, sampling, w);
  const double ba = directed_distance(sb, sa, sampling, w);
  json j = {{"a", files[0].filename().string()},
            {"b", files[1].filename().string()},
            {"depth", depth},
            {"points_per_axis", sampling.points_per_axis},
            {"vertices", sampling.vertices},
            {"directed_ab", ab},
            {"directed_ba", ba},
            {"hausdorff", std::max(ab, ba)}};
  const fs::path out = files[0].parent_path() /
                       ("distance_" + stem_of(files[0]) + "_" + stem_of(files[1]) + "_d" +
                        std::to_string(depth) + ".json");
  write_text(out, j.dump(2) + "\n");
  log << "distance: hausdorff " << std::max(ab, ba) << " (a->b " << ab << ", b->a " << ba << ")\n";
}

}  // namespace

void cmd_analyze(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  if (options.which == "lifetime") {
    analyze_lifetime(config, options, log);
  } else if (options.which == "dimension") {
    analyze_dimension(config, options, log);
  } else if (options.which == "equilibria") {
    analyze_equilibria(config, options, log);
  } else if (options.which == "distance") {
    analyze_distance(config, options, log);
  } else {
    throw ValidationError("--which: unknown analysis '" + options.which +
                          "' (supported: lifetime, dimension, equilibria, distance)");
  }
}

void cmd_export(const CommandOptions& options, std::ostream& out, std::ostream& log) {
  parse_export_format(options.format);
  if (options.families.size() != 1) throw ValidationError("--family: export needs one family file");
  const fs::path& file = options.families.front();
  require_file(file);
  const CoveringFamily family = load_family(file);
  const int depth = options.depth.value_or(family.depth());
  if (!family.tree.has_depth(depth)) {
    throw ValidationError("--depth: " + std::to_string(depth) + " exceeds the family depth " +
                          std::to_string(family.depth()));
  }
  if (options.out) {
    write_csv(*options.out, family.tree, depth);
    log << "export: " << family.tree.size(depth) << " rows to " << options.out->string() << '\n';
  } else {
    write_boxes_csv(out, family.tree, depth);
  }
}

}  // namespace boxfollow
