#include "boxfollow/path_follow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "boxfollow/distance.hpp"

namespace boxfollow {

void Schedule::validate() const {
  if (count < 1) throw ValidationError("schedule: count must be at least 1");
  if (!(step != 0.0) || !std::isfinite(step)) throw ValidationError("schedule: step must be non-zero");
  if (m < 0 || m > kMaxDepth) throw ValidationError("schedule: depth m out of range");
  if (policy.kind == KPolicy::Kind::kFixed && (policy.K < 0 || policy.K > m)) {
    throw ValidationError("schedule: K must satisfy 0 <= K <= m");
  }
  if (policy.kind == KPolicy::Kind::kAdaptive && policy.stride < 1) {
    throw ValidationError("schedule: adaptive stride must be positive");
  }
}

CoveringFamily continue_step(const CoveringFamily& parent, double lambda_next, int K,
                             const DynamicalMap& map, const SamplerSpec& spec,
                             const FollowOptions& options) {
  const int m = parent.depth();
  if (K < 0 || K > m) {
    throw ValidationError("continue_step: K=" + std::to_string(K) + " outside 0.." +
                          std::to_string(m));
  }
  CoveringFamily child{lambda_next, parent.tree.prefix(K), Provenance{parent.lambda, K}, {}};
  SelectOptions sel;
  sel.reintroduce = options.reintroduce;
  sel.frozen_through = K;
  sel.workers = options.workers;
  for (int k = K + 1; k <= m; ++k) {
    child.tree.subdivide_depth(k - 1);
    child.reports.push_back(select(child.tree, k, map, lambda_next, spec, sel));
    if (child.tree.size(k) == 0) throw AttractorLost(lambda_next, k);
  }
  return child;
}

namespace {

StepDiagnostics diagnostics_for(const CoveringFamily& f, int index, int retries) {
  StepDiagnostics d;
  d.index = index;
  d.lambda = f.lambda;
  if (f.provenance) d.K = f.provenance->reuse_depth;
  d.escape_fraction = f.provenance ? f.escape_fraction() : 0.0;
  d.reintroduced = f.reintroduced();
  d.map_evaluations = f.map_evaluations();
  d.retries = retries;
  d.wall_time = f.wall_time();
  d.box_counts = f.box_counts();
  return d;
}

}  // namespace

ContinuationRun run_schedule(const Schedule& schedule, const DynamicalMap& map,
                             const SamplerSpec& spec, const Vector& lower, const Vector& upper,
                             const FollowOptions& options, const FamilyObserver& observer,
                             std::optional<std::pair<int, CoveringFamily>> resume) {
  schedule.validate();
  ContinuationRun run;
  CoveringFamily current;
  int start = 0;
  if (resume) {
    start = resume->first;
    current = std::move(resume->second);
    if (current.depth() != schedule.m) {
      throw ValidationError("run_schedule: resume family has depth " +
                            std::to_string(current.depth()) + ", schedule wants " +
                            std::to_string(schedule.m));
    }
  } else {
    SelectOptions sel;
    sel.workers = options.workers;
    current = compute_attractor(BoxTree::create_root(lower, upper), map, schedule.lambda0,
                                schedule.m, spec, sel);
    auto d = diagnostics_for(current, 0, 0);
    if (observer) observer(current, d);
    run.steps.push_back(d);
    if (options.keep_families) run.families.push_back(current);
  }

  for (int j = start + 1; j <= schedule.count; ++j) {
    const double lambda = schedule.lambda_at(j);
    CoveringFamily next;
    int retries = 0;
    if (schedule.policy.kind == KPolicy::Kind::kFixed) {
      next = continue_step(current, lambda, schedule.policy.K, map, spec, options);
    } else {
      int K = std::max(schedule.m - schedule.policy.stride, 0);
      while (true) {
        try {
          next = continue_step(current, lambda, K, map, spec, options);
          if (K == 0 || next.escape_fraction() <= schedule.policy.escape_threshold) break;
        } catch (const AttractorLost&) {
          if (K == 0) throw;
        }
        K = std::max(K - schedule.policy.stride, 0);
        ++retries;
      }
    }
    auto d = diagnostics_for(next, j, retries);
    if (observer) observer(next, d);
    run.steps.push_back(d);
    if (options.keep_families) run.families.push_back(next);
    current = std::move(next);
  }
  return run;
}

FeasibilityReport feasibility_diagnostics(const CoveringFamily& family, int K,
                                          const DynamicalMap& map, double lambda_next,
                                          const SamplerSpec& spec, double threshold,
                                          unsigned workers, std::optional<int> source_depth) {
  const BoxTree& tree = family.tree;
  if (!tree.has_depth(K)) throw ValidationError("feasibility_diagnostics: no depth " + std::to_string(K));
  const int source = source_depth.value_or(K);
  if (!tree.has_depth(source)) {
    throw ValidationError("feasibility_diagnostics: no source depth " + std::to_string(source));
  }
  const std::size_t n = tree.dimension();
  spec.validate(n);
  const auto& boxes = tree.snapshot(source);

  struct State {
    std::unique_ptr<MapEvaluator> eval;
    PointCloud pts;
    Vector lo, hi, y;
    std::size_t points = 0, escaped = 0, left = 0, failed = 0;
    PointCloud escaped_images;
  };
  const unsigned w = resolve_workers(workers);
  std::vector<State> states(w);
  parallel_for(boxes.size(), w, [&](unsigned wi, std::size_t i) {
    State& st = states[wi];
    if (!st.eval) {
      st.eval = map.bind(lambda_next);
      st.lo.resize(n);
      st.hi.resize(n);
      st.y.resize(n);
      st.escaped_images.reset(n);
    }
    tree.box_bounds(source, boxes[i], st.lo, st.hi);
    sample_test_points(st.lo, st.hi, source, boxes[i], spec, st.pts);
    for (std::size_t p = 0; p < st.pts.size(); ++p) {
      ++st.points;
      if (!st.eval->apply(st.pts[p], st.y)) {
        ++st.failed;
        continue;
      }
      if (!tree.path_of(st.y, 0)) {
        ++st.left;
      } else if (!tree.locate(st.y, K)) {
        ++st.escaped;
        auto row = st.escaped_images.append();
        std::copy(st.y.begin(), st.y.end(), row.begin());
      }
    }
  });

  FeasibilityReport r;
  r.K = K;
  r.source_depth = source;
  r.lambda_next = lambda_next;
  const BoxSet target = BoxSet::from_tree(tree, K);
  const BoxIndex index(target);
  for (const auto& st : states) {
    r.points += st.points;
    r.escaped += st.escaped;
    r.left_domain += st.left;
    r.failed += st.failed;
    for (std::size_t i = 0; i < st.escaped_images.size(); ++i) {
      r.max_escape_distance = std::max(r.max_escape_distance, index.distance(st.escaped_images[i]));
    }
  }
  const std::size_t valid = r.points - r.failed;
  r.escape_fraction = valid == 0 ? 0.0 : static_cast<double>(r.escaped) / static_cast<double>(valid);
  r.flagged = r.escape_fraction > threshold;
  return r;
}

}  // namespace boxfollow
