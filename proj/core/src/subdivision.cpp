#include "boxfollow/subdivision.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

namespace boxfollow {

std::vector<std::size_t> CoveringFamily::box_counts() const {
  std::vector<std::size_t> out;
  for (int k = 0; k <= tree.deepest(); ++k) out.push_back(tree.size(k));
  return out;
}

std::size_t CoveringFamily::map_evaluations() const {
  std::size_t s = 0;
  for (const auto& r : reports) s += r.map_evaluations;
  return s;
}

std::size_t CoveringFamily::reintroduced() const {
  std::size_t s = 0;
  for (const auto& r : reports) s += r.reintroduced;
  return s;
}

double CoveringFamily::wall_time() const {
  double s = 0.0;
  for (const auto& r : reports) s += r.wall_time;
  return s;
}

double CoveringFamily::escape_fraction() const {
  if (reports.empty() || reports.front().map_evaluations == 0) return 0.0;
  return static_cast<double>(reports.front().escaped_points) /
         static_cast<double>(reports.front().map_evaluations);
}

namespace {

struct WorkerState {
  std::unique_ptr<MapEvaluator> evaluator;
  PointCloud points;
  Vector lo, hi, image;
  std::vector<unsigned char> hits;
  std::vector<PathBits> reintroduce;
  std::size_t evaluations = 0;
  std::size_t escaped = 0;
  std::size_t left = 0;
  std::size_t failed = 0;
};

}  // namespace

SelectionReport select(BoxTree& tree, int k, const DynamicalMap& map, double lambda,
                       const SamplerSpec& spec, const SelectOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!tree.has_depth(k) || k == 0) {
    throw ValidationError("select: no candidate snapshot at depth " + std::to_string(k));
  }
  if (tree.is_final(k)) {
    throw ValidationError("select: depth " + std::to_string(k) + " is not a fresh subdivision");
  }
  const std::size_t n = tree.dimension();
  if (map.dimension() != n) throw ValidationError("select: map and tree dimensions differ");
  spec.validate(n);

  const auto& candidates = tree.snapshot(k);
  const std::size_t count = candidates.size();

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (options.shuffle_seed) {
    std::mt19937_64 rng(*options.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  const unsigned workers = resolve_workers(options.workers);
  std::vector<WorkerState> states(workers);

  parallel_for(count, workers, [&](unsigned w, std::size_t i) {
    WorkerState& st = states[w];
    if (!st.evaluator) {
      st.evaluator = map.bind(lambda);
      st.lo.resize(n);
      st.hi.resize(n);
      st.image.resize(n);
      st.hits.assign(count, 0);
    }
    const std::size_t box_index = order[i];
    const PathBits path = candidates[box_index];
    tree.box_bounds(k, path, st.lo, st.hi);
    sample_test_points(st.lo, st.hi, k, path, spec, st.points);
    for (std::size_t p = 0; p < st.points.size(); ++p) {
      ++st.evaluations;
      if (!st.evaluator->apply(st.points[p], st.image)) {
        ++st.failed;
        continue;
      }
      const auto target = tree.path_of(st.image, k);
      if (!target) {
        ++st.left;
        continue;
      }
      auto it = std::lower_bound(candidates.begin(), candidates.end(), *target);
      if (it != candidates.end() && *it == *target) {
        st.hits[static_cast<std::size_t>(it - candidates.begin())] = 1;
      } else if (options.reintroduce &&
                 tree.frozen_chain_present(k, *target, options.frozen_through)) {
        st.reintroduce.push_back(*target);
      } else {
        ++st.escaped;
      }
    }
  });

  SelectionReport report;
  report.depth = k;
  report.boxes_before = count;
  std::vector<unsigned char> keep(count, 0);
  std::vector<PathBits> reintroduce;
  for (auto& st : states) {
    report.map_evaluations += st.evaluations;
    report.escaped_points += st.escaped;
    report.left_domain += st.left;
    report.failed_points += st.failed;
    if (!st.hits.empty()) {
      for (std::size_t i = 0; i < count; ++i) keep[i] |= st.hits[i];
    }
    reintroduce.insert(reintroduce.end(), st.reintroduce.begin(), st.reintroduce.end());
  }
  if (report.map_evaluations > 0 && report.failed_points == report.map_evaluations) {
    throw IntegrationError("select: every test point failed at depth " + std::to_string(k), 0.0);
  }

  // Single-writer phase.
  tree.retain(k, keep);
  std::sort(reintroduce.begin(), reintroduce.end());
  reintroduce.erase(std::unique(reintroduce.begin(), reintroduce.end()), reintroduce.end());
  for (PathBits p : reintroduce) {
    if (tree.insert_path(k, p, options.frozen_through).outcome == InsertOutcome::kInserted) {
      ++report.reintroduced;
    }
  }
  tree.mark_final(k);
  report.boxes_after = tree.size(k);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

CoveringFamily compute_attractor(BoxTree tree, const DynamicalMap& map, double lambda, int m,
                                 const SamplerSpec& spec, const SelectOptions& options) {
  if (tree.deepest() != 0) throw ValidationError("compute_attractor: expected a fresh tree");
  if (m < 0 || m > kMaxDepth) throw ValidationError("compute_attractor: depth out of range");
  CoveringFamily family{lambda, std::move(tree), std::nullopt, {}};
  for (int k = 1; k <= m; ++k) {
    family.tree.subdivide_depth(k - 1);
    family.reports.push_back(select(family.tree, k, map, lambda, spec, options));
    if (family.tree.size(k) == 0) throw AttractorLost(lambda, k);
  }
  return family;
}

}  // namespace boxfollow
