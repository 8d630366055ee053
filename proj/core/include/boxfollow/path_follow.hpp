#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "boxfollow/subdivision.hpp"

namespace boxfollow {

// How the reuse depth K is chosen for each continuation step.
struct KPolicy {
  enum class Kind { kFixed, kAdaptive };
  Kind kind = Kind::kFixed;
  int K = 0;  // fixed K
  // Adaptive: start from K = m - stride; on an escape fraction above the
  // threshold or a lost attractor, retry with K reduced by stride down to 0.
  int stride = 4;
  double escape_threshold = 1e-3;

  static KPolicy fixed(int K) { return {Kind::kFixed, K, 4, 1e-3}; }
  static KPolicy adaptive(int stride = 4, double threshold = 1e-3) {
    return {Kind::kAdaptive, 0, stride, threshold};
  }
};

struct Schedule {
  double lambda0 = 0.0;
  double step = 0.0;  // may be negative
  int count = 1;      // number of continuation steps after the initial family
  int m = 0;          // final depth of every family
  KPolicy policy;

  double lambda_at(int j) const { return lambda0 + step * static_cast<double>(j); }
  void validate() const;
};

struct StepDiagnostics {
  int index = 0;  // schedule index j (0 = computed from scratch)
  double lambda = 0.0;
  std::optional<int> K;  // absent for the initial family
  double escape_fraction = 0.0;
  std::size_t reintroduced = 0;
  std::size_t map_evaluations = 0;
  int retries = 0;
  double wall_time = 0.0;
  std::vector<std::size_t> box_counts;
};

struct ContinuationRun {
  std::vector<CoveringFamily> families;  // empty when keep_families is off
  std::vector<StepDiagnostics> steps;
};

struct FollowOptions {
  bool reintroduce = true;
  unsigned workers = 0;
  bool keep_families = true;
};

// One continuation step: copy snapshots 0..K of `parent`, then m-K subdivision and
// selection steps with f_{lambda_next}. Throws AttractorLost when a
// selection empties the covering.
CoveringFamily continue_step(const CoveringFamily& parent, double lambda_next, int K,
                             const DynamicalMap& map, const SamplerSpec& spec,
                             const FollowOptions& options = {});

// Called after every family (initial one included); used for persistence.
using FamilyObserver = std::function<void(const CoveringFamily&, const StepDiagnostics&)>;

// Initial family from scratch at lambda0 (or the given resume family at
// resume_index), then continuation over the schedule.
ContinuationRun run_schedule(const Schedule& schedule, const DynamicalMap& map,
                             const SamplerSpec& spec, const Vector& lower, const Vector& upper,
                             const FollowOptions& options = {},
                             const FamilyObserver& observer = {},
                             std::optional<std::pair<int, CoveringFamily>> resume = std::nullopt);

struct FeasibilityReport {
  int K = 0;
  int source_depth = 0;
  double lambda_next = 0.0;
  std::size_t points = 0;
  std::size_t escaped = 0;      // image inside Q but outside Q_K
  std::size_t left_domain = 0;  // image outside Q
  std::size_t failed = 0;
  double escape_fraction = 0.0;      // escaped over successful evaluations
  double max_escape_distance = 0.0;  // largest distance of an escaped image to Q_K
  bool flagged = false;              // escape_fraction > threshold
};

// Maps the test points of the depth-K snapshot (or of the finer snapshot
// at source_depth) under f_{lambda_next} and measures how many images leave
// Q_K. A practical surrogate for the (uncomputable) feasibility of
// lambda_next for K. Q_K is in general not forward invariant, so images of
// its outer boxes may leave it even for lambda_next = lambda; the deepest
// snapshot is the closer stand-in for the attractor itself.
FeasibilityReport feasibility_diagnostics(const CoveringFamily& family, int K,
                                          const DynamicalMap& map, double lambda_next,
                                          const SamplerSpec& spec, double threshold = 1e-3,
                                          unsigned workers = 0,
                                          std::optional<int> source_depth = std::nullopt);

}  // namespace boxfollow
