#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "boxfollow/box_tree.hpp"
#include "boxfollow/dynamical_map.hpp"
#include "boxfollow/sampler.hpp"

namespace boxfollow {

struct SelectionReport {
  int depth = 0;
  std::size_t boxes_before = 0;
  std::size_t boxes_after = 0;
  std::size_t map_evaluations = 0;
  std::size_t escaped_points = 0;  // image inside Q but in no retained box
  std::size_t left_domain = 0;     // image outside Q
  std::size_t failed_points = 0;
  std::size_t reintroduced = 0;
  double wall_time = 0.0;  // seconds
};

struct Provenance {
  double parent_lambda = 0.0;
  int reuse_depth = 0;  // K: snapshots 0..K were copied from the parent
};

// Per-depth coverings Q_0 ⊃ Q_1 ⊃ ... ⊃ Q_m for one parameter value.
struct CoveringFamily {
  double lambda = 0.0;
  BoxTree tree;
  std::optional<Provenance> provenance;
  // One report per recomputed depth (1..m from scratch, K+1..m continued).
  std::vector<SelectionReport> reports;

  int depth() const { return tree.deepest(); }
  std::vector<std::size_t> box_counts() const;
  std::size_t map_evaluations() const;
  std::size_t reintroduced() const;
  double wall_time() const;
  // Escaped images over evaluations in the first recomputed selection step.
  // For continued families this measures how much of f(Q_K) ∩ Q left Q_K.
  double escape_fraction() const;
};

struct SelectOptions {
  // An image inside Q but outside every candidate box re-creates the box
  // containing it.
  bool reintroduce = false;
  // Snapshots 0..frozen_through are shared with a parent family and must
  // not change; reintroduction below them counts as an escape.
  int frozen_through = -1;
  unsigned workers = 0;
  // Process boxes in a seeded random order instead of path order.
  std::optional<std::uint64_t> shuffle_seed;
};

// Selection step on the candidate snapshot at depth k: keep exactly the
// candidate boxes hit by f_lambda of at least one test point of a candidate.
SelectionReport select(BoxTree& tree, int k, const DynamicalMap& map, double lambda,
                       const SamplerSpec& spec, const SelectOptions& options = {});

// Alternating subdivision and selection from a fresh tree down to depth m.
CoveringFamily compute_attractor(BoxTree tree, const DynamicalMap& map, double lambda, int m,
                                 const SamplerSpec& spec, const SelectOptions& options = {});

}  // namespace boxfollow
