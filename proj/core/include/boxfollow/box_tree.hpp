#pragma once

#include <optional>
#include <span>
#include <vector>

#include "boxfollow/types.hpp"

namespace boxfollow {

// Axis-aligned box at a given tree depth, reconstructed from its path.
struct Box {
  Vector center;
  Vector radius;
  int depth = 0;
  PathBits path = 0;

  std::size_t dimension() const { return center.size(); }
  double diameter() const;
  // Closed-box membership.
  bool contains(std::span<const double> x) const;
};

enum class InsertOutcome {
  kAlreadyRetained,
  kInserted,
  kEscaped,  // outside Q, or below a frozen snapshot
};

struct InsertResult {
  InsertOutcome outcome = InsertOutcome::kEscaped;
  std::optional<PathBits> path;
};

struct ClosureViolation {
  int depth = 0;
  PathBits path = 0;  // child whose parent is missing at depth - 1
};

// Binary partition of the root box Q = [lower, upper]. The box at depth d is
// split along axis d mod n. Each depth stores an explicit, sorted snapshot of
// retained paths, so Q_k of every selection step stays available after deeper
// levels have been computed.
//
// Boxes are half-open [lo, hi) except on the upper face of Q, which is closed.
class BoxTree {
 public:
  // Empty tree without a root; only useful as a placeholder.
  BoxTree() = default;
  static BoxTree create_root(Vector lower, Vector upper);

  std::size_t dimension() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  int deepest() const { return static_cast<int>(snapshots_.size()) - 1; }
  bool has_depth(int k) const { return k >= 0 && k <= deepest(); }
  // False only for a subdivided depth that has not been through selection yet.
  bool is_final(int k) const;
  void mark_final(int k);

  const std::vector<PathBits>& snapshot(int k) const;
  std::size_t size(int k) const { return snapshot(k).size(); }
  bool contains_path(int k, PathBits path) const;
  std::optional<std::size_t> index_of(int k, PathBits path) const;

  int split_axis(int depth) const { return depth % static_cast<int>(dimension()); }
  // Number of times coordinate `axis` has been halved at depth k.
  int splits(int k, std::size_t axis) const;

  Box box(int k, PathBits path) const;
  std::vector<Box> boxes(int k) const;
  Vector box_radius(int k) const;
  double box_diameter(int k) const;
  // Extents of one box without allocating a Box; writes into lo/hi.
  void box_bounds(int k, PathBits path, std::span<double> lo, std::span<double> hi) const;

  // Depth-k path of the (not necessarily retained) box containing x, or
  // nothing when x lies outside Q.
  std::optional<PathBits> path_of(std::span<const double> x, int k) const;
  // Retained depth-k box containing x.
  std::optional<PathBits> locate(std::span<const double> x, int k) const;
  std::optional<std::size_t> locate_index(std::span<const double> x, int k) const;

  // Split every box of the final depth-k snapshot; creates the candidate
  // snapshot k+1.
  void subdivide_depth(int k);

  // Replace the candidate snapshot at depth k by the subset flagged in keep.
  void retain(int k, std::span<const unsigned char> keep);

  std::vector<ClosureViolation> ancestors_closure(int k) const;
  std::vector<ClosureViolation> ancestors_closure() const;

  // Mark the depth-k box containing x and its whole ancestor chain as
  // retained. Depths <= frozen_through are never modified: if the chain is
  // missing there, the insertion counts as an escape.
  InsertResult insert_box_at(std::span<const double> x, int k, int frozen_through = -1);
  // Same, for a depth-k path that is already known to lie inside Q.
  InsertResult insert_path(int k, PathBits path, int frozen_through = -1);
  // True when every ancestor of `path` at depths 0..min(frozen_through, k) is retained.
  bool frozen_chain_present(int k, PathBits path, int frozen_through) const;
  std::size_t escaped_insertions() const { return escaped_insertions_; }

  // Copy of snapshots 0..k.
  BoxTree prefix(int k) const;

  // Raw access used by deserialization and test harnesses. Paths are sorted
  // and deduplicated; no closure check is performed.
  void set_snapshot(int k, std::vector<PathBits> paths, bool final = true);

  friend bool operator==(const BoxTree& a, const BoxTree& b) {
    return a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.snapshots_ == b.snapshots_ &&
           a.final_ == b.final_;
  }

 private:
  BoxTree(Vector lower, Vector upper);
  void require_depth(int k, const char* what) const;
  void check_dimension(std::span<const double> x) const;
  bool insert_sorted(int k, PathBits path);

  Vector lower_;
  Vector upper_;
  std::vector<std::vector<PathBits>> snapshots_;
  std::vector<unsigned char> final_;
  std::size_t escaped_insertions_ = 0;
};

// Number of halvings of coordinate `axis` after k cycling bisections in n
// dimensions: floor((k + n - 1 - axis) / n).
inline int halvings(int k, std::size_t n, std::size_t axis) {
  return (k + static_cast<int>(n) - 1 - static_cast<int>(axis)) / static_cast<int>(n);
}

}  // namespace boxfollow
