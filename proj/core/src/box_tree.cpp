#include "boxfollow/box_tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace boxfollow {

double Box::diameter() const {
  double s = 0.0;
  for (double r : radius) s += 4.0 * r * r;
  return std::sqrt(s);
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < center.size(); ++i) {
    if (std::abs(x[i] - center[i]) > radius[i]) return false;
  }
  return true;
}

BoxTree::BoxTree(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {}

BoxTree BoxTree::create_root(Vector lower, Vector upper) {
  if (lower.empty()) throw ValidationError("root box needs dimension >= 1");
  if (lower.size() != upper.size()) {
    throw ValidationError("root box bounds have different dimensions (" +
                          std::to_string(lower.size()) + " vs " + std::to_string(upper.size()) + ")");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i])) {
      throw ValidationError("degenerate root interval on axis " + std::to_string(i) + ": [" +
                            std::to_string(lower[i]) + ", " + std::to_string(upper[i]) + "]");
    }
  }
  BoxTree tree(std::move(lower), std::move(upper));
  tree.snapshots_.push_back({0});
  tree.final_.push_back(1);
  return tree;
}

void BoxTree::require_depth(int k, const char* what) const {
  if (!has_depth(k)) {
    throw ValidationError(std::string(what) + ": no snapshot at depth " + std::to_string(k) +
                          " (deepest is " + std::to_string(deepest()) + ")");
  }
}

void BoxTree::check_dimension(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw ValidationError("point has dimension " + std::to_string(x.size()) + ", tree has " +
                          std::to_string(dimension()));
  }
}

bool BoxTree::is_final(int k) const {
  require_depth(k, "is_final");
  return final_[static_cast<std::size_t>(k)] != 0;
}

void BoxTree::mark_final(int k) {
  require_depth(k, "mark_final");
  final_[static_cast<std::size_t>(k)] = 1;
}

const std::vector<PathBits>& BoxTree::snapshot(int k) const {
  require_depth(k, "snapshot");
  return snapshots_[static_cast<std::size_t>(k)];
}

bool BoxTree::contains_path(int k, PathBits path) const {
  const auto& s = snapshot(k);
  return std::binary_search(s.begin(), s.end(), path);
}

std::optional<std::size_t> BoxTree::index_of(int k, PathBits path) const {
  const auto& s = snapshot(k);
  auto it = std::lower_bound(s.begin(), s.end(), path);
  if (it == s.end() || *it != path) return std::nullopt;
  return static_cast<std::size_t>(it - s.begin());
}

int BoxTree::splits(int k, std::size_t axis) const { return halvings(k, dimension(), axis); }

void BoxTree::box_bounds(int k, PathBits path, std::span<double> lo, std::span<double> hi) const {
  const int n = static_cast<int>(dimension());
  for (int a = 0; a < n; ++a) {
    double l = lower_[a];
    double h = upper_[a];
    for (int d = a; d < k; d += n) {
      const double mid = 0.5 * (l + h);
      if ((path >> (k - 1 - d)) & 1U) {
        l = mid;
      } else {
        h = mid;
      }
    }
    lo[a] = l;
    hi[a] = h;
  }
}

Box BoxTree::box(int k, PathBits path) const {
  if (k < 0 || k > kMaxDepth) throw ValidationError("box depth out of range");
  if (k < 64 && (path >> k) != 0) throw ValidationError("path longer than depth");
  const std::size_t n = dimension();
  Vector lo(n), hi(n);
  box_bounds(k, path, lo, hi);
  Box b;
  b.center.resize(n);
  b.radius.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.center[i] = 0.5 * (lo[i] + hi[i]);
    b.radius[i] = 0.5 * (hi[i] - lo[i]);
  }
  b.depth = k;
  b.path = path;
  return b;
}

std::vector<Box> BoxTree::boxes(int k) const {
  std::vector<Box> out;
  const auto& s = snapshot(k);
  out.reserve(s.size());
  for (PathBits p : s) out.push_back(box(k, p));
  return out;
}

Vector BoxTree::box_radius(int k) const {
  // Every box at one depth has the same shape.
  return box(k, 0).radius;
}

double BoxTree::box_diameter(int k) const { return box(k, 0).diameter(); }

std::optional<PathBits> BoxTree::path_of(std::span<const double> x, int k) const {
  check_dimension(x);
  if (k < 0 || k > kMaxDepth) throw ValidationError("locate depth out of range");
  const int n = static_cast<int>(dimension());
  PathBits path = 0;
  for (int a = 0; a < n; ++a) {
    const double v = x[a];
    // Written so that NaN falls out as "outside".
    if (!(v >= lower_[a] && v <= upper_[a])) return std::nullopt;
    double l = lower_[a];
    double h = upper_[a];
    for (int d = a; d < k; d += n) {
      const double mid = 0.5 * (l + h);
      if (v >= mid) {
        path |= PathBits{1} << (k - 1 - d);
        l = mid;
      } else {
        h = mid;
      }
    }
  }
  return path;
}

std::optional<PathBits> BoxTree::locate(std::span<const double> x, int k) const {
  require_depth(k, "locate");
  auto p = path_of(x, k);
  if (!p || !contains_path(k, *p)) return std::nullopt;
  return p;
}

std::optional<std::size_t> BoxTree::locate_index(std::span<const double> x, int k) const {
  require_depth(k, "locate");
  auto p = path_of(x, k);
  if (!p) return std::nullopt;
  return index_of(k, *p);
}

void BoxTree::subdivide_depth(int k) {
  require_depth(k, "subdivide_depth");
  if (!is_final(k)) throw ValidationError("subdivide_depth: depth " + std::to_string(k) +
                                          " has not been through selection");
  if (deepest() != k) throw ValidationError("subdivide_depth: depth " + std::to_string(k + 1) +
                                            " already exists");
  if (k + 1 > kMaxDepth) throw ValidationError("subdivide_depth: maximum depth reached");
  const auto& parents = snapshots_[static_cast<std::size_t>(k)];
  std::vector<PathBits> children;
  children.reserve(2 * parents.size());
  for (PathBits p : parents) {
    children.push_back(p << 1);
    children.push_back((p << 1) | 1U);
  }
  snapshots_.push_back(std::move(children));
  final_.push_back(0);
}

void BoxTree::retain(int k, std::span<const unsigned char> keep) {
  require_depth(k, "retain");
  auto& s = snapshots_[static_cast<std::size_t>(k)];
  if (keep.size() != s.size()) throw ValidationError("retain: mask size mismatch");
  std::size_t w = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (keep[i]) s[w++] = s[i];
  }
  s.resize(w);
}

std::vector<ClosureViolation> BoxTree::ancestors_closure(int k) const {
  std::vector<ClosureViolation> out;
  if (k <= 0) return out;
  const auto& parents = snapshot(k - 1);
  for (PathBits p : snapshot(k)) {
    if (!std::binary_search(parents.begin(), parents.end(), p >> 1)) out.push_back({k, p});
  }
  return out;
}

std::vector<ClosureViolation> BoxTree::ancestors_closure() const {
  std::vector<ClosureViolation> out;
  for (int k = 1; k <= deepest(); ++k) {
    auto v = ancestors_closure(k);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

bool BoxTree::insert_sorted(int k, PathBits path) {
  auto& s = snapshots_[static_cast<std::size_t>(k)];
  auto it = std::lower_bound(s.begin(), s.end(), path);
  if (it != s.end() && *it == path) return false;
  s.insert(it, path);
  return true;
}

InsertResult BoxTree::insert_box_at(std::span<const double> x, int k, int frozen_through) {
  require_depth(k, "insert_box_at");
  auto path = path_of(x, k);
  if (!path) {
    ++escaped_insertions_;
    return {InsertOutcome::kEscaped, std::nullopt};
  }
  return insert_path(k, *path, frozen_through);
}

bool BoxTree::frozen_chain_present(int k, PathBits path, int frozen_through) const {
  for (int d = 0; d <= std::min(frozen_through, k); ++d) {
    if (!contains_path(d, path >> (k - d))) return false;
  }
  return true;
}

InsertResult BoxTree::insert_path(int k, PathBits path, int frozen_through) {
  require_depth(k, "insert_path");
  if (!frozen_chain_present(k, path, frozen_through)) {
    ++escaped_insertions_;
    return {InsertOutcome::kEscaped, std::nullopt};
  }
  bool changed = false;
  for (int d = std::max(frozen_through + 1, 0); d <= k; ++d) {
    changed |= insert_sorted(d, path >> (k - d));
  }
  return {changed ? InsertOutcome::kInserted : InsertOutcome::kAlreadyRetained, path};
}

BoxTree BoxTree::prefix(int k) const {
  require_depth(k, "prefix");
  BoxTree t(lower_, upper_);
  t.snapshots_.assign(snapshots_.begin(), snapshots_.begin() + k + 1);
  t.final_.assign(final_.begin(), final_.begin() + k + 1);
  return t;
}

void BoxTree::set_snapshot(int k, std::vector<PathBits> paths, bool final) {
  if (k < 0 || k > kMaxDepth) throw ValidationError("set_snapshot: depth out of range");
  for (PathBits p : paths) {
    if (k < 64 && (p >> k) != 0) {
      throw ValidationError("set_snapshot: path does not fit depth " + std::to_string(k));
    }
  }
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  const auto need = static_cast<std::size_t>(k) + 1;
  if (snapshots_.size() < need) {
    snapshots_.resize(need);
    final_.resize(need, 1);
  }
  snapshots_[static_cast<std::size_t>(k)] = std::move(paths);
  final_[static_cast<std::size_t>(k)] = final ? 1 : 0;
}

}  // namespace boxfollow
