#include "boxfollow/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "boxfollow/dynamical_map.hpp"
#include "boxfollow/sampler.hpp"

namespace boxfollow {

BoxSet BoxSet::from_tree(const BoxTree& tree, int k) {
  const std::size_t n = tree.dimension();
  BoxSet s(n);
  Vector lo(n), hi(n);
  for (PathBits p : tree.snapshot(k)) {
    tree.box_bounds(k, p, lo, hi);
    s.add(lo, hi);
  }
  return s;
}

BoxSet BoxSet::from_boxes(const std::vector<Box>& boxes) {
  BoxSet s(boxes.empty() ? 0 : boxes.front().dimension());
  Vector lo, hi;
  for (const auto& b : boxes) {
    lo.resize(b.dimension());
    hi.resize(b.dimension());
    for (std::size_t i = 0; i < b.dimension(); ++i) {
      lo[i] = b.center[i] - b.radius[i];
      hi[i] = b.center[i] + b.radius[i];
    }
    s.add(lo, hi);
  }
  return s;
}

void BoxSet::add(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != n_ || hi.size() != n_) throw ValidationError("BoxSet: dimension mismatch");
  lo_.insert(lo_.end(), lo.begin(), lo.end());
  hi_.insert(hi_.end(), hi.begin(), hi.end());
}

double point_box_distance(std::span<const double> x, std::span<const double> lo,
                          std::span<const double> hi) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = 0.0;
    if (x[i] < lo[i]) {
      d = lo[i] - x[i];
    } else if (x[i] > hi[i]) {
      d = x[i] - hi[i];
    }
    s += d * d;
  }
  return std::sqrt(s);
}

namespace {
constexpr std::size_t kLeafSize = 8;

double box_distance2(std::span<const double> x, const double* lo, const double* hi) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = 0.0;
    if (x[i] < lo[i]) {
      d = lo[i] - x[i];
    } else if (x[i] > hi[i]) {
      d = x[i] - hi[i];
    }
    s += d * d;
  }
  return s;
}
}  // namespace

BoxIndex::BoxIndex(BoxSet boxes) : boxes_(std::move(boxes)), n_(boxes_.dimension()) {
  if (boxes_.empty()) throw ValidationError("BoxIndex: empty box set");
  order_.resize(boxes_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::vector<double> centers(boxes_.size() * n_);
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    for (std::size_t a = 0; a < n_; ++a) {
      centers[i * n_ + a] = 0.5 * (boxes_.lo(i)[a] + boxes_.hi(i)[a]);
    }
  }
  build(0, order_.size(), centers);
}

int BoxIndex::build(std::size_t begin, std::size_t end, std::vector<double>& centers) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1});
  node_lo_.resize(node_lo_.size() + n_, std::numeric_limits<double>::infinity());
  node_hi_.resize(node_hi_.size() + n_, -std::numeric_limits<double>::infinity());
  double* lo = node_lo_.data() + static_cast<std::size_t>(id) * n_;
  double* hi = node_hi_.data() + static_cast<std::size_t>(id) * n_;
  Vector cmin(n_, std::numeric_limits<double>::infinity());
  Vector cmax(n_, -std::numeric_limits<double>::infinity());
  for (std::size_t i = begin; i < end; ++i) {
    const std::size_t b = order_[i];
    for (std::size_t a = 0; a < n_; ++a) {
      lo[a] = std::min(lo[a], boxes_.lo(b)[a]);
      hi[a] = std::max(hi[a], boxes_.hi(b)[a]);
      cmin[a] = std::min(cmin[a], centers[b * n_ + a]);
      cmax[a] = std::max(cmax[a], centers[b * n_ + a]);
    }
  }
  if (end - begin <= kLeafSize) return id;
  std::size_t axis = 0;
  for (std::size_t a = 1; a < n_; ++a) {
    if (cmax[a] - cmin[a] > cmax[axis] - cmin[axis]) axis = a;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t p, std::size_t q) {
                     return centers[p * n_ + axis] < centers[q * n_ + axis];
                   });
  const int left = build(begin, mid, centers);
  const int right = build(mid, end, centers);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double BoxIndex::node_distance2(int node, std::span<const double> x) const {
  const auto off = static_cast<std::size_t>(node) * n_;
  return box_distance2(x, node_lo_.data() + off, node_hi_.data() + off);
}

void BoxIndex::query(int node, std::span<const double> x, double& best2) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (nd.left < 0) {
    for (std::size_t i = nd.begin; i < nd.end && best2 > 0.0; ++i) {
      const std::size_t b = order_[i];
      best2 = std::min(best2, box_distance2(x, boxes_.lo(b).data(), boxes_.hi(b).data()));
    }
    return;
  }
  double dl = node_distance2(nd.left, x);
  double dr = node_distance2(nd.right, x);
  int first = nd.left, second = nd.right;
  if (dr < dl) {
    std::swap(first, second);
    std::swap(dl, dr);
  }
  if (dl < best2) query(first, x, best2);
  if (dr < best2) query(second, x, best2);
}

double BoxIndex::distance(std::span<const double> x) const {
  if (x.size() != n_) throw ValidationError("BoxIndex: point dimension mismatch");
  double best2 = std::numeric_limits<double>::infinity();
  query(0, x, best2);
  return std::sqrt(best2);
}

double directed_distance(const BoxSet& a, const BoxSet& b, const DistanceSampling& sampling,
                         unsigned workers) {
  if (a.empty() || b.empty()) throw ValidationError("directed_distance: empty box set");
  if (a.dimension() != b.dimension()) throw ValidationError("directed_distance: dimension mismatch");
  if (sampling.points_per_axis < 0) throw ValidationError("directed_distance: bad sampling density");
  const std::size_t n = a.dimension();
  const BoxIndex index(b);
  SamplerSpec grid;
  grid.points_per_axis = sampling.points_per_axis;
  const unsigned w = resolve_workers(workers);
  std::vector<double> best(w, 0.0);
  std::vector<PointCloud> clouds(w, PointCloud(n));
  parallel_for(a.size(), w, [&](unsigned wi, std::size_t i) {
    auto lo = a.lo(i);
    auto hi = a.hi(i);
    double local = best[wi];
    if (sampling.points_per_axis > 0) {
      sample_test_points(lo, hi, 0, 0, grid, clouds[wi]);
      for (std::size_t p = 0; p < clouds[wi].size(); ++p) {
        local = std::max(local, index.distance(clouds[wi][p]));
      }
    }
    if (sampling.vertices) {
      Vector v(n);
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        for (std::size_t d = 0; d < n; ++d) v[d] = ((mask >> d) & 1U) ? hi[d] : lo[d];
        local = std::max(local, index.distance(v));
      }
    }
    best[wi] = local;
  });
  return *std::max_element(best.begin(), best.end());
}

double hausdorff(const BoxSet& a, const BoxSet& b, const DistanceSampling& sampling,
                 unsigned workers) {
  return std::max(directed_distance(a, b, sampling, workers),
                  directed_distance(b, a, sampling, workers));
}

}  // namespace boxfollow
