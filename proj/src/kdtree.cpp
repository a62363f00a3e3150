#include "surfup/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "surfup/error.hpp"

namespace surfup {

namespace {

struct Candidate {
  double d2;
  std::size_t index;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

std::vector<Neighbor> to_neighbors(std::vector<Candidate> c) {
  std::sort(c.begin(), c.end());
  std::vector<Neighbor> out;
  out.reserve(c.size());
  for (const Candidate& x : c)
    out.push_back({x.index, std::sqrt(x.d2)});
  return out;
}

} // namespace

KnnIndex::KnnIndex(std::span<const Point3> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
  if (points_.empty())
    throw EmptyCloud();
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
  build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t KnnIndex::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = node.hi = points_[order_[begin]];
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    node.lo = node.lo.cwiseMin(points_[order_[i]]);
    node.hi = node.hi.cwiseMax(points_[order_[i]]);
  }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= leaf_size_)
    return id;

  int axis = 0;
  (node.hi - node.lo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KnnIndex::box_distance2(const Node& n, const Point3& q) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = 0.0;
    if (q[a] < n.lo[a])
      d = n.lo[a] - q[a];
    else if (q[a] > n.hi[a])
      d = q[a] - n.hi[a];
    d2 += d * d;
  }
  return d2;
}

std::vector<Neighbor> KnnIndex::knn(const Point3& q, std::size_t k) const {
  if (k == 0)
    throw InvalidConfig("knn: k must be at least 1");
  if (k > points_.size())
    throw KTooLarge("knn: k=" + std::to_string(k) + " exceeds point count " +
                    std::to_string(points_.size()));

  std::priority_queue<Candidate> heap; // max-heap on (d2, index)
  auto visit = [&](auto&& self, std::int32_t id) -> void {
    const Node& n = nodes_[id];
    if (heap.size() == k && box_distance2(n, q) > heap.top().d2)
      return;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        const Candidate c{(points_[idx] - q).squaredNorm(), idx};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    const double dl = box_distance2(nodes_[n.left], q);
    const double dr = box_distance2(nodes_[n.right], q);
    if (dl <= dr) {
      self(self, n.left);
      self(self, n.right);
    } else {
      self(self, n.right);
      self(self, n.left);
    }
  };
  visit(visit, 0);

  std::vector<Candidate> found;
  found.reserve(k);
  while (!heap.empty()) {
    found.push_back(heap.top());
    heap.pop();
  }
  return to_neighbors(std::move(found));
}

Neighbor KnnIndex::nearest(const Point3& q) const { return knn(q, 1).front(); }

std::vector<Neighbor> KnnIndex::within(const Point3& q, double radius) const {
  std::vector<Candidate> found;
  if (!(radius >= 0.0))
    return {};
  const double r2 = radius * radius;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance2(n, q) > r2)
      continue;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        const double d2 = (points_[idx] - q).squaredNorm();
        if (d2 <= r2)
          found.push_back({d2, idx});
      }
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  return to_neighbors(std::move(found));
}

std::vector<std::size_t> farthest_point_sample(std::span<const Point3> points,
                                               std::size_t m, std::size_t seed_index) {
  const std::size_t n = points.size();
  if (n == 0)
    throw EmptyCloud();
  if (m == 0)
    throw InvalidConfig("farthest_point_sample: m must be at least 1");
  if (m > n)
    throw MTooLarge("farthest_point_sample: m=" + std::to_string(m) +
                    " exceeds point count " + std::to_string(n));
  if (seed_index >= n)
    throw InvalidConfig("farthest_point_sample: seed index out of range");

  std::vector<std::size_t> picked{seed_index};
  picked.reserve(m);
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  std::size_t last = seed_index;
  while (picked.size() < m) {
    std::size_t best = n;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      min_d2[i] = std::min(min_d2[i], (points[i] - points[last]).squaredNorm());
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    }
    // Already-picked points have min_d2 == 0; with duplicates every remaining
    // point may be 0 too, so fall back to the first unpicked index.
    if (best_d2 <= 0.0) {
      std::vector<bool> taken(n, false);
      for (std::size_t p : picked)
        taken[p] = true;
      best = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
    }
    picked.push_back(best);
    last = best;
  }
  return picked;
}

} // namespace surfup
