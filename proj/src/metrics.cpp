#include "surfup/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "surfup/assignment.hpp"
#include "surfup/error.hpp"
#include "surfup/kdtree.hpp"
#include "surfup/mesh_distance.hpp"
#include "surfup/parallel.hpp"

namespace surfup {

std::vector<double> nearest_distances(const PointCloud& from, const PointCloud& to,
                                      unsigned threads) {
  const KnnIndex index(to);
  std::vector<double> d(from.size());
  parallel_for(from.size(), threads, [&](std::size_t i) { d[i] = index.nearest(from[i]).distance; });
  return d;
}

double chamfer_l2(const PointCloud& p, const PointCloud& q, unsigned threads) {
  auto directional = [&](const PointCloud& a, const PointCloud& b) {
    std::vector<double> d = nearest_distances(a, b, threads);
    for (double& x : d)
      x *= x;
    return pairwise_mean(d);
  };
  return directional(p, q) + directional(q, p);
}

double chamfer_l1(const PointCloud& p, const PointCloud& q, unsigned threads) {
  const double pq = pairwise_mean(nearest_distances(p, q, threads));
  const double qp = pairwise_mean(nearest_distances(q, p, threads));
  return 0.5 * (pq + qp);
}

EmdResult emd_detailed(const PointCloud& p, const PointCloud& q) {
  if (p.size() != q.size())
    throw SizeMismatch("EMD needs equal sizes, got " + std::to_string(p.size()) + " and " +
                       std::to_string(q.size()));
  const std::size_t n = p.size();
  EmdResult res;
  if (n <= kExactEmdLimit) {
    Eigen::MatrixXd cost(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (p[i] - q[j]).norm();
    const Assignment a = hungarian(cost);
    res.value = a.cost / static_cast<double>(n);
    return res;
  }
  const AuctionResult a =
      auction(n, [&](std::size_t i, std::size_t j) { return (p[i] - q[j]).norm(); });
  res.value = a.match.cost / static_cast<double>(n);
  res.exact = false;
  res.relative_gap = a.relative_gap;
  return res;
}

P2fResult p2f(const PointCloud& p, const TriangleMesh& mesh, unsigned threads) {
  const MeshDistanceTree tree(mesh);
  P2fResult r;
  r.per_point.resize(p.size());
  parallel_for(p.size(), threads, [&](std::size_t i) { r.per_point[i] = tree.distance(p[i]); });
  r.mean = pairwise_mean(r.per_point);
  r.max = *std::max_element(r.per_point.begin(), r.per_point.end());
  return r;
}

std::size_t default_uniformity_seeds(std::size_t n) {
  return std::min<std::size_t>(n, std::min<std::size_t>(1000, std::max<std::size_t>(16, n / 8)));
}

UniformityTerms uniformity_terms(const PointCloud& p, double fraction,
                                 std::span<const std::size_t> seeds) {
  if (!(fraction > 0.0))
    throw InvalidConfig("uniformity fraction must be positive");
  if (seeds.empty())
    throw InvalidConfig("uniformity needs at least one seed");
  const KnnIndex index(p);
  const double radius = std::sqrt(fraction);
  const double expected_count = fraction * static_cast<double>(p.size());

  std::vector<double> score(seeds.size()), imbalance(seeds.size()), clutter(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const std::vector<Neighbor> ball = index.within(p[seeds[s]], radius);
    const double count = static_cast<double>(ball.size());
    imbalance[s] = (count - expected_count) * (count - expected_count) / expected_count;

    // Fewer than two points: no in-ball neighbor, zero clutter term.
    if (ball.size() >= 2) {
      const double expected_spacing =
          std::sqrt(2.0 * std::numbers::pi * radius * radius / (std::sqrt(3.0) * count));
      std::vector<Point3> members;
      members.reserve(ball.size());
      for (const Neighbor& b : ball)
        members.push_back(p[b.index]);
      const KnnIndex local(members);
      std::vector<double> terms(members.size());
      for (std::size_t a = 0; a < members.size(); ++a) {
        // Second hit: the first is the point itself (or an exact duplicate).
        const double dev = local.knn(members[a], 2)[1].distance - expected_spacing;
        terms[a] = dev * dev / expected_spacing;
      }
      clutter[s] = pairwise_mean(terms);
    }
    score[s] = imbalance[s] * clutter[s];
  }
  return {pairwise_mean(score), pairwise_mean(imbalance), pairwise_mean(clutter)};
}

std::map<double, double> uniformity(const PointCloud& p, std::span<const double> fractions,
                                    std::size_t num_seeds) {
  if (num_seeds == 0)
    throw InvalidConfig("uniformity needs at least one seed");
  const std::vector<std::size_t> seeds =
      farthest_point_sample(p, std::min(num_seeds, p.size()), 0);
  std::map<double, double> out;
  for (double f : fractions)
    out[f] = uniformity_terms(p, f, seeds).score;
  return out;
}

PointCloud normalize_to_unit_sphere(const PointCloud& p) {
  const Point3 c = p.bbox().center();
  double r = 0.0;
  for (const Point3& x : p)
    r = std::max(r, (x - c).norm());
  std::vector<Point3> out;
  out.reserve(p.size());
  for (const Point3& x : p)
    out.push_back(r > 0.0 ? Point3((x - c) / r) : Point3(x - c));
  return PointCloud(std::move(out));
}

MetricsReport evaluate(const PointCloud& pred, const PointCloud& gt, const TriangleMesh* mesh,
                       const EvalOptions& opts) {
  MetricsReport r;
  r.cd_l2 = chamfer_l2(pred, gt, opts.threads);
  r.cd_l1 = chamfer_l1(pred, gt, opts.threads);
  if (opts.compute_emd && pred.size() == gt.size())
    r.emd = emd(pred, gt);
  if (mesh) {
    const P2fResult d = p2f(pred, *mesh, opts.threads);
    r.p2f_mean = d.mean;
    r.p2f_max = d.max;
  }
  if (!opts.uniformity_radii.empty()) {
    const std::size_t seeds =
        opts.uniformity_seeds ? opts.uniformity_seeds : default_uniformity_seeds(pred.size());
    r.uniformity = uniformity(normalize_to_unit_sphere(pred), opts.uniformity_radii, seeds);
  }
  return r;
}

} // namespace surfup
