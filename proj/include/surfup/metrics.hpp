#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "surfup/geometry.hpp"
#include "surfup/mesh.hpp"

namespace surfup {

/// Nearest-neighbor distance from every point of `from` to the set `to`.
std::vector<double> nearest_distances(const PointCloud& from, const PointCloud& to,
                                      unsigned threads = 1);

/// Mean squared nearest-neighbor distance, both directions, summed.
double chamfer_l2(const PointCloud& p, const PointCloud& q, unsigned threads = 1);

/// Average of the two directional mean Euclidean nearest-neighbor distances.
double chamfer_l1(const PointCloud& p, const PointCloud& q, unsigned threads = 1);

struct EmdResult {
  double value = 0.0;       ///< mean matched distance
  bool exact = true;        ///< Hungarian when true, auction otherwise
  double relative_gap = 0.0;
};

inline constexpr std::size_t kExactEmdLimit = 1024;

/// Minimum mean Euclidean distance over bijections. Exact up to
/// kExactEmdLimit points, auction approximation (gap <= 1%) above.
/// Throws SizeMismatch when the sizes differ.
EmdResult emd_detailed(const PointCloud& p, const PointCloud& q);
inline double emd(const PointCloud& p, const PointCloud& q) { return emd_detailed(p, q).value; }

struct P2fResult {
  double mean = 0.0;
  double max = 0.0;
  std::vector<double> per_point;
};

/// Exact point-to-surface distances. Throws EmptyMesh.
P2fResult p2f(const PointCloud& p, const TriangleMesh& mesh, unsigned threads = 1);

/// Number of uniformity seeds for a cloud of n points.
std::size_t default_uniformity_seeds(std::size_t n);

/// Score for one disk-area fraction given explicit seed indices.
struct UniformityTerms {
  double score = 0.0;         ///< mean over seeds of imbalance * clutter
  double mean_imbalance = 0.0;
  double mean_clutter = 0.0;
};
UniformityTerms uniformity_terms(const PointCloud& p, double fraction,
                                 std::span<const std::size_t> seeds);

/// Imbalance-times-clutter uniformity score at each area fraction, with
/// num_seeds farthest-point seeds starting from point 0. Expects a cloud
/// normalized to the unit sphere. Keys are the fractions as given.
std::map<double, double> uniformity(const PointCloud& p, std::span<const double> fractions,
                                    std::size_t num_seeds);

/// Translate to the bounding-box center and scale so the farthest point lies
/// on the unit sphere.
PointCloud normalize_to_unit_sphere(const PointCloud& p);

inline const std::vector<double> kTableRadii{0.004, 0.006, 0.008, 0.010};

struct MetricsReport {
  double cd_l2 = 0.0;
  double cd_l1 = 0.0;
  std::optional<double> emd;
  std::optional<double> p2f_mean;
  std::optional<double> p2f_max;
  std::map<double, double> uniformity;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct EvalOptions {
  std::vector<double> uniformity_radii = kTableRadii;
  std::size_t uniformity_seeds = 0; ///< 0 selects default_uniformity_seeds()
  bool compute_emd = true;
  unsigned threads = 1;
};

/// All metrics of `pred` against `gt` (and `mesh` when present). EMD is
/// left empty when the sizes differ, P2F when there is no mesh. Uniformity
/// is measured on `pred` after normalize_to_unit_sphere.
MetricsReport evaluate(const PointCloud& pred, const PointCloud& gt, const TriangleMesh* mesh,
                       const EvalOptions& opts = {});

/// Flat `key=value` lines in a fixed order, values printed round-trip exact.
std::string to_text(const MetricsReport& r);
MetricsReport report_from_text(const std::string& text);

/// JSON object with keys cd_l2, cd_l1, emd, p2f_mean, p2f_max and
/// uniformity.<fraction>; absent fields are omitted.
std::string to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& json);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

} // namespace surfup
