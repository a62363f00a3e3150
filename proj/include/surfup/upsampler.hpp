#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "surfup/geometry.hpp"
#include "surfup/patch_fit.hpp"

namespace surfup {

enum class OffsetPattern { ring_grid, halton };

std::string to_string(OffsetPattern p);
/// Accepts "ring", "ring_grid", "halton". Throws InvalidConfig otherwise.
OffsetPattern parse_offset_pattern(const std::string& s);

struct UpsampleConfig {
  std::vector<int> ratios{1, 4};
  std::size_t k = 16;
  OffsetPattern offset_pattern = OffsetPattern::ring_grid;
  double offset_radius = 0.5;   ///< fraction of the neighborhood scale
  double noise_level = 0.0;     ///< Gaussian sigma as a fraction of the bbox diagonal
  std::uint64_t rng_seed = 0;
  double lambda = 0.01;         ///< displacement-loss weight in the combined loss
  bool pin_origin = true;       ///< reset a_1 so every patch passes through its parent
  unsigned threads = 1;
  FitOptions fit;

  /// Throws InvalidConfig on the first violated invariant.
  void validate() const;
};

struct ChildOffset {
  double du, dv;
  friend bool operator==(const ChildOffset&, const ChildOffset&) = default;
};

/// m offsets in the unit-scale parameter disk of radius `radius`. The first
/// offset is always (0, 0). RING_GRID puts the remaining m - 1 on
/// ceil((m - 1) / 6) concentric rings; HALTON draws them from the (2, 3)
/// Halton sequence mapped area-uniformly onto the disk, starting at an index
/// derived from (parent_index, seed).
std::vector<ChildOffset> child_offsets(std::size_t m, OffsetPattern pattern, double radius,
                                       std::size_t parent_index, std::uint64_t seed);

struct StageOutput {
  PointCloud cloud;
  /// One entry per parent; nullopt where the neighborhood was degenerate
  /// and the parent was duplicated instead.
  std::vector<std::optional<FitReport>> patches;
  double mean_displacement_loss = 0.0;
  double mean_rms_residual = 0.0;
  std::size_t degenerate_parents = 0;
};

/// Fits a patch per parent and lifts m child offsets onto it. Children are
/// grouped by parent, parents in input order. Throws KTooLarge when the
/// cloud has fewer than cfg.k points.
StageOutput upsample_stage(const PointCloud& cloud, int m, const UpsampleConfig& cfg);

struct UpsampleResult {
  PointCloud cloud;
  std::vector<StageOutput> stages;
};

/// Optional noise, then one stage per ratio. Final size = N * prod(ratios).
UpsampleResult upsample_detailed(const PointCloud& cloud, const UpsampleConfig& cfg);

inline PointCloud upsample(const PointCloud& cloud, const UpsampleConfig& cfg) {
  return upsample_detailed(cloud, cfg).cloud;
}

/// Independent N(0, sigma^2) per coordinate, sigma = level * bbox diagonal.
/// Deterministic per seed; level 0 returns the cloud unchanged.
PointCloud add_noise(const PointCloud& cloud, double level, std::uint64_t seed);

} // namespace surfup
