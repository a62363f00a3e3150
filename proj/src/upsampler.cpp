#include "surfup/upsampler.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "surfup/error.hpp"
#include "surfup/kdtree.hpp"
#include "surfup/parallel.hpp"

namespace surfup {

std::string to_string(OffsetPattern p) {
  return p == OffsetPattern::ring_grid ? "ring" : "halton";
}

OffsetPattern parse_offset_pattern(const std::string& s) {
  if (s == "ring" || s == "ring_grid")
    return OffsetPattern::ring_grid;
  if (s == "halton")
    return OffsetPattern::halton;
  throw InvalidConfig("unknown offset pattern '" + s + "' (expected ring or halton)");
}

void UpsampleConfig::validate() const {
  if (ratios.empty())
    throw InvalidConfig("at least one upscale ratio is required");
  for (int r : ratios)
    if (r < 1)
      throw InvalidConfig("upscale ratios must be >= 1");
  if (k < 1)
    throw InvalidConfig("k must be >= 1");
  if (!(noise_level >= 0.0) || !std::isfinite(noise_level))
    throw InvalidConfig("noise level must be a finite value >= 0");
  if (!(offset_radius > 0.0 && offset_radius <= 1.0))
    throw InvalidConfig("offset radius must lie in (0, 1]");
  if (!std::isfinite(lambda))
    throw InvalidConfig("lambda must be finite");
  if (!(fit.ridge >= 0.0) || fit.refinement_sweeps < 0)
    throw InvalidConfig("fit options must be non-negative");
}

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

void ring_offsets(std::size_t count, double radius, std::vector<ChildOffset>& out) {
  const std::size_t rings = (count + 5) / 6;
  for (std::size_t l = 1; l <= rings; ++l) {
    // Even split; the outer rings take the remainder.
    std::size_t n = count / rings + ((rings - l) < count % rings ? 1 : 0);
    const double r = radius * static_cast<double>(l) / static_cast<double>(rings);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    const double phase = std::numbers::pi / 2.0 + (l % 2 == 1 ? 0.0 : 0.5 * step);
    for (std::size_t t = 0; t < n; ++t) {
      const double a = phase + step * static_cast<double>(t);
      out.push_back({r * std::cos(a), r * std::sin(a)});
    }
  }
}

} // namespace

std::vector<ChildOffset> child_offsets(std::size_t m, OffsetPattern pattern, double radius,
                                       std::size_t parent_index, std::uint64_t seed) {
  std::vector<ChildOffset> out;
  if (m == 0)
    return out;
  out.reserve(m);
  out.push_back({0.0, 0.0});
  if (m == 1)
    return out;
  if (pattern == OffsetPattern::ring_grid) {
    ring_offsets(m - 1, radius, out);
    return out;
  }
  const std::uint64_t start =
      (1 + static_cast<std::uint64_t>(m) * parent_index + 7919u * seed) & 0xffffffffu;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const std::uint64_t idx = start + j + 1;
    const double r = radius * std::sqrt(radical_inverse(idx, 2));
    const double a = 2.0 * std::numbers::pi * radical_inverse(idx, 3);
    out.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

StageOutput upsample_stage(const PointCloud& cloud, int m, const UpsampleConfig& cfg) {
  if (m < 1)
    throw InvalidConfig("upscale ratio must be >= 1");
  if (cloud.size() < cfg.k)
    throw KTooLarge("cloud has " + std::to_string(cloud.size()) + " points, fewer than k=" +
                    std::to_string(cfg.k));
  const std::size_t n = cloud.size();
  const auto mm = static_cast<std::size_t>(m);
  const KnnIndex index(cloud);

  std::vector<Point3> children(n * mm);
  std::vector<std::optional<FitReport>> patches(n);
  parallel_for(n, cfg.threads, [&](std::size_t p) {
    Point3* dst = children.data() + p * mm;
    std::optional<FitReport> fit;
    try {
      fit = fit_patch(index, p, cfg.k, cfg.fit);
    } catch (const DegenerateNeighborhood&) {
      for (std::size_t c = 0; c < mm; ++c)
        dst[c] = cloud[p];
      return;
    }
    if (cfg.pin_origin)
      fit->patch.coeffs[0] = 0.0;
    const std::vector<ChildOffset> offsets =
        child_offsets(mm, cfg.offset_pattern, cfg.offset_radius, p, cfg.rng_seed);
    for (std::size_t c = 0; c < mm; ++c)
      dst[c] = patch_lift(fit->patch, offsets[c].du, offsets[c].dv);
    patches[p] = std::move(fit);
  });

  std::vector<double> disp, rms;
  std::size_t degenerate = 0;
  for (const auto& f : patches) {
    if (!f) {
      ++degenerate;
      continue;
    }
    disp.push_back(f->displacement_loss);
    rms.push_back(f->rms_residual);
  }
  StageOutput out{PointCloud(std::move(children)), std::move(patches), pairwise_mean(disp),
                  pairwise_mean(rms), degenerate};
  return out;
}

UpsampleResult upsample_detailed(const PointCloud& cloud, const UpsampleConfig& cfg) {
  cfg.validate();
  PointCloud current = add_noise(cloud, cfg.noise_level, cfg.rng_seed);
  if (current.size() < cfg.k)
    throw KTooLarge("cloud has " + std::to_string(current.size()) + " points, fewer than k=" +
                    std::to_string(cfg.k));
  std::vector<StageOutput> stages;
  for (int r : cfg.ratios) {
    StageOutput s = upsample_stage(current, r, cfg);
    current = s.cloud;
    stages.push_back(std::move(s));
  }
  return {std::move(current), std::move(stages)};
}

PointCloud add_noise(const PointCloud& cloud, double level, std::uint64_t seed) {
  if (!(level >= 0.0))
    throw InvalidConfig("noise level must be >= 0");
  if (level == 0.0)
    return cloud;
  const double sigma = level * cloud.bbox().diagonal();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<Point3> out(cloud.begin(), cloud.end());
  for (Point3& p : out)
    for (int a = 0; a < 3; ++a)
      p[a] += gauss(rng);
  return PointCloud(std::move(out));
}

} // namespace surfup
