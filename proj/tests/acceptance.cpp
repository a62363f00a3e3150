// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "../tools/cli.hpp"
#include "oracles.hpp"
#include "surfup/assignment.hpp"
#include "surfup/io.hpp"
#include "surfup/mesh_distance.hpp"
#include "surfup/metrics.hpp"
#include "surfup/parallel.hpp"
#include "surfup/patch_fit.hpp"
#include "surfup/shapes.hpp"
#include "surfup/upsampler.hpp"

using namespace surfup;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome rotation_representation() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> s(1e-3, 1e3);
  double worst_orth = 0.0, worst_det = 0.0, worst_scale = 0.0;
  for (int t = 0; t < 1000000; ++t) {
    Rotation6D r6{{g(rng), g(rng), g(rng)}, {g(rng), g(rng), g(rng)}};
    // Non-degenerate inputs only.
    if (r6.a1.norm() < 1e-6 || r6.a1.normalized().cross(r6.a2).norm() < 1e-6)
      continue;
    const Eigen::Matrix3d m = decode_rotation(r6).matrix();
    worst_orth = std::max(worst_orth, (m.transpose() * m - Eigen::Matrix3d::Identity()).norm());
    worst_det = std::max(worst_det, std::abs(m.determinant() - 1.0));
    const Eigen::Matrix3d ms = decode_rotation({r6.a1 * s(rng), r6.a2 * s(rng)}).matrix();
    worst_scale = std::max(worst_scale, (ms - m).cwiseAbs().maxCoeff());
  }
  const bool ok = worst_orth <= 1e-12 && worst_det <= 1e-12 && worst_scale <= 1e-12;
  return {ok, "max |R^T R - I|_F = " + fmt("%.3g", worst_orth) + ", max |det - 1| = " +
                  fmt("%.3g", worst_det) + ", max scale deviation = " + fmt("%.3g", worst_scale)};
}

Outcome planar_exactness() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  UpsampleConfig cfg;
  cfg.ratios = {4};
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Matrix3d r = oracle::random_rotation(rng);
    const Eigen::Vector3d origin = oracle::random_points(rng, 1, -10, 10)[0];
    std::vector<Point3> pts(2048);
    for (Point3& p : pts)
      p = r * Point3(u(rng), u(rng), 0.0) + origin;
    const PointCloud out = upsample(PointCloud(pts), cfg);
    const Eigen::Vector3d normal = r.col(2);
    for (const Point3& p : out)
      worst = std::max(worst, std::abs((p - origin).dot(normal)));
  }
  return {worst <= 1e-9, "max distance to the true plane = " + fmt("%.3g", worst)};
}

Outcome quadratic_representability() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst_coeff = 0.0, worst_res = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double a = u(rng), b = u(rng), g = u(rng);
    const double scale = 0.001 + std::abs(u(rng));
    const RotationMatrix frame = RotationMatrix::unchecked(oracle::random_rotation(rng));
    Neighborhood nbh;
    nbh.scale = scale;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const double x = -0.8 + 0.4 * i + 0.1 * u(rng), y = -0.8 + 0.4 * j + 0.1 * u(rng);
        nbh.offsets.push_back(frame * Eigen::Vector3d(x, y, a * x * x + b * x * y + g * y * y) *
                              scale);
      }
    const BicubicCoeffs c = fit_bicubic(nbh, frame);
    BicubicCoeffs want{};
    want[coeff_index(2, 0)] = a;
    want[coeff_index(1, 1)] = b;
    want[coeff_index(0, 2)] = g;
    for (std::size_t i = 0; i < 16; ++i)
      worst_coeff = std::max(worst_coeff, std::abs(c[i] - want[i]));
    worst_res = std::max(worst_res, fit_residuals(nbh, frame, c).rms_residual);
  }
  return {worst_coeff <= 1e-6 && worst_res <= 1e-9,
          "max coefficient error = " + fmt("%.3g", worst_coeff) +
              ", max residual = " + fmt("%.3g", worst_res)};
}

Outcome frame_optimality() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  std::normal_distribution<double> g;
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Matrix3d r = oracle::random_rotation(rng);
    const double c[] = {u(rng), u(rng), u(rng), u(rng), u(rng)};
    Neighborhood nbh;
    nbh.offsets.push_back(Eigen::Vector3d::Zero());
    for (int i = 0; i < 15; ++i) {
      const double x = 0.5 * u(rng), y = 0.5 * u(rng);
      const double w = c[0] * x * x + c[1] * x * y + c[2] * y * y + c[3] * x * x * x +
                       c[4] * x * y * y;
      nbh.offsets.push_back(r * Eigen::Vector3d(x, y, w));
    }
    nbh.scale = 1.0;
    auto variance = [&](const Eigen::Vector3d& d) {
      double s = 0.0;
      for (const auto& o : nbh.offsets)
        s += o.dot(d) * o.dot(d);
      return s / static_cast<double>(nbh.offsets.size());
    };
    const double chosen = variance(pca_frame(nbh).column(2));
    for (int d = 0; d < 100; ++d) {
      const Eigen::Vector3d dir = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
      worst = std::max(worst, chosen - variance(dir));
    }
  }
  return {worst <= 1e-12, "max (frame variance - direction variance) = " + fmt("%.3g", worst)};
}

double mean_radial_error(const PointCloud& c) {
  std::vector<double> e;
  for (const Point3& p : c)
    e.push_back(std::abs(p.norm() - 1.0));
  return pairwise_mean(std::span<const double>(e));
}

Outcome sphere_benchmark() {
  std::ifstream in(fs::path(SURFUP_TEST_DATA) / "sphere_tau.txt");
  double tau = 0.0;
  if (!(in >> tau) || !(tau > 0.0))
    return {false, "could not read the recorded reference value"};
  UpsampleConfig cfg;
  cfg.ratios = {4};
  cfg.k = 16;
  const double err = mean_radial_error(upsample(shapes::fibonacci_sphere(2048), cfg));
  const bool ok = err <= tau * 1.1 && std::abs(err - tau) <= 0.1 * tau;
  return {ok, "mean radial error = " + fmt("%.6e", err) + ", reference = " + fmt("%.6e", tau) +
                  ", relative difference = " + fmt("%.3g", std::abs(err - tau) / tau)};
}

Outcome noise_trend() {
  const PointCloud input = shapes::fibonacci_sphere(2048);
  const PointCloud gt = shapes::fibonacci_sphere(8192);
  std::string detail = "cd_l2 =";
  double prev = -1.0;
  bool ok = true;
  for (double level : {0.0, 0.005, 0.01, 0.015}) {
    UpsampleConfig cfg;
    cfg.ratios = {1, 4};
    cfg.noise_level = level;
    cfg.rng_seed = 2024;
    const double cd = chamfer_l2(upsample(input, cfg), gt);
    ok = ok && cd > prev;
    prev = cd;
    detail += " " + fmt("%.4e", cd);
  }
  return {ok, detail + " for noise 0 / 0.5% / 1% / 1.5%"};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> size(1, 512);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto a = oracle::random_points(rng, size(rng));
    const auto b = oracle::random_points(rng, size(rng), -0.7, 1.3);
    worst = std::max(worst, std::abs(chamfer_l2(PointCloud(a), PointCloud(b), 2) -
                                     oracle::brute_chamfer_l2(a, b)));
    worst = std::max(worst, std::abs(chamfer_l1(PointCloud(a), PointCloud(b), 2) -
                                     oracle::brute_chamfer_l1(a, b)));
  }
  // Point-to-surface on meshes on both sides of the brute-force cutoff.
  for (const TriangleMesh& mesh : {shapes::icosphere(2), shapes::icosphere(4),
                                   shapes::ground_truth_mesh(shapes::Shape::torus)}) {
    const auto pts = oracle::random_points(rng, 512, -1.3, 1.3);
    const P2fResult r = p2f(PointCloud(pts), mesh, 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
        const auto tri = mesh.triangle(f);
        best = std::min(best, oracle::triangle_distance2(pts[i], tri[0], tri[1], tri[2]));
      }
      worst = std::max(worst, std::abs(r.per_point[i] - std::sqrt(best)));
    }
  }
  double worst_emd = 0.0;
  for (std::size_t n = 1; n <= 8; ++n)
    for (int t = 0; t < 5; ++t) {
      const auto a = oracle::random_points(rng, n);
      const auto b = oracle::random_points(rng, n);
      worst_emd = std::max(worst_emd, std::abs(emd(PointCloud(a), PointCloud(b)) -
                                               oracle::exhaustive_emd(a, b)));
    }
  std::size_t axiom_failures = 0;
  std::uniform_int_distribution<std::size_t> small(1, 64);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = small(rng);
    const auto a = oracle::random_points(rng, n);
    const auto b = oracle::random_points(rng, n);
    auto perm = a;
    std::shuffle(perm.begin(), perm.end(), rng);
    const PointCloud pa(a), pb(b), pp(perm);
    for (const auto& metric : std::initializer_list<std::function<double(const PointCloud&,
                                                                         const PointCloud&)>>{
             [](const PointCloud& x, const PointCloud& y) { return chamfer_l2(x, y); },
             [](const PointCloud& x, const PointCloud& y) { return chamfer_l1(x, y); },
             [](const PointCloud& x, const PointCloud& y) { return emd(x, y); }}) {
      const double ab = metric(pa, pb), ba = metric(pb, pa);
      axiom_failures += ab < 0.0;
      axiom_failures += std::abs(ab - ba) > 1e-12;
      axiom_failures += metric(pa, pa) != 0.0;
      axiom_failures += std::abs(metric(pp, pb) - ab) > 1e-12;
      axiom_failures += metric(pa, pp) != 0.0;
    }
  }
  const bool ok = worst <= 1e-12 && worst_emd <= 1e-12 && axiom_failures == 0;
  return {ok, "max chamfer/p2f deviation = " + fmt("%.3g", worst) +
                  ", max emd deviation = " + fmt("%.3g", worst_emd) +
                  ", axiom violations = " + std::to_string(axiom_failures)};
}

Outcome count_and_determinism() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> npick(16, 400);
  std::uniform_int_distribution<int> rpick(1, 5), spick(1, 3);
  std::size_t count_failures = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = npick(rng);
    std::vector<int> ratios(static_cast<std::size_t>(spick(rng)));
    for (int& r : ratios)
      r = rpick(rng);
    UpsampleConfig cfg;
    cfg.ratios = ratios;
    cfg.offset_pattern = t % 2 ? OffsetPattern::halton : OffsetPattern::ring_grid;
    cfg.noise_level = t % 3 ? 0.0 : 0.01;
    cfg.rng_seed = static_cast<std::uint64_t>(t);
    const PointCloud in = shapes::sample(shapes::all_shapes()[static_cast<std::size_t>(t) % 5], n,
                                         static_cast<std::uint64_t>(t));
    const std::size_t want =
        n * static_cast<std::size_t>(std::accumulate(ratios.begin(), ratios.end(), 1,
                                                     std::multiplies<>()));
    count_failures += upsample(in, cfg).size() != want;
  }

  const fs::path dir = fs::temp_directory_path() / "surfup_acceptance";
  fs::create_directories(dir);
  io::write_cloud(shapes::sample(shapes::Shape::torus, 2048, 5), dir / "in.ply",
                  io::CloudFormat::ply_binary_le);
  bool identical = true;
  for (const char* pattern : {"ring", "halton"}) {
    std::string reference;
    for (const char* threads : {"1", "4", "1", "2"}) {
      std::ostringstream out, err;
      const fs::path path = dir / (std::string("out_") + threads + ".ply");
      const int code = cli::run({"upsample", "--input", (dir / "in.ply").string(), "--output",
                                 path.string(), "--ratios", "1,4", "--noise", "0.01", "--seed",
                                 "99", "--pattern", pattern, "--threads", threads},
                                out, err);
      if (code != 0)
        return {false, "upsample command failed: " + err.str()};
      const std::string bytes = io::read_file(path);
      if (reference.empty())
        reference = bytes;
      identical = identical && bytes == reference;
    }
  }
  return {count_failures == 0 && identical,
          "count violations = " + std::to_string(count_failures) + "/50, outputs across thread counts " +
              (identical ? "bit-identical" : "differ")};
}

Outcome uniformity_discrimination() {
  const PointCloud uniform = shapes::poisson_disk_sphere(1024, 11);
  std::vector<Point3> pts(uniform.begin(), uniform.end());
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < pts.size(); i += 2)
    pts[i] = (Point3(0, 0, 1) + 0.1 * Point3(g(rng), g(rng), 0.0)).normalized();
  const PointCloud clustered(pts);
  const std::size_t seeds = default_uniformity_seeds(1024);
  const auto su = uniformity(normalize_to_unit_sphere(uniform), kTableRadii, seeds);
  const auto sc = uniformity(normalize_to_unit_sphere(clustered), kTableRadii, seeds);
  bool ok = true;
  std::string detail = "uniform vs clustered:";
  for (double r : kTableRadii) {
    ok = ok && su.at(r) < sc.at(r);
    detail += " " + fmt("%.4g", su.at(r)) + " < " + fmt("%.4g", sc.at(r)) + ";";
  }
  return {ok, detail};
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
    double time_limit_s; ///< 0 = no limit
  };
  const Criterion criteria[] = {
      {"rotation representation", rotation_representation, 10},
      {"planar exactness", planar_exactness, 30},
      {"quadratic representability", quadratic_representability, 0},
      {"frame optimality", frame_optimality, 0},
      {"sphere benchmark", sphere_benchmark, 0},
      {"noise trend", noise_trend, 120},
      {"metric oracles", metric_oracles, 0},
      {"count and determinism", count_and_determinism, 0},
      {"uniformity discrimination", uniformity_discrimination, 0},
  };
  int failures = 0, id = 0;
  for (const Criterion& c : criteria) {
    ++id;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail += ", exceeded the " + fmt("%.0f", c.time_limit_s) + " s budget";
    }
    failures += !o.pass;
    std::printf("[%s] %d. %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", id - failures, id);
  return failures == 0 ? 0 : 1;
}
