#include "surfup/patch_fit.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "surfup/error.hpp"

namespace surfup {

namespace {

constexpr double kSignEpsilon = 1e-12;
constexpr double kRankTolerance = 1e-12;

Eigen::Vector3d orient(Eigen::Vector3d v) {
  for (int c : {2, 1, 0}) {
    if (std::abs(v[c]) > kSignEpsilon)
      return v[c] > 0.0 ? v : Eigen::Vector3d(-v);
  }
  return v;
}

} // namespace

Eigen::Matrix3d neighborhood_covariance(const Neighborhood& nbh) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Eigen::Vector3d& d : nbh.offsets)
    cov.noalias() += d * d.transpose();
  if (!nbh.offsets.empty())
    cov /= static_cast<double>(nbh.offsets.size());
  return cov;
}

RotationMatrix pca_frame(const Neighborhood& nbh) {
  const Eigen::Matrix3d cov = neighborhood_covariance(nbh);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success)
    throw DegenerateNeighborhood("covariance eigen-decomposition failed");

  // Eigen returns ascending eigenvalues.
  const Eigen::Vector3d ev = solver.eigenvalues();
  if (!(ev[2] > 0.0) || ev[1] <= kRankTolerance * ev[2])
    throw DegenerateNeighborhood("neighborhood covariance has rank < 2");

  const Eigen::Vector3d normal = orient(solver.eigenvectors().col(0));
  const Eigen::Vector3d second = orient(solver.eigenvectors().col(1));
  Eigen::Matrix3d m;
  m.col(0) = second.cross(normal);
  m.col(1) = second;
  m.col(2) = normal;
  return RotationMatrix::unchecked(m);
}

namespace {

// Neighbor coordinates in the frame, divided by the scale.
Eigen::Matrix3Xd to_local(const Neighborhood& nbh, const RotationMatrix& frame) {
  Eigen::Matrix3Xd local(3, static_cast<Eigen::Index>(nbh.offsets.size()));
  const Eigen::Matrix3d rt = frame.matrix().transpose() / nbh.scale;
  for (std::size_t i = 0; i < nbh.offsets.size(); ++i)
    local.col(static_cast<Eigen::Index>(i)) = rt * nbh.offsets[i];
  return local;
}

} // namespace

BicubicCoeffs fit_bicubic(const Neighborhood& nbh, const RotationMatrix& frame,
                          const FitOptions& opts) {
  if (!(nbh.scale > 0.0))
    throw DegenerateNeighborhood("neighborhood scale must be positive");
  const Eigen::Matrix3Xd local = to_local(nbh, frame);
  const Eigen::Index n = local.cols();

  Eigen::MatrixXd design(n, 16);
  Eigen::VectorXd w(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const BicubicEmbedding e = bicubic_embed(local(0, r), local(1, r));
    for (Eigen::Index c = 0; c < 16; ++c)
      design(r, c) = e[static_cast<std::size_t>(c)];
    w[r] = local(2, r);
  }

  // Augmented system [A; sqrt(P)] a ~ [w; 0], P = per-coefficient penalty.
  Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(n + 16, 16);
  augmented.topRows(n) = design;
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v) {
      const auto c = static_cast<Eigen::Index>(coeff_index(u, v));
      const double penalty = opts.ridge + (u + v >= 3 ? opts.higher_order_damping : 0.0);
      augmented(n + c, c) = std::sqrt(penalty);
    }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(augmented);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 16);
  rhs.head(n) = w;
  Eigen::VectorXd a = qr.solve(rhs);
  for (int sweep = 0; sweep < opts.refinement_sweeps; ++sweep) {
    rhs.head(n) = w - design * a;
    a += qr.solve(rhs);
  }

  BicubicCoeffs out{};
  for (int i = 0; i < 16; ++i)
    out[static_cast<std::size_t>(i)] = a[i];
  return out;
}

FitResiduals fit_residuals(const Neighborhood& nbh, const RotationMatrix& frame,
                           const BicubicCoeffs& coeffs) {
  const Eigen::Matrix3Xd local = to_local(nbh, frame);
  double res2 = 0.0, disp2 = 0.0;
  for (Eigen::Index i = 0; i < local.cols(); ++i) {
    const double w = local(2, i);
    const double r = w - bicubic_eval(coeffs, local(0, i), local(1, i));
    res2 += r * r;
    disp2 += w * w;
  }
  const double n = static_cast<double>(std::max<Eigen::Index>(1, local.cols()));
  return {std::sqrt(res2 / n), disp2 / n};
}

Neighborhood gather_neighborhood(const KnnIndex& index, std::size_t point_index, std::size_t k) {
  const Point3& center = index.point(point_index);
  const std::vector<Neighbor> hits = index.knn(center, k);
  Neighborhood nbh;
  nbh.center = center;
  nbh.offsets.reserve(hits.size());
  for (const Neighbor& h : hits)
    nbh.offsets.push_back(index.point(h.index) - center);
  nbh.scale = hits.back().distance;
  return nbh;
}

FitReport fit_patch(const KnnIndex& index, std::size_t point_index, std::size_t k,
                    const FitOptions& opts) {
  const Neighborhood nbh = gather_neighborhood(index, point_index, k);
  if (!(nbh.scale > 0.0))
    throw DegenerateNeighborhood("all neighbors coincide with the parent");
  const RotationMatrix frame = pca_frame(nbh);
  FitReport rep;
  rep.patch.origin = nbh.center;
  rep.patch.rot = frame;
  rep.patch.scale = nbh.scale;
  rep.patch.coeffs = fit_bicubic(nbh, frame, opts);
  const FitResiduals r = fit_residuals(nbh, frame, rep.patch.coeffs);
  rep.rms_residual = r.rms_residual;
  rep.displacement_loss = r.displacement_loss;
  return rep;
}

} // namespace surfup
