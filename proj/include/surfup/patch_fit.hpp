#pragma once

#include <vector>

#include "surfup/geometry.hpp"
#include "surfup/kdtree.hpp"

namespace surfup {

/// A parent point and its k nearest neighbors, stored as offsets from the
/// parent. `scale` is the distance to the k-th neighbor.
struct Neighborhood {
  Point3 center = Point3::Zero();
  std::vector<Eigen::Vector3d> offsets;
  double scale = 0.0;
};

/// Penalty weights are in scale-normalized units. Every coefficient carries
/// `ridge`; coefficients of total degree >= 3 additionally carry
/// `higher_order_damping`, so quadratic surfaces are recovered without bias
/// while noisy near-interpolating neighborhoods stay bounded.
struct FitOptions {
  double ridge = 1e-10;
  double higher_order_damping = 0.1;
  int refinement_sweeps = 4; ///< re-solves of the penalized system on the residual
};

struct FitReport {
  LocalPatch patch;
  double rms_residual = 0.0;      ///< post-fit RMS of w - phi(u, v), scale units
  double displacement_loss = 0.0; ///< mean w^2 over the neighbors before fitting
};

/// Frame whose columns are covariance eigenvectors (eigenvalues descending);
/// the third column is the minimal-variance direction and becomes the w
/// axis. The covariance is taken about the parent, not the centroid.
///
/// Signs are fixed deterministically: the third and second columns are
/// oriented so their first non-negligible component among (z, y, x) is
/// positive, and the first column is their cross product (det = +1).
/// Throws DegenerateNeighborhood when the covariance has rank < 2.
RotationMatrix pca_frame(const Neighborhood& nbh);

/// Sample covariance of the offsets about the parent.
Eigen::Matrix3d neighborhood_covariance(const Neighborhood& nbh);

/// Penalized least-squares bicubic height field of the neighbors expressed
/// in `frame` and divided by the scale (see FitOptions). The penalized
/// system is solved by QR and re-solved on the residual `refinement_sweeps`
/// times, which removes the ridge bias along well-determined directions.
BicubicCoeffs fit_bicubic(const Neighborhood& nbh, const RotationMatrix& frame,
                          const FitOptions& opts = {});

/// RMS of w - phi(u, v) and the mean of w^2 over the neighbors.
struct FitResiduals {
  double rms_residual;
  double displacement_loss;
};
FitResiduals fit_residuals(const Neighborhood& nbh, const RotationMatrix& frame,
                           const BicubicCoeffs& coeffs);

/// Builds the neighborhood of points[point_index] from its k nearest
/// neighbors (the point itself included).
Neighborhood gather_neighborhood(const KnnIndex& index, std::size_t point_index, std::size_t k);

/// pca_frame + fit_bicubic over the k-NN neighborhood of one point. The
/// returned patch has origin at the point and passes whatever constant term
/// the fit produced (callers pin a_1 themselves). Propagates
/// DegenerateNeighborhood, including the zero-scale case.
FitReport fit_patch(const KnnIndex& index, std::size_t point_index, std::size_t k,
                    const FitOptions& opts = {});

inline FitReport fit_patch(const PointCloud&, const KnnIndex& index, std::size_t point_index,
                           std::size_t k, const FitOptions& opts = {}) {
  return fit_patch(index, point_index, k, opts);
}

/// L = chamfer + lambda * displacement.
inline double combined_loss(double chamfer, double displacement_loss, double lambda) {
  return chamfer + lambda * displacement_loss;
}

} // namespace surfup
