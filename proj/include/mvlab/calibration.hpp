#pragma once

// Calibrated cameras: K/R/C decomposition, the image of the absolute conic,
// essential matrices, and validated calibration data (camera + space conic +
// image conic per view).

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mvlab/multiview.hpp"
#include "mvlab/projective.hpp"

namespace mvlab {

// camera ~ k . [r | -r.c] with k upper-triangular, positive focal entries and
// k(2,2) = 1. r is orthogonal but possibly of determinant -1; the sign is
// reported, never absorbed behind the caller's back (downstream conventions
// differ on which factor should swallow it).
struct CalibrationDecomposition {
  Eigen::Matrix3d k;
  Eigen::Matrix3d r;
  Eigen::Vector3d c;          // affine center
  bool det_negative = false;  // r landed in O(3) \ SO(3)
};

inline Camera<double> compose_camera(const Eigen::Matrix3d& k, const Eigen::Matrix3d& r,
                                     const Eigen::Vector3d& c) {
  Mat34<double> p;
  p.leftCols<3>() = k * r;
  p.col(3) = -(k * r) * c;
  return Camera<double>(p);
}

// RQ factorization of the left 3x3 block. Defined only for cameras whose
// center is affine (invertible block); the center is recovered as -M^{-1} p4.
inline CalibrationDecomposition decompose_camera(const Camera<double>& p,
                                                 double tol = kDefaultTol) {
  Eigen::Matrix3d m = p.m.leftCols<3>();
  double scale = frobenius_scale(p.m);
  if (std::abs(m.determinant()) <= tol * scale * scale * scale)
    fail(Err::Precondition, "camera center at infinity: left 3x3 block singular");
  RqResult rq = rq_decompose(m);
  CalibrationDecomposition out;
  out.k = rq.k;
  out.r = rq.r;
  out.det_negative = rq.det_negative;
  out.c = -m.inverse() * Eigen::Vector3d(p.m.col(3));
  return out;
}

// Projection of {w = 0, x^2 + y^2 + z^2 = 0} from the camera center. For a
// decomposable camera this equals (k.k^T)^{-1} up to scale, so it depends on
// k alone; the operation itself is defined over every scalar tower.
template <class S>
Conic2<S> image_of_absolute_conic(const Camera<S>& p, double tol = kDefaultTol) {
  HPoint3<S> center = camera_center(p, tol);
  if (ScalarTraits<S>::is_zero(center.v(3), tol, frobenius_scale(center.v)))
    fail(Err::Precondition, "camera center at infinity: no image of the absolute conic");
  return project_space_conic(p, absolute_conic<S>(), tol);
}

// The matrix of t x (.): cross_matrix(t) * v == t.cross(v).
template <class S>
Mat3<S> cross_matrix(const Vec3<S>& t) {
  Mat3<S> m;
  m << S(0), -t(2), t(1), t(2), S(0), -t(0), -t(1), t(0), S(0);
  return m;
}

// Nonzero form with two equal nonzero singular values and a zero third one.
// Validation is polynomial in exact towers (see is_essential), spectral in
// the float tower.
template <class S>
struct EssentialMatrix {
  Mat3<S> m;
};

constexpr double kEssentialTol = 1e-8;

// Exact towers: E is essential iff E != 0 and 2.E.E^T.E = tr(E.E^T).E — under
// a singular value decomposition the identity forces every singular value to
// be 0 or sqrt(tr/2), and the nonzero count to be exactly two. Float tower:
// the singular-value ratios are tested directly.
template <class S>
bool is_essential(const Mat3<S>& e, double tol = kEssentialTol) {
  if (is_zero_mat(e, tol)) fail(Err::Precondition, "essential test needs a nonzero matrix");
  if constexpr (kIsExact<S>) {
    Mat3<S> ee = e * e.transpose();
    S trace = ee(0, 0) + ee(1, 1) + ee(2, 2);
    Mat3<S> residual = S(2) * (ee * e) - trace * e;
    return is_zero_mat(residual);
  } else {
    Eigen::JacobiSVD<Eigen::Matrix3d> dec{Eigen::Matrix3d(e)};
    double s1 = dec.singularValues()(0);
    double s2 = dec.singularValues()(1);
    double s3 = dec.singularValues()(2);
    return s3 / s1 < tol && std::abs(s1 - s2) / s1 < tol;
  }
}

template <class S>
EssentialMatrix<S> essential_from_pose(const Mat3<S>& r, const Vec3<S>& t,
                                       double tol = kDefaultTol) {
  if (is_zero_mat(t, tol)) fail(Err::Precondition, "essential matrix needs a nonzero translation");
  if (!is_zero_mat(Mat3<S>(r * r.transpose() - Mat3<S>::Identity()), tol))
    fail(Err::Precondition, "essential matrix needs an orthogonal rotation");
  EssentialMatrix<S> out{Mat3<S>(cross_matrix(t) * r)};
  if (!is_essential(out.m, kEssentialTol))
    fail(Err::Internal, "pose composition failed the essential check");
  return out;
}

// Scheme containment of a plane conic in a quadric: the quadric contains the
// curve cut by (plane, W) iff its restriction to the plane is proportional
// to W's, whatever the degeneracy rank of the curve.
template <class S>
bool conic_on_quadric(const SpaceConic<S>& c, const Quadric3<S>& q, double tol = kDefaultTol) {
  Mat43<S> b = plane_basis(c.plane);
  Mat3<S> q_restricted = b.transpose() * q.m * b;
  if (is_zero_mat(q_restricted, tol)) return true;  // the whole plane lies on q
  Mat3<S> c_restricted = b.transpose() * c.quadric.m * b;
  return proportional(q_restricted, c_restricted, tol);
}

// Does (C, D) calibrate P in the smooth sense? True iff the cone over D
// through the center contains the curve C, and the center misses the plane
// of C — the clause that makes the restricted projection an isomorphism
// onto D. (Degenerate double-line data necessarily put the center on the
// plane — the plane is tangent to the cone along a ruling — so they are
// rejected here; CalibratedConfig accepts them via containment alone.)
template <class S>
bool is_calibrated_camera(const Camera<S>& p, const SpaceConic<S>& c, const Conic2<S>& d,
                          double tol = kDefaultTol) {
  if (!d.smooth()) fail(Err::Precondition, "calibration check needs a smooth image conic");
  HPoint3<S> center = camera_center(p, tol);
  S on_plane = (c.plane * center.v)(0, 0);
  if (ScalarTraits<S>::is_zero(on_plane, tol, frobenius_scale(c.plane) * frobenius_scale(center.v)))
    return false;
  return conic_on_quadric(c, pullback_cone(p, d, tol), tol);
}

// A configuration with one smooth image conic per view, all induced by a
// common space conic (smooth or a double line). Validation is containment of
// the space conic in every view's cone: for a smooth conic that containment
// already forces the center off the conic's plane (a section through the
// vertex is singular), so the isomorphism clause comes for free; a
// double-line conic is the tangent-section limit and stays admissible.
template <class S>
struct CalibratedConfig {
  CameraConfig<S> config;
  std::vector<Conic2<S>> image_conics;
  SpaceConic<S> space_conic;

  CalibratedConfig(CameraConfig<S> cfg, std::vector<Conic2<S>> imgs, SpaceConic<S> sc,
                   double tol = kDefaultTol)
      : config(std::move(cfg)), image_conics(std::move(imgs)), space_conic(std::move(sc)) {
    if (image_conics.size() != config.size())
      fail(Err::Precondition, "calibration data needs one image conic per camera");
    if (space_conic.degeneracy == ConicDegeneracy::TwoLines)
      fail(Err::Precondition, "calibration conic must be smooth or a double line");
    for (size_t i = 0; i < config.size(); ++i) {
      if (!image_conics[i].smooth())
        fail(Err::Precondition, "calibration data needs smooth image conics");
      if (!conic_on_quadric(space_conic, pullback_cone(config.cameras[i], image_conics[i], tol), tol))
        fail(Err::Precondition, "camera does not map the space conic into its image conic");
    }
  }

  size_t size() const { return config.size(); }
};

}  // namespace mvlab
