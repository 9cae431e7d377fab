#pragma once

// Projective objects: homogeneous points, cameras, homographies, conics,
// quadrics, and plane sections. Everything compares up to a nonzero scalar;
// ranks are part of the data for conics and quadrics because smoothness and
// cone-ness are rank conditions.

#include <optional>

#include "mvlab/linalg.hpp"

namespace mvlab {

template <class S>
struct HPoint2 {
  Vec3<S> v;

  explicit HPoint2(Vec3<S> coords) : v(std::move(coords)) {
    if (is_zero_mat(v)) fail(Err::Precondition, "homogeneous point must be nonzero");
  }
  HPoint2(const S& a, const S& b, const S& c) : HPoint2(Vec3<S>{a, b, c}) {}

  bool same_point(const HPoint2& o, double tol = kDefaultTol) const {
    return proportional(v, o.v, tol);
  }
};

template <class S>
struct HPoint3 {
  Vec4<S> v;

  explicit HPoint3(Vec4<S> coords) : v(std::move(coords)) {
    if (is_zero_mat(v)) fail(Err::Precondition, "homogeneous point must be nonzero");
  }
  HPoint3(const S& a, const S& b, const S& c, const S& d) : HPoint3(Vec4<S>{a, b, c, d}) {}

  bool same_point(const HPoint3& o, double tol = kDefaultTol) const {
    return proportional(v, o.v, tol);
  }
};

// A pinhole camera: 3x4 of rank 3, up to scale. The rank requirement is
// checked at construction so downstream code can rely on it.
template <class S>
struct Camera {
  Mat34<S> m;

  explicit Camera(Mat34<S> matrix, double tol = kDefaultTol) : m(std::move(matrix)) {
    if (rank_of(Mat<S>(m), tol) != 3) fail(Err::Precondition, "camera matrix must have rank 3");
  }

  bool same_camera(const Camera& o, double tol = kDefaultTol) const {
    return proportional(m, o.m, tol);
  }

  static Camera standard() {  // [I | 0]
    Mat34<S> p = Mat34<S>::Zero();
    for (int i = 0; i < 3; ++i) p(i, i) = S(1);
    return Camera(p);
  }
};

// An automorphism of P^3 (4x4 invertible, up to scale).
template <class S>
struct Homography {
  Mat4<S> m;

  explicit Homography(Mat4<S> matrix, double tol = kDefaultTol) : m(std::move(matrix)) {
    if (rank_of(Mat<S>(m), tol) != 4) fail(Err::Precondition, "homography must be invertible");
  }
};

// Plane conic as a symmetric 3x3 form up to scale; rank recorded.
template <class S>
struct Conic2 {
  Mat3<S> m;
  int rank;

  explicit Conic2(Mat3<S> matrix, double tol = kDefaultTol) : m(std::move(matrix)) {
    check_symmetric(m, tol);
    if (is_zero_mat(m, tol)) fail(Err::Precondition, "conic matrix must be nonzero");
    rank = rank_of(Mat<S>(m), tol);
  }

  bool smooth() const { return rank == 3; }
  bool same_conic(const Conic2& o, double tol = kDefaultTol) const {
    return proportional(m, o.m, tol);
  }

 private:
  static void check_symmetric(Mat3<S>& a, double tol) {
    if constexpr (kIsExact<S>) {
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (a(i, j) != a(j, i)) fail(Err::Precondition, "conic matrix must be symmetric");
    } else {
      (void)tol;
      Mat3<S> d = a - a.transpose();
      if (frobenius_scale(d) > 1e-12 * std::max(1.0, frobenius_scale(a)))
        fail(Err::Precondition, "conic matrix must be symmetric");
      a = (a + Mat3<S>(a.transpose())) / 2.0;
    }
  }
};

// Space quadric as a symmetric 4x4 form up to scale; rank recorded. Rank 3
// means a cone: one singular point (the vertex).
template <class S>
struct Quadric3 {
  Mat4<S> m;
  int rank;

  explicit Quadric3(Mat4<S> matrix, double tol = kDefaultTol) : m(std::move(matrix)) {
    check_symmetric(m, tol);
    if (is_zero_mat(m, tol)) fail(Err::Precondition, "quadric matrix must be nonzero");
    rank = rank_of(Mat<S>(m), tol);
  }

  bool is_cone() const { return rank == 3; }
  bool same_quadric(const Quadric3& o, double tol = kDefaultTol) const {
    return proportional(m, o.m, tol);
  }

 private:
  static void check_symmetric(Mat4<S>& a, double tol) {
    if constexpr (kIsExact<S>) {
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          if (a(i, j) != a(j, i)) fail(Err::Precondition, "quadric matrix must be symmetric");
    } else {
      (void)tol;
      Mat4<S> d = a - a.transpose();
      if (frobenius_scale(d) > 1e-12 * std::max(1.0, frobenius_scale(a)))
        fail(Err::Precondition, "quadric matrix must be symmetric");
      a = (a + Mat4<S>(a.transpose())) / 2.0;
    }
  }
};

// Deterministic basis of a plane {x : pi . x = 0}: drop the coordinate where
// |pi| is largest (first index on ties) and lift the remaining three standard
// basis vectors into the plane without dividing, so exact entries stay small.
template <class S>
Mat43<S> plane_basis(const RowVec4<S>& plane) {
  if (is_zero_mat(plane)) fail(Err::Precondition, "plane covector must be nonzero");
  int pivot = 0;
  double best = -1;
  for (int i = 0; i < 4; ++i) {
    double a = std::abs(ScalarTraits<S>::approx(plane(i)));
    if (a > best) { best = a; pivot = i; }
  }
  Mat43<S> b = Mat43<S>::Zero();
  int col = 0;
  for (int j = 0; j < 4; ++j) {
    if (j == pivot) continue;
    b(j, col) = plane(pivot);
    b(pivot, col) = -plane(j);
    ++col;
  }
  return b;
}

enum class ConicDegeneracy { Smooth, DoubleLine, TwoLines };

inline const char* to_string(ConicDegeneracy d) {
  switch (d) {
    case ConicDegeneracy::Smooth: return "smooth";
    case ConicDegeneracy::DoubleLine: return "double-line";
    case ConicDegeneracy::TwoLines: return "two-lines";
  }
  return "?";
}

// A degree-2 space curve presented as plane ∩ quadric. The degeneracy is the
// rank of the quadric restricted to the plane: 3 = smooth conic, 1 = doubled
// line, 2 = two distinct lines.
template <class S>
struct SpaceConic {
  RowVec4<S> plane;
  Quadric3<S> quadric;
  ConicDegeneracy degeneracy;

  SpaceConic(RowVec4<S> pl, Quadric3<S> q, double tol = kDefaultTol)
      : plane(std::move(pl)), quadric(std::move(q)), degeneracy(ConicDegeneracy::Smooth) {
    if (is_zero_mat(plane, tol)) fail(Err::Precondition, "space conic needs a nonzero plane");
    Mat43<S> b = plane_basis(plane);
    Mat3<S> r = b.transpose() * quadric.m * b;
    int rk = rank_of(Mat<S>(r), tol);
    switch (rk) {
      case 3: degeneracy = ConicDegeneracy::Smooth; break;
      case 2: degeneracy = ConicDegeneracy::TwoLines; break;
      case 1: degeneracy = ConicDegeneracy::DoubleLine; break;
      default: fail(Err::Precondition, "plane lies on the quadric: no conic");
    }
  }

  Conic2<S> restricted(double tol = kDefaultTol) const {
    Mat43<S> b = plane_basis(plane);
    return Conic2<S>(Mat3<S>(b.transpose() * quadric.m * b), tol);
  }

  // Same curve: same plane and proportional restrictions to that plane.
  bool same_conic(const SpaceConic& o, double tol = kDefaultTol) const {
    if (!proportional(plane, o.plane, tol)) return false;
    Mat43<S> b = plane_basis(plane);
    Mat3<S> r1 = b.transpose() * quadric.m * b;
    Mat3<S> r2 = b.transpose() * o.quadric.m * b;
    return proportional(r1, r2, tol);
  }
};

// The absolute conic {w = 0, x^2 + y^2 + z^2 = 0}.
template <class S>
SpaceConic<S> absolute_conic() {
  RowVec4<S> plane;
  plane << S(0), S(0), S(0), S(1);
  Mat4<S> q = Mat4<S>::Zero();
  q(0, 0) = S(1);
  q(1, 1) = S(1);
  q(2, 2) = S(1);
  return SpaceConic<S>(plane, Quadric3<S>(q));
}

// ---------------------------------------------------------------------------
// Operations

// The unique point where the projection is undefined: the right kernel.
template <class S>
HPoint3<S> camera_center(const Camera<S>& p, double tol = kDefaultTol) {
  if constexpr (kIsExact<S>) {
    Mat<S> m = p.m;
    Mat<S> ker = exact_null_space(m);
    if (ker.cols() != 1) fail(Err::Internal, "camera kernel dimension != 1");
    return HPoint3<S>(Vec4<S>(ker.col(0)));
  } else {
    Mat<double> ker = float_null_space(Mat<double>(p.m), tol);
    if (ker.cols() < 1) fail(Err::Internal, "camera kernel not found");
    return HPoint3<S>(Vec4<S>(ker.col(0)));
  }
}

// Precomposition with an automorphism of P^3: the camera P.H sees the world
// through H, so its center is H^{-1}(center of P).
template <class S>
Camera<S> transform_camera(const Camera<S>& p, const Homography<S>& h, double tol = kDefaultTol) {
  return Camera<S>(Mat34<S>(p.m * h.m), tol);
}

// Project a world point; undefined exactly at the center.
template <class S>
HPoint2<S> project_point(const Camera<S>& p, const HPoint3<S>& x, double tol = kDefaultTol) {
  Vec3<S> img = p.m * x.v;
  if (is_zero_mat(img, tol)) fail(Err::Degenerate, "projection undefined: point is the camera center");
  return HPoint2<S>(img);
}

// The cone over an image conic: P^T D P. Rank 3 with vertex at the center.
template <class S>
Quadric3<S> pullback_cone(const Camera<S>& p, const Conic2<S>& d, double tol = kDefaultTol) {
  if (!d.smooth()) fail(Err::Precondition, "pullback cone needs a smooth image conic");
  Quadric3<S> q(Mat4<S>(p.m.transpose() * d.m * p.m), tol);
  if (q.rank != 3) fail(Err::Internal, "pullback of a smooth conic must be a rank-3 cone");
  return q;
}

// Induced symmetric form on a plane, in the deterministic plane basis. The
// rank (not the matrix) is independent of the basis choice.
template <class S>
Conic2<S> restrict_quadric_to_plane(const Quadric3<S>& q, const RowVec4<S>& plane,
                                    double tol = kDefaultTol) {
  Mat43<S> b = plane_basis(plane);
  return Conic2<S>(Mat3<S>(b.transpose() * q.m * b), tol);
}

// Image of a space conic under a camera whose center avoids its plane. The
// output conic D is characterized by: the cone over D contains the curve.
template <class S>
Conic2<S> project_space_conic(const Camera<S>& p, const SpaceConic<S>& c,
                              double tol = kDefaultTol) {
  HPoint3<S> center = camera_center(p, tol);
  S on_plane = (c.plane * center.v)(0, 0);
  if (ScalarTraits<S>::is_zero(on_plane, tol, frobenius_scale(c.plane) * frobenius_scale(center.v))) {
    S on_quadric = (center.v.transpose() * c.quadric.m * center.v)(0, 0);
    if (ScalarTraits<S>::is_zero(on_quadric, tol,
                                 frobenius_scale(c.quadric.m) * std::pow(frobenius_scale(center.v), 2)))
      fail(Err::Precondition, "camera center lies on the space conic");
    fail(Err::Precondition, "camera center lies on the plane of the space conic");
  }
  Mat43<S> b = plane_basis(c.plane);
  Mat3<S> chart = p.m * b;  // invertible because the center misses the plane
  Mat3<S> inv;
  if constexpr (kIsExact<S>) {
    if (exact_det(Mat<S>(chart)).is_zero()) fail(Err::Internal, "plane chart unexpectedly singular");
    inv = chart.inverse();
  } else {
    if (std::abs(chart.determinant()) <= tol * std::pow(frobenius_scale(chart), 3))
      fail(Err::Precondition, "camera center too close to the plane of the space conic");
    inv = chart.inverse();
  }
  Mat3<S> restricted = b.transpose() * c.quadric.m * b;
  return Conic2<S>(Mat3<S>(inv.transpose() * restricted * inv), tol);
}

}  // namespace mvlab
