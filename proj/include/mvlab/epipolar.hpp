#pragma once

// Two-view theory: fundamental forms, epipoles, correspondence hyperplanes,
// and the seven-point minimal solver.
//
// Orientation convention, used everywhere: a correspondence (x, y) with x in
// view 1 and y in view 2 satisfies x^T . A . y = 0. Under this convention the
// right kernel of A is the image of view 1's center in view 2.

#include <vector>

#include "mvlab/poly.hpp"
#include "mvlab/projective.hpp"

namespace mvlab {

// One image point per view; HPoint2 keeps every entry nonzero.
template <class S>
struct Correspondence {
  std::vector<HPoint2<S>> points;

  explicit Correspondence(std::vector<HPoint2<S>> pts) : points(std::move(pts)) {
    if (points.empty()) fail(Err::Precondition, "correspondence needs at least one view");
  }
  size_t views() const { return points.size(); }
};

// The bilinear form cutting out a two-view joint image.
template <class S>
struct BilinearForm {
  Mat3<S> a;

  explicit BilinearForm(Mat3<S> m) : a(std::move(m)) {
    if (is_zero_mat(a)) fail(Err::Precondition, "bilinear form must be nonzero");
  }

  S eval(const Vec3<S>& x, const Vec3<S>& y) const { return (x.transpose() * a * y)(0, 0); }
  S eval(const HPoint2<S>& x, const HPoint2<S>& y) const { return eval(x.v, y.v); }
};

// Closed formula for the joint-image form of a camera pair: entry (i, j) is
// the signed 4x4 determinant of P1 with row i removed stacked over P2 with
// row j removed. Existence comes from the theory; the formula is validated by
// the kernel and annihilation laws in the tests.
template <class S>
BilinearForm<S> fundamental_from_pair(const Camera<S>& p1, const Camera<S>& p2,
                                      double tol = kDefaultTol) {
  HPoint3<S> c1 = camera_center(p1, tol);
  HPoint3<S> c2 = camera_center(p2, tol);
  if (c1.same_point(c2, tol))
    fail(Err::Degenerate, "fundamental form undefined: camera centers coincide");
  Mat3<S> a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Mat4<S> stack;
      int r = 0;
      for (int k = 0; k < 3; ++k) {
        if (k == i) continue;
        stack.row(r++) = p1.m.row(k);
      }
      for (int k = 0; k < 3; ++k) {
        if (k == j) continue;
        stack.row(r++) = p2.m.row(k);
      }
      S det;
      if constexpr (kIsExact<S>) det = exact_det(Mat<S>(stack));
      else det = stack.determinant();
      a(i, j) = ((i + j) % 2 == 0) ? det : -det;
    }
  BilinearForm<S> f{std::move(a)};
  if (rank_of(f.a, tol) != 2) fail(Err::Internal, "joint-image form is not rank 2");
  return f;
}

// Left and right kernels of a rank-2 form: the epipoles.
template <class S>
struct Epipoles {
  HPoint2<S> left, right;  // left^T . A = 0 and A . right = 0
};

template <class S>
Epipoles<S> epipoles(const BilinearForm<S>& f, double tol = kDefaultTol) {
  if (rank_of(f.a, tol) != 2) fail(Err::Precondition, "epipoles need a rank-2 form");
  auto kernel_of = [&](const Mat3<S>& m) {
    if constexpr (kIsExact<S>) {
      Mat<S> mm = m;
      Mat<S> ker = exact_null_space(mm);
      return Vec3<S>(ker.col(0));
    } else {
      Mat<double> ker = float_null_space(Mat<double>(m), tol);
      return Vec3<S>(ker.col(0));
    }
  };
  return Epipoles<S>{HPoint2<S>(kernel_of(Mat3<S>(f.a.transpose()))),
                     HPoint2<S>(kernel_of(f.a))};
}

// The hyperplane in P^8 of bilinear forms vanishing at (x, y): coefficients
// of the outer product, flattened row-major so h . vec(A) = x^T A y.
template <class S>
Eigen::Matrix<S, 1, 9> correspondence_hyperplane(const HPoint2<S>& x, const HPoint2<S>& y) {
  Eigen::Matrix<S, 1, 9> h;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h(3 * i + j) = x.v(i) * y.v(j);
  return h;
}

// Output of the seven-point solver. Solutions live in the closure tower
// (Gaussian rationals for exact input, reals for float input); the full root
// structure of the determinant cubic is reported alongside, so callers can
// see which pencil parameters were representable.
template <class S>
struct SevenPointResult {
  using C = ClosureOf<S>;
  std::vector<Mat3<C>> solutions;  // rank <= 2, each annihilates all inputs
  std::vector<PolyRoot> roots;     // roots of det(l*F1 + u*F2)
  Mat3<S> f1, f2;                  // basis of the null space of the design
};

// Seven general correspondences determine a line of bilinear forms; the
// rank-drop locus on that line is a cubic. Roots are found projectively
// (binary form in (l : u) with member l*F1 + u*F2), so the chart choice
// l + u = 1 loses nothing: the chart's infinity is the root direction
// (1 : -1), and (1 : 0) — the member F1 — is covered as well.
template <class S>
SevenPointResult<S> seven_point(const std::vector<Correspondence<S>>& corrs,
                                double tol = kDefaultTol) {
  using C = ClosureOf<S>;
  if (corrs.size() != 7) fail(Err::Precondition, "seven-point solver needs exactly 7 correspondences");
  Mat<S> design(7, 9);
  for (int r = 0; r < 7; ++r) {
    if (corrs[r].views() != 2) fail(Err::Precondition, "seven-point solver needs two views");
    design.row(r) = correspondence_hyperplane(corrs[r].points[0], corrs[r].points[1]);
  }
  Mat<S> kernel;
  if constexpr (kIsExact<S>) {
    Mat<S> d = design;
    if (exact_rank(d) != 7) fail(Err::Degenerate, "degenerate correspondences: design rank < 7");
    Mat<S> dd = design;
    kernel = exact_null_space(dd);
  } else {
    if (float_rank(design, tol) != 7) fail(Err::Degenerate, "degenerate correspondences: design rank < 7");
    kernel = float_null_space(design, tol);
  }
  if (kernel.cols() != 2) fail(Err::Internal, "seven-point null space is not 2-dimensional");

  SevenPointResult<S> out;
  auto unflatten = [](const Vec<S>& v) {
    Mat3<S> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = v(3 * i + j);
    return m;
  };
  out.f1 = unflatten(Vec<S>(kernel.col(0)));
  out.f2 = unflatten(Vec<S>(kernel.col(1)));

  BinaryForm<S> det = pencil_determinant<S>(Mat<S>(out.f1), Mat<S>(out.f2));
  if (det.is_zero()) fail(Err::Degenerate, "every form in the seven-point pencil is singular");
  out.roots = binary_form_roots(det, tol);

  Mat3<C> g1 = out.f1.template cast<C>();
  Mat3<C> g2 = out.f2.template cast<C>();
  for (const PolyRoot& r : out.roots) {
    Mat3<C> sol;
    if constexpr (kIsExact<S>) {
      if (!r.exact) continue;  // root outside the Gaussian tower
      if (r.root.at_infinity) sol = g1;
      else sol = g1 * C(r.root.value) + g2;
    } else {
      if (!r.real) continue;  // float tower holds real roots only
      if (r.root.at_infinity) sol = g1;
      else sol = g1 * r.approx.real() + g2;
    }
    if (is_zero_mat(sol, tol)) continue;  // not a projective form
    out.solutions.push_back(sol);
  }
  return out;
}

}  // namespace mvlab
