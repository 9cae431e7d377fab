#pragma once

// Pencils of quadric cones: the four-way intersection classification,
// decalibration fibers, the residual-calibration involution, twisted pairs,
// and linear spaces of quadrics through a curve.
//
// Classification background, used throughout: for a pencil l*Q1 + u*Q2 of
// rank-3 cones the determinant is a degree-4 binary form vanishing at (1:0)
// and (0:1), so its multiple roots are always rational; members at simple
// roots have rank exactly 3 (the vanishing order of the determinant bounds
// the corank), so only multiple roots ever need a rank computation.

#include <algorithm>
#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "mvlab/calibration.hpp"

namespace mvlab {

// The four possible intersection curves of two cones with distinct vertices.
enum class PencilClass { IrreducibleQuartic, CubicPlusLine, TwoSmoothConics, ConicPlusDoubleLine };

inline const char* to_string(PencilClass c) {
  switch (c) {
    case PencilClass::IrreducibleQuartic: return "IrreducibleQuartic";
    case PencilClass::CubicPlusLine: return "CubicPlusLine";
    case PencilClass::TwoSmoothConics: return "TwoSmoothConics";
    case PencilClass::ConicPlusDoubleLine: return "ConicPlusDoubleLine";
  }
  return "?";
}

struct PencilRootEvidence {
  PolyRoot root;
  int rank = 3;  // rank of the pencil member at this root
};

template <class S>
struct PencilClassification {
  PencilClass cls;
  bool det_identically_zero = false;
  BinaryForm<S> det_form;
  std::vector<PencilRootEvidence> roots;
};

// Vertex of a rank-3 quadric: the kernel of its matrix.
template <class S>
HPoint3<S> cone_vertex(const Quadric3<S>& q, double tol = kDefaultTol) {
  if (!q.is_cone()) fail(Err::Precondition, "vertex needs a rank-3 quadric");
  if constexpr (kIsExact<S>) {
    Mat<S> m = q.m;
    Mat<S> ker = exact_null_space(m);
    if (ker.cols() != 1) fail(Err::Internal, "rank-3 quadric with kernel dimension != 1");
    return HPoint3<S>(Vec4<S>(ker.col(0)));
  } else {
    Mat<double> ker = float_null_space(Mat<double>(q.m), tol);
    if (ker.cols() < 1) fail(Err::Internal, "cone vertex not found");
    return HPoint3<S>(Vec4<S>(ker.col(0)));
  }
}

namespace detail {

// Rank of a pencil member at a root that may be complex (float tower only).
inline int complex_member_rank(const Mat4<double>& q1, const Mat4<double>& q2,
                               const PolyRoot& r, double tol) {
  Eigen::Matrix4cd m;
  if (r.root.at_infinity) {
    m = q1.cast<std::complex<double>>();
  } else {
    m = q1.cast<std::complex<double>>() * r.approx + q2.cast<std::complex<double>>();
  }
  Eigen::JacobiSVD<Eigen::Matrix4cd> dec{m};
  double top = dec.singularValues()(0);
  if (top <= 0) return 0;
  int rank = 0;
  for (int i = 0; i < 4; ++i)
    if (dec.singularValues()(i) > tol * top) ++rank;
  return rank;
}

// Zero test for a pencil determinant: exact coefficients compare against
// zero; float coefficients compare against the natural magnitude of a 4x4
// determinant built from the two inputs.
template <class S>
bool det_form_is_zero(const BinaryForm<S>& f, const Mat4<S>& q1, const Mat4<S>& q2, double tol) {
  if constexpr (kIsExact<S>) {
    return f.is_zero();
  } else {
    double scale = std::max(frobenius_scale(Mat<S>(q1)), frobenius_scale(Mat<S>(q2)));
    double scale4 = scale * scale * scale * scale;
    for (const auto& c : f.c)
      if (!ScalarTraits<S>::is_zero(c, tol, scale4)) return false;
    return true;
  }
}

// Pencil member at a numeric root location (float tower).
inline Mat4<double> approx_member(const Mat4<double>& q1, const Mat4<double>& q2,
                                  const PolyRoot& r) {
  if (r.root.at_infinity) return q1;
  return Mat4<double>(q1 * r.approx.real() + q2);
}

}  // namespace detail

// Locate a rank-2 member of the pencil of two cones. When the determinant
// form is nonzero the candidate roots are its multiple roots; when it
// vanishes identically every member is singular and the rank-<=2 locus is
// cut out instead by the gcd of the 16 adjugate-entry cubics.
template <class S>
struct RankTwoMember {
  PolyRoot root;
  Mat4<S> member;
};

template <class S>
std::optional<RankTwoMember<S>> rank_two_member(const Quadric3<S>& q1, const Quadric3<S>& q2,
                                                double tol = kDefaultTol) {
  BinaryForm<S> det = pencil_determinant(Mat<S>(q1.m), Mat<S>(q2.m));
  std::vector<PolyRoot> candidates;
  if (detail::det_form_is_zero(det, q1.m, q2.m, tol)) {
    std::vector<BinaryForm<S>> adj = pencil_adjugate_entries(q1.m, q2.m);
    if constexpr (kIsExact<S>) {
      BinaryForm<S> g = binary_forms_gcd(adj);
      if (g.is_zero() || g.degree == 0) return std::nullopt;
      candidates = binary_form_roots(g, tol);
    } else {
      // float fallback: roots of the largest adjugate cubic, ranks checked below
      double best = -1;
      const BinaryForm<S>* pick = nullptr;
      for (const auto& entry : adj) {
        double mag = 0;
        for (const auto& c : entry.c) mag = std::max(mag, std::abs(ScalarTraits<S>::approx(c)));
        if (mag > best) { best = mag; pick = &entry; }
      }
      if (!pick || best <= 0) return std::nullopt;
      candidates = binary_form_roots(*pick, tol);
    }
  } else {
    for (const PolyRoot& r : binary_form_roots(det, tol))
      if (r.multiplicity >= 2) candidates.push_back(r);
  }
  for (const PolyRoot& r : candidates) {
    if constexpr (kIsExact<S>) {
      if (!r.exact) continue;
      Mat4<S> member;
      try {
        member = pencil_member(q1.m, q2.m, r.root);
      } catch (const Error&) {
        continue;  // complex root in a real tower: not this candidate
      }
      if (exact_rank(Mat<S>(member)) == 2) return RankTwoMember<S>{r, member};
    } else {
      if (!r.real) continue;
      Mat4<S> member = detail::approx_member(q1.m, q2.m, r);
      if (rank_of(member, tol) == 2) return RankTwoMember<S>{r, member};
    }
  }
  return std::nullopt;
}

// Classify the intersection curve of two cones with distinct vertices. The
// mapping from (root multiplicities, member ranks) to the four classes is
// frozen data, calibrated against named examples and the elimination oracle:
//   det == 0                        -> ConicPlusDoubleLine
//   (1,1,1,1)                       -> IrreducibleQuartic
//   (2,1,1), rank 3 at double root  -> IrreducibleQuartic (nodal)
//   (2,1,1), rank 2 at double root  -> TwoSmoothConics
//   (2,2),   rank 3 at both         -> CubicPlusLine
//   (3,1),   rank 3 at triple root  -> IrreducibleQuartic (cuspidal)
//   (3,1),   rank 2 at triple root  -> TwoSmoothConics (tangent pair)
// Every other pattern is impossible under the preconditions and reported as
// an internal error rather than guessed at.
template <class S>
PencilClassification<S> pencil_classify(const Quadric3<S>& q1, const Quadric3<S>& q2,
                                        double tol = kDefaultTol) {
  if (!q1.is_cone() || !q2.is_cone())
    fail(Err::Precondition, "pencil classification needs two rank-3 cones");
  if (cone_vertex(q1, tol).same_point(cone_vertex(q2, tol), tol))
    fail(Err::Precondition, "pencil classification needs distinct cone vertices");

  PencilClassification<S> out{PencilClass::IrreducibleQuartic, false,
                              pencil_determinant(Mat<S>(q1.m), Mat<S>(q2.m)), {}};

  if (detail::det_form_is_zero(out.det_form, q1.m, q2.m, tol)) {
    out.det_identically_zero = true;
    out.cls = PencilClass::ConicPlusDoubleLine;
    if (auto r2 = rank_two_member(q1, q2, tol)) out.roots.push_back({r2->root, 2});
    return out;
  }

  std::vector<PolyRoot> roots = binary_form_roots(out.det_form, tol);
  std::vector<int> mults;
  for (const PolyRoot& r : roots) {
    PencilRootEvidence ev{r, 3};
    if (r.multiplicity >= 2) {
      if constexpr (kIsExact<S>) {
        if (!r.exact)
          fail(Err::Internal, "multiple root of a cone-pencil determinant must be rational");
        Mat4<S> member = pencil_member(q1.m, q2.m, r.root);
        ev.rank = exact_rank(Mat<S>(member));
      } else {
        ev.rank = detail::complex_member_rank(q1.m, q2.m, r, tol);
      }
    }
    out.roots.push_back(ev);
    mults.push_back(r.multiplicity);
  }
  std::sort(mults.begin(), mults.end(), std::greater<int>());

  auto rank_at_mult = [&](int mult) {
    for (const auto& ev : out.roots)
      if (ev.root.multiplicity == mult) return ev.rank;
    return -1;
  };

  if (mults == std::vector<int>{1, 1, 1, 1}) {
    out.cls = PencilClass::IrreducibleQuartic;
  } else if (mults == std::vector<int>{2, 1, 1}) {
    int rank = rank_at_mult(2);
    if (rank == 3) out.cls = PencilClass::IrreducibleQuartic;
    else if (rank == 2) out.cls = PencilClass::TwoSmoothConics;
    else fail(Err::Internal, "unexpected rank at a double root of a cone pencil");
  } else if (mults == std::vector<int>{2, 2}) {
    bool all3 = true;
    for (const auto& ev : out.roots) all3 = all3 && ev.rank == 3;
    if (all3) out.cls = PencilClass::CubicPlusLine;
    else fail(Err::Internal, "unexpected rank pattern at the double roots of a cone pencil");
  } else if (mults == std::vector<int>{3, 1}) {
    int rank = rank_at_mult(3);
    if (rank == 3) out.cls = PencilClass::IrreducibleQuartic;
    else if (rank == 2) out.cls = PencilClass::TwoSmoothConics;
    else fail(Err::Internal, "unexpected rank at a triple root of a cone pencil");
  } else {
    fail(Err::Internal, "impossible root pattern for a cone-pencil determinant");
  }
  return out;
}

// Split a rank-2 symmetric form into its two planes: m ~ p1^T p2 + p2^T p1
// as quadratic forms. Diagonalize by congruence to d1*f1^2 + d2*f2^2 and
// factor with s = sqrt(-d2/d1); the square root must exist in the working
// tower (Gaussian rationals reach conjugate-plane pairs, the float tower
// reaches only real splittings).
template <class S>
std::pair<RowVec4<S>, RowVec4<S>> split_rank2(const Mat4<S>& m, double tol = kDefaultTol) {
  if (rank_of(m, tol) != 2) fail(Err::Precondition, "plane splitting needs a rank-2 form");
  SymDiagonalization<S> diag = diagonalize_symmetric(Mat<S>(m), tol);
  double scale = frobenius_scale(Mat<S>(m));
  std::vector<Eigen::Index> nonzero;
  for (Eigen::Index i = 0; i < diag.d.size(); ++i)
    if (!ScalarTraits<S>::is_zero(diag.d(i), tol, scale)) nonzero.push_back(i);
  if (nonzero.size() != 2) fail(Err::Internal, "rank-2 form diagonalized to a wrong profile");

  Mat4<S> pinv = Mat4<S>(diag.p).inverse();
  RowVec4<S> f1 = pinv.row(nonzero[0]);
  RowVec4<S> f2 = pinv.row(nonzero[1]);
  S ratio = -diag.d(nonzero[1]) / diag.d(nonzero[0]);
  S s;
  if constexpr (kIsExact<S>) {
    auto root = exact_sqrt(ratio);
    if (!root) fail(Err::NotRepresentable, "splitting planes live outside the working tower");
    s = *root;
  } else {
    if (ratio < 0) fail(Err::NotRepresentable, "splitting planes are complex in the float tower");
    s = std::sqrt(ratio);
  }
  return {RowVec4<S>(f1 + s * f2), RowVec4<S>(f1 - s * f2)};
}

// The two plane sections forming the intersection when it is not irreducible
// of degree 3 or 4: split the rank-2 member into planes over the closure
// tower and section the first cone by each. Degeneracy tags come from the
// SpaceConic constructor (smooth/double-line); a two-lines section cannot
// happen for cones with distinct vertices.
template <class S>
std::array<SpaceConic<ClosureOf<S>>, 2> intersect_two_smooth_case(const Quadric3<S>& q1,
                                                                  const Quadric3<S>& q2,
                                                                  double tol = kDefaultTol) {
  using C = ClosureOf<S>;
  PencilClassification<S> cls = pencil_classify(q1, q2, tol);
  if (cls.cls != PencilClass::TwoSmoothConics && cls.cls != PencilClass::ConicPlusDoubleLine)
    fail(Err::Precondition, "intersection is a quartic or a cubic plus line: no conic pair");
  auto r2 = rank_two_member(q1, q2, tol);
  if (!r2) fail(Err::Internal, "conic-pair class without a reachable rank-2 member");
  Mat4<C> member = r2->member.template cast<C>();
  auto [pi_plus, pi_minus] = split_rank2(member, tol);
  Quadric3<C> cone(Mat4<C>(q1.m.template cast<C>()), tol);
  SpaceConic<C> a(pi_plus, cone, tol);
  SpaceConic<C> b(pi_minus, cone, tol);
  if (a.degeneracy == ConicDegeneracy::TwoLines || b.degeneracy == ConicDegeneracy::TwoLines)
    fail(Err::Internal, "cone intersection produced a two-lines section");
  return {std::move(a), std::move(b)};
}

// All degree-2 curves lying on every pullback cone of the configuration.
template <class S>
struct DecalibrationFiber {
  using C = ClosureOf<S>;
  std::vector<SpaceConic<C>> conics;  // length 0, 1, or 2
};

template <class S>
DecalibrationFiber<S> decalibration_fiber(const CameraConfig<S>& config,
                                          const std::vector<Conic2<S>>& image_conics,
                                          double tol = kDefaultTol) {
  using C = ClosureOf<S>;
  if (config.size() < 2) fail(Err::Precondition, "decalibration fiber needs at least two views");
  if (image_conics.size() != config.size())
    fail(Err::Precondition, "decalibration fiber needs one image conic per camera");
  if (!config.general(tol)) fail(Err::Precondition, "decalibration fiber needs a general configuration");

  std::vector<Quadric3<S>> cones;
  cones.reserve(config.size());
  for (size_t i = 0; i < config.size(); ++i)
    cones.push_back(pullback_cone(config.cameras[i], image_conics[i], tol));

  DecalibrationFiber<S> fiber;
  PencilClassification<S> cls = pencil_classify(cones[0], cones[1], tol);
  if (cls.cls == PencilClass::IrreducibleQuartic || cls.cls == PencilClass::CubicPlusLine)
    return fiber;  // no degree-2 curve in the base locus

  auto sections = intersect_two_smooth_case(cones[0], cones[1], tol);
  for (auto& conic : sections) {
    bool on_all = true;
    for (size_t i = 2; i < cones.size() && on_all; ++i) {
      Quadric3<C> lifted(Mat4<C>(cones[i].m.template cast<C>()), tol);
      on_all = conic_on_quadric(conic, lifted, tol);
    }
    if (!on_all) continue;
    if constexpr (kIsExact<S>) {
      for (size_t i = 0; i < 2; ++i) {
        Quadric3<C> lifted(Mat4<C>(cones[i].m.template cast<C>()), tol);
        if (!conic_on_quadric(conic, lifted, tol))
          fail(Err::Internal, "fiber section escaped its defining cones");
      }
    }
    fiber.conics.push_back(std::move(conic));
  }
  return fiber;
}

// The other calibrating conic of a two-view calibration datum: the rank-2
// member of the cone pencil is plane_of(C) * residual_plane, so the residual
// plane is recovered by solving sym(plane^T p) = s * member — a linear
// system that stays inside the input tower (no square roots: one factor is
// already known). Applying this twice returns the original datum and no
// fixed point exists: a fixed plane would force the member to the square of
// the plane, which has rank 1, not 2.
template <class S>
CalibratedConfig<S> residual_calibration(const CalibratedConfig<S>& cal, double tol = kDefaultTol) {
  if (cal.size() != 2) fail(Err::Precondition, "residual calibration needs exactly two views");
  Quadric3<S> x1 = pullback_cone(cal.config.cameras[0], cal.image_conics[0], tol);
  Quadric3<S> x2 = pullback_cone(cal.config.cameras[1], cal.image_conics[1], tol);
  auto r2 = rank_two_member(x1, x2, tol);
  if (!r2)
    fail(Err::Degenerate, "fiber computation failed: no rank-2 member in the cone pencil");

  // unknowns (p0..p3, s): plane^T p + p^T plane - s * member = 0, upper triangle
  const RowVec4<S>& plane = cal.space_conic.plane;
  Mat<S> design = Mat<S>::Zero(10, 5);
  int row = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      design(row, i) += plane(j);
      design(row, j) += plane(i);
      design(row, 4) = -r2->member(i, j);
      ++row;
    }
  Mat<S> ker;
  if constexpr (kIsExact<S>) {
    ker = exact_null_space(design);
  } else {
    ker = float_null_space(design, tol);
  }
  if (ker.cols() != 1)
    fail(Err::Degenerate, "fiber computation failed: calibrating plane does not divide the member");
  RowVec4<S> residual_plane = ker.col(0).head(4).transpose();
  if (is_zero_mat(residual_plane, tol))
    fail(Err::Internal, "residual plane vanished");
  SpaceConic<S> residual(residual_plane, x1, tol);
  return CalibratedConfig<S>(cal.config, cal.image_conics, residual, tol);
}

// The twisted pair of a pose: the second camera composed with the 180-degree
// rotation about the baseline. Over exact towers the formulas are kept
// homogeneous in s = a^2+b^2+c^2 instead of rescaling t to unit length
// (projectively the same maps; no square root needed); the float tower
// rescales. Isotropic exact translations (s = 0) cannot be rescaled at all:
// the literal unit-normalized formulas are evaluated on the raw t and the
// result is flagged degenerate (its residual conic is a doubled line).
template <class S>
struct TwistedPair {
  Mat4<S> r_t;           // projective involution when not degenerate
  Camera<S> p2_twisted;  // R[I|t] . R_t
  Homography<S> h;       // sends the twisted datum back to the original cameras
  bool degenerate = false;
};

template <class S>
TwistedPair<S> twisted_pair(const Mat3<S>& r, const Vec3<S>& t, double tol = kDefaultTol) {
  if (is_zero_mat(t, tol)) fail(Err::Precondition, "twisted pair needs a nonzero translation");
  if (!is_zero_mat(Mat3<S>(r * r.transpose() - Mat3<S>::Identity()), tol))
    fail(Err::Precondition, "twisted pair needs an orthogonal rotation");

  Vec3<S> tt = t;
  S s = t(0) * t(0) + t(1) * t(1) + t(2) * t(2);
  bool degenerate = false;
  S corner;
  Mat3<S> core;
  if constexpr (kIsExact<S>) {
    degenerate = s.is_zero();
    if (degenerate) {
      core = S(2) * (tt * tt.transpose()) - Mat3<S>::Identity();
      corner = S(1);
    } else {
      core = S(2) * (tt * tt.transpose()) - s * Mat3<S>::Identity();
      corner = s;
    }
  } else {
    tt /= std::sqrt(s);
    core = 2.0 * (tt * tt.transpose()) - Mat3<S>::Identity();
    corner = S(1);
  }

  Mat4<S> r_t = Mat4<S>::Zero();
  r_t.template topLeftCorner<3, 3>() = core;
  r_t(3, 3) = corner;

  Mat34<S> p2;
  p2.template leftCols<3>() = r;
  p2.col(3) = r * tt;

  Mat4<S> h = corner * Mat4<S>::Identity();
  h.row(3) << S(-2) * tt(0), S(-2) * tt(1), S(-2) * tt(2), corner;

  return TwistedPair<S>{r_t, Camera<S>(Mat34<S>(p2 * r_t), tol), Homography<S>(h, tol), degenerate};
}

// A linear space of quadratic forms on P^3, as a basis of symmetric matrices.
template <class S>
struct QuadricSpace {
  std::vector<Mat4<S>> basis;
  int dimension() const { return static_cast<int>(basis.size()); }
};

namespace detail {

// The ten symmetric coefficient matrices of the monomials x_i x_j, i <= j,
// in a fixed order shared by both quadrics_through overloads.
template <class S>
std::array<Mat4<S>, 10> quadric_monomial_basis() {
  std::array<Mat4<S>, 10> out;
  int k = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      Mat4<S> m = Mat4<S>::Zero();
      if (i == j) m(i, i) = S(1);
      else m(i, j) = m(j, i) = S(1);
      out[static_cast<size_t>(k++)] = m;
    }
  return out;
}

}  // namespace detail

// Quadrics containing a plane conic: the kernel of the restriction map to
// the conic's plane, relative to the line spanned by the conic's own
// restricted form. Dimension 5 for every degeneracy type. Exact towers only.
template <class S>
QuadricSpace<S> quadrics_through(const SpaceConic<S>& c, double tol = kDefaultTol) {
  if constexpr (!kIsExact<S>) {
    fail(Err::Precondition, "quadric spaces are computed in exact towers only");
  } else {
    std::array<Mat4<S>, 10> basis = detail::quadric_monomial_basis<S>();
    Mat43<S> b = plane_basis(c.plane);
    Mat3<S> rc = b.transpose() * c.quadric.m * b;
    Mat<S> design = Mat<S>::Zero(6, 11);
    for (int k = 0; k < 10; ++k) {
      Mat3<S> restricted = b.transpose() * basis[static_cast<size_t>(k)] * b;
      int row = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) design(row++, k) = restricted(i, j);
    }
    int row = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) design(row++, 10) = -rc(i, j);
    Mat<S> ker = exact_null_space(design);
    QuadricSpace<S> out;
    for (Eigen::Index col = 0; col < ker.cols(); ++col) {
      Mat4<S> q = Mat4<S>::Zero();
      for (int k = 0; k < 10; ++k) q += ker(k, col) * basis[static_cast<size_t>(k)];
      if (is_zero_mat(q)) fail(Err::Internal, "kernel vector with zero quadric part");
      out.basis.push_back(q);
    }
    return out;
  }
}

namespace detail {

// Weighted-homogeneous polynomials on the weighted plane P(1,1,2) with
// coordinates (alpha, beta, mu). Degree-2 elements have monomials
// (alpha^2, alpha*beta, beta^2, mu); products land in the 9-dimensional
// degree-4 space (a^4, a^3 b, a^2 b^2, a b^3, b^4, mu a^2, mu a b, mu b^2,
// mu^2).
template <class S>
using Weighted2 = Eigen::Matrix<S, 4, 1>;

template <class S>
Eigen::Matrix<S, 9, 1> weighted_product(const Weighted2<S>& x, const Weighted2<S>& y) {
  Eigen::Matrix<S, 9, 1> out;
  out(0) = x(0) * y(0);
  out(1) = x(0) * y(1) + x(1) * y(0);
  out(2) = x(0) * y(2) + x(1) * y(1) + x(2) * y(0);
  out(3) = x(1) * y(2) + x(2) * y(1);
  out(4) = x(2) * y(2);
  out(5) = x(0) * y(3) + x(3) * y(0);
  out(6) = x(1) * y(3) + x(3) * y(1);
  out(7) = x(2) * y(3) + x(3) * y(2);
  out(8) = x(3) * y(3);
  return out;
}

// Pull a quadric back along the cone parametrization psi: each component of
// psi is a Weighted2; the composite q(psi) is the degree-4 coefficient
// vector.
template <class S>
Eigen::Matrix<S, 9, 1> compose_with_cone(const Mat4<S>& q,
                                         const std::array<Weighted2<S>, 4>& psi) {
  Eigen::Matrix<S, 9, 1> out = Eigen::Matrix<S, 9, 1>::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out += q(i, j) * weighted_product(psi[static_cast<size_t>(i)],
                                                                  psi[static_cast<size_t>(j)]);
  return out;
}

// Low-height candidates for a point on a cone over the Gaussian rationals,
// ordered so searches are deterministic.
inline const std::vector<GaussianRational>& anchor_candidate_values() {
  static const std::vector<GaussianRational> values = [] {
    std::vector<GaussianRational> v;
    auto push = [&](int re, int im) { v.emplace_back(Rational(re), Rational(im)); };
    push(0, 0);
    push(1, 0);
    push(-1, 0);
    push(0, 1);
    push(0, -1);
    push(1, 1);
    push(1, -1);
    push(-1, 1);
    push(-1, -1);
    push(2, 0);
    push(-2, 0);
    push(0, 2);
    push(0, -2);
    push(3, 0);
    push(-3, 0);
    return v;
  }();
  return values;
}

}  // namespace detail

// Quadrics containing the complete intersection of two cones. The first cone
// is parametrized by psi(alpha, beta, mu) = mu * vertex + chord(alpha, beta)
// through a known point (the anchor); a quadric contains the base curve iff
// its pullback along psi is proportional to the pullback of the second cone.
// The expected dimension is 2: the span of the two inputs. Exact towers
// only; inputs over the rationals get their basis re-expressed over the
// rationals at the end. An anchor point on the first cone (not the vertex)
// may be supplied; otherwise a deterministic low-height search runs, which
// can fail on cones without small Gaussian-rational points.
template <class S>
QuadricSpace<S> quadrics_through(const Quadric3<S>& q1, const Quadric3<S>& q2,
                                 std::optional<Vec4<ClosureOf<S>>> anchor = std::nullopt,
                                 double tol = kDefaultTol) {
  if constexpr (!kIsExact<S>) {
    fail(Err::Precondition, "quadric spaces are computed in exact towers only");
  } else {
    using G = ClosureOf<S>;
    if (!q1.is_cone()) fail(Err::Precondition, "the pair overload parametrizes a rank-3 cone");
    if (proportional(q1.m, q2.m, tol))
      fail(Err::Degenerate, "non-proper intersection: the quadrics coincide");

    Mat4<G> a = q1.m.template cast<G>();
    Mat4<G> b = q2.m.template cast<G>();
    Quadric3<G> cone(a, tol);
    Vec4<G> v = cone_vertex(cone, tol).v;

    // anchor on the cone, distinct from the vertex
    Vec4<G> p;
    bool found = false;
    if (anchor) {
      p = *anchor;
      G value = (p.transpose() * a * p)(0, 0);
      if (!value.is_zero() || is_zero_mat(p) || proportional(p, v))
        fail(Err::Precondition, "anchor is not a point of the first cone away from the vertex");
      found = true;
    } else {
      const auto& vals = detail::anchor_candidate_values();
      for (size_t i0 = 0; i0 < vals.size() && !found; ++i0)
        for (size_t i1 = 0; i1 < vals.size() && !found; ++i1)
          for (size_t i2 = 0; i2 < vals.size() && !found; ++i2)
            for (size_t i3 = 0; i3 < vals.size() && !found; ++i3) {
              Vec4<G> cand;
              cand << vals[i0], vals[i1], vals[i2], vals[i3];
              if (is_zero_mat(cand) || proportional(cand, v)) continue;
              if (!(cand.transpose() * a * cand)(0, 0).is_zero()) continue;
              p = cand;
              found = true;
            }
      if (!found)
        fail(Err::NotRepresentable,
             "no low-height point found on the first cone; supply an anchor");
    }

    // section plane missing the vertex, and the anchor pushed into it
    int pivot = 0;
    double best = -1;
    for (int i = 0; i < 4; ++i) {
      double mag = std::abs(ScalarTraits<G>::approx(v(i)));
      if (mag > best) { best = mag; pivot = i; }
    }
    RowVec4<G> omega = RowVec4<G>::Zero();
    omega(pivot) = G(Rational(1));
    G omega_v = v(pivot);
    G omega_p = p(pivot);
    Vec4<G> section_point = omega_v * p - omega_p * v;
    if (is_zero_mat(section_point)) fail(Err::Internal, "anchor collapsed onto the vertex");

    Mat43<G> bs = plane_basis(omega);
    Mat3<G> r3 = bs.transpose() * a * bs;
    // coordinates of the section point in the plane basis
    Mat3<G> normal = (bs.transpose() * bs);
    Vec3<G> u0 = normal.inverse() * (bs.transpose() * section_point);
    if (!is_zero_mat(Vec4<G>(bs * u0 - section_point)))
      fail(Err::Internal, "section point failed to land in the plane chart");
    G check = (u0.transpose() * r3 * u0)(0, 0);
    if (!check.is_zero()) fail(Err::Internal, "section point escaped the section conic");

    // chart directions independent of u0
    int upiv = 0;
    best = -1;
    for (int i = 0; i < 3; ++i) {
      double mag = std::abs(ScalarTraits<G>::approx(u0(i)));
      if (mag > best) { best = mag; upiv = i; }
    }
    Vec3<G> ea = Vec3<G>::Zero(), eb = Vec3<G>::Zero();
    int slot = 0;
    for (int i = 0; i < 3; ++i) {
      if (i == upiv) continue;
      if (slot == 0) ea(i) = G(Rational(1));
      else eb(i) = G(Rational(1));
      ++slot;
    }

    // chord parametrization of the section conic through u0:
    //   u(alpha, beta) = alpha ea + beta eb
    //   q(u) = (u^T r3 u) u0 - 2 (u0^T r3 u) u
    G aa = (ea.transpose() * r3 * ea)(0, 0);
    G ab = (ea.transpose() * r3 * eb)(0, 0);
    G bb = (eb.transpose() * r3 * eb)(0, 0);
    G ua = (u0.transpose() * r3 * ea)(0, 0);
    G ub = (u0.transpose() * r3 * eb)(0, 0);
    Vec3<G> q_a2 = aa * u0 - G(Rational(2)) * ua * ea;
    Vec3<G> q_ab = G(Rational(2)) * ab * u0 - G(Rational(2)) * (ua * eb + ub * ea);
    Vec3<G> q_b2 = bb * u0 - G(Rational(2)) * ub * eb;

    std::array<detail::Weighted2<G>, 4> psi;
    Vec4<G> x_a2 = bs * q_a2, x_ab = bs * q_ab, x_b2 = bs * q_b2;
    for (int i = 0; i < 4; ++i) {
      psi[static_cast<size_t>(i)] << x_a2(i), x_ab(i), x_b2(i), v(i);
    }

    // the parametrization must land on the first cone identically
    Eigen::Matrix<G, 9, 1> self = detail::compose_with_cone(a, psi);
    for (int i = 0; i < 9; ++i)
      if (!self(i).is_zero()) fail(Err::Internal, "cone parametrization left its cone");

    Eigen::Matrix<G, 9, 1> target = detail::compose_with_cone(b, psi);
    bool target_zero = true;
    for (int i = 0; i < 9; ++i) target_zero = target_zero && target(i).is_zero();
    if (target_zero)
      fail(Err::Degenerate, "non-proper intersection: the second quadric contains the cone");

    std::array<Mat4<G>, 10> monomials = detail::quadric_monomial_basis<G>();
    Mat<G> design = Mat<G>::Zero(9, 11);
    for (int k = 0; k < 10; ++k)
      design.col(k) = detail::compose_with_cone(monomials[static_cast<size_t>(k)], psi);
    design.col(10) = -target;
    Mat<G> ker = exact_null_space(design);

    // collect the quadric parts; for rational inputs re-express the
    // conjugation-stable span over the rationals
    std::vector<Vec<G>> coeffs;
    for (Eigen::Index col = 0; col < ker.cols(); ++col) coeffs.push_back(ker.col(col).head(10));

    QuadricSpace<S> out;
    if constexpr (std::is_same_v<S, GaussianRational>) {
      for (const auto& c : coeffs) {
        Mat4<S> q = Mat4<S>::Zero();
        for (int k = 0; k < 10; ++k) q += c(k) * monomials[static_cast<size_t>(k)];
        out.basis.push_back(q);
      }
    } else {
      Mat<Rational> stacked(2 * static_cast<Eigen::Index>(coeffs.size()), 10);
      for (size_t i = 0; i < coeffs.size(); ++i)
        for (int k = 0; k < 10; ++k) {
          stacked(static_cast<Eigen::Index>(2 * i), k) = coeffs[i](k).re;
          stacked(static_cast<Eigen::Index>(2 * i + 1), k) = coeffs[i](k).im;
        }
      exact_rref(stacked);
      std::array<Mat4<Rational>, 10> rational_monomials = detail::quadric_monomial_basis<Rational>();
      for (Eigen::Index r = 0; r < stacked.rows(); ++r) {
        bool zero_row = true;
        for (int k = 0; k < 10 && zero_row; ++k) zero_row = stacked(r, k).is_zero();
        if (zero_row) continue;
        Mat4<Rational> q = Mat4<Rational>::Zero();
        for (int k = 0; k < 10; ++k) q += stacked(r, k) * rational_monomials[static_cast<size_t>(k)];
        out.basis.push_back(q);
      }
    }
    return out;
  }
}

}  // namespace mvlab
