#pragma once

// n-view configurations: the stacked multiview matrix, joint-image
// membership, triangulation, resection, constraint generation, and
// projective-equivalence recovery.

#include <array>
#include <optional>
#include <vector>

#include "mvlab/epipolar.hpp"

namespace mvlab {

template <class S>
struct CameraConfig {
  std::vector<Camera<S>> cameras;

  explicit CameraConfig(std::vector<Camera<S>> cams) : cameras(std::move(cams)) {
    if (cameras.empty()) fail(Err::Precondition, "configuration needs at least one camera");
  }
  size_t size() const { return cameras.size(); }

  // All centers pairwise distinct.
  bool general(double tol = kDefaultTol) const {
    std::vector<HPoint3<S>> cs;
    cs.reserve(size());
    for (const auto& p : cameras) cs.push_back(camera_center(p, tol));
    for (size_t i = 0; i < cs.size(); ++i)
      for (size_t j = i + 1; j < cs.size(); ++j)
        if (cs[i].same_point(cs[j], tol)) return false;
    return true;
  }
};

// True iff the centers span at most a line (always true for n <= 2).
template <class S>
bool centers_collinear(const CameraConfig<S>& config, double tol = kDefaultTol) {
  Mat<S> centers(4, static_cast<Eigen::Index>(config.size()));
  for (size_t i = 0; i < config.size(); ++i)
    centers.col(static_cast<Eigen::Index>(i)) = camera_center(config.cameras[i], tol).v;
  return rank_of(centers, tol) <= 2;
}

// The 3n x (4+n) stack: block row i is [P_i | ... -x_i ...] with -x_i in
// column 4+i, so a kernel vector (xi, lambda) satisfies P_i.xi = lambda_i.x_i.
template <class S>
Mat<S> multiview_matrix(const CameraConfig<S>& config, const Correspondence<S>& corr) {
  const size_t n = config.size();
  if (corr.views() != n) fail(Err::Precondition, "correspondence length must match camera count");
  Mat<S> m = Mat<S>::Zero(static_cast<Eigen::Index>(3 * n), static_cast<Eigen::Index>(4 + n));
  for (size_t i = 0; i < n; ++i) {
    m.block(static_cast<Eigen::Index>(3 * i), 0, 3, 4) = config.cameras[i].m;
    m.block(static_cast<Eigen::Index>(3 * i), static_cast<Eigen::Index>(4 + i), 3, 1) =
        -corr.points[i].v;
  }
  return m;
}

struct MembershipResult {
  int rank = 0;
  bool on_joint_image = false;
};

// Joint-image membership against the closure (the multiview scheme): the
// correspondence is a member iff the stacked matrix loses rank. A nonzero
// kernel vector always carries a nonzero world part (a zero world part forces
// every lambda_i.x_i = 0, hence the whole vector to vanish).
template <class S>
MembershipResult membership_rank(const CameraConfig<S>& config, const Correspondence<S>& corr,
                                    double tol = kDefaultTol) {
  Mat<S> m = multiview_matrix(config, corr);
  MembershipResult out;
  out.rank = rank_of(m, tol);
  out.on_joint_image = out.rank <= static_cast<int>(config.size()) + 3;
  if constexpr (kIsExact<S>) {
    if (out.on_joint_image) {
      Mat<S> mm = m;
      Mat<S> ker = exact_null_space(mm);
      bool witness = false;
      for (Eigen::Index c = 0; c < ker.cols() && !witness; ++c)
        witness = !is_zero_mat(ker.col(c).head(4));
      if (!witness) fail(Err::Internal, "rank-deficient multiview matrix without world witness");
    }
  }
  return out;
}

// Recover the world point from a member correspondence. Ambiguity (kernel of
// dimension >= 2) happens exactly on the contracted baseline of a collinear
// configuration and is reported, never resolved silently.
template <class S>
HPoint3<S> triangulate(const CameraConfig<S>& config, const Correspondence<S>& corr,
                       double tol = kDefaultTol) {
  Mat<S> m = multiview_matrix(config, corr);
  Mat<S> ker;
  if constexpr (kIsExact<S>) {
    Mat<S> mm = m;
    ker = exact_null_space(mm);
  } else {
    ker = float_null_space(m, tol);
  }
  if (ker.cols() == 0) fail(Err::Precondition, "correspondence is not on the joint image");
  if (ker.cols() > 1)
    fail(Err::Ambiguous, "triangulation ambiguous: correspondence lies on the contracted baseline");
  Vec4<S> xi = ker.col(0).head(4);
  if (is_zero_mat(xi, tol)) fail(Err::Internal, "member correspondence without world point");
  return HPoint3<S>(xi);
}

// Camera from >= 6 world/image pairs (DLT). Per point, the proportionality
// P.xi ~ x gives two independent linear rows, chosen against the largest
// image coordinate so no division ever happens.
template <class S>
Camera<S> resect(const std::vector<HPoint3<S>>& world, const std::vector<HPoint2<S>>& image,
                 double tol = kDefaultTol) {
  if (world.size() != image.size()) fail(Err::Precondition, "resection needs matching point lists");
  if (world.size() < 6) fail(Err::Precondition, "resection needs at least 6 points");
  const auto m = static_cast<Eigen::Index>(world.size());
  Mat<S> design = Mat<S>::Zero(2 * m, 12);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Vec3<S>& x = image[static_cast<size_t>(k)].v;
    int pivot = 0;
    double best = -1;
    for (int i = 0; i < 3; ++i) {
      double a = std::abs(ScalarTraits<S>::approx(x(i)));
      if (a > best) { best = a; pivot = i; }
    }
    int row = 0;
    for (int other = 0; other < 3; ++other) {
      if (other == pivot) continue;
      // x_pivot * (P row_other . xi) - x_other * (P row_pivot . xi) = 0
      for (int c = 0; c < 4; ++c) {
        design(2 * k + row, 4 * other + c) += x(pivot) * world[static_cast<size_t>(k)].v(c);
        design(2 * k + row, 4 * pivot + c) -= x(other) * world[static_cast<size_t>(k)].v(c);
      }
      ++row;
    }
  }
  Mat<S> ker;
  if constexpr (kIsExact<S>) {
    Mat<S> d = design;
    ker = exact_null_space(d);
  } else {
    ker = float_null_space(design, tol);
  }
  if (ker.cols() == 0) fail(Err::Precondition, "no camera projects the world points to the images");
  if (ker.cols() > 1) fail(Err::Degenerate, "resection ambiguous: degenerate world points");
  Mat34<S> p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) p(i, j) = ker(4 * i + j, 0);
  return Camera<S>(p, tol);  // the rank-3 check rejects degenerate solutions
}

// ---------------------------------------------------------------------------
// Constraint generation

template <class S>
struct BilinearConstraint {
  int view_i, view_j;
  BilinearForm<S> form;
};

// A trilinear bundle is the family of 7x7 minors of the three-view stacked
// matrix; the row choices (out of its 9 rows) are listed explicitly. Every
// 7-of-9 subset keeps at least one row from each view, because a view owns
// only 3 of the 9 rows and just 2 are dropped.
template <class S>
struct TrilinearBundle {
  int view_i, view_j, view_k;
  std::vector<std::array<int, 7>> row_choices;
};

template <class S>
struct ConstraintSet {
  std::vector<BilinearConstraint<S>> bilinear;
  std::vector<TrilinearBundle<S>> trilinear;
};

template <class S>
ConstraintSet<S> constraint_polynomials(const CameraConfig<S>& config, double tol = kDefaultTol) {
  if (!config.general(tol)) fail(Err::Precondition, "constraint generation needs a general configuration");
  ConstraintSet<S> out;
  const int n = static_cast<int>(config.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out.bilinear.push_back({i, j, fundamental_from_pair(config.cameras[static_cast<size_t>(i)],
                                                          config.cameras[static_cast<size_t>(j)], tol)});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        TrilinearBundle<S> b{i, j, k, {}};
        std::array<int, 7> rows{};
        for (int skip1 = 0; skip1 < 9; ++skip1)
          for (int skip2 = skip1 + 1; skip2 < 9; ++skip2) {
            int w = 0;
            for (int r = 0; r < 9; ++r)
              if (r != skip1 && r != skip2) rows[static_cast<size_t>(w++)] = r;
            b.row_choices.push_back(rows);
          }
        out.trilinear.push_back(std::move(b));
      }
  return out;
}

template <class S>
S evaluate_bilinear(const BilinearConstraint<S>& b, const Correspondence<S>& corr) {
  return b.form.eval(corr.points[static_cast<size_t>(b.view_i)],
                     corr.points[static_cast<size_t>(b.view_j)]);
}

// Values of every minor in the bundle on a correspondence.
template <class S>
std::vector<S> evaluate_trilinear(const CameraConfig<S>& config, const TrilinearBundle<S>& b,
                                  const Correspondence<S>& corr) {
  std::vector<Camera<S>> cams{config.cameras[static_cast<size_t>(b.view_i)],
                              config.cameras[static_cast<size_t>(b.view_j)],
                              config.cameras[static_cast<size_t>(b.view_k)]};
  std::vector<HPoint2<S>> pts{corr.points[static_cast<size_t>(b.view_i)],
                              corr.points[static_cast<size_t>(b.view_j)],
                              corr.points[static_cast<size_t>(b.view_k)]};
  Mat<S> m = multiview_matrix(CameraConfig<S>(cams), Correspondence<S>(pts));
  std::vector<S> values;
  values.reserve(b.row_choices.size());
  for (const auto& rows : b.row_choices) {
    Mat<S> minor(7, 7);
    for (int r = 0; r < 7; ++r) minor.row(r) = m.row(rows[static_cast<size_t>(r)]);
    if constexpr (kIsExact<S>) values.push_back(exact_det(minor));
    else values.push_back(Eigen::MatrixXd(minor).determinant());
  }
  return values;
}

// ---------------------------------------------------------------------------
// Projective equivalence

// Searches for H with P^B_i ~ P^A_i . H for every i. The per-camera scales
// are eliminated by writing all 2x2 minors of the stacked pair of flattened
// matrices, which is linear in H. Returns nothing when the configs are not
// equivalent.
template <class S>
std::optional<Homography<S>> recover_homography(const CameraConfig<S>& a, const CameraConfig<S>& b,
                                                double tol = kDefaultTol) {
  if (a.size() != b.size() || a.size() < 2)
    fail(Err::Precondition, "equivalence needs two configurations of equal length >= 2");
  if (!a.general(tol) || !b.general(tol))
    fail(Err::Precondition, "equivalence test needs general configurations");
  const auto n = static_cast<Eigen::Index>(a.size());
  // unknowns: vec(H) row-major, 16
  std::vector<Eigen::Matrix<S, 1, 16>> rows;
  for (Eigen::Index cam = 0; cam < n; ++cam) {
    const Mat34<S>& pa = a.cameras[static_cast<size_t>(cam)].m;
    const Mat34<S>& pb = b.cameras[static_cast<size_t>(cam)].m;
    // entry (r,c) of PA.H = sum_k pa(r,k) H(k,c)
    for (int rc = 0; rc < 12; ++rc)
      for (int rc2 = rc + 1; rc2 < 12; ++rc2) {
        int r1 = rc / 4, c1 = rc % 4, r2 = rc2 / 4, c2 = rc2 % 4;
        Eigen::Matrix<S, 1, 16> row = Eigen::Matrix<S, 1, 16>::Zero();
        for (int k = 0; k < 4; ++k) {
          row(4 * k + c1) += pb(r2, c2) * pa(r1, k);
          row(4 * k + c2) -= pb(r1, c1) * pa(r2, k);
        }
        rows.push_back(row);
      }
  }
  Mat<S> design(static_cast<Eigen::Index>(rows.size()), 16);
  for (size_t i = 0; i < rows.size(); ++i) design.row(static_cast<Eigen::Index>(i)) = rows[i];
  Mat<S> ker;
  if constexpr (kIsExact<S>) {
    Mat<S> d = design;
    ker = exact_null_space(d);
  } else {
    ker = float_null_space(design, tol);
  }
  for (Eigen::Index c = 0; c < ker.cols(); ++c) {
    Mat4<S> h;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = ker(4 * i + j, c);
    if (rank_of(h, tol) != 4) continue;
    bool all_match = true;
    for (Eigen::Index cam = 0; cam < n && all_match; ++cam)
      all_match = proportional(Mat34<S>(a.cameras[static_cast<size_t>(cam)].m * h),
                               b.cameras[static_cast<size_t>(cam)].m, tol);
    if (all_match) return Homography<S>(h, tol);
  }
  return std::nullopt;
}

}  // namespace mvlab
