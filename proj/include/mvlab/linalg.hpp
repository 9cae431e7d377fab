#pragma once

// Rank / kernel / decomposition kit. Exact towers use hand-rolled Gaussian
// elimination (pivot = first nonzero entry; fields have no useful magnitude),
// float goes through Eigen's SVD with a relative threshold.

#include <vector>

#include "mvlab/types.hpp"

namespace mvlab {

// Reduced row echelon form; returns pivot column indices.
template <class S>
std::vector<int> exact_rref(Mat<S>& m) {
  static_assert(kIsExact<S>);
  std::vector<int> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index sel = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r)
      if (!m(r, col).is_zero()) { sel = r; break; }
    if (sel < 0) continue;
    m.row(sel).swap(m.row(row));
    S inv = S(1) / m(row, col);
    for (Eigen::Index c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero()) continue;
      S f = m(r, col);
      for (Eigen::Index c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  return pivots;
}

template <class S>
int exact_rank(Mat<S> m) {
  auto p = exact_rref(m);
  return static_cast<int>(p.size());
}

// Kernel basis as columns; rank + cols(kernel) = cols(m) by construction.
template <class S>
Mat<S> exact_null_space(const Mat<S>& input) {
  static_assert(kIsExact<S>);
  Mat<S> m = input;
  std::vector<int> pivots = exact_rref(m);
  std::vector<int> free_cols;
  {
    size_t pi = 0;
    for (int c = 0; c < m.cols(); ++c) {
      if (pi < pivots.size() && pivots[pi] == c) { ++pi; continue; }
      free_cols.push_back(c);
    }
  }
  Mat<S> basis = Mat<S>::Zero(m.cols(), static_cast<Eigen::Index>(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    int fc = free_cols[k];
    basis(fc, static_cast<Eigen::Index>(k)) = S(1);
    for (size_t pi = 0; pi < pivots.size(); ++pi)
      basis(pivots[pi], static_cast<Eigen::Index>(k)) = -m(static_cast<Eigen::Index>(pi), fc);
  }
  return basis;
}

template <class S>
S exact_det(Mat<S> m) {
  static_assert(kIsExact<S>);
  if (m.rows() != m.cols()) fail(Err::Precondition, "determinant of non-square matrix");
  S det = S(1);
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    Eigen::Index sel = -1;
    for (Eigen::Index r = col; r < m.rows(); ++r)
      if (!m(r, col).is_zero()) { sel = r; break; }
    if (sel < 0) return S(0);
    if (sel != col) { m.row(sel).swap(m.row(col)); det = -det; }
    det *= m(col, col);
    S inv = S(1) / m(col, col);
    for (Eigen::Index r = col + 1; r < m.rows(); ++r) {
      if (m(r, col).is_zero()) continue;
      S f = m(r, col) * inv;
      for (Eigen::Index c = col; c < m.cols(); ++c) m(r, c) -= f * m(col, c);
    }
  }
  return det;
}

// Unique solution of a square nonsingular exact system.
template <class S>
Vec<S> exact_solve(Mat<S> a, Vec<S> b) {
  static_assert(kIsExact<S>);
  if (a.rows() != a.cols() || a.rows() != b.rows()) fail(Err::Precondition, "bad solve dimensions");
  Mat<S> aug(a.rows(), a.cols() + 1);
  aug << a, b;
  auto pivots = exact_rref(aug);
  if (static_cast<Eigen::Index>(pivots.size()) != a.cols() ||
      (!pivots.empty() && pivots.back() == a.cols()))
    fail(Err::Degenerate, "singular system");
  return aug.col(a.cols());
}

struct Svd {
  Eigen::MatrixXd u, v;
  Eigen::VectorXd sigma;  // descending
};

inline Svd svd(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Svd{dec.matrixU(), dec.matrixV(), dec.singularValues()};
}

inline int float_rank(const Eigen::MatrixXd& m, double tol = kDefaultTol) {
  if (tol <= 0) fail(Err::Precondition, "rank tolerance must be positive");
  Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

// Columns of V matching singular values below tol * sigma_max.
inline Eigen::MatrixXd float_null_space(const Eigen::MatrixXd& m, double tol = kDefaultTol) {
  Svd d = svd(m);
  double smax = d.sigma.size() ? d.sigma(0) : 0.0;
  Eigen::Index keep_from = d.sigma.size();
  for (Eigen::Index i = 0; i < d.sigma.size(); ++i)
    if (d.sigma(i) <= tol * (smax > 0 ? smax : 1.0)) { keep_from = i; break; }
  Eigen::Index extra = m.cols() - d.sigma.size();  // wide matrices: trailing V columns
  Eigen::Index dim = (d.sigma.size() - keep_from) + std::max<Eigen::Index>(extra, 0);
  return d.v.rightCols(dim);
}

template <class S>
int rank_of(const Mat<S>& m, double tol = kDefaultTol) {
  if constexpr (kIsExact<S>) {
    (void)tol;
    return exact_rank(m);
  } else {
    return float_rank(m, tol);
  }
}

template <class S, int R, int C>
int rank_of(const Eigen::Matrix<S, R, C>& m, double tol = kDefaultTol) {
  Mat<S> d = m;
  return rank_of(d, tol);
}

// RQ decomposition of an invertible 3x3: m = k * r with k upper triangular and
// r orthogonal, computed from the QR of the row-reversed transpose. Signs are
// flipped so k(0,0), k(1,1) > 0, then k is scaled to k(2,2) = 1; whatever
// det sign is left over stays in r and is the caller's mirror flag.
struct RqResult {
  Eigen::Matrix3d k, r;
  bool det_negative = false;  // r came out in O(3) \ SO(3); never silently negated
};

inline RqResult rq_decompose(const Eigen::Matrix3d& m) {
  if (std::abs(m.determinant()) < 1e-14 * std::pow(m.norm(), 3) || m.determinant() == 0)
    fail(Err::Degenerate, "rq: matrix is singular");
  Eigen::Matrix3d rev;
  rev << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  Eigen::HouseholderQR<Eigen::Matrix3d> qr((rev * m).transpose());
  Eigen::Matrix3d q = qr.householderQ();
  Eigen::Matrix3d tri = qr.matrixQR().triangularView<Eigen::Upper>();
  Eigen::Matrix3d k = rev * tri.transpose() * rev;
  Eigen::Matrix3d r = rev * q.transpose();
  for (int i = 0; i < 2; ++i) {
    if (k(i, i) < 0) {
      k.col(i) = -k.col(i);
      r.row(i) = -r.row(i);
    }
  }
  if (k(2, 2) < 0) {  // absorb the last sign into the returned scale... keep k22 > 0
    k.col(2) = -k.col(2);
    r.row(2) = -r.row(2);
  }
  k /= k(2, 2);
  return RqResult{k, r, r.determinant() < 0};
}

// Congruence diagonalization of a symmetric matrix: p^T m p = diag(d) with p
// invertible. Works over any of the towers (symmetric Gaussian elimination;
// a zero diagonal is repaired by adding the row/column of a nonzero partner).
template <class S>
struct SymDiagonalization {
  Mat<S> p;
  Vec<S> d;
};

template <class S>
SymDiagonalization<S> diagonalize_symmetric(Mat<S> m, double tol = kDefaultTol) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) fail(Err::Precondition, "diagonalize: non-square");
  double scale = frobenius_scale(m);
  auto zero = [&](const S& x) { return ScalarTraits<S>::is_zero(x, tol, scale); };
  Mat<S> p = Mat<S>::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (zero(m(k, k))) {
      Eigen::Index swap = -1, partner = -1;
      for (Eigen::Index r = k + 1; r < n && swap < 0; ++r)
        if (!zero(m(r, r))) swap = r;
      if (swap >= 0) {
        m.row(k).swap(m.row(swap));
        m.col(k).swap(m.col(swap));
        p.col(k).swap(p.col(swap));
      } else {
        for (Eigen::Index r = k + 1; r < n && partner < 0; ++r)
          if (!zero(m(k, r))) partner = r;
        if (partner < 0) continue;  // row/col already zero
        m.col(k) += m.col(partner);  // x_partner += x_k pulls 2*m(k,partner) onto the diagonal
        m.row(k) += m.row(partner);
        p.col(k) += p.col(partner);
      }
    }
    if (zero(m(k, k))) continue;
    S inv = S(1) / m(k, k);
    for (Eigen::Index r = k + 1; r < n; ++r) {
      if (zero(m(r, k))) continue;
      S f = m(r, k) * inv;
      m.row(r) -= f * m.row(k);
      m.col(r) -= f * m.col(k);
      p.col(r) -= f * p.col(k);
    }
  }
  SymDiagonalization<S> out;
  out.p = p;
  out.d = m.diagonal();
  return out;
}

// Upper-triangular Cholesky-style factor: u * u^T = m for SPD m, diag(u) > 0.
inline Eigen::Matrix3d cholesky_upper(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d rev;
  rev << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  Eigen::LLT<Eigen::Matrix3d> llt(rev * m * rev);
  if (llt.info() != Eigen::Success) fail(Err::Degenerate, "cholesky: matrix not positive definite");
  Eigen::Matrix3d l = llt.matrixL();
  return rev * l * rev;
}

}  // namespace mvlab
