#pragma once

// Eigen aliases over the scalar towers plus proportional-equality helpers.
// Projective objects compare up to a nonzero scalar everywhere.

#include <Eigen/Dense>

#include "mvlab/scalar.hpp"

namespace Eigen {

template <>
struct NumTraits<mvlab::Rational> : GenericNumTraits<mvlab::Rational> {
  typedef mvlab::Rational Real;
  typedef mvlab::Rational NonInteger;
  typedef mvlab::Rational Nested;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 60,
    MulCost = 60,
  };
  static inline Real epsilon() { return mvlab::Rational(0); }
  static inline Real dummy_precision() { return mvlab::Rational(0); }
  static inline int digits10() { return 0; }
};

// Treated as an opaque field scalar (IsComplex stays 0): we never route
// Gaussian matrices through decompositions that would want real/imag hooks.
template <>
struct NumTraits<mvlab::GaussianRational> : GenericNumTraits<mvlab::GaussianRational> {
  typedef mvlab::GaussianRational Real;
  typedef mvlab::GaussianRational NonInteger;
  typedef mvlab::GaussianRational Nested;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 16,
    AddCost = 120,
    MulCost = 240,
  };
  static inline Real epsilon() { return mvlab::GaussianRational(0); }
  static inline Real dummy_precision() { return mvlab::GaussianRational(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace mvlab {

template <class S> using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S> using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S> using Mat3 = Eigen::Matrix<S, 3, 3>;
template <class S> using Mat4 = Eigen::Matrix<S, 4, 4>;
template <class S> using Mat34 = Eigen::Matrix<S, 3, 4>;
template <class S> using Mat43 = Eigen::Matrix<S, 4, 3>;
template <class S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <class S> using Vec4 = Eigen::Matrix<S, 4, 1>;
template <class S> using RowVec4 = Eigen::Matrix<S, 1, 4>;

template <class Derived>
double frobenius_scale(const Eigen::MatrixBase<Derived>& m) {
  double s = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double a = std::abs(ScalarTraits<typename Derived::Scalar>::approx(m(i, j)));
      s += a * a;
    }
  return std::sqrt(s);
}

template <class Derived>
bool is_zero_mat(const Eigen::MatrixBase<Derived>& m, double tol = kDefaultTol) {
  using S = typename Derived::Scalar;
  if constexpr (kIsExact<S>) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (!m(i, j).is_zero()) return false;
    return true;
  } else {
    return frobenius_scale(m) <= tol;
  }
}

// a == lambda * b for some nonzero lambda. Exact mode finds the pivot and
// checks entrywise equality; float mode compares directions via the angle.
template <class DerivedA, class DerivedB>
bool proportional(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                  double tol = kDefaultTol) {
  using S = typename DerivedA::Scalar;
  static_assert(std::is_same_v<S, typename DerivedB::Scalar>);
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if constexpr (kIsExact<S>) {
    Eigen::Index pi = -1, pj = -1;
    for (Eigen::Index i = 0; i < b.rows() && pi < 0; ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        if (!b(i, j).is_zero()) { pi = i; pj = j; break; }
    if (pi < 0) return is_zero_mat(a);  // b == 0: proportional only to 0
    if (a(pi, pj).is_zero()) return false;
    S lambda = a(pi, pj) / b(pi, pj);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (a(i, j) != lambda * b(i, j)) return false;
    return true;
  } else {
    double na = 0, nb = 0;
    std::complex<double> dot(0, 0);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        Complex x = ScalarTraits<S>::approx(a(i, j));
        Complex y = ScalarTraits<S>::approx(b(i, j));
        na += std::norm(x);
        nb += std::norm(y);
        dot += x * std::conj(y);
      }
    if (na == 0 && nb == 0) return true;
    if (na == 0 || nb == 0) return false;
    double cosine = std::abs(dot) / std::sqrt(na * nb);
    return 1.0 - cosine <= tol;
  }
}

// Divides out the leading nonzero coefficient (exact) or the largest-magnitude
// entry (float) so representatives of a projective class print canonically.
template <class Derived>
void normalize_projective(Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  if constexpr (kIsExact<S>) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (!m(i, j).is_zero()) {
          S p = m(i, j);
          for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) /= p;
          return;
        }
  } else {
    double best = 0;
    S pivot = S(0);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (std::abs(m(i, j)) > best) { best = std::abs(m(i, j)); pivot = m(i, j); }
    if (best > 0) m /= pivot;
  }
}

}  // namespace mvlab
