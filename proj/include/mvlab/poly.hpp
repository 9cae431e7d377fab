#pragma once

// Polynomial kit: univariate polynomials over the towers, binary forms (for
// pencil determinants), ternary forms (for resultant projections), exact
// squarefree decomposition, and root extraction.
//
// Root policy in the exact towers: multiplicity structure is computed exactly
// (Yun's algorithm), root values are located numerically at 200 digits and
// promoted back to the tower by continued-fraction reconstruction followed by
// exact verification. Roots that fail to land in Q(i) stay numeric and carry
// exact = false.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "mvlab/linalg.hpp"

namespace mvlab {

using HpFloat = boost::multiprecision::cpp_bin_float_100;
using HpComplex = boost::multiprecision::cpp_complex_100;

namespace detail {
inline HpFloat to_hp(const Rational& r) {
  return HpFloat(r.num()) / HpFloat(r.den());
}
inline HpComplex to_hp_complex(const Rational& r) { return HpComplex(to_hp(r)); }
inline HpComplex to_hp_complex(const GaussianRational& z) {
  return HpComplex(to_hp(z.re), to_hp(z.im));
}
inline HpComplex to_hp_complex(double x) { return HpComplex(x); }
}  // namespace detail

// Dense univariate polynomial, coefficients ascending: c[i] * x^i.
template <class S>
struct Poly {
  std::vector<S> c;

  Poly() = default;
  explicit Poly(std::vector<S> coeffs) : c(std::move(coeffs)) { trim(); }

  void trim() {
    while (!c.empty() && ScalarTraits<S>::is_zero(c.back())) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero poly
  const S& lead() const { return c.back(); }

  S eval(const S& x) const {
    S acc = S(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Poly derivative() const {
    Poly d;
    for (size_t i = 1; i < c.size(); ++i) d.c.push_back(S(static_cast<long long>(i)) * c[i]);
    d.trim();
    return d;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), S(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    r.trim();
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), S(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
    r.trim();
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, S(0));
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    r.trim();
    return r;
  }
  Poly operator*(const S& s) const {
    Poly r = *this;
    for (auto& x : r.c) x *= s;
    r.trim();
    return r;
  }
};

// Exact Euclidean division; requires an exact field scalar.
template <class S>
std::pair<Poly<S>, Poly<S>> poly_divmod(Poly<S> num, const Poly<S>& den) {
  static_assert(kIsExact<S>);
  if (den.is_zero()) fail(Err::Precondition, "polynomial division by zero");
  Poly<S> q;
  if (num.degree() >= den.degree()) q.c.assign(num.degree() - den.degree() + 1, S(0));
  while (!num.is_zero() && num.degree() >= den.degree()) {
    int shift = num.degree() - den.degree();
    S f = num.lead() / den.lead();
    q.c[shift] = f;
    for (size_t i = 0; i < den.c.size(); ++i) num.c[shift + i] -= f * den.c[i];
    num.trim();
  }
  q.trim();
  return {q, num};
}

template <class S>
Poly<S> poly_gcd(Poly<S> a, Poly<S> b) {
  static_assert(kIsExact<S>);
  while (!b.is_zero()) {
    auto [q, r] = poly_divmod(a, b);
    a = b;
    b = r;
  }
  if (!a.is_zero()) a = a * (S(1) / a.lead());  // monic
  return a;
}

// Yun's squarefree decomposition: f = prod g_m^m over the listed (g_m, m).
template <class S>
std::vector<std::pair<Poly<S>, int>> squarefree_decomposition(const Poly<S>& f) {
  static_assert(kIsExact<S>);
  std::vector<std::pair<Poly<S>, int>> parts;
  if (f.degree() <= 0) return parts;
  Poly<S> fp = f.derivative();
  Poly<S> d = poly_gcd(f, fp);
  Poly<S> b = poly_divmod(f, d).first;
  Poly<S> c = poly_divmod(fp, d).first;
  Poly<S> w = c - b.derivative();
  int m = 1;
  while (b.degree() > 0) {
    Poly<S> g = poly_gcd(b, w);
    if (g.degree() > 0) parts.emplace_back(g, m);
    b = poly_divmod(b, g).first;
    w = poly_divmod(w, g).first - b.derivative();
    ++m;
  }
  return parts;
}

// ---------------------------------------------------------------------------
// Root containers

// A point of the projective parameter line: (value : 1), or (1 : 0).
struct ProjRootValue {
  GaussianRational value;
  bool at_infinity = false;

  friend bool operator==(const ProjRootValue& a, const ProjRootValue& b) {
    if (a.at_infinity != b.at_infinity) return false;
    return a.at_infinity || a.value == b.value;
  }
};

struct PolyRoot {
  ProjRootValue root;     // meaningful when exact
  Complex approx{0, 0};   // numeric location (finite roots)
  int multiplicity = 1;
  bool exact = false;     // value verified in the tower's closure Q(i)
  bool real = false;
};

namespace detail {

// Durand-Kerner on a squarefree polynomial with high-precision coefficients.
inline std::vector<HpComplex> durand_kerner(const std::vector<HpComplex>& monic_ascending) {
  const int n = static_cast<int>(monic_ascending.size()) - 1;
  std::vector<HpComplex> w(n);
  HpFloat bound(1);
  for (int i = 0; i < n; ++i) {
    HpFloat m = abs(monic_ascending[i]);
    if (m > bound) bound = m;
  }
  bound += 1;
  HpComplex seed(HpFloat("0.4"), HpFloat("0.9"));
  HpComplex acc(1);
  for (int i = 0; i < n; ++i) {
    acc *= seed;
    w[i] = acc * bound;
  }
  auto eval = [&](const HpComplex& x) {
    HpComplex v(0);
    for (int i = n; i >= 0; --i) v = v * x + monic_ascending[i];
    return v;
  };
  const HpFloat tiny = pow(HpFloat(10), -90);
  for (int iter = 0; iter < 500; ++iter) {
    HpFloat worst(0);
    for (int i = 0; i < n; ++i) {
      HpComplex denom(1);
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= (w[i] - w[j]);
      if (abs(denom) == 0) { w[i] += HpComplex(HpFloat("0.001"), HpFloat("0.002")); continue; }
      HpComplex delta = eval(w[i]) / denom;
      w[i] -= delta;
      HpFloat d = abs(delta);
      if (d > worst) worst = d;
    }
    if (worst < tiny) break;
  }
  return w;
}

// Continued-fraction reconstruction of a rational from a high-precision real.
inline std::optional<Rational> reconstruct_rational(const HpFloat& x) {
  const BigInt qmax = boost::multiprecision::pow(BigInt(10), 40);
  const HpFloat eps = pow(HpFloat(10), -60);
  // convergent recurrence seeds: h_{-1}/k_{-1} = 1/0, h_{-2}/k_{-2} = 0/1
  BigInt p_prev(0), q_prev(1), p_cur(1), q_cur(0);
  HpFloat rem = x;
  for (int step = 0; step < 200; ++step) {
    HpFloat fl = floor(rem);
    BigInt a = fl.convert_to<BigInt>();
    BigInt p_next = a * p_cur + p_prev;
    BigInt q_next = a * q_cur + q_prev;
    if (boost::multiprecision::abs(q_next) > qmax) return std::nullopt;
    p_prev = p_cur; q_prev = q_cur; p_cur = p_next; q_cur = q_next;
    HpFloat approx = HpFloat(p_cur) / HpFloat(q_cur);
    if (abs(x - approx) < eps) return Rational(p_cur, q_cur);
    HpFloat frac = rem - fl;
    if (frac < eps) return std::nullopt;  // ran out of precision without a hit
    rem = 1 / frac;
  }
  return std::nullopt;
}

inline std::optional<GaussianRational> reconstruct_gaussian(const HpComplex& z) {
  const HpFloat im_tiny = pow(HpFloat(10), -60) * (HpFloat(1) + abs(z));
  auto re = reconstruct_rational(z.real());
  if (!re) return std::nullopt;
  if (abs(z.imag()) < im_tiny) return GaussianRational(*re);
  auto im = reconstruct_rational(z.imag());
  if (!im) return std::nullopt;
  return GaussianRational(*re, *im);
}

template <class S>
GaussianRational lift_to_gaussian(const S& x) {
  if constexpr (std::is_same_v<S, Rational>) return GaussianRational(x);
  else if constexpr (std::is_same_v<S, GaussianRational>) return x;
  else { static_assert(std::is_same_v<S, Rational> || std::is_same_v<S, GaussianRational>); return {}; }
}

template <class S>
GaussianRational eval_in_gaussian(const Poly<S>& p, const GaussianRational& z) {
  GaussianRational acc(0);
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * z + lift_to_gaussian(*it);
  return acc;
}

inline bool hp_is_real(const HpComplex& z) {
  return abs(z.imag()) <= pow(HpFloat(10), -50) * (HpFloat(1) + abs(z));
}

// Exact towers: roots of a squarefree factor, each verified or left numeric.
template <class S>
void roots_of_squarefree(const Poly<S>& g, int multiplicity, std::vector<PolyRoot>& out) {
  static_assert(kIsExact<S>);
  if (g.degree() == 1) {  // exact by construction: -c0/c1
    GaussianRational v = -lift_to_gaussian(g.c[0]) / lift_to_gaussian(g.c[1]);
    PolyRoot r;
    r.root = ProjRootValue{v, false};
    r.approx = v.to_complex();
    r.multiplicity = multiplicity;
    r.exact = true;
    r.real = v.is_real();
    out.push_back(r);
    return;
  }
  std::vector<HpComplex> monic(g.c.size());
  HpComplex lead = to_hp_complex(g.lead());
  for (size_t i = 0; i < g.c.size(); ++i) monic[i] = to_hp_complex(g.c[i]) / lead;
  std::vector<HpComplex> w = durand_kerner(monic);
  for (const HpComplex& z : w) {
    PolyRoot r;
    r.multiplicity = multiplicity;
    r.approx = Complex(z.real().convert_to<double>(), z.imag().convert_to<double>());
    if (auto cand = reconstruct_gaussian(z); cand && eval_in_gaussian(g, *cand).is_zero()) {
      r.root = ProjRootValue{*cand, false};
      r.exact = true;
      r.real = cand->is_real();
      r.approx = cand->to_complex();
    } else {
      r.exact = false;
      r.real = hp_is_real(z);
      if (r.real) r.approx = Complex(r.approx.real(), 0.0);
    }
    out.push_back(r);
  }
}

// Float tower: numeric roots plus magnitude-based multiplicity clustering.
inline std::vector<PolyRoot> float_poly_roots(const Poly<double>& p, double tol) {
  std::vector<HpComplex> monic(p.c.size());
  for (size_t i = 0; i < p.c.size(); ++i) monic[i] = HpComplex(p.c[i] / p.lead());
  std::vector<HpComplex> w = durand_kerner(monic);
  std::vector<Complex> vals;
  double scale = 0;
  for (const auto& z : w) {
    Complex c(z.real().convert_to<double>(), z.imag().convert_to<double>());
    vals.push_back(c);
    scale = std::max(scale, std::abs(c));
  }
  double cluster_eps = std::max(tol, 1e-8) * std::max(1.0, scale);
  std::vector<bool> used(vals.size(), false);
  std::vector<PolyRoot> out;
  for (size_t i = 0; i < vals.size(); ++i) {
    if (used[i]) continue;
    Complex sum = vals[i];
    int count = 1;
    used[i] = true;
    for (size_t j = i + 1; j < vals.size(); ++j) {
      if (!used[j] && std::abs(vals[j] - vals[i]) < cluster_eps) {
        used[j] = true;
        sum += vals[j];
        ++count;
      }
    }
    PolyRoot r;
    r.approx = sum / static_cast<double>(count);
    r.multiplicity = count;
    r.exact = false;
    r.real = std::abs(r.approx.imag()) <= cluster_eps;
    if (r.real) r.approx = Complex(r.approx.real(), 0.0);
    out.push_back(r);
  }
  return out;
}

}  // namespace detail

// All roots of a univariate polynomial, with multiplicities.
template <class S>
std::vector<PolyRoot> poly_roots(const Poly<S>& p, double tol = kDefaultTol) {
  if (p.is_zero()) fail(Err::Precondition, "roots of the zero polynomial");
  std::vector<PolyRoot> out;
  if (p.degree() == 0) return out;
  if constexpr (kIsExact<S>) {
    (void)tol;
    for (const auto& [g, m] : squarefree_decomposition(p)) detail::roots_of_squarefree(g, m, out);
  } else {
    out = detail::float_poly_roots(p, tol);
  }
  return out;
}

// Roots of c3 x^3 + c2 x^2 + c1 x + c0; lower degree when c3 (etc.) vanishes.
template <class S>
std::vector<PolyRoot> solve_cubic(const S& c3, const S& c2, const S& c1, const S& c0,
                                  double tol = kDefaultTol) {
  Poly<S> p(std::vector<S>{c0, c1, c2, c3});
  if (p.is_zero()) fail(Err::Precondition, "cubic with all coefficients zero");
  return poly_roots(p, tol);
}

// ---------------------------------------------------------------------------
// Binary forms: f(l, u) = sum c[i] * l^(d-i) * u^i.

template <class S>
struct BinaryForm {
  int degree = 0;
  std::vector<S> c;  // size degree + 1

  BinaryForm() : degree(0), c{S(0)} {}
  BinaryForm(int d, std::vector<S> coeffs) : degree(d), c(std::move(coeffs)) {
    if (static_cast<int>(c.size()) != degree + 1) fail(Err::Precondition, "binary form size mismatch");
  }
  static BinaryForm constant(const S& s) { return BinaryForm(0, {s}); }
  static BinaryForm linear(const S& a, const S& b) { return BinaryForm(1, {a, b}); }  // a*l + b*u

  bool is_zero() const {
    for (const auto& x : c)
      if (!ScalarTraits<S>::is_zero(x)) return false;
    return true;
  }

  S eval(const S& l, const S& u) const {
    S acc(0);
    for (int i = 0; i <= degree; ++i) {
      S term = c[i];
      for (int k = 0; k < degree - i; ++k) term *= l;
      for (int k = 0; k < i; ++k) term *= u;
      acc += term;
    }
    return acc;
  }

  // Chart u = 1: ascending coefficients of x = l.
  Poly<S> chart() const {
    std::vector<S> a(degree + 1);
    for (int i = 0; i <= degree; ++i) a[degree - i] = c[i];
    return Poly<S>(std::move(a));
  }

  friend BinaryForm operator+(const BinaryForm& a, const BinaryForm& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.degree != b.degree) fail(Err::Precondition, "adding binary forms of different degree");
    BinaryForm r = a;
    for (int i = 0; i <= r.degree; ++i) r.c[i] += b.c[i];
    return r;
  }
  friend BinaryForm operator-(const BinaryForm& a, const BinaryForm& b) {
    BinaryForm nb = b;
    for (auto& x : nb.c) x = -x;
    return a + nb;
  }
  friend BinaryForm operator*(const BinaryForm& a, const BinaryForm& b) {
    BinaryForm r(a.degree + b.degree, std::vector<S>(a.degree + b.degree + 1, S(0)));
    for (int i = 0; i <= a.degree; ++i)
      for (int j = 0; j <= b.degree; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }
  BinaryForm operator*(const S& s) const {
    BinaryForm r = *this;
    for (auto& x : r.c) x *= s;
    return r;
  }
  friend BinaryForm operator-(const BinaryForm& a) {
    BinaryForm r = a;
    for (auto& x : r.c) x = -x;
    return r;
  }
};

// Multiplicity of the root (1:0), i.e. the power of u dividing f.
template <class S>
int infinity_multiplicity(const BinaryForm<S>& f) {
  for (int i = 0; i <= f.degree; ++i)
    if (!ScalarTraits<S>::is_zero(f.c[i])) return i;
  return f.degree + 1;  // unreachable for nonzero forms
}

// Projective roots of a nonzero binary form, multiplicities included.
template <class S>
std::vector<PolyRoot> binary_form_roots(const BinaryForm<S>& f, double tol = kDefaultTol) {
  if (f.is_zero()) fail(Err::Precondition, "roots of the zero form");
  std::vector<PolyRoot> out;
  int inf_mult = infinity_multiplicity(f);
  if (inf_mult > 0) {
    PolyRoot r;
    r.root = ProjRootValue{GaussianRational(0), true};
    r.multiplicity = inf_mult;
    r.exact = true;
    r.real = true;
    out.push_back(r);
  }
  Poly<S> p = f.chart();
  if (p.degree() > 0) {
    auto rest = poly_roots(p, tol);
    out.insert(out.end(), rest.begin(), rest.end());
  }
  return out;
}

// Root structure of a degree-4 pencil determinant.
template <class S>
std::vector<PolyRoot> quartic_root_structure(const BinaryForm<S>& f, double tol = kDefaultTol) {
  if (f.degree != 4) fail(Err::Precondition, "quartic root structure needs a degree-4 form");
  if (f.is_zero()) fail(Err::Precondition, "quartic root structure of the zero form");
  return binary_form_roots(f, tol);
}

template <class S>
BinaryForm<S> binary_from_chart(const Poly<S>& p, int total_degree) {
  // p describes the finite-chart polynomial; pad with u-powers up to degree.
  if (p.is_zero()) return BinaryForm<S>(total_degree, std::vector<S>(total_degree + 1, S(0)));
  std::vector<S> c(total_degree + 1, S(0));
  for (int j = 0; j <= p.degree(); ++j) c[total_degree - j] = p.c[j];
  return BinaryForm<S>(total_degree, std::move(c));
}

// Gcd of a collection of binary forms (monic chart gcd plus shared u-power).
template <class S>
BinaryForm<S> binary_forms_gcd(const std::vector<BinaryForm<S>>& forms) {
  static_assert(kIsExact<S>);
  bool any = false;
  int inf = 0;
  Poly<S> g;
  for (const auto& f : forms) {
    if (f.is_zero()) continue;
    int fi = infinity_multiplicity(f);
    Poly<S> p = f.chart();
    if (!any) {
      any = true;
      inf = fi;
      g = p;
      continue;
    }
    inf = std::min(inf, fi);
    g = poly_gcd(g, p);
  }
  if (!any) fail(Err::Precondition, "gcd of all-zero forms");
  return binary_from_chart(g, g.degree() + inf);
}

// Determinant of a small matrix over a commutative ring (cofactor expansion).
// T needs +, binary *, unary -, and a zero-tolerant +.
template <class T>
T ring_det(const std::vector<std::vector<T>>& m) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  T acc{};
  bool first = true;
  for (size_t j = 0; j < n; ++j) {
    std::vector<std::vector<T>> minor(n - 1, std::vector<T>(n - 1));
    for (size_t r = 1; r < n; ++r) {
      size_t cc = 0;
      for (size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        minor[r - 1][cc++] = m[r][c];
      }
    }
    T term = m[0][j] * ring_det(minor);
    if (j % 2 == 1) term = -term;
    if (first) {
      acc = term;
      first = false;
    } else {
      acc = acc + term;
    }
  }
  return acc;
}

// det(l*Q1 + u*Q2) as a binary form of degree n.
template <class S>
BinaryForm<S> pencil_determinant(const Mat<S>& q1, const Mat<S>& q2) {
  const Eigen::Index n = q1.rows();
  std::vector<std::vector<BinaryForm<S>>> entries(n, std::vector<BinaryForm<S>>(n));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) entries[r][c] = BinaryForm<S>::linear(q1(r, c), q2(r, c));
  BinaryForm<S> det = ring_det(entries);
  if (det.degree != static_cast<int>(n)) {
    // cofactor products keep the degree homogeneous; reaching here is a bug
    fail(Err::Internal, "pencil determinant degree mismatch");
  }
  return det;
}

// Entries of adj(l*Q1 + u*Q2): the 3x3 signed minors, each a degree-3 form.
template <class S>
std::vector<BinaryForm<S>> pencil_adjugate_entries(const Mat4<S>& q1, const Mat4<S>& q2) {
  std::vector<std::vector<BinaryForm<S>>> entries(4, std::vector<BinaryForm<S>>(4));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) entries[r][c] = BinaryForm<S>::linear(q1(r, c), q2(r, c));
  std::vector<BinaryForm<S>> out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      std::vector<std::vector<BinaryForm<S>>> minor(3, std::vector<BinaryForm<S>>(3));
      int mr = 0;
      for (int rr = 0; rr < 4; ++rr) {
        if (rr == r) continue;
        int mc = 0;
        for (int cc = 0; cc < 4; ++cc) {
          if (cc == c) continue;
          minor[mr][mc++] = entries[rr][cc];
        }
        ++mr;
      }
      BinaryForm<S> d = ring_det(minor);
      if ((r + c) % 2 == 1) d = d * S(-1);
      out.push_back(d);
    }
  return out;
}

// Member of the pencil at a projective parameter: value*(Q1) + ... for finite
// roots (r:1) this is r*Q1 + Q2; at infinity (1:0) it is Q1.
template <class S>
Mat4<S> pencil_member(const Mat4<S>& q1, const Mat4<S>& q2, const ProjRootValue& at);

template <>
inline Mat4<Rational> pencil_member(const Mat4<Rational>& q1, const Mat4<Rational>& q2,
                                    const ProjRootValue& at) {
  if (at.at_infinity) return q1;
  if (!at.value.is_real()) fail(Err::NotRepresentable, "complex pencil parameter in rational tower");
  return Mat4<Rational>(q1 * at.value.re + q2);
}

template <>
inline Mat4<GaussianRational> pencil_member(const Mat4<GaussianRational>& q1,
                                            const Mat4<GaussianRational>& q2,
                                            const ProjRootValue& at) {
  if (at.at_infinity) return q1;
  return Mat4<GaussianRational>(q1 * at.value + q2);
}

template <>
inline Mat4<double> pencil_member(const Mat4<double>& q1, const Mat4<double>& q2,
                                  const ProjRootValue& at) {
  if (at.at_infinity) return q1;
  if (!at.value.is_real()) fail(Err::NotRepresentable, "complex pencil parameter in float tower");
  return Mat4<double>(q1 * at.value.re.to_double() + q2);
}

// ---------------------------------------------------------------------------
// Ternary forms (projection targets of resultants).

template <class S>
struct TernaryForm {
  // dense coefficients over monomials y0^i y1^j y2^(d-i-j), i descending, then j
  int degree = 0;
  std::vector<S> c;

  static int count(int d) { return (d + 1) * (d + 2) / 2; }
  TernaryForm() : degree(0), c{S(0)} {}
  explicit TernaryForm(int d) : degree(d), c(count(d), S(0)) {}

  static int index_of(int d, int i, int j) {
    // monomials with first exponent > i come first; within a block, j ascends
    int offset = 0;
    for (int a = d; a > i; --a) offset += d - a + 1;
    return offset + j;
  }
  S& at(int i, int j) { return c[index_of(degree, i, j)]; }
  const S& at(int i, int j) const { return c[index_of(degree, i, j)]; }

  bool is_zero() const {
    for (const auto& x : c)
      if (!ScalarTraits<S>::is_zero(x)) return false;
    return true;
  }

  S eval(const Vec3<S>& y) const {
    S acc(0);
    for (int i = degree; i >= 0; --i)
      for (int j = 0; j + i <= degree; ++j) {
        S term = at(i, j);
        for (int k = 0; k < i; ++k) term *= y(0);
        for (int k = 0; k < j; ++k) term *= y(1);
        for (int k = 0; k < degree - i - j; ++k) term *= y(2);
        acc += term;
      }
    return acc;
  }

  friend TernaryForm operator+(const TernaryForm& a, const TernaryForm& b) {
    if (a.is_zero() && a.degree != b.degree) return b;
    if (b.is_zero() && a.degree != b.degree) return a;
    if (a.degree != b.degree) fail(Err::Precondition, "adding ternary forms of different degree");
    TernaryForm r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
    return r;
  }
  friend TernaryForm operator-(const TernaryForm& a, const TernaryForm& b) { return a + (-b); }
  friend TernaryForm operator-(const TernaryForm& a) {
    TernaryForm r = a;
    for (auto& x : r.c) x = -x;
    return r;
  }
  friend TernaryForm operator*(const TernaryForm& a, const TernaryForm& b) {
    TernaryForm r(a.degree + b.degree);
    for (int i = a.degree; i >= 0; --i)
      for (int j = 0; i + j <= a.degree; ++j) {
        if (ScalarTraits<S>::is_zero(a.at(i, j))) continue;
        for (int k = b.degree; k >= 0; --k)
          for (int l = 0; k + l <= b.degree; ++l) r.at(i + k, j + l) += a.at(i, j) * b.at(k, l);
      }
    return r;
  }
  TernaryForm operator*(const S& s) const {
    TernaryForm r = *this;
    for (auto& x : r.c) x *= s;
    return r;
  }
};

template <class S>
bool ternary_proportional(const TernaryForm<S>& a, const TernaryForm<S>& b) {
  static_assert(kIsExact<S>);
  if (a.degree != b.degree) return false;
  int pivot = -1;
  for (size_t i = 0; i < b.c.size(); ++i)
    if (!ScalarTraits<S>::is_zero(b.c[i])) { pivot = static_cast<int>(i); break; }
  if (pivot < 0) return a.is_zero();
  if (ScalarTraits<S>::is_zero(a.c[pivot])) return false;
  S lambda = a.c[pivot] / b.c[pivot];
  for (size_t i = 0; i < a.c.size(); ++i)
    if (a.c[i] != lambda * b.c[i]) return false;
  return true;
}

// Exact trial division of ternary forms: returns h with f = g * h, if any.
// Solving for h is linear in h's coefficients.
template <class S>
std::optional<TernaryForm<S>> ternary_trial_divide(const TernaryForm<S>& f, const TernaryForm<S>& g) {
  static_assert(kIsExact<S>);
  if (g.is_zero() || f.degree < g.degree) return std::nullopt;
  const int hd = f.degree - g.degree;
  const int unknowns = TernaryForm<S>::count(hd);
  const int eqs = TernaryForm<S>::count(f.degree);
  Mat<S> m = Mat<S>::Zero(eqs, unknowns + 1);
  for (int i = hd; i >= 0; --i)
    for (int j = 0; i + j <= hd; ++j) {
      int col = TernaryForm<S>::index_of(hd, i, j);
      for (int k = g.degree; k >= 0; --k)
        for (int l = 0; k + l <= g.degree; ++l)
          m(TernaryForm<S>::index_of(f.degree, i + k, j + l), col) += g.at(k, l);
    }
  for (int i = f.degree; i >= 0; --i)
    for (int j = 0; i + j <= f.degree; ++j)
      m(TernaryForm<S>::index_of(f.degree, i, j), unknowns) = f.at(i, j);
  // consistent iff the rhs column is not a pivot of the rref
  auto pivots = exact_rref(m);
  for (int p : pivots)
    if (p == unknowns) return std::nullopt;
  TernaryForm<S> h(hd);
  for (size_t pi = 0; pi < pivots.size(); ++pi) h.c[pivots[pi]] = m(static_cast<Eigen::Index>(pi), unknowns);
  // verify: the rref gives a particular solution, make sure it multiplies back
  TernaryForm<S> check = g * h;
  for (size_t i = 0; i < f.c.size(); ++i)
    if (check.c[i] != f.c[i]) return std::nullopt;
  return h;
}

// Resultant of two quadrics with respect to the line direction `dir`: write
// x = y + t * dir in coordinates omitting the largest component of dir, and
// eliminate t. The zero locus of the resulting ternary quartic is the image
// of the intersection curve under projection from dir.
template <class S>
TernaryForm<S> resultant_eliminate(const Mat4<S>& q1, const Mat4<S>& q2, const Vec4<S>& dir) {
  static_assert(kIsExact<S>);
  if (is_zero_mat(dir)) fail(Err::Precondition, "resultant direction must be nonzero");
  int pivot = 0;
  double best = -1;
  for (int i = 0; i < 4; ++i) {
    double a = std::abs(ScalarTraits<S>::approx(dir(i)));
    if (a > best) { best = a; pivot = i; }
  }
  std::array<int, 3> ys{};
  {
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != pivot) ys[k++] = i;
  }
  Mat43<S> e = Mat43<S>::Zero();
  for (int a = 0; a < 3; ++a) e(ys[a], a) = S(1);

  auto coeffs = [&](const Mat4<S>& q) {
    S a = (dir.transpose() * q * dir)(0, 0);
    Eigen::Matrix<S, 1, 3> b2 = dir.transpose() * q * e;  // t-linear part is 2*b2.y
    Mat3<S> cq = e.transpose() * q * e;
    TernaryForm<S> b(1);
    for (int i = 0; i < 3; ++i) {
      std::array<int, 3> mono{0, 0, 0};
      mono[i] = 1;
      b.at(mono[0], mono[1]) += S(2) * b2(0, i);
    }
    TernaryForm<S> c(2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        std::array<int, 3> mono{0, 0, 0};
        mono[i] += 1;
        mono[j] += 1;
        c.at(mono[0], mono[1]) += cq(i, j);
      }
    return std::tuple<S, TernaryForm<S>, TernaryForm<S>>(a, b, c);
  };
  auto [a1, b1, c1] = coeffs(q1);
  auto [a2, b2, c2] = coeffs(q2);
  if (ScalarTraits<S>::is_zero(a1) && ScalarTraits<S>::is_zero(a2))
    fail(Err::Degenerate, "resultant direction lies on both quadrics");

  // Sylvester matrix of the two t-quadratics a*t^2 + b(y)*t + c(y). The
  // determinant is isobaric of weight 4 in the y-degrees, so every nonzero
  // term of the expansion is a degree-4 ternary form and the sums stay legal.
  auto cf = [](const S& s) {
    TernaryForm<S> t(0);
    t.c[0] = s;
    return t;
  };
  TernaryForm<S> z0(0);
  std::vector<std::vector<TernaryForm<S>>> syl{
      {cf(a1), b1, c1, z0},
      {z0, cf(a1), b1, c1},
      {cf(a2), b2, c2, z0},
      {z0, cf(a2), b2, c2},
  };
  TernaryForm<S> det = ring_det(syl);
  if (det.is_zero())
    fail(Err::Degenerate, "resultant vanished identically: projection center on the base curve");
  if (det.degree != 4) fail(Err::Internal, "resultant degree mismatch");
  return det;
}

}  // namespace mvlab
