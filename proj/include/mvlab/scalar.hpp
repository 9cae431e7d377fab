#pragma once

// Scalar towers: exact rationals, exact Gaussian rationals (needed where real
// poses degenerate into isotropic translations), and plain double. All generic
// code is templated on the scalar; float-only operations live behind
// ScalarTraits<S>::is_exact checks.

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace mvlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

enum class Err {
  Precondition,     // caller violated a documented precondition
  Degenerate,       // input is structurally degenerate for this operation
  Ambiguous,        // answer exists but is not unique (e.g. baseline points)
  NotRepresentable, // exact result lies outside the active scalar tower
  Parse,            // malformed input (CLI/JSON)
  Internal,         // invariant breached; indicates a bug
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

// Exact rational scalar. Thin wrapper over boost's cpp_rational: the wrapper
// keeps Eigen's overload probing away from boost's fragile byte-container
// constructor SFINAE and gives us a stable spot for traits and formatting.
struct Rational {
  BigRational v;

  Rational() : v(0) {}
  Rational(int n) : v(n) {}
  Rational(long long n) : v(n) {}
  explicit Rational(BigInt n) : v(std::move(n)) {}
  explicit Rational(BigRational x) : v(std::move(x)) {}
  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) fail(Err::Precondition, "rational with zero denominator");
    // boost's (num, den) constructor insists on a positive denominator
    v = den < 0 ? BigRational(-num, -den) : BigRational(num, den);
  }
  Rational(long long num, long long den) : Rational(BigInt(num), BigInt(den)) {}

  BigInt num() const { return boost::multiprecision::numerator(v); }
  BigInt den() const { return boost::multiprecision::denominator(v); }

  bool is_zero() const { return v == 0; }
  int sign() const { return v < 0 ? -1 : (v > 0 ? 1 : 0); }
  double to_double() const { return v.convert_to<double>(); }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v + b.v); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v - b.v); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v * b.v); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.v == 0) fail(Err::Precondition, "rational division by zero");
    return Rational(a.v / b.v);
  }
  Rational operator-() const { return Rational(-v); }
  Rational& operator+=(const Rational& o) { v += o.v; return *this; }
  Rational& operator-=(const Rational& o) { v -= o.v; return *this; }
  Rational& operator*=(const Rational& o) { v *= o.v; return *this; }
  Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v == b.v; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v != b.v; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v < b.v; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v <= b.v; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v > b.v; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v >= b.v; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);
};

inline Rational abs(const Rational& r) { return r.v < 0 ? -r : r; }

// Gaussian rationals Q(i). Division goes through the conjugate; there is no
// order, so pivoting code must select pivots by nonzero-ness, not magnitude.
struct GaussianRational {
  Rational re, im;

  GaussianRational() = default;
  GaussianRational(int n) : re(n) {}
  GaussianRational(long long n) : re(n) {}
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i() { return GaussianRational(Rational(0), Rational(1)); }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }
  GaussianRational conj() const { return GaussianRational(re, -im); }
  Rational norm() const { return re * re + im * im; }  // |z|^2
  Complex to_complex() const { return Complex(re.to_double(), im.to_double()); }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return GaussianRational(a.re + b.re, a.im + b.im);
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return GaussianRational(a.re - b.re, a.im - b.im);
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return GaussianRational(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational n = b.norm();
    if (n.is_zero()) fail(Err::Precondition, "gaussian rational division by zero");
    GaussianRational p = a * b.conj();
    return GaussianRational(p.re / n, p.im / n);
  }
  GaussianRational operator-() const { return GaussianRational(-re, -im); }
  GaussianRational& operator+=(const GaussianRational& o) { *this = *this + o; return *this; }
  GaussianRational& operator-=(const GaussianRational& o) { *this = *this - o; return *this; }
  GaussianRational& operator*=(const GaussianRational& o) { *this = *this * o; return *this; }
  GaussianRational& operator/=(const GaussianRational& o) { *this = *this / o; return *this; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z);
};

inline GaussianRational conj(const GaussianRational& z) { return z.conj(); }

std::string to_string(const Rational& r);
std::string to_string(const GaussianRational& z);
Rational rational_from_string(const std::string& s);

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << to_string(r); }
inline std::ostream& operator<<(std::ostream& os, const GaussianRational& z) { return os << to_string(z); }

// Exact square roots, used to split rank-2 quadrics into plane pairs.
std::optional<BigInt> exact_sqrt(const BigInt& n);
std::optional<Rational> exact_sqrt(const Rational& r);
std::optional<GaussianRational> exact_sqrt(const GaussianRational& z);

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool is_exact = true;
  static constexpr bool has_order = true;    // real embedding with usable <
  static constexpr bool is_complex = false;  // tower closed under conjugation trivially
  static const char* name() { return "rational"; }
  static Complex approx(const Rational& x) { return Complex(x.to_double(), 0.0); }
  static bool is_zero(const Rational& x, double /*tol*/ = 0, double /*scale*/ = 0) { return x.is_zero(); }
  static Rational from_int(long long n) { return Rational(n); }
};

template <>
struct ScalarTraits<GaussianRational> {
  static constexpr bool is_exact = true;
  static constexpr bool has_order = false;
  static constexpr bool is_complex = true;
  static const char* name() { return "gaussian"; }
  static Complex approx(const GaussianRational& x) { return x.to_complex(); }
  static bool is_zero(const GaussianRational& x, double /*tol*/ = 0, double /*scale*/ = 0) { return x.is_zero(); }
  static GaussianRational from_int(long long n) { return GaussianRational(n); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool is_exact = false;
  static constexpr bool has_order = true;
  static constexpr bool is_complex = false;
  static const char* name() { return "float"; }
  static Complex approx(double x) { return Complex(x, 0.0); }
  // |x| <= tol * scale, with scale defaulting to 1 (absolute comparison)
  static bool is_zero(double x, double tol = 1e-10, double scale = 1.0) {
    return std::abs(x) <= tol * (scale > 0 ? scale : 1.0);
  }
  static double from_int(long long n) { return static_cast<double>(n); }
};

template <class S>
inline constexpr bool kIsExact = ScalarTraits<S>::is_exact;

// Default relative tolerance for all float-mode rank/degeneracy decisions.
inline constexpr double kDefaultTol = 1e-10;

// The tower a computation lands in when it needs roots of polynomials: the
// exact towers close up to the Gaussian rationals, floats stay floats (real
// roots only).
template <class S>
struct ClosureOfT;
template <>
struct ClosureOfT<Rational> { using type = GaussianRational; };
template <>
struct ClosureOfT<GaussianRational> { using type = GaussianRational; };
template <>
struct ClosureOfT<double> { using type = double; };
template <class S>
using ClosureOf = typename ClosureOfT<S>::type;

}  // namespace mvlab
