#include "mvlab/scalar.hpp"

#include <cctype>

namespace mvlab {

std::string to_string(const Rational& r) {
  std::string s = r.num().str();
  if (r.den() != 1) {
    s += "/";
    s += r.den().str();
  }
  return s;
}

std::string to_string(const GaussianRational& z) {
  if (z.im.is_zero()) return to_string(z.re);
  std::string s = to_string(z.re);
  s += z.im.sign() < 0 ? "-" : "+";
  s += to_string(abs(z.im));
  s += "i";
  return s;
}

// Accepts "p", "p/q", and plain decimals like "-3.25"; decimals are read
// digit-by-digit so the value is exact, not a double round-trip.
Rational rational_from_string(const std::string& s) {
  if (s.empty()) fail(Err::Parse, "empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(s.substr(0, slash));
      BigInt den(s.substr(slash + 1));
      if (den == 0) fail(Err::Parse, "zero denominator in '" + s + "'");
      return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(BigInt(s));
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    for (char c : tail)
      if (!std::isdigit(static_cast<unsigned char>(c))) fail(Err::Parse, "bad decimal '" + s + "'");
    bool neg = !head.empty() && head[0] == '-';
    BigInt ipart = head.empty() || head == "-" || head == "+" ? BigInt(0) : BigInt(head);
    BigInt scale = 1;
    for (size_t k = 0; k < tail.size(); ++k) scale *= 10;
    BigInt frac = tail.empty() ? BigInt(0) : BigInt(tail);
    BigInt num = boost::multiprecision::abs(ipart) * scale + frac;
    if (neg || ipart < 0) num = -num;
    return Rational(num, scale);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Err::Parse, "bad rational literal '" + s + "'");
  }
}

std::optional<BigInt> exact_sqrt(const BigInt& n) {
  if (n < 0) return std::nullopt;
  if (n == 0) return BigInt(0);
  BigInt r = boost::multiprecision::sqrt(n);  // floor sqrt
  if (r * r == n) return r;
  return std::nullopt;
}

std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r.sign() < 0) return std::nullopt;
  auto n = exact_sqrt(r.num());
  if (!n) return std::nullopt;
  auto d = exact_sqrt(r.den());
  if (!d) return std::nullopt;
  return Rational(*n, *d);
}

// sqrt in Q(i): for z = a+bi, |z| must be rational, then the half-angle
// formulas give the components; each candidate is verified by squaring.
std::optional<GaussianRational> exact_sqrt(const GaussianRational& z) {
  if (z.is_zero()) return GaussianRational(0);
  if (z.im.is_zero()) {
    if (auto r = exact_sqrt(z.re)) return GaussianRational(*r);
    if (auto r = exact_sqrt(-z.re)) return GaussianRational(Rational(0), *r);  // sqrt(-a) = i*sqrt(a)
    return std::nullopt;
  }
  auto mod = exact_sqrt(z.norm());  // |z|
  if (!mod) return std::nullopt;
  Rational half(1, 2);
  for (const Rational& m : {*mod, -*mod}) {
    Rational u2 = (z.re + m) * half;
    auto u = exact_sqrt(u2);
    if (!u || u->is_zero()) continue;
    Rational v = z.im / (Rational(2) * *u);
    GaussianRational w(*u, v);
    if (w * w == z) return w;
  }
  return std::nullopt;
}

}  // namespace mvlab
