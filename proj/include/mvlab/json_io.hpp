#pragma once

// JSON interchange for the scalar towers and the small fixed-size objects the
// command-line tool moves around. One convention per tower: rationals travel
// as canonical "p/q" strings (plain integers accepted on input), Gaussian
// rationals as {"re", "im"} objects, floats as JSON numbers. Object parsers
// reject unknown keys, so a typo in an input document fails loudly instead of
// being silently ignored.

#include <cstdint>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "mvlab/scalar.hpp"
#include "mvlab/types.hpp"

namespace mvlab {

// Insertion-ordered documents: output key order is part of the interface
// (byte-identical reruns), so the serializer must not reshuffle keys.
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Object-shape checks

// The value under `key`, required to exist.
inline const Json& require_key(const Json& j, const char* what, const std::string& key) {
  if (!j.is_object()) fail(Err::Parse, std::string(what) + ": expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) fail(Err::Parse, std::string(what) + ": missing key \"" + key + "\"");
  return *it;
}

// Every key of `j` must appear in `allowed`; absence is checked separately.
inline void expect_keys(const Json& j, const char* what,
                        std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(Err::Parse, std::string(what) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) fail(Err::Parse, std::string(what) + ": unknown key \"" + item.key() + "\"");
  }
}

// ---------------------------------------------------------------------------
// Scalars

inline Json scalar_to_json(const Rational& x) { return to_string(x); }

inline Json scalar_to_json(const GaussianRational& z) {
  Json j = Json::object();
  j["re"] = to_string(z.re);
  j["im"] = to_string(z.im);
  return j;
}

inline Json scalar_to_json(double x) { return x; }

template <class S>
S scalar_from_json(const Json& j, const char* what);

template <>
inline Rational scalar_from_json<Rational>(const Json& j, const char* what) {
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  fail(Err::Parse, std::string(what) + ": expected a rational (\"p/q\" string or integer)");
}

template <>
inline GaussianRational scalar_from_json<GaussianRational>(const Json& j, const char* what) {
  if (j.is_object()) {
    expect_keys(j, what, {"re", "im"});
    GaussianRational z;
    if (j.contains("re")) z.re = scalar_from_json<Rational>(j["re"], what);
    if (j.contains("im")) z.im = scalar_from_json<Rational>(j["im"], what);
    return z;
  }
  return GaussianRational(scalar_from_json<Rational>(j, what));
}

// The float tower also accepts rational literals, so exact documents (e.g.
// simulator output) can be re-read in float mode without editing.
template <>
inline double scalar_from_json<double>(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return rational_from_string(j.get<std::string>()).to_double();
  fail(Err::Parse, std::string(what) + ": expected a number");
}

// ---------------------------------------------------------------------------
// Vectors and matrices. Vectors are flat arrays, matrices arrays of rows;
// all sizes here are fixed by the requesting command, so size mismatches are
// parse errors, not silent truncation.

template <class Derived>
Json vector_to_json(const Eigen::MatrixBase<Derived>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v(i)));
  return out;
}

template <class Derived>
Json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

template <class V>
V vector_from_json(const Json& j, const char* what) {
  constexpr int n = V::SizeAtCompileTime;
  static_assert(n > 0, "fixed-size vectors only");
  if (!j.is_array() || j.size() != static_cast<size_t>(n))
    fail(Err::Parse, std::string(what) + ": expected an array of " + std::to_string(n) + " scalars");
  V v;
  for (int i = 0; i < n; ++i)
    v(i) = scalar_from_json<typename V::Scalar>(j[static_cast<size_t>(i)], what);
  return v;
}

template <class M>
M matrix_from_json(const Json& j, const char* what) {
  constexpr int rows = M::RowsAtCompileTime;
  constexpr int cols = M::ColsAtCompileTime;
  static_assert(rows > 0 && cols > 0, "fixed-size matrices only");
  const std::string shape =
      std::to_string(rows) + "x" + std::to_string(cols);
  if (!j.is_array() || j.size() != static_cast<size_t>(rows))
    fail(Err::Parse, std::string(what) + ": expected a " + shape + " matrix (array of rows)");
  M m;
  for (int r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || row.size() != static_cast<size_t>(cols))
      fail(Err::Parse, std::string(what) + ": expected a " + shape + " matrix (array of rows)");
    for (int c = 0; c < cols; ++c)
      m(r, c) = scalar_from_json<typename M::Scalar>(row[static_cast<size_t>(c)], what);
  }
  return m;
}

}  // namespace mvlab
