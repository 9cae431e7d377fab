#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvlab/linalg.hpp"
#include "mvlab/simulate.hpp"

using namespace mvlab;

namespace {

Mat<Rational> random_exact(SplitMix64& rng, int rows, int cols) {
  Mat<Rational> m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_entry(rng);
  return m;
}

}  // namespace

TEST_CASE("exact_rank on pinned matrices") {
  Mat<Rational> d = Mat<Rational>::Zero(4, 4);
  d(0, 0) = Rational(1);
  d(1, 1) = Rational(1);
  d(2, 2) = Rational(1);
  CHECK(exact_rank(d) == 3);

  CHECK(exact_rank(Mat<Rational>(Mat<Rational>::Zero(3, 3))) == 0);
  CHECK(exact_rank(Mat<Rational>(Mat<Rational>::Identity(5, 5))) == 5);
}

TEST_CASE("exact_rank sees exact dependencies") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    Mat<Rational> m(3, 5);
    m.row(0) = random_exact(rng, 1, 5);
    m.row(1) = random_exact(rng, 1, 5);
    m.row(2) = m.row(0) + m.row(1);
    CHECK(exact_rank(m) <= 2);
    // the dependency involves huge coordinates just as well
    Mat<Rational> big = m * Rational(BigInt("1000000000000000000000000000"), BigInt(7));
    CHECK(exact_rank(big) == exact_rank(m));
  }
}

TEST_CASE("exact_null_space on pinned matrices") {
  Mat<Rational> a = Mat<Rational>::Zero(3, 3);
  a(1, 2) = Rational(-1);
  a(2, 1) = Rational(1);
  Mat<Rational> n = exact_null_space(a);
  REQUIRE(n.cols() == 1);
  CHECK(!n(0, 0).is_zero());
  CHECK(n(1, 0).is_zero());
  CHECK(n(2, 0).is_zero());

  CHECK(exact_null_space(Mat<Rational>(Mat<Rational>::Identity(3, 3))).cols() == 0);
}

TEST_CASE("rank-nullity on random exact matrices") {
  SplitMix64 rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    int rows = 2 + rng.int_in(0, 4);
    int cols = 2 + rng.int_in(0, 4);
    Mat<Rational> m = random_exact(rng, rows, cols);
    Mat<Rational> n = exact_null_space(m);
    CHECK(exact_rank(m) + static_cast<int>(n.cols()) == cols);
    if (n.cols() > 0) CHECK(is_zero_mat(Mat<Rational>(m * n)));
  }
}

TEST_CASE("exact_det and exact_solve") {
  Mat<Rational> m(2, 2);
  m << Rational(1, 2), Rational(1, 3), Rational(1, 4), Rational(1, 5);
  CHECK(exact_det(m) == Rational(1, 10) - Rational(1, 12));

  Vec<Rational> b(2);
  b << Rational(1), Rational(0);
  Vec<Rational> x = exact_solve(m, b);
  CHECK(Rational(m(0, 0) * x(0) + m(0, 1) * x(1)) == b(0));
  CHECK(Rational(m(1, 0) * x(0) + m(1, 1) * x(1)) == b(1));

  Mat<Rational> sing(2, 2);
  sing << Rational(1), Rational(2), Rational(2), Rational(4);
  CHECK(exact_det(sing).is_zero());
  CHECK_THROWS_AS(exact_solve(sing, b), Error);
}

TEST_CASE("svd singular values of pinned matrices") {
  Eigen::MatrixXd d = Eigen::Vector3d(3, 2, 1).asDiagonal();
  Svd s = svd(d);
  CHECK(s.sigma(0) == doctest::Approx(3).epsilon(1e-12));
  CHECK(s.sigma(1) == doctest::Approx(2).epsilon(1e-12));
  CHECK(s.sigma(2) == doctest::Approx(1).epsilon(1e-12));

  // the cross-product matrix of a unit vector has singular values (1, 1, 0)
  Eigen::Matrix3d cx;
  cx << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  Svd sc = svd(cx);
  CHECK(sc.sigma(0) == doctest::Approx(1).epsilon(1e-12));
  CHECK(sc.sigma(1) == doctest::Approx(1).epsilon(1e-12));
  CHECK(std::abs(sc.sigma(2)) < 1e-14);
}

TEST_CASE("svd reconstruction and orthogonality") {
  SplitMix64 rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    int rows = 2 + rng.int_in(0, 4);
    int cols = 2 + rng.int_in(0, 4);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = static_cast<double>(rng.int_in(-9, 9));
    Svd s = svd(m);
    Eigen::MatrixXd sig = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index i = 0; i < s.sigma.size(); ++i) sig(i, i) = s.sigma(i);
    Eigen::MatrixXd recon = s.u * sig * s.v.transpose();
    CHECK((recon - m).norm() <= 1e-12 * (1.0 + m.norm()));
    CHECK((s.u.transpose() * s.u - Eigen::MatrixXd::Identity(rows, rows)).norm() < 1e-12);
    CHECK((s.v.transpose() * s.v - Eigen::MatrixXd::Identity(cols, cols)).norm() < 1e-12);
  }
}

TEST_CASE("rank-two products have vanishing third singular value") {
  SplitMix64 rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Vector3d a, b, c, d;
    for (int i = 0; i < 3; ++i) {
      a(i) = rng.int_in(-9, 9);
      b(i) = rng.int_in(-9, 9);
      c(i) = rng.int_in(-9, 9);
      d(i) = rng.int_in(-9, 9);
    }
    Eigen::Matrix3d m = a * b.transpose() + c * d.transpose();
    Svd s = svd(m);
    if (s.sigma(0) == 0) continue;  // degenerate draw
    CHECK(s.sigma(2) / s.sigma(0) < 1e-12);
  }
}

TEST_CASE("float_rank and float_null_space") {
  Eigen::Matrix3d cx;
  cx << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(float_rank(cx) == 2);
  Eigen::MatrixXd n = float_null_space(cx);
  REQUIRE(n.cols() == 1);
  CHECK((cx * n).norm() < 1e-12);

  CHECK(float_rank(Eigen::MatrixXd::Identity(4, 4)) == 4);
  CHECK(float_rank(Eigen::MatrixXd::Zero(3, 3)) == 0);
  CHECK_THROWS_AS(float_rank(cx, 0.0), Error);

  // wide matrix: null space picks up the trailing directions too
  Eigen::MatrixXd wide = Eigen::MatrixXd::Zero(2, 5);
  wide(0, 0) = 1;
  wide(1, 1) = 1;
  CHECK(float_null_space(wide).cols() == 3);
}

TEST_CASE("rq of the identity") {
  RqResult rq = rq_decompose(Eigen::Matrix3d::Identity());
  CHECK((rq.k - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK((rq.r - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK_FALSE(rq.det_negative);
}

TEST_CASE("rq recovers a known triangular-times-rotation product") {
  Eigen::Matrix3d k0;
  k0 << 2, 1, 4, 0, 3, 5, 0, 0, 1;
  double th = 0.3;
  Eigen::Matrix3d r0;
  r0 << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
  RqResult rq = rq_decompose(k0 * r0);
  CHECK((rq.k - k0).norm() < 1e-10);
  CHECK((rq.r - r0).norm() < 1e-10);
  CHECK_FALSE(rq.det_negative);

  // a mirrored input keeps k's diagonal positive and flags the reflection
  RqResult mirror = rq_decompose(k0 * r0 * Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix());
  CHECK(mirror.det_negative);
  CHECK(mirror.k(0, 0) > 0);
  CHECK(mirror.k(1, 1) > 0);
  CHECK(mirror.r.determinant() == doctest::Approx(-1).epsilon(1e-10));
  CHECK((mirror.r * mirror.r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-10);
}

TEST_CASE("rq round-trips on random well-conditioned inputs") {
  SplitMix64 rng(505);
  int done = 0;
  while (done < 100) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = static_cast<double>(rng.int_in(-9, 9));
    Svd s = svd(m);
    if (s.sigma(2) < 1e-3 * s.sigma(0)) continue;  // skip near-singular draws
    RqResult rq = rq_decompose(m);
    CHECK(std::abs(rq.k(1, 0)) + std::abs(rq.k(2, 0)) + std::abs(rq.k(2, 1)) < 1e-10);
    CHECK(rq.k(0, 0) > 0);
    CHECK(rq.k(1, 1) > 0);
    CHECK(rq.k(2, 2) == doctest::Approx(1).epsilon(1e-12));
    CHECK((rq.r * rq.r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-10);
    // m is recovered up to the positive scale divided out of k
    double lambda = m.norm() / (rq.k * rq.r).norm();
    CHECK((rq.k * rq.r * lambda - m).norm() < 1e-9 * (1.0 + m.norm()));
    ++done;
  }
  CHECK_THROWS_AS(rq_decompose(Eigen::Matrix3d::Zero()), Error);
}

TEST_CASE("diagonalize_symmetric is a congruence") {
  SplitMix64 rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + rng.int_in(0, 2);
    Mat<Rational> m = random_exact(rng, n, n);
    Mat<Rational> sym = m + Mat<Rational>(m.transpose());
    auto diag = diagonalize_symmetric(sym);
    CHECK(exact_rank(diag.p) == n);
    Mat<Rational> t = diag.p.transpose() * sym * diag.p;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j)
          CHECK(t(i, j) == diag.d(i));
        else
          CHECK(t(i, j).is_zero());
      }
    // signature data: the count of nonzero diagonal entries is the rank
    int nonzero = 0;
    for (int i = 0; i < n; ++i)
      if (!diag.d(i).is_zero()) ++nonzero;
    CHECK(nonzero == exact_rank(sym));
  }
}

TEST_CASE("diagonalize_symmetric handles a zero diagonal block") {
  // antidiagonal 2x2: needs the partner-column repair step
  Mat<Rational> m(2, 2);
  m << Rational(0), Rational(1), Rational(1), Rational(0);
  auto diag = diagonalize_symmetric(m);
  Mat<Rational> t = diag.p.transpose() * m * diag.p;
  CHECK(t(0, 1).is_zero());
  CHECK(t(1, 0).is_zero());
  CHECK(!t(0, 0).is_zero());
  CHECK(!t(1, 1).is_zero());
}

TEST_CASE("cholesky_upper factors spd matrices") {
  Eigen::Matrix3d k0;
  k0 << 2, 1, 4, 0, 3, 5, 0, 0, 1;
  Eigen::Matrix3d m = k0 * k0.transpose();
  Eigen::Matrix3d u = cholesky_upper(m);
  CHECK((u * u.transpose() - m).norm() < 1e-10);
  CHECK(std::abs(u(1, 0)) + std::abs(u(2, 0)) + std::abs(u(2, 1)) < 1e-12);
  CHECK(u(0, 0) > 0);
  CHECK(u(1, 1) > 0);
  CHECK(u(2, 2) > 0);
  // recovers the generator when that generator is upper triangular with positive diagonal
  CHECK((u - k0).norm() < 1e-10);

  Eigen::Matrix3d indef = Eigen::Vector3d(1, -1, 1).asDiagonal();
  CHECK_THROWS_AS(cholesky_upper(indef), Error);
}
