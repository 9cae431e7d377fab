#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvlab/calibration.hpp"
#include "mvlab/epipolar.hpp"
#include "mvlab/simulate.hpp"

using namespace mvlab;

namespace {

Camera<Rational> translated_camera(const Vec3<Rational>& t) {
  Mat34<Rational> m = Mat34<Rational>::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = Rational(1);
  m.col(3) = t;
  return Camera<Rational>(m);
}

Correspondence<Rational> corr2(const HPoint2<Rational>& x, const HPoint2<Rational>& y) {
  return Correspondence<Rational>(std::vector<HPoint2<Rational>>{x, y});
}

Homography<Rational> random_homography(SplitMix64& rng) {
  for (;;) {
    Mat4<Rational> h;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = random_entry(rng);
    if (rank_of(h) == 4) return Homography<Rational>(h);
  }
}

Mat3<GaussianRational> lift3(const Mat3<Rational>& m) {
  Mat3<GaussianRational> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = GaussianRational(m(i, j));
  return out;
}

}  // namespace

TEST_CASE("fundamental form of a pure translation") {
  Camera<Rational> p1 = Camera<Rational>::standard();
  Vec3<Rational> t;
  t << Rational(-1), Rational(0), Rational(0);
  BilinearForm<Rational> f = fundamental_from_pair(p1, translated_camera(t));
  Mat3<Rational> expect = Mat3<Rational>::Zero();
  expect(1, 2) = Rational(-1);
  expect(2, 1) = Rational(1);
  CHECK(proportional(f.a, expect));
  CHECK(rank_of(f.a) == 2);
}

TEST_CASE("fundamental form of a rotated pair matches the pose formula") {
  SplitMix64 rng(1001);
  for (int trial = 0; trial < 10; ++trial) {
    Mat3<Rational> r = cayley_rotation(rng);
    Vec3<Rational> t;
    do {
      for (int i = 0; i < 3; ++i) t(i) = random_entry(rng);
    } while (is_zero_mat(t));
    Mat34<Rational> m2;
    m2.block(0, 0, 3, 3) = r;
    m2.col(3) = r * t;  // P2 = R [I | t]
    BilinearForm<Rational> f =
        fundamental_from_pair(Camera<Rational>::standard(), Camera<Rational>(m2));
    // with the form evaluated as x^T A y (x in view one), the pose formula
    // lands transposed: A is proportional to (R [t]x)^T
    Mat3<Rational> pose = r * cross_matrix(t);
    CHECK(proportional(f.a, Mat3<Rational>(pose.transpose())));
  }
}

TEST_CASE("fundamental form annihilates joint projections") {
  SplitMix64 rng(1002);
  Scene scene = random_scene(rng, 2, 12);
  BilinearForm<Rational> f =
      fundamental_from_pair(scene.config.cameras[0], scene.config.cameras[1]);
  for (const auto& corr : scene.correspondences)
    CHECK(f.eval(corr.points[0], corr.points[1]).is_zero());
}

TEST_CASE("coincident centers have no fundamental form") {
  Camera<Rational> p1 = Camera<Rational>::standard();
  Mat34<Rational> doubled = p1.m * Rational(2);
  CHECK_THROWS_AS(fundamental_from_pair(p1, Camera<Rational>(doubled)), Error);
}

TEST_CASE("epipoles of the pinned translation form") {
  Mat3<Rational> a = Mat3<Rational>::Zero();
  a(1, 2) = Rational(-1);
  a(2, 1) = Rational(1);
  Epipoles<Rational> e = epipoles(BilinearForm<Rational>(a));
  HPoint2<Rational> e1(Rational(1), Rational(0), Rational(0));
  CHECK(e.left.same_point(e1));
  CHECK(e.right.same_point(e1));

  CHECK_THROWS_AS(epipoles(BilinearForm<Rational>(Mat3<Rational>(Mat3<Rational>::Identity()))),
                  Error);
}

TEST_CASE("epipoles are the projected centers") {
  SplitMix64 rng(1003);
  for (int trial = 0; trial < 10; ++trial) {
    CameraConfig<Rational> cfg = random_general_config(rng, 2);
    const Camera<Rational>& p1 = cfg.cameras[0];
    const Camera<Rational>& p2 = cfg.cameras[1];
    BilinearForm<Rational> f = fundamental_from_pair(p1, p2);
    Epipoles<Rational> e = epipoles(f);
    CHECK(e.right.same_point(project_point(p2, camera_center(p1))));
    CHECK(e.left.same_point(project_point(p1, camera_center(p2))));
    // kernel laws, stated directly
    CHECK(is_zero_mat(Vec3<Rational>(f.a * e.right.v)));
    CHECK(is_zero_mat(Vec3<Rational>(f.a.transpose() * e.left.v)));
  }
}

TEST_CASE("correspondence hyperplanes flatten the outer product") {
  HPoint2<Rational> e1(Rational(1), Rational(0), Rational(0));
  auto h = correspondence_hyperplane(e1, e1);
  for (int k = 0; k < 9; ++k) {
    if (k == 0)
      CHECK(h(k) == Rational(1));
    else
      CHECK(h(k).is_zero());
  }

  SplitMix64 rng(1004);
  for (int trial = 0; trial < 20; ++trial) {
    Vec3<Rational> xv, yv;
    Mat3<Rational> a;
    for (int i = 0; i < 3; ++i) {
      xv(i) = random_entry(rng);
      yv(i) = random_entry(rng);
      for (int j = 0; j < 3; ++j) a(i, j) = random_entry(rng);
    }
    if (is_zero_mat(xv) || is_zero_mat(yv)) continue;
    HPoint2<Rational> x(xv), y(yv);
    auto row = correspondence_hyperplane(x, y);
    Rational dot(0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dot += row(3 * i + j) * a(i, j);
    CHECK(dot == Rational((xv.transpose() * a * yv)(0, 0)));
    // scaling either point scales the hyperplane, not its zero set
    HPoint2<Rational> sx(Vec3<Rational>(xv * Rational(5)));
    CHECK(proportional(correspondence_hyperplane(sx, y), row));
  }
}

TEST_CASE("seven point recovers the generating form") {
  SplitMix64 rng(1005);
  int found = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Scene scene = random_scene(rng, 2, 7);
    BilinearForm<Rational> truth =
        fundamental_from_pair(scene.config.cameras[0], scene.config.cameras[1]);
    SevenPointResult<Rational> res = seven_point(scene.correspondences);
    REQUIRE(res.solutions.size() >= 1);
    REQUIRE(res.solutions.size() <= 3);
    bool hit = false;
    for (const auto& sol : res.solutions) {
      // every solution annihilates every input correspondence and drops rank
      for (const auto& corr : scene.correspondences) {
        GaussianRational val(Rational(0));
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            val += GaussianRational(corr.points[0].v(i) * corr.points[1].v(j)) * sol(i, j);
        CHECK(val.is_zero());
      }
      CHECK(exact_det(Mat<GaussianRational>(sol)).is_zero());
      CHECK(rank_of(sol) <= 2);
      if (proportional(sol, lift3(truth.a))) hit = true;
    }
    if (hit) ++found;
  }
  // the generating form interpolates its own seven projections, always
  CHECK(found == 10);
}

TEST_CASE("seven point rejects degenerate input") {
  HPoint2<Rational> x(Rational(1), Rational(2), Rational(3));
  std::vector<Correspondence<Rational>> same(7, corr2(x, x));
  CHECK_THROWS_AS(seven_point(same), Error);

  std::vector<Correspondence<Rational>> six(6, corr2(x, x));
  CHECK_THROWS_AS(seven_point(six), Error);

  // three-view correspondences do not fit the two-view solver
  std::vector<Correspondence<Rational>> triple(
      7, Correspondence<Rational>(std::vector<HPoint2<Rational>>{x, x, x}));
  CHECK_THROWS_AS(seven_point(triple), Error);
}

TEST_CASE("fundamental form is invariant under world homographies") {
  SplitMix64 rng(1006);
  for (int trial = 0; trial < 10; ++trial) {
    CameraConfig<Rational> cfg = random_general_config(rng, 2);
    BilinearForm<Rational> f = fundamental_from_pair(cfg.cameras[0], cfg.cameras[1]);
    Homography<Rational> h = random_homography(rng);
    BilinearForm<Rational> g = fundamental_from_pair(transform_camera(cfg.cameras[0], h),
                                                     transform_camera(cfg.cameras[1], h));
    CHECK(proportional(f.a, g.a));
    CHECK(exact_det(Mat<Rational>(f.a)).is_zero());
  }
}

TEST_CASE("seven point solutions are stable under rescaling the input points") {
  SplitMix64 rng(1007);
  Scene scene = random_scene(rng, 2, 7);
  SevenPointResult<Rational> base = seven_point(scene.correspondences);

  std::vector<Correspondence<Rational>> scaled;
  Rational s(7, 3);
  for (const auto& corr : scene.correspondences) {
    scaled.push_back(corr2(HPoint2<Rational>(Vec3<Rational>(corr.points[0].v * s)),
                           HPoint2<Rational>(Vec3<Rational>(corr.points[1].v * Rational(-4)))));
  }
  SevenPointResult<Rational> again = seven_point(scaled);
  REQUIRE(base.solutions.size() == again.solutions.size());
  for (const auto& sol : base.solutions) {
    bool matched = false;
    for (const auto& other : again.solutions)
      if (proportional(sol, other)) matched = true;
    CHECK(matched);
  }
}
