#pragma once

// Deterministic scene and fixture generation: integer cameras and points with
// genericity retries, rational rotations and unit vectors, standard cones
// with known vertex and anchor, and calibrated configurations. Everything is
// driven by an explicit seeded generator so identical seeds give identical
// fixtures across runs and platforms.

#include <cstdint>
#include <vector>

#include "mvlab/cones.hpp"

namespace mvlab {

// splitmix64: tiny, fast, and stable across platforms — the fixture contract
// depends on the exact stream, so the generator is pinned here rather than
// delegated to the standard library's unspecified distributions.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform integer in [lo, hi], inclusive
  int int_in(int lo, int hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }
};

inline Rational random_entry(SplitMix64& rng) { return Rational(rng.int_in(-9, 9)); }

inline Mat<Rational> random_int_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
  Mat<Rational> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = random_entry(rng);
  return m;
}

inline Camera<Rational> random_camera(SplitMix64& rng) {
  for (;;) {
    Mat<Rational> m = random_int_matrix(rng, 3, 4);
    if (exact_rank(m) != 3) continue;
    return Camera<Rational>(Mat34<Rational>(m));
  }
}

inline CameraConfig<Rational> random_general_config(SplitMix64& rng, int views) {
  for (;;) {
    std::vector<Camera<Rational>> cams;
    for (int i = 0; i < views; ++i) cams.push_back(random_camera(rng));
    CameraConfig<Rational> config(std::move(cams));
    if (config.general()) return config;
  }
}

inline Vec4<Rational> random_world_point(SplitMix64& rng) {
  for (;;) {
    Vec4<Rational> x;
    for (int i = 0; i < 4; ++i) x(i) = random_entry(rng);
    if (!is_zero_mat(x)) return x;
  }
}

// A full synthetic scene: cameras, world points, and their projections.
// Points landing on a camera center (zero projection) are redrawn, so every
// correspondence is a valid tuple of image points.
struct Scene {
  CameraConfig<Rational> config;
  std::vector<Vec4<Rational>> points;
  std::vector<Correspondence<Rational>> correspondences;
};

inline Scene random_scene(SplitMix64& rng, int views, int points) {
  if (views < 1 || points < 0) fail(Err::Precondition, "scene needs views >= 1, points >= 0");
  Scene scene{random_general_config(rng, views), {}, {}};
  while (static_cast<int>(scene.points.size()) < points) {
    Vec4<Rational> x = random_world_point(rng);
    bool fresh = true;
    for (const auto& prev : scene.points) fresh = fresh && !proportional(prev, x);
    if (!fresh) continue;
    bool projects = true;
    for (const auto& cam : scene.config.cameras)
      projects = projects && !is_zero_mat(Vec3<Rational>(cam.m * x));
    if (!projects) continue;
    std::vector<HPoint2<Rational>> imgs;
    for (const auto& cam : scene.config.cameras)
      imgs.push_back(HPoint2<Rational>(Vec3<Rational>(cam.m * x)));
    scene.points.push_back(x);
    scene.correspondences.push_back(Correspondence<Rational>(std::move(imgs)));
  }
  return scene;
}

// Rational point on the unit sphere via the stereographic parametrization:
// (2pr, 2qr, r^2 - p^2 - q^2) / (p^2 + q^2 + r^2).
inline Vec3<Rational> rational_unit_vector(SplitMix64& rng) {
  for (;;) {
    Rational p(rng.int_in(-5, 5)), q(rng.int_in(-5, 5)), r(rng.int_in(1, 5));
    Rational n2 = p * p + q * q + r * r;
    Vec3<Rational> v(Rational(2) * p * r, Rational(2) * q * r, r * r - p * p - q * q);
    v /= n2;
    if (!is_zero_mat(v)) return v;
  }
}

// Rational rotation by the Cayley transform of a random small skew matrix.
inline Mat3<Rational> cayley_rotation(SplitMix64& rng) {
  Rational a(rng.int_in(-3, 3)), b(rng.int_in(-3, 3)), c(rng.int_in(-3, 3));
  Mat3<Rational> sk = Mat3<Rational>::Zero();
  sk(0, 1) = a; sk(1, 0) = -a;
  sk(0, 2) = -b; sk(2, 0) = b;
  sk(1, 2) = c; sk(2, 1) = -c;
  Mat3<Rational> num = Mat3<Rational>::Identity() - sk;
  Mat3<Rational> den = Mat3<Rational>::Identity() + sk;  // det = 1 + a^2 + b^2 + c^2 > 0
  return Mat3<Rational>(num * den.inverse());
}

// Isotropic Gaussian translation: (p^2 - q^2, i (p^2 + q^2), 2pq) has zero
// square-sum and is never the zero vector.
inline Vec3<GaussianRational> gaussian_isotropic_translation(SplitMix64& rng) {
  for (;;) {
    Rational p(rng.int_in(-4, 4)), q(rng.int_in(-4, 4));
    if (p.is_zero() && q.is_zero()) continue;
    Vec3<GaussianRational> t;
    t(0) = GaussianRational(p * p - q * q);
    t(1) = GaussianRational(Rational(0), p * p + q * q);
    t(2) = GaussianRational(Rational(2) * p * q);
    return t;
  }
}

// Upper-triangular integer calibration with positive diagonal.
inline Mat3<Rational> random_calibration_matrix(SplitMix64& rng) {
  Mat3<Rational> k = Mat3<Rational>::Zero();
  k(0, 0) = Rational(rng.int_in(1, 5));
  k(1, 1) = Rational(rng.int_in(1, 5));
  k(2, 2) = Rational(1);
  k(0, 1) = Rational(rng.int_in(-3, 3));
  k(0, 2) = Rational(rng.int_in(-3, 3));
  k(1, 2) = Rational(rng.int_in(-3, 3));
  return k;
}

// Camera K R [I | -C] from random rational ingredients.
inline Camera<Rational> random_finite_camera(SplitMix64& rng) {
  Mat3<Rational> k = random_calibration_matrix(rng);
  Mat3<Rational> r = cayley_rotation(rng);
  Vec3<Rational> c;
  for (int i = 0; i < 3; ++i) c(i) = Rational(rng.int_in(-4, 4));
  Mat34<Rational> p;
  p.leftCols<3>() = k * r;
  p.col(3) = -(k * r) * c;
  return Camera<Rational>(p);
}

// A random rank-3 cone with its vertex and a known rational point on it:
// the pullback of a congruence image of x^2 + y^2 - z^2 under a random
// camera. The anchor is any world point projecting onto the image conic.
struct ConeFixture {
  Quadric3<Rational> cone;
  HPoint3<Rational> vertex;
  Vec4<Rational> anchor;
};

inline ConeFixture random_cone(SplitMix64& rng) {
  for (;;) {
    Mat<Rational> a = random_int_matrix(rng, 3, 3);
    if (exact_rank(a) != 3) continue;
    Mat3<Rational> a3 = a;
    Mat3<Rational> d0 = Mat3<Rational>::Zero();
    d0(0, 0) = Rational(1); d0(1, 1) = Rational(1); d0(2, 2) = Rational(-1);
    Mat3<Rational> d = a3.transpose() * d0 * a3;
    // (1,0,1) lies on d0, so a^{-1} (1,0,1) lies on d
    Vec3<Rational> y0 = a3.inverse() * Vec3<Rational>(Rational(1), Rational(0), Rational(1));
    Camera<Rational> cam = random_camera(rng);
    HPoint3<Rational> center = camera_center(cam);

    // world point with cam * x = y0: fix the coordinate where the center is
    // nonzero (the remaining 3x3 block is then invertible)
    int drop = 0;
    while (center.v(drop).is_zero()) ++drop;
    Mat<Rational> sub(3, 3);
    int col = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == drop) continue;
      sub.col(col++) = cam.m.col(j);
    }
    Vec<Rational> sol = exact_solve(sub, Vec<Rational>(y0));
    Vec4<Rational> anchor = Vec4<Rational>::Zero();
    col = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == drop) continue;
      anchor(j) = sol(col++);
    }
    if (is_zero_mat(anchor)) continue;

    Quadric3<Rational> cone = pullback_cone(cam, Conic2<Rational>(d));
    return ConeFixture{cone, center, anchor};
  }
}

// A calibrated configuration: finite cameras observing the absolute conic
// through their exact image conics. Always valid by construction.
inline CalibratedConfig<Rational> random_calibrated_config(SplitMix64& rng, int views) {
  for (;;) {
    std::vector<Camera<Rational>> cams;
    for (int i = 0; i < views; ++i) cams.push_back(random_finite_camera(rng));
    CameraConfig<Rational> config(std::move(cams));
    if (!config.general()) continue;
    std::vector<Conic2<Rational>> images;
    for (const auto& cam : config.cameras)
      images.push_back(image_of_absolute_conic(cam));
    return CalibratedConfig<Rational>(config, images, absolute_conic<Rational>());
  }
}

}  // namespace mvlab
