#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "slag/gaussmap.hpp"
#include "slag/regions.hpp"
#include "slag/rng.hpp"
#include "test_helpers.hpp"

using namespace slag;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kGridStep = kPi / kRotationGridCount;

double wrap_mod_pi(double x) {
  while (x > kPi / 2) x -= kPi;
  while (x <= -kPi / 2) x += kPi;
  return x;
}
}  // namespace

TEST_SUITE("gaussmap") {

TEST_CASE("plane spectra") {
  SymMatrix zero(3);
  CHECK(plane_spectrum(zero).values().cwiseAbs().maxCoeff() == 0.0);

  SymMatrix diag(2);
  diag.set(0, 0, 2.0);
  diag.set(1, 1, -0.5);
  const Spectrum s = plane_spectrum(diag);
  CHECK(s[0] == doctest::Approx(2.0));
  CHECK(s[1] == doctest::Approx(-0.5));

  SymMatrix off(2);
  off.set(0, 1, 1.0);
  const Spectrum t = plane_spectrum(off);
  CHECK(std::abs(t[0] - 1.0) <= 1e-14);
  CHECK(std::abs(t[1] + 1.0) <= 1e-14);
}

TEST_CASE("plane wrapper keeps spectrum consistent with its slope") {
  const SymMatrix slope = test::random_sym_matrix(4, 11, 2.0);
  const LagrangianPlane plane(slope);
  const Spectrum direct = plane_spectrum(slope);
  CHECK((plane.spectrum.values() - direct.values()).cwiseAbs().maxCoeff() <=
        1e-10);
}

TEST_CASE("spectrum is invariant under orthogonal conjugation") {
  const SymMatrix s = test::random_sym_matrix(4, 3, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd q = test::random_orthogonal(4, 50 + trial);
    const SymMatrix conj =
        SymMatrix::FromDense(q.transpose() * s.dense() * q);
    CHECK((plane_spectrum(conj).values() - plane_spectrum(s).values())
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
  }
}

TEST_CASE("zero angle is the identity") {
  const Spectrum spec{0.3, -2.0, 5.0};
  const Spectrum rotated = lewy_rotate(spec, RotationAngle(0.0));
  CHECK(rotated.values() == spec.values());
}

TEST_CASE("quarter turn reproduces the Moebius map") {
  const Spectrum rotated = lewy_rotate(Spectrum{0.0, 1.0},
                                       RotationAngle(kPi / 4));
  CHECK(std::abs(rotated[0] - (-1.0)) <= 1e-12);
  CHECK(std::abs(rotated[1]) <= 1e-12);

  const Spectrum single = lewy_rotate(Spectrum{3.0}, RotationAngle(kPi / 4));
  CHECK(std::abs(single[0] - 0.5) <= 1e-12);
  CHECK(std::abs(single[0] - std::tan(std::atan(3.0) - kPi / 4)) <= 1e-12);
}

TEST_CASE("rotating onto a vertical plane is an error") {
  CHECK_THROWS_AS(lewy_rotate(Spectrum{-1.0}, RotationAngle(kPi / 4)),
                  std::domain_error);
}

TEST_CASE("angle domain is validated") {
  CHECK_THROWS_AS(RotationAngle{kPi}, std::invalid_argument);
  CHECK_THROWS_AS(RotationAngle{-kPi / 2}, std::invalid_argument);
  CHECK_NOTHROW(RotationAngle{kPi / 2});
}

TEST_CASE("phase covariance modulo pi") {
  Lcg seeds(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Spectrum spec = test::random_spectrum(3, seeds.next_u64(), 5.0);
    const double theta = Lcg(seeds.next_u64()).uniform(-1.5, 1.5);
    Spectrum rotated;
    try {
      rotated = lewy_rotate(spec, RotationAngle(theta));
    } catch (const std::domain_error&) {
      continue;
    }
    for (int i = 0; i < 3; ++i) {
      const double drift =
          wrap_mod_pi(std::atan(rotated[i]) - (std::atan(spec[i]) - theta));
      CHECK(std::abs(drift) <= 1e-12);
    }
  }
}

TEST_CASE("rotations compose additively") {
  Lcg seeds(34);
  for (int trial = 0; trial < 50; ++trial) {
    const Spectrum spec = test::random_spectrum(2, seeds.next_u64(), 3.0);
    Lcg angle_rng(seeds.next_u64());
    const double t1 = angle_rng.uniform(-0.7, 0.7);
    const double t2 = angle_rng.uniform(-0.7, 0.7);
    Spectrum stepwise, direct;
    try {
      stepwise = lewy_rotate(lewy_rotate(spec, RotationAngle(t1)),
                             RotationAngle(t2));
      direct = lewy_rotate(spec, RotationAngle(t1 + t2));
    } catch (const std::domain_error&) {
      continue;
    }
    CHECK((stepwise.values() - direct.values()).cwiseAbs().maxCoeff() <=
          1e-10);
  }
}

TEST_CASE("convex spectra land in the unit ball and Xi after a quarter turn") {
  Lcg seeds(55);
  for (int trial = 0; trial < 200; ++trial) {
    Lcg rng(seeds.next_u64());
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = rng.uniform(0.0, 100.0);
    const Spectrum rotated =
        lewy_rotate(Spectrum(v), RotationAngle(kPi / 4));
    CHECK(rotated.max_abs() <= 1.0 + 1e-12);
    const RegionReport r = classify(rotated, 1.0);
    CHECK(r.flags.ball);
    CHECK(r.flags.xi);
  }
}

TEST_CASE("flat spectrum admits the zero rotation") {
  const RotationSearchResult r =
      find_admissible_rotation({Spectrum{0.0, 0.0}}, 0.5);
  REQUIRE(r.angle.has_value());
  CHECK(std::abs(r.angle->theta) <= 1e-9);
  CHECK(r.ball_margin == doctest::Approx(0.5));
}

TEST_CASE("convex family is admitted one grid step from the quarter turn") {
  std::vector<Spectrum> family;
  family.push_back(Spectrum{0.0, 0.0, 0.0});
  family.push_back(Spectrum{100.0, 100.0, 100.0});
  Lcg seeds(66);
  for (int trial = 0; trial < 50; ++trial) {
    Lcg rng(seeds.next_u64());
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = rng.uniform(0.0, 100.0);
    family.push_back(Spectrum(v));
  }
  const RotationSearchResult r = find_admissible_rotation(family, 1.0);
  REQUIRE(r.angle.has_value());
  CHECK(std::abs(r.angle->theta - kPi / 4) <= 1.5 * kGridStep);
  CHECK(r.ball_margin >= 0.0);
  CHECK(r.xi_margin >= 0.0);
}

TEST_CASE("reciprocal pairs keep their product pinned at minus one") {
  std::vector<Spectrum> family;
  for (double t : {2.0, 4.0, 8.0}) family.push_back(Spectrum{t, -1.0 / t});
  const RotationSearchResult r = find_admissible_rotation(family, 3.0);
  REQUIRE(r.angle.has_value());
  CHECK(r.xi_margin >= -1e-9);
  CHECK(std::abs(r.xi_margin) <= 1e-9);
}

TEST_CASE("an unadmittable family reports its best margins") {
  // Phases 0 and +-pi/3 are equally spaced on the rotation circle, so some
  // plane always keeps slope at least tan(pi/3), far outside the 0.5-ball.
  const double root3 = std::sqrt(3.0);
  const RotationSearchResult r = find_admissible_rotation(
      {Spectrum{0.0}, Spectrum{root3}, Spectrum{-root3}}, 0.5);
  CHECK_FALSE(r.angle.has_value());
  CHECK(r.ball_margin < -1.0);
}

TEST_CASE("rotation search validates inputs") {
  CHECK_THROWS_AS(find_admissible_rotation({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(find_admissible_rotation({Spectrum{1.0}}, 0.0),
                  std::invalid_argument);
}

}  // TEST_SUITE
