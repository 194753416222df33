#include "doctest.h"

#include "rfsim/errors.hpp"
#include "rfsim/mixture.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace rfsim;

namespace {

SpeciesSet two_species(double m1, double m2) {
  Eigen::MatrixXd D(2, 2);
  D << 0.0, 1.0, 1.0, 0.0;
  return SpeciesSet(Eigen::Vector2d(m1, m2), D, 1.0);
}

}  // namespace

TEST_CASE("species set derives scaled resistances and bounds") {
  Eigen::MatrixXd D(3, 3);
  D << 0, 2, 4, 2, 0, 0.5, 4, 0.5, 0;
  const SpeciesSet s(Eigen::Vector3d(1.0, 2.0, 4.0), D, 2.0);
  CHECK(s.resistance()(0, 1) == doctest::Approx(1.0));
  CHECK(s.scaled_resistance()(0, 1) == doctest::Approx(0.5));   // 2/2 / (1*2)
  CHECK(s.scaled_resistance()(1, 2) == doctest::Approx(0.5));   // 2/0.5 / 8
  CHECK(s.scaled_resistance()(0, 2) == doctest::Approx(0.125)); // 2/4 / 4
  CHECK(s.scaled_resistance_low() == doctest::Approx(0.125));
  CHECK(s.scaled_resistance_high() == doctest::Approx(0.5));
  CHECK(s.mass_low() == 1.0);
  CHECK(s.mass_high() == 4.0);
  CHECK(s.mass_ratio() == 4.0);
}

TEST_CASE("species set rejects invalid chemistry") {
  Eigen::MatrixXd D(2, 2);
  D << 0, 1, 1, 0;
  CHECK_THROWS_AS(SpeciesSet(Eigen::Vector2d(1.0, 0.0), D, 1.0), DomainError);
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(SpeciesSet(Eigen::Vector2d(1.0, 1.0), asym, 1.0), DomainError);
  Eigen::MatrixXd neg(2, 2);
  neg << 0, -1, -1, 0;
  CHECK_THROWS_AS(SpeciesSet(Eigen::Vector2d(1.0, 1.0), neg, 1.0), DomainError);
  CHECK_THROWS_AS(SpeciesSet(Eigen::VectorXd::Ones(kMaxSpecies + 1),
                             Eigen::MatrixXd::Ones(kMaxSpecies + 1, kMaxSpecies + 1), 1.0),
                  DomainError);
}

TEST_CASE("mole fractions: hand-evaluated binary case") {
  const SpeciesSet s = two_species(1.0, 2.0);
  const MoleData m = mole_fractions(s, Eigen::Vector2d(0.5, 0.5));
  CHECK(m.molar_sum == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.X(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(m.X(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(m.molar_sum * m.mass_sum - 1.0) < 1e-15);
}

TEST_CASE("mole fractions: single-species and equal-mass identities") {
  test::Sampler rng(7);
  const SpeciesSet s = rng.species(3);
  const MoleData pure = mole_fractions(s, Eigen::Vector3d(1.0, 0.0, 0.0));
  CHECK(pure.X(0) == 1.0);
  CHECK(pure.X(1) == 0.0);
  CHECK(pure.X(2) == 0.0);

  const SpeciesSet eq = test::uniform_species(4, 1.5, 2.5);
  const Eigen::VectorXd Y = rng.simplex(4);
  CHECK((mole_fractions(eq, Y).X - Y).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mole fractions: degenerate and invalid compositions") {
  const SpeciesSet s = two_species(1.0, 2.0);
  CHECK_THROWS_AS(mole_fractions(s, Eigen::Vector2d(0.0, 0.0)), DegenerateComposition);
  CHECK_THROWS_AS(mole_fractions(s, Eigen::Vector2d(1e-13, 1e-13)), DegenerateComposition);
  CHECK_THROWS_AS(mole_fractions(s, Eigen::Vector2d(-0.1, 1.1)), DomainError);
  CHECK_THROWS_AS(grad_mole_from_mass(s, Eigen::Vector2d(0.0, 0.0), Eigen::MatrixXd::Ones(2, 2)), DegenerateComposition);
}

TEST_CASE("round trip mass -> mole -> mass recovers Y / sum Y") {
  test::Sampler rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index n = 2 + trial % 6;
    const SpeciesSet s = rng.species(n, 10.0);
    Eigen::VectorXd Y = rng.closed_simplex(n) * rng.uniform(0.2, 3.0);
    const Eigen::VectorXd back = mass_from_mole(s, mole_fractions(s, Y).X);
    CHECK((back - Y / Y.sum()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("molar sum bounds hold on 1e5 simplex samples") {
  test::Sampler rng(13);
  const SpeciesSet s = rng.species(5, 8.0);
  int violations = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const MoleData m = mole_fractions(s, rng.closed_simplex(5));
    const double tol = 1e-14;
    if (m.molar_sum < 1.0 / s.mass_high() - tol || m.molar_sum > 1.0 / s.mass_low() + tol) ++violations;
    if (m.mass_sum < s.mass_low() - tol || m.mass_sum > s.mass_high() + tol) ++violations;
    if (std::abs(m.molar_sum * m.mass_sum - 1.0) > 1e-14) ++violations;
    if (std::abs(m.X.sum() - 1.0) > 1e-14) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("gradient of mole fractions") {
  test::Sampler rng(17);
  SUBCASE("zero input") {
    const SpeciesSet s = rng.species(3);
    CHECK(grad_mole_from_mass(s, rng.simplex(3), Eigen::MatrixXd::Zero(3, 2)).isZero(0.0));
  }
  SUBCASE("unit masses and balanced gradients leave gradients unchanged") {
    const SpeciesSet s = test::uniform_species(4, 1.0, 1.0);
    const Eigen::MatrixXd g = rng.balanced(4, 2);
    CHECK((grad_mole_from_mass(s, rng.simplex(4), g) - g).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("matches finite differences of the mole-fraction map") {
    for (int trial = 0; trial < 200; ++trial) {
      const SpeciesSet s = rng.species(4, 5.0);
      const Eigen::VectorXd Y = rng.simplex(4);
      const Eigen::MatrixXd g = rng.matrix(4, 2);
      const double molar_sum = Y.cwiseQuotient(s.molar_masses()).sum();
      const Eigen::MatrixXd fd = -test::reference_driving(s, Y, g) / (molar_sum * molar_sum);
      CHECK((grad_mole_from_mass(s, Y, g) - fd).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("two-sided gradient norm equivalence with constant 2 N Mtilde^2") {
  test::Sampler rng(19);
  int violations = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const SpeciesSet s = rng.species(n, 6.0);
    const Eigen::VectorXd Y = rng.closed_simplex(n);
    Eigen::MatrixXd g = rng.balanced(n, 2, rng.uniform(1e-3, 10.0));
    const double c = 2.0 * static_cast<double>(n) * s.mass_ratio() * s.mass_ratio();
    const double gx = gradient_norm(grad_mole_from_mass(s, Y, g));
    const double gy = gradient_norm(g);
    if (gx / c > gy * (1 + 1e-12) || gy > c * gx * (1 + 1e-12)) ++violations;
  }
  CHECK(violations == 0);
}
