#include "doctest.h"

#include "rfsim/errors.hpp"
#include "rfsim/kinetics.hpp"
#include "rfsim/rd_solver.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace rfsim;

namespace {

SpeciesField bump_field(const Grid& g, SpeciesBoundary boundary) {
  SpeciesField Y;
  Y.boundary = boundary;
  Y.inlet = Eigen::Vector3d(0.5, 0.3, 0.2);
  Y.Y.resize(3, g.cells());
  for (int k = 0; k < g.nz(); ++k)
    for (int i = 0; i < g.nx(); ++i) {
      const double b = 0.8 * std::exp(-(std::pow(g.xc(i) - 0.3, 2) + std::pow(g.zc(k) - 0.6, 2)) / 0.02);
      Y.Y.col(g.cell(i, k)) = (1.0 - b) * Y.inlet + b * Eigen::Vector3d(0.1, 0.2, 0.7);
    }
  return Y;
}

SpeciesSet three_species() {
  Eigen::MatrixXd D(3, 3);
  D << 0.0, 1.0, 0.8, 1.0, 0.0, 0.5, 0.8, 0.5, 0.0;
  return SpeciesSet(Eigen::Vector3d(1.0, 2.0, 3.0), D, 1.0);
}

}  // namespace

TEST_CASE("inlet ghost cells put the face mean at the inlet value") {
  const Grid g(7, 5, 1.0, 1.0);
  const SpeciesField Y = bump_field(g, SpeciesBoundary::Channel);
  const PaddedField p = apply_species_bcs(g, Y);
  for (int i = 0; i < g.nx(); ++i)
    for (int s = 0; s < 3; ++s) CHECK(std::abs(0.5 * (p.at(i, -1)[s] + p.at(i, 0)[s]) - Y.inlet(s)) <= 1e-14);
}

TEST_CASE("flux divergence") {
  const Grid g(20, 16, 1.0, 1.0);
  const SpeciesSet species = three_species();

  SUBCASE("vanishes on a uniform field") {
    SpeciesField Y = bump_field(g, SpeciesBoundary::Channel);
    for (int c = 0; c < g.cells(); ++c) Y.Y.col(c) = Y.inlet;
    CHECK(flux_divergence(g, species, Y).cwiseAbs().maxCoeff() <= 1e-13);
  }
  SUBCASE("sums to zero over species in every cell") {
    const SpeciesField Y = bump_field(g, SpeciesBoundary::Channel);
    const Eigen::MatrixXd div = flux_divergence(g, species, Y);
    CHECK(div.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12 * div.cwiseAbs().maxCoeff());
  }
  SUBCASE("integrates to zero in a closed box") {
    const SpeciesField Y = bump_field(g, SpeciesBoundary::Closed);
    const Eigen::MatrixXd div = flux_divergence(g, species, Y);
    const Eigen::VectorXd total = div.rowwise().sum() * g.cell_area();
    CHECK(total.cwiseAbs().maxCoeff() <= 1e-12 * div.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("binary flux divergence is the scaled Neumann Laplacian") {
  const double dprime = 4.0;
  Eigen::MatrixXd D(2, 2);
  D << 0.0, 1.0 / dprime, 1.0 / dprime, 0.0;
  const SpeciesSet species(Eigen::Vector2d(1.0, 1.0), D, 1.0);
  const Grid g(12, 9, 1.5, 1.0);
  rfsim::test::Sampler rng(41);
  SpeciesField Y;
  Y.boundary = SpeciesBoundary::Closed;
  Y.inlet = Eigen::Vector2d(0.5, 0.5);
  Y.Y.resize(2, g.cells());
  for (int c = 0; c < g.cells(); ++c) {
    const double y = rng.uniform(0.05, 0.95);
    Y.Y.col(c) = Eigen::Vector2d(y, 1.0 - y);
  }
  const Eigen::MatrixXd div = flux_divergence(g, species, Y, FluxModel::StefanMaxwell, Exec::Serial);
  for (int k = 0; k < g.nz(); ++k)
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.cell(i, k);
      double lap = 0.0;
      const double y = Y.Y(0, c);
      if (i > 0) lap += (Y.Y(0, g.cell(i - 1, k)) - y) / (g.dx() * g.dx());
      if (i < g.nx() - 1) lap += (Y.Y(0, g.cell(i + 1, k)) - y) / (g.dx() * g.dx());
      if (k > 0) lap += (Y.Y(0, g.cell(i, k - 1)) - y) / (g.dz() * g.dz());
      if (k < g.nz() - 1) lap += (Y.Y(0, g.cell(i, k + 1)) - y) / (g.dz() * g.dz());
      CHECK(div(0, c) == doctest::Approx(-lap / dprime).epsilon(1e-12).scale(1.0));
      CHECK(div(1, c) == doctest::Approx(lap / dprime).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("uniform inlet state is a fixed point of the step") {
  const Grid g(16, 12, 1.0, 1.0);
  const SpeciesSet species = three_species();
  SpeciesField Y = bump_field(g, SpeciesBoundary::Channel);
  for (int c = 0; c < g.cells(); ++c) Y.Y.col(c) = Y.inlet;
  SpeciesStepOptions opts;
  opts.reg.epsilon = 1e-2;
  const SpeciesField out = step_species(g, species, InertModel(3), Y, VelocityField::lifting(g),
                                        Eigen::VectorXd::Zero(g.cells()), 1e-2, opts);
  CHECK((out.Y - Y.Y).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("closed box steps conserve every species") {
  const Grid g(24, 24, 1.0, 1.0);
  const SpeciesSet species = three_species();
  SpeciesField Y = bump_field(g, SpeciesBoundary::Closed);
  const Eigen::VectorXd mass0 = Y.Y.rowwise().sum() * g.cell_area();
  SpeciesStepper stepper(g, 3);
  SpeciesStepOptions opts;
  opts.reg.epsilon = 1e-3;
  const InertModel inert(3);
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(g.cells());
  for (int n = 0; n < 10; ++n) {
    const Eigen::VectorXd before = Y.Y.rowwise().sum() * g.cell_area();
    Y = stepper.step(species, inert, Y, VelocityField::zero(g), theta, 2e-3, opts);
    const Eigen::VectorXd after = Y.Y.rowwise().sum() * g.cell_area();
    CHECK((after - before).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((Y.Y.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(Y.Y.minCoeff() >= 0.0);
  }
  CHECK((Y.Y.rowwise().sum() * g.cell_area() - mass0).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(stepper.last_iterations() > 0);
}

TEST_CASE("reacting channel step within the bounds stays admissible") {
  const Grid g(16, 16, 1.0, 1.0);
  const SpeciesSet species = three_species();
  const ChainModel chain(50.0, 4.0, 20.0, 6.0, Eigen::Vector3d(3, 2, 1));
  SpeciesField Y = bump_field(g, SpeciesBoundary::Channel);
  // a pocket where the fuel is exhausted
  for (int k = 6; k < 9; ++k)
    for (int i = 6; i < 9; ++i) Y.Y.col(g.cell(i, k)) = Eigen::Vector3d(0.0, 0.3, 0.7);
  const VelocityField v = VelocityField::lifting(g);
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(g.cells(), 3.0);
  SpeciesStepOptions opts;
  const double dt = species_dt_bounds(g, chain, Y, v, opts.reg).min();
  REQUIRE(std::isfinite(dt));
  SpeciesStepper stepper(g, 3);
  for (int n = 0; n < 5; ++n) {
    Y = stepper.step(species, chain, Y, v, theta, dt, opts);
    CHECK(Y.Y.minCoeff() >= -1e-10);
    CHECK((Y.Y.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("species state check") {
  SpeciesField Y;
  Y.inlet = Eigen::Vector2d(0.5, 0.5);
  Y.Y = Eigen::MatrixXd::Constant(2, 4, 0.5);
  CHECK_NOTHROW(check_species_state(Y, 1e-10, 1e-8));
  Y.Y(0, 2) = -1e-9;
  Y.Y(1, 2) = 1.0 + 1e-9;
  CHECK_THROWS_AS(check_species_state(Y, 1e-10, 1e-8), StepRejected);
  Y.Y(0, 2) = 0.5;
  Y.Y(1, 2) = 0.5 + 1e-7;
  CHECK_THROWS_AS(check_species_state(Y, 1e-10, 1e-8), StepRejected);
  Y.Y(1, 2) = std::nan("");
  CHECK_THROWS_AS(check_species_state(Y, 1e-10, 1e-8), StepRejected);
}

TEST_CASE("time step bounds") {
  const Grid g(10, 20, 1.0, 1.0);
  const SpeciesField Y = bump_field(g, SpeciesBoundary::Channel);
  const RegularizationParams none;

  const StepBounds still = species_dt_bounds(g, InertModel(3), Y, VelocityField::zero(g), none);
  CHECK(std::isinf(still.min()));

  const ChainModel chain(2.0, 4.0, 1.0, 6.0, Eigen::Vector3d(3, 2, 1));
  const StepBounds flow = species_dt_bounds(g, chain, Y, VelocityField::lifting(g), none);
  CHECK(flow.advection == doctest::Approx(0.5 * g.dz()));
  CHECK(flow.reaction == doctest::Approx(1.0 / chain.lipschitz()));
  CHECK(flow.convexity == doctest::Approx(1.0 / (1.0 / g.dz() + chain.rate_bound())));
  CHECK(std::isinf(flow.regularization));
  CHECK(flow.min() == std::min({flow.advection, flow.reaction, flow.convexity}));

  RegularizationParams reg;
  reg.epsilon = 1e-2;
  reg.q = 4.0;
  const StepBounds r = species_dt_bounds(g, InertModel(3), Y, VelocityField::zero(g), reg);
  CHECK(std::isfinite(r.regularization));
  CHECK(r.regularization > 0.0);
  SpeciesField flat = Y;
  for (int c = 0; c < g.cells(); ++c) flat.Y.col(c) = Y.inlet;
  CHECK(std::isinf(species_dt_bounds(g, InertModel(3), flat, VelocityField::zero(g), reg).regularization));
}
