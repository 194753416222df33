#include "doctest.h"

#include "rfsim/errors.hpp"
#include "rfsim/hydro.hpp"
#include "rfsim/kernels.hpp"
#include "rfsim/kinetics.hpp"
#include "rfsim/rd_solver.hpp"
#include "test_support.hpp"

#include <omp.h>

#include <cmath>

using namespace rfsim;

namespace {

struct Fixture {
  Grid grid{24, 20, 1.2, 1.0};
  SpeciesSet species = rfsim::test::Sampler(31).species(3);
  SpeciesField Y;
  VelocityField v;

  Fixture() {
    omp_set_num_threads(4);
    Y.inlet = Eigen::Vector3d(0.5, 0.3, 0.2);
    Y.Y.resize(3, grid.cells());
    for (int k = 0; k < grid.nz(); ++k)
      for (int i = 0; i < grid.nx(); ++i) {
        const double b = 0.6 * std::exp(-8.0 * (std::pow(grid.xc(i) - 0.5, 2) + std::pow(grid.zc(k) - 0.4, 2)));
        Y.Y.col(grid.cell(i, k)) = (1.0 - b) * Y.inlet + b * Eigen::Vector3d(0.1, 0.2, 0.7);
      }
    v = VelocityField::lifting(grid);
    for (int f = 0; f < grid.xfaces(); ++f) v.u(f) = 0.1 * std::sin(0.7 * f);
    for (int k = 0; k < grid.nz(); ++k) v.u(grid.xface(0, k)) = v.u(grid.xface(grid.nx(), k)) = 0.0;
  }
};

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && std::equal(a.data(), a.data() + a.size(), b.data());
}

}  // namespace

TEST_CASE("grid indexing and validation") {
  const Grid g(4, 3, 2.0, 1.5);
  CHECK(g.dx() == 0.5);
  CHECK(g.dz() == 0.5);
  CHECK(g.cells() == 12);
  CHECK(g.cell(3, 2) == 11);
  CHECK(g.xfaces() == 15);
  CHECK(g.zfaces() == 16);
  CHECK(g.xc(0) == 0.25);
  CHECK_THROWS_AS(Grid(0, 3, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Grid(3, 3, -1.0, 1.0), DomainError);
}

TEST_CASE("ghost cells") {
  const Grid g(3, 3, 1.0, 1.0);
  Eigen::MatrixXd vals(2, 9);
  for (int c = 0; c < 9; ++c) vals.col(c) = Eigen::Vector2d(0.1 * c, 1.0 - 0.1 * c);
  const Eigen::VectorXd inlet = Eigen::Vector2d(0.5, 0.5);
  const PaddedField p = pad_field(g, vals, &inlet);
  for (int i = 0; i < 3; ++i) {
    // inlet face mean equals the inlet value
    for (int s = 0; s < 2; ++s) CHECK(0.5 * (p.at(i, -1)[s] + p.at(i, 0)[s]) == doctest::Approx(inlet(s)).epsilon(1e-14));
    // outlet and walls copy the cell
    CHECK(p.at(i, 3)[0] == vals(0, g.cell(i, 2)));
    CHECK(p.at(-1, i)[0] == vals(0, g.cell(0, i)));
    CHECK(p.at(3, i)[1] == vals(1, g.cell(2, i)));
  }
  const PaddedField closed = pad_field(g, vals, nullptr);
  CHECK(closed.at(1, -1)[0] == vals(0, g.cell(1, 0)));
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  Fixture f;
  const PaddedField p = apply_species_bcs(f.grid, f.Y);
  FaceCoefficients cs, cp;
  face_coefficients(f.grid, f.species, p, FluxModel::StefanMaxwell, Exec::Serial, cs);
  face_coefficients(f.grid, f.species, p, FluxModel::StefanMaxwell, Exec::Parallel, cp);
  CHECK(cs.x == cp.x);
  CHECK(cs.z == cp.z);

  Eigen::MatrixXd a, b;
  diffusive_divergence(f.grid, p, cs, Exec::Serial, a);
  diffusive_divergence(f.grid, p, cs, Exec::Parallel, b);
  CHECK(bitwise_equal(a, b));
  q_laplacian(f.grid, p, 1e-2, 4.0, Exec::Serial, a);
  q_laplacian(f.grid, p, 1e-2, 4.0, Exec::Parallel, b);
  CHECK(bitwise_equal(a, b));
  upwind_advection(f.grid, f.v, p, Exec::Serial, a);
  upwind_advection(f.grid, f.v, p, Exec::Parallel, b);
  CHECK(bitwise_equal(a, b));
  Eigen::MatrixXd gx, gz, hx, hz;
  cell_gradients(f.grid, p, Exec::Serial, gx, gz);
  cell_gradients(f.grid, p, Exec::Parallel, hx, hz);
  CHECK(bitwise_equal(gx, hx));
  CHECK(bitwise_equal(gz, hz));
  Eigen::VectorXd d1, d2;
  dissipation_density(f.grid, f.species, p, Exec::Serial, d1);
  dissipation_density(f.grid, f.species, p, Exec::Parallel, d2);
  CHECK(bitwise_equal(d1, d2));
  velocity_divergence(f.grid, f.v, Exec::Serial, d1);
  velocity_divergence(f.grid, f.v, Exec::Parallel, d2);
  CHECK(bitwise_equal(d1, d2));
  CHECK(max_face_gradient(f.grid, p, Exec::Serial) == max_face_gradient(f.grid, p, Exec::Parallel));
}

TEST_CASE("serial and parallel steps agree bitwise") {
  Fixture f;
  const ChainModel chain(5.0, 4.0, 2.0, 6.0, Eigen::Vector3d(3, 2, 1));
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(f.grid.cells(), 1.5);
  const VelocityField v = VelocityField::lifting(f.grid);
  SpeciesStepOptions so;
  so.reg.epsilon = 1e-3;
  so.exec = Exec::Serial;
  const SpeciesField s = step_species(f.grid, f.species, chain, f.Y, v, theta, 1e-3, so);
  so.exec = Exec::Parallel;
  const SpeciesField p = step_species(f.grid, f.species, chain, f.Y, v, theta, 1e-3, so);
  CHECK(bitwise_equal(s.Y, p.Y));

  FlowState a = FlowState::at_rest(f.grid, theta);
  for (int k = 0; k < f.grid.nz(); ++k)
    for (int i = 0; i < f.grid.nx(); ++i) a.theta(f.grid.cell(i, k)) = f.grid.xc(i) * f.grid.zc(k);
  FlowState b = a;
  FlowStepper serial(f.grid, Exec::Serial), parallel(f.grid, Exec::Parallel);
  for (int n = 0; n < 3; ++n) {
    serial.step_flow(a, 0.01);
    parallel.step_flow(b, 0.01);
    serial.step_temperature(a, chain, f.Y.Y, 0.01, true);
    parallel.step_temperature(b, chain, f.Y.Y, 0.01, true);
  }
  CHECK(bitwise_equal(a.v.u, b.v.u));
  CHECK(bitwise_equal(a.v.w, b.v.w));
  CHECK(bitwise_equal(a.p, b.p));
  CHECK(bitwise_equal(a.theta, b.theta));
}

TEST_CASE("errors thrown inside a parallel loop reach the caller") {
  Fixture f;
  SpeciesField bad = f.Y;
  bad.Y.col(7).setZero();
  const PaddedField p = pad_field(f.grid, bad.Y, nullptr);
  FaceCoefficients c;
  CHECK_THROWS_AS(face_coefficients(f.grid, f.species, p, FluxModel::ThreeSpeciesClosedForm, Exec::Parallel, c),
                  DegenerateComposition);
}

TEST_CASE("face coefficients match the point evaluation at face means") {
  Fixture f;
  const PaddedField p = apply_species_bcs(f.grid, f.Y);
  FaceCoefficients c;
  face_coefficients(f.grid, f.species, p, FluxModel::StefanMaxwell, Exec::Serial, c);
  const int i = 5, k = 7;
  const Eigen::VectorXd mean = 0.5 * (f.Y.Y.col(f.grid.cell(i - 1, k)) + f.Y.Y.col(f.grid.cell(i, k)));
  const Eigen::MatrixXd a = flux_coefficients(f.species, mean);
  const Eigen::Map<const Eigen::MatrixXd> got(c.xface(f.grid.xface(i, k)), 3, 3);
  CHECK((a - got).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("q-Laplacian") {
  Fixture f;
  const PaddedField p = apply_species_bcs(f.grid, f.Y);
  Eigen::MatrixXd out;
  q_laplacian(f.grid, p, 0.0, 4.0, Exec::Serial, out);
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(q_laplacian(f.grid, p, 1.0, 2.0, Exec::Serial, out), DomainError);

  // 1-D, q = 3: Y = x^2 gives d/dx(|2x| 2x) = 8x, reproduced exactly away
  // from the walls; Y = x^3 gives 36 x^3 at second order.
  auto interior_error = [](int n, int power) {
    const Grid g(n, 4, 1.0, 1.0);
    Eigen::MatrixXd vals(1, g.cells());
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < n; ++i) vals(0, g.cell(i, k)) = std::pow(g.xc(i), power);
    Eigen::MatrixXd q;
    q_laplacian(g, pad_field(g, vals, nullptr), 1.0, 3.0, Exec::Serial, q);
    double err = 0.0;
    for (int i = n / 4; i < 3 * n / 4; ++i) {
      const double x = g.xc(i);
      const double exact = power == 2 ? 8.0 * x : 36.0 * x * x * x;
      err = std::max(err, std::abs(q(0, g.cell(i, 1)) - exact));
    }
    return err;
  };
  CHECK(interior_error(32, 2) < 1e-10);
  const double e1 = interior_error(32, 3), e2 = interior_error(64, 3);
  CHECK(e1 < 1e-1);
  CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("upwind advection") {
  const Grid g(10, 10, 1.0, 1.0);
  Eigen::MatrixXd vals(1, g.cells());
  for (int k = 0; k < 10; ++k)
    for (int i = 0; i < 10; ++i) vals(0, g.cell(i, k)) = 0.3 + 2.5 * g.zc(k);
  Eigen::MatrixXd out;
  upwind_advection(g, VelocityField::zero(g), pad_field(g, vals, nullptr), Exec::Serial, out);
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  upwind_advection(g, VelocityField::lifting(g), pad_field(g, Eigen::MatrixXd::Constant(1, g.cells(), 0.4), nullptr),
                   Exec::Serial, out);
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  upwind_advection(g, VelocityField::lifting(g), pad_field(g, vals, nullptr), Exec::Serial, out);
  for (int k = 1; k < 10; ++k)
    for (int i = 0; i < 10; ++i) CHECK(out(0, g.cell(i, k)) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("velocity divergence and inflow rate") {
  const Grid g(8, 6, 1.0, 1.0);
  Eigen::VectorXd div;
  velocity_divergence(g, VelocityField::lifting(g), Exec::Serial, div);
  CHECK(div.cwiseAbs().maxCoeff() == 0.0);
  CHECK(max_inflow_rate(g, VelocityField::zero(g)) == 0.0);
  CHECK(max_inflow_rate(g, VelocityField::lifting(g)) == doctest::Approx(1.0 / g.dz()));
}
