#include "rfsim/rd_solver.hpp"

#include "block_ilu.hpp"
#include "parallel.hpp"
#include "rfsim/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace rfsim {

using detail::for_each_2d;

PaddedField apply_species_bcs(const Grid& grid, const SpeciesField& Y) {
  if (Y.Y.cols() != grid.cells()) throw DomainError("apply_species_bcs: field does not match grid");
  const bool inlet = Y.boundary == SpeciesBoundary::Channel;
  if (inlet && Y.inlet.size() != Y.Y.rows()) throw DomainError("apply_species_bcs: inlet composition size mismatch");
  return pad_field(grid, Y.Y, inlet ? &Y.inlet : nullptr);
}

Eigen::MatrixXd flux_divergence(const Grid& grid, const SpeciesSet& species, const SpeciesField& Y, FluxModel model,
                                Exec exec) {
  const PaddedField p = apply_species_bcs(grid, Y);
  FaceCoefficients coeffs;
  face_coefficients(grid, species, p, model, exec, coeffs);
  Eigen::MatrixXd out;
  diffusive_divergence(grid, p, coeffs, exec, out);
  return out;
}

Eigen::MatrixXd q_laplacian_term(const Grid& grid, const SpeciesField& Y, const RegularizationParams& reg, Exec exec) {
  Eigen::MatrixXd out;
  q_laplacian(grid, apply_species_bcs(grid, Y), reg.epsilon, reg.q, exec, out);
  return out;
}

Eigen::MatrixXd advection_term(const Grid& grid, const VelocityField& v, const SpeciesField& Y, Exec exec) {
  Eigen::MatrixXd out;
  upwind_advection(grid, v, apply_species_bcs(grid, Y), exec, out);
  return out;
}

void check_species_state(const SpeciesField& Y, double tol_pos, double tol_sum) {
  const double min_y = Y.Y.minCoeff();
  const double dev = (Y.Y.colwise().sum().array() - 1.0).abs().maxCoeff();
  if (!Y.Y.allFinite() || min_y < -tol_pos || dev > tol_sum) {
    std::ostringstream os;
    os << "species state rejected: min Y = " << min_y << ", max |sum Y - 1| = " << dev;
    throw StepRejected(os.str());
  }
}

double StepBounds::min() const { return std::min({advection, reaction, regularization, convexity}); }

StepBounds species_dt_bounds(const Grid& grid, const RateModel& model, const SpeciesField& Y, const VelocityField& v,
                             const RegularizationParams& reg, Exec exec) {
  StepBounds b;
  const double h = std::min(grid.dx(), grid.dz());
  const double vmax = std::max(v.u.size() ? v.u.cwiseAbs().maxCoeff() : 0.0, v.w.size() ? v.w.cwiseAbs().maxCoeff() : 0.0);
  if (vmax > 0.0) b.advection = 0.5 * h / vmax;
  if (model.lipschitz() > 0.0) b.reaction = 1.0 / model.lipschitz();
  if (reg.epsilon > 0.0) {
    const double g = max_face_gradient(grid, apply_species_bcs(grid, Y), exec);
    const double scale = reg.epsilon * std::pow(g, reg.q - 2.0);
    if (scale > 0.0) b.regularization = 0.25 * h * h / scale;
  }
  const double rate = max_inflow_rate(grid, v) + model.rate_bound();
  if (rate > 0.0) b.convexity = 1.0 / rate;
  return b;
}

SpeciesStepper::SpeciesStepper(const Grid& grid, int species_count) : grid_(grid), n_(species_count) {
  if (n_ < 1 || n_ > kMaxSpecies) throw DomainError("SpeciesStepper: unsupported species count");
  build_pattern();
}

namespace {

// Neighbour cells of (i,k) in increasing index order, the cell itself included.
int neighbours(const Grid& g, int i, int k, int* out) {
  int m = 0;
  if (k > 0) out[m++] = g.cell(i, k - 1);
  if (i > 0) out[m++] = g.cell(i - 1, k);
  out[m++] = g.cell(i, k);
  if (i < g.nx() - 1) out[m++] = g.cell(i + 1, k);
  if (k < g.nz() - 1) out[m++] = g.cell(i, k + 1);
  return m;
}

}  // namespace

void SpeciesStepper::build_pattern() {
  const int n = n_;
  const int rows = grid_.cells() * n;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(rows) * 5 * static_cast<std::size_t>(n));
  for (int k = 0; k < grid_.nz(); ++k)
    for (int i = 0; i < grid_.nx(); ++i) {
      int nb[5];
      const int m = neighbours(grid_, i, k, nb);
      const int c = grid_.cell(i, k);
      for (int s = 0; s < n; ++s)
        for (int b = 0; b < m; ++b)
          for (int j = 0; j < n; ++j) trip.emplace_back(c * n + s, nb[b] * n + j, 0.0);
    }
  matrix_.resize(rows, rows);
  matrix_.setFromTriplets(trip.begin(), trip.end());
  matrix_.makeCompressed();
  rhs_.resize(rows);
}

void SpeciesStepper::assemble(const FaceCoefficients& coeffs, const SpeciesField& Y,
                              const Eigen::MatrixXd& explicit_state, double dt, Exec exec) {
  const int n = n_;
  const Grid& g = grid_;
  const double gx = dt / (g.dx() * g.dx());
  const double gz = dt / (g.dz() * g.dz());
  const bool inlet = Y.boundary == SpeciesBoundary::Channel;
  double* values = matrix_.valuePtr();
  const auto* outer = matrix_.outerIndexPtr();

  for_each_2d(exec, g.nx(), g.nz(), [&](int i, int k) {
    const int c = g.cell(i, k);
    int nb[5];
    const int m = neighbours(g, i, k, nb);
    int self = 0;
    while (nb[self] != c) ++self;

    double S[kMaxSpecies * kMaxSpecies];
    for (int e = 0; e < n * n; ++e) S[e] = 0.0;
    for (int s = 0; s < n; ++s) S[s + s * n] = 1.0;
    for (int s = 0; s < n; ++s) rhs_(c * n + s) = explicit_state(s, c);

    // Write -scale * A into the block of cell `other` and add scale * A to S.
    auto couple = [&](const double* A, double scale, int other) {
      int b = 0;
      while (nb[b] != other) ++b;
      for (int s = 0; s < n; ++s) {
        double* row = values + outer[c * n + s] + b * n;
        for (int j = 0; j < n; ++j) {
          row[j] = -scale * A[s + j * n];
          S[s + j * n] += scale * A[s + j * n];
        }
      }
    };
    if (i > 0) couple(coeffs.xface(g.xface(i, k)), gx, g.cell(i - 1, k));
    if (i < g.nx() - 1) couple(coeffs.xface(g.xface(i + 1, k)), gx, g.cell(i + 1, k));
    if (k > 0) couple(coeffs.zface(g.zface(i, k)), gz, g.cell(i, k - 1));
    if (k < g.nz() - 1) couple(coeffs.zface(g.zface(i, k + 1)), gz, g.cell(i, k + 1));
    if (inlet && k == 0) {
      // Half-cell gradient to the inlet value.
      const double* A = coeffs.zface(g.zface(i, 0));
      const double scale = 2.0 * gz;
      for (int s = 0; s < n; ++s) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
          S[s + j * n] += scale * A[s + j * n];
          acc += A[s + j * n] * Y.inlet(j);
        }
        rhs_(c * n + s) += scale * acc;
      }
    }
    for (int s = 0; s < n; ++s) {
      double* row = values + outer[c * n + s] + self * n;
      for (int j = 0; j < n; ++j) row[j] = S[s + j * n];
    }
    (void)m;
  });
}

SpeciesField SpeciesStepper::step(const SpeciesSet& species, const RateModel& model, const SpeciesField& Y,
                                  const VelocityField& v, const Eigen::VectorXd& theta, double dt,
                                  const SpeciesStepOptions& opts) {
  if (Y.species() != n_ || static_cast<std::size_t>(n_) != species.size())
    throw DomainError("step_species: species count mismatch");
  if (Y.Y.cols() != grid_.cells()) throw DomainError("step_species: field does not match grid");
  if (model.species_count() != species.size()) throw DomainError("step_species: rate model species count mismatch");
  if (!(dt > 0.0)) throw DomainError("step_species: dt must be positive");
  const Exec exec = opts.exec;

  const PaddedField padded = apply_species_bcs(grid_, Y);

  // Explicit part: advection, reaction, regularization.
  Eigen::MatrixXd adv;
  upwind_advection(grid_, v, padded, exec, adv);
  Eigen::MatrixXd explicit_state = Y.Y - dt * adv;
  if (model.rate_bound() > 0.0) {
    for_each_2d(exec, grid_.nx(), grid_.nz(), [&](int i, int k) {
      const int c = grid_.cell(i, k);
      const double th = theta.size() ? theta(c) : 0.0;
      explicit_state.col(c) += dt * extended_rates(model, th, Y.Y.col(c));
    });
  }
  if (opts.reg.epsilon > 0.0) {
    Eigen::MatrixXd reg;
    q_laplacian(grid_, padded, opts.reg.epsilon, opts.reg.q, exec, reg);
    explicit_state += dt * reg;
  }

  FaceCoefficients coeffs;
  face_coefficients(grid_, species, padded, opts.flux_model, exec, coeffs);
  assemble(coeffs, Y, explicit_state, dt, exec);

  Eigen::VectorXd guess = Eigen::Map<const Eigen::VectorXd>(explicit_state.data(), explicit_state.size());
  Eigen::VectorXd x;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, detail::BlockIlu0> krylov;
  krylov.preconditioner().set_block_size(n_);
  krylov.setTolerance(opts.solver_tolerance);
  krylov.setMaxIterations(500);
  krylov.compute(matrix_);
  bool ok = krylov.info() == Eigen::Success;
  if (ok) {
    x = krylov.solveWithGuess(rhs_, guess);
    last_iterations_ = static_cast<int>(krylov.iterations());
    const double res = (matrix_ * x - rhs_).norm();
    ok = krylov.info() == Eigen::Success && std::isfinite(res) && res <= 1e-10 * rhs_.norm();
  }
  if (!ok) {
    Eigen::SparseMatrix<double> colmajor = matrix_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(colmajor);
    if (lu.info() != Eigen::Success) throw StepRejected("step_species: diffusion system is singular");
    x = lu.solve(rhs_);
    last_iterations_ = 0;
  }

  SpeciesField out = Y;
  out.Y = Eigen::Map<const Eigen::MatrixXd>(x.data(), n_, grid_.cells());
  check_species_state(out, opts.tol_pos, opts.tol_sum);
  return out;
}

SpeciesField step_species(const Grid& grid, const SpeciesSet& species, const RateModel& model, const SpeciesField& Y,
                          const VelocityField& v, const Eigen::VectorXd& theta, double dt,
                          const SpeciesStepOptions& opts) {
  SpeciesStepper stepper(grid, Y.species());
  return stepper.step(species, model, Y, v, theta, dt, opts);
}

}  // namespace rfsim
