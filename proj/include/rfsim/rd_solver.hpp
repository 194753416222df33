#pragma once

#include "rfsim/grid.hpp"
#include "rfsim/kernels.hpp"
#include "rfsim/kinetics.hpp"
#include "rfsim/mixture.hpp"
#include "rfsim/stefan_maxwell.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <limits>
#include <memory>

namespace rfsim {

/// eps div(|grad Y|^{q-2} grad Y_i) regularization; eps = 0 switches it off.
struct RegularizationParams {
  double epsilon = 0.0;
  double q = 4.0;
};

struct SpeciesStepOptions {
  RegularizationParams reg;
  FluxModel flux_model = FluxModel::StefanMaxwell;
  double tol_pos = 1e-10;
  double tol_sum = 1e-8;
  double solver_tolerance = 1e-13;
  Exec exec = Exec::Parallel;
};

/// Ghosted copy of the species field: zero normal gradient on walls and
/// outlet, and in channel mode an inlet ghost 2 Yu - Y so the face mean is Yu.
PaddedField apply_species_bcs(const Grid& grid, const SpeciesField& Y);

/// div F_i per cell (n x cells).
Eigen::MatrixXd flux_divergence(const Grid& grid, const SpeciesSet& species, const SpeciesField& Y,
                                FluxModel model = FluxModel::StefanMaxwell, Exec exec = Exec::Parallel);

Eigen::MatrixXd q_laplacian_term(const Grid& grid, const SpeciesField& Y, const RegularizationParams& reg,
                                 Exec exec = Exec::Parallel);

/// (v . grad) Y_i per cell, first-order upwind.
Eigen::MatrixXd advection_term(const Grid& grid, const VelocityField& v, const SpeciesField& Y,
                               Exec exec = Exec::Parallel);

/// Throws StepRejected when min Y < -tol_pos or max |sum Y - 1| > tol_sum.
void check_species_state(const SpeciesField& Y, double tol_pos, double tol_sum);

struct StepBounds {
  double advection = std::numeric_limits<double>::infinity();
  double reaction = std::numeric_limits<double>::infinity();
  double regularization = std::numeric_limits<double>::infinity();
  double convexity = std::numeric_limits<double>::infinity();  // dt (inflow rate + K2) <= 1

  double min() const;
};

StepBounds species_dt_bounds(const Grid& grid, const RateModel& model, const SpeciesField& Y, const VelocityField& v,
                             const RegularizationParams& reg, Exec exec = Exec::Parallel);

/// One species step: explicit upwind advection, reaction and q-Laplacian,
/// then the diffusion solve with coefficients frozen at the old state.
/// Keeps the sparsity pattern and solver workspace between calls.
class SpeciesStepper {
 public:
  SpeciesStepper(const Grid& grid, int species_count);

  SpeciesField step(const SpeciesSet& species, const RateModel& model, const SpeciesField& Y, const VelocityField& v,
                    const Eigen::VectorXd& theta, double dt, const SpeciesStepOptions& opts);

  /// Krylov iterations of the last solve (0 when the direct fallback ran).
  int last_iterations() const { return last_iterations_; }

 private:
  void build_pattern();
  void assemble(const FaceCoefficients& coeffs, const SpeciesField& Y, const Eigen::MatrixXd& explicit_state, double dt,
                Exec exec);

  Grid grid_;
  int n_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
  Eigen::VectorXd rhs_;
  int last_iterations_ = 0;
};

SpeciesField step_species(const Grid& grid, const SpeciesSet& species, const RateModel& model, const SpeciesField& Y,
                          const VelocityField& v, const Eigen::VectorXd& theta, double dt,
                          const SpeciesStepOptions& opts = {});

}  // namespace rfsim
