#pragma once

#include "rfsim/mixture.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace rfsim {

/// Singular Stefan-Maxwell matrix B(Y) and its regularization
/// C(Y) = B(Y) + gamma Y Y^T with gamma = min_{i!=j} d'_ij.
struct SMMatrix {
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  double gamma = 0.0;
};

/// Which route produces the response matrix f(Y).
enum class FluxModel {
  StefanMaxwell,           // linear solve of the regularized system
  ThreeSpeciesClosedForm,  // explicit N = 3 formula
};

/// Result of one flux solve. Rows are species, columns spatial directions.
struct FluxSolve {
  Eigen::MatrixXd F;
  std::optional<Eigen::MatrixXd> V;  // only when every species is active
  std::vector<bool> active;          // Y_i > kDegeneracyThreshold
};

/// B_ij = -d'_ij Y_i Y_j (i != j), B_ii = sum_{k!=i} d'_ik Y_i Y_k.
SMMatrix assemble(const SpeciesSet& species, const Composition& Y);

/// Solves C(Y) V = P by Cholesky. Requires every Y_i > kDegeneracyThreshold.
Eigen::MatrixXd solve_velocities(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& P);

/// Linear response f(Y) of the regularized flux system: F = f P.
///
/// Species with Y_i <= kDegeneracyThreshold are treated as absent: their
/// flux is P_i / S_i with S_i the resistance-weighted sum of the active
/// mass fractions, and the active block is solved with the absent fluxes
/// moved to the right-hand side. Throws DegenerateComposition when
/// sum Y <= kDegeneracyThreshold.
Eigen::MatrixXd flux_response(const SpeciesSet& species, const Composition& Y);

/// Diffusion fluxes for arbitrary driving vectors P (N x n).
FluxSolve solve_fluxes(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& P);

/// Closed-form fluxes for three species. Requires sum_i P_i = 0.
Eigen::MatrixXd three_species_fluxes(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& P);

/// Mass-fraction gradient coefficients: F_i = -sum_j a_ij grad Y_j.
Eigen::MatrixXd flux_coefficients(const SpeciesSet& species, const Composition& Y);

/// Same as flux_coefficients but with the three-species closed form as the
/// response matrix. Agrees with flux_coefficients for every Y.
Eigen::MatrixXd three_species_flux_coefficients(const SpeciesSet& species, const Composition& Y);

/// Maps a response matrix f to the gradient coefficients a = f G(Y).
Eigen::MatrixXd coefficients_from_response(const SpeciesSet& species, const Composition& Y,
                                           const Eigen::MatrixXd& response);

FluxSolve generalized_fluxes(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& gradY);

/// -sum_i F_i . grad mu_i over species with X_i > kDegeneracyThreshold,
/// grad mu_i = grad X_i / (M_i X_i). Requires 0 <= Y_i <= 1 and
/// |sum Y - 1| <= 1e-8 (DomainError otherwise).
double dissipation_rate(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& gradY);

/// Allocation-free coefficient evaluation for the grid kernels. `Y` points
/// at species.size() contiguous mass fractions.
void flux_coefficients_into(const SpeciesSet& species, const double* Y, FluxModel model, SmallMatrix& out);

}  // namespace rfsim
