#pragma once

#include "rfsim/grid.hpp"
#include "rfsim/mixture.hpp"
#include "rfsim/stefan_maxwell.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rfsim {

/// Serial runs the reference nested loops; Parallel runs the same per-item
/// arithmetic over a flattened OpenMP loop. Results are bitwise identical.
enum class Exec { Serial, Parallel };

/// Flux coefficients a_ij on every face, n*n column-major values per face.
struct FaceCoefficients {
  int n = 0;
  std::vector<double> x;  // grid.xfaces() blocks
  std::vector<double> z;  // grid.zfaces() blocks

  const double* xface(int f) const { return x.data() + static_cast<std::size_t>(f) * n * n; }
  const double* zface(int f) const { return z.data() + static_cast<std::size_t>(f) * n * n; }
};

/// a_ij(Y_f) with Y_f the mean of the two cells sharing the face (ghosts on
/// the boundary), clamped at zero.
void face_coefficients(const Grid& grid, const SpeciesSet& species, const PaddedField& Y, FluxModel model, Exec exec,
                       FaceCoefficients& out);

/// div F_i for F_i = -sum_j a_ij grad Y_j with two-point face gradients.
/// `out` is n x cells.
void diffusive_divergence(const Grid& grid, const PaddedField& Y, const FaceCoefficients& coeffs, Exec exec,
                          Eigen::MatrixXd& out);

/// eps div(|grad Y|^{q-2} grad Y_i). The tangential part of the face
/// gradient is the mean of the central differences in the two cells.
void q_laplacian(const Grid& grid, const PaddedField& Y, double eps, double q, Exec exec, Eigen::MatrixXd& out);

/// Largest face value of |grad Y| as used by q_laplacian.
double max_face_gradient(const Grid& grid, const PaddedField& Y, Exec exec);

/// (v . grad) f per component, first-order upwind in advective form. On a
/// boundary face the upwind value is the face mean of cell and ghost.
void upwind_advection(const Grid& grid, const VelocityField& v, const PaddedField& f, Exec exec, Eigen::MatrixXd& out);

/// Largest total inflow rate sum_{inflow faces} |v.n| / h over cells.
double max_inflow_rate(const Grid& grid, const VelocityField& v);

/// Cell-centred central-difference gradients, each n x cells.
void cell_gradients(const Grid& grid, const PaddedField& Y, Exec exec, Eigen::MatrixXd& gx, Eigen::MatrixXd& gz);

/// Dissipation rate per cell from central gradients. Each cell composition
/// is clamped at zero and renormalized first.
void dissipation_density(const Grid& grid, const SpeciesSet& species, const PaddedField& Y, Exec exec,
                         Eigen::VectorXd& out);

/// Discrete divergence of a staggered velocity field, one value per cell.
void velocity_divergence(const Grid& grid, const VelocityField& v, Exec exec, Eigen::VectorXd& out);

}  // namespace rfsim
