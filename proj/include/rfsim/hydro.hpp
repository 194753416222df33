#pragma once

#include "rfsim/grid.hpp"
#include "rfsim/kernels.hpp"
#include "rfsim/kinetics.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace rfsim {

/// Velocity, pressure and temperature of the channel flow.
struct FlowState {
  VelocityField v;
  Eigen::VectorXd p;      // cells
  Eigen::VectorXd theta;  // cells
  double Pr = 1.0;
  double sigma = 1.0;

  /// v = e_n, p = 0 and the given temperature.
  static FlowState at_rest(const Grid& grid, Eigen::VectorXd theta, double Pr = 1.0, double sigma = 1.0);
};

/// Projection stepper for the momentum equation and implicit stepper for
/// the temperature. Factorizations are cached per dt.
///
/// Velocity boundary conditions: u = 0 on every side; w = 1 on the inlet and
/// outlet faces, zero normal derivative on the side walls. Temperature is 0
/// at the inlet in channel mode and has zero normal gradient elsewhere.
class FlowStepper {
 public:
  explicit FlowStepper(const Grid& grid, Exec exec = Exec::Parallel);

  /// Throws PoissonSolveFailed when the pressure residual exceeds 1e-10
  /// relative to the right-hand side.
  void step_flow(FlowState& state, double dt);

  /// Throws StepRejected if min theta < -1e-10 afterwards. `inlet_dirichlet`
  /// selects theta = 0 on z = 0 (channel) or zero flux (closed box).
  void step_temperature(FlowState& state, const RateModel& model, const Eigen::MatrixXd& Y, double dt,
                        bool inlet_dirichlet);

 private:
  using SpMat = Eigen::SparseMatrix<double>;
  void prepare_momentum(double dt, double Pr);
  void prepare_temperature(double dt, bool inlet_dirichlet);
  void prepare_poisson();

  Grid grid_;
  Exec exec_;
  double momentum_dt_ = -1.0, momentum_pr_ = -1.0;
  Eigen::SimplicialLDLT<SpMat> u_solver_, w_solver_;
  Eigen::VectorXd w_boundary_rhs_;
  double temperature_dt_ = -1.0;
  bool temperature_inlet_ = false;
  Eigen::SimplicialLDLT<SpMat> t_solver_;
  bool poisson_ready_ = false;
  SpMat poisson_;
  Eigen::SimplicialLDLT<SpMat> p_solver_;
};

FlowState step_flow(const Grid& grid, const FlowState& state, double dt);
FlowState step_temperature(const Grid& grid, const RateModel& model, const FlowState& state, const Eigen::MatrixXd& Y,
                           double dt, bool inlet_dirichlet = true);

/// Largest |div v| over cells.
double max_divergence(const Grid& grid, const VelocityField& v, Exec exec = Exec::Parallel);

/// Cell-centred velocity (2 x cells), averaging the two faces of each cell.
Eigen::MatrixXd cell_velocity(const Grid& grid, const VelocityField& v);

}  // namespace rfsim
