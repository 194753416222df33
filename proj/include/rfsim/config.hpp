#pragma once

#include "rfsim/grid.hpp"
#include "rfsim/kinetics.hpp"
#include "rfsim/mixture.hpp"
#include "rfsim/rd_solver.hpp"
#include "rfsim/stefan_maxwell.hpp"

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace rfsim {

/// Initial profile of the mass fractions or the temperature.
///
/// Species: "uniform" uses `background` (defaults to the inlet); "blend"
/// mixes background and peak, Y = (1 - b) background + b peak, with b from
/// `shape`. Temperature: "uniform" is `value`; "gaussian" adds a bump of
/// height `amplitude` to `value`.
struct ProfileSpec {
  std::string type = "uniform";
  std::string shape = "gaussian";  // or "cosine"
  std::vector<double> background;
  std::vector<double> peak;
  std::array<double, 2> center{0.5, 0.5};
  double width = 0.1;
  double amplitude = 1.0;
  double value = 0.0;
};

struct RunConfig {
  std::string name = "run";

  // species
  Eigen::VectorXd molar_masses;
  Eigen::MatrixXd diffusion;
  double kappa = 1.0;
  FluxModel flux_model = FluxModel::StefanMaxwell;

  // kinetics
  std::string model = "none";
  std::vector<std::pair<std::string, double>> model_params;
  std::vector<double> heats;

  // grid
  int nx = 32, nz = 32;
  double lx = 1.0, lz = 1.0;

  // physics
  double Pr = 1.0;
  double sigma = 1.0;
  Eigen::VectorXd inlet;
  SpeciesBoundary boundary = SpeciesBoundary::Channel;
  bool solve_flow = true;       // false keeps the initial velocity frozen
  std::string velocity = "lifting";  // or "zero"
  ProfileSpec initial_species;
  ProfileSpec initial_theta;

  // numerics
  double dt = 1e-3;
  double t_end = 1.0;
  long max_steps = -1;  // < 0: run to t_end
  RegularizationParams reg;
  double tol_pos = 1e-10;
  double tol_sum = 1e-8;
  double eta = 1e-8;
  int max_halvings = 10;
  double solver_tolerance = 1e-13;

  // output
  std::string output_dir = "output";
  int snapshot_interval = 0;  // 0: final snapshot only
};

/// Parses and validates a JSON config. Throws ConfigInvalid on malformed or
/// inconsistent input and ModelRejected when the rate model fails its gate.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

SpeciesSet make_species(const RunConfig& config);
std::shared_ptr<const RateModel> make_rate_model(const RunConfig& config);
Grid make_grid(const RunConfig& config);

/// Initial mass fractions and temperature sampled at cell centres.
SpeciesField initial_species(const RunConfig& config, const Grid& grid);
Eigen::VectorXd initial_theta(const RunConfig& config, const Grid& grid);

}  // namespace rfsim
