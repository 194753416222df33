#pragma once

#include "rfsim/grid.hpp"
#include "rfsim/hydro.hpp"
#include "rfsim/kernels.hpp"
#include "rfsim/mixture.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace rfsim {

struct GibbsParams {
  double eta = 1e-8;
  Eigen::VectorXd inlet;  // reference composition Yu
};

/// g(Y) = sum_j Z_j [log(Z_j / sum Z) - log(Zu_j / sum Zu)], Z_j = (Y_j + eta) / M_j.
/// Negative mass fractions are clamped at zero first.
double gibbs_density(const SpeciesSet& species, const double* Y, const GibbsParams& params);

/// Midpoint-rule integral of gibbs_density over the grid.
double gibbs_energy(const Grid& grid, const SpeciesSet& species, const SpeciesField& Y, const GibbsParams& params,
                    Exec exec = Exec::Parallel);

/// Midpoint-rule integral of the dissipation rate with central gradients.
double dissipation_integral(const Grid& grid, const SpeciesSet& species, const SpeciesField& Y,
                            Exec exec = Exec::Parallel);

struct InvariantReport {
  long step = 0;
  double time = 0.0;
  double minY = 0.0;
  double maxY = 0.0;
  double maxSumDeviation = 0.0;
  double minTheta = 0.0;
  double maxDivV = 0.0;
  double gibbsEnergy = 0.0;
  double dissipationIntegral = 0.0;
  bool stepAccepted = true;

  static const std::vector<std::string>& field_names();
};

InvariantReport invariant_report(const Grid& grid, const FlowState& state, const SpeciesField& Y,
                                 const SpeciesSet& species, const GibbsParams& params, Exec exec = Exec::Parallel);

struct ReportTolerances {
  double positivity = 1e-10;
  double sum = 1e-8;
  double theta = 1e-10;
  double divergence = 1e-10;
};

/// True when every monitored quantity is finite and within tolerance.
bool within_tolerances(const InvariantReport& r, const ReportTolerances& tol = {});

}  // namespace rfsim
