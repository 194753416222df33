#include "rfsim/diagnostics.hpp"

#include "parallel.hpp"
#include "rfsim/errors.hpp"
#include "rfsim/rd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfsim {

double gibbs_density(const SpeciesSet& species, const double* Y, const GibbsParams& params) {
  const int n = static_cast<int>(species.size());
  const auto& M = species.molar_masses();
  double z[kMaxSpecies], zu[kMaxSpecies];
  double sz = 0.0, szu = 0.0;
  for (int j = 0; j < n; ++j) {
    z[j] = (std::max(Y[j], 0.0) + params.eta) / M(j);
    zu[j] = (params.inlet(j) + params.eta) / M(j);
    sz += z[j];
    szu += zu[j];
  }
  double g = 0.0;
  for (int j = 0; j < n; ++j) g += z[j] * (std::log(z[j] / sz) - std::log(zu[j] / szu));
  return g;
}

double gibbs_energy(const Grid& grid, const SpeciesSet& species, const SpeciesField& Y, const GibbsParams& params,
                    Exec exec) {
  if (!(params.eta > 0.0)) throw DomainError("gibbs_energy: eta must be positive");
  if (params.inlet.size() != Y.Y.rows() || static_cast<std::size_t>(Y.Y.rows()) != species.size())
    throw DomainError("gibbs_energy: species count mismatch");
  Eigen::VectorXd cell(grid.cells());
  detail::for_each_2d(exec, grid.nx(), grid.nz(), [&](int i, int k) {
    const int c = grid.cell(i, k);
    cell(c) = gibbs_density(species, Y.Y.col(c).data(), params);
  });
  double total = 0.0;
  for (int c = 0; c < grid.cells(); ++c) total += cell(c);
  return total * grid.cell_area();
}

double dissipation_integral(const Grid& grid, const SpeciesSet& species, const SpeciesField& Y, Exec exec) {
  Eigen::VectorXd cell;
  dissipation_density(grid, species, apply_species_bcs(grid, Y), exec, cell);
  double total = 0.0;
  for (int c = 0; c < grid.cells(); ++c) total += cell(c);
  return total * grid.cell_area();
}

const std::vector<std::string>& InvariantReport::field_names() {
  static const std::vector<std::string> names = {"step",     "time",        "minY",        "maxY",
                                                 "maxSumDeviation", "minTheta", "maxDivV", "gibbsEnergy",
                                                 "dissipationIntegral", "stepAccepted"};
  return names;
}

InvariantReport invariant_report(const Grid& grid, const FlowState& state, const SpeciesField& Y,
                                 const SpeciesSet& species, const GibbsParams& params, Exec exec) {
  InvariantReport r;
  r.minY = Y.Y.minCoeff();
  r.maxY = Y.Y.maxCoeff();
  r.maxSumDeviation = (Y.Y.colwise().sum().array() - 1.0).abs().maxCoeff();
  r.minTheta = state.theta.size() ? state.theta.minCoeff() : 0.0;
  // min/max skip NaN
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!Y.Y.allFinite()) r.minY = r.maxY = r.maxSumDeviation = nan;
  if (!state.theta.allFinite()) r.minTheta = nan;
  r.maxDivV = max_divergence(grid, state.v, exec);
  r.gibbsEnergy = gibbs_energy(grid, species, Y, params, exec);
  r.dissipationIntegral = dissipation_integral(grid, species, Y, exec);
  r.stepAccepted = true;
  return r;
}

bool within_tolerances(const InvariantReport& r, const ReportTolerances& tol) {
  for (double v : {r.minY, r.maxY, r.maxSumDeviation, r.minTheta, r.maxDivV, r.gibbsEnergy, r.dissipationIntegral})
    if (!std::isfinite(v)) return false;
  return r.stepAccepted && r.minY >= -tol.positivity && r.maxSumDeviation <= tol.sum && r.minTheta >= -tol.theta &&
         r.maxDivV <= tol.divergence && r.dissipationIntegral >= 0.0;
}

}  // namespace rfsim
