#include "rfsim/simulation.hpp"

#include "rfsim/errors.hpp"
#include "rfsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

namespace rfsim {

Simulation::Simulation(RunConfig config, Exec exec)
    : config_(std::move(config)),
      exec_(exec),
      grid_(make_grid(config_)),
      species_(make_species(config_)),
      model_(make_rate_model(config_)),
      flow_stepper_(grid_, exec),
      species_stepper_(grid_, static_cast<int>(config_.molar_masses.size())) {
  gibbs_.eta = config_.eta;
  gibbs_.inlet = config_.inlet;
  species_opts_.reg = config_.reg;
  species_opts_.flux_model = config_.flux_model;
  species_opts_.tol_pos = config_.tol_pos;
  species_opts_.tol_sum = config_.tol_sum;
  species_opts_.solver_tolerance = config_.solver_tolerance;
  species_opts_.exec = exec;

  Y_ = initial_species(config_, grid_);
  flow_ = FlowState::at_rest(grid_, initial_theta(config_, grid_), config_.Pr, config_.sigma);
  if (config_.velocity == "zero") flow_.v = VelocityField::zero(grid_);
}

double Simulation::next_dt() const {
  const StepBounds b = species_dt_bounds(grid_, *model_, Y_, flow_.v, config_.reg, exec_);
  return std::min(config_.dt, b.min());
}

void Simulation::try_step(double dt) {
  const bool channel = config_.boundary == SpeciesBoundary::Channel;
  FlowState flow = flow_;
  if (config_.solve_flow) flow_stepper_.step_flow(flow, dt);
  const Eigen::VectorXd theta_old = flow.theta;
  flow_stepper_.step_temperature(flow, *model_, Y_.Y, dt, channel);
  SpeciesField Y = species_stepper_.step(species_, *model_, Y_, flow.v, theta_old, dt, species_opts_);
  flow_ = std::move(flow);
  Y_ = std::move(Y);
}

InvariantReport Simulation::advance(double dt_max) {
  double dt = std::min(dt_max, next_dt());
  for (int attempt = 0;; ++attempt) {
    try {
      try_step(dt);
      break;
    } catch (const StepRejected&) {
      if (attempt >= config_.max_halvings) throw;
      dt *= 0.5;
      ++halvings_;
    }
  }
  time_ += dt;
  ++steps_;
  return report();
}

InvariantReport Simulation::report() const {
  InvariantReport r = invariant_report(grid_, flow_, Y_, species_, gibbs_, exec_);
  r.step = steps_;
  r.time = time_;
  return r;
}

namespace {

std::string snapshot_name(long step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.vtk", step);
  return buf;
}

}  // namespace

RunResult run_simulation(const RunConfig& base, const RunOverrides& overrides) {
  RunConfig config = base;
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (overrides.t_end) config.t_end = *overrides.t_end;
  if (overrides.dt) config.dt = *overrides.dt;
  if (overrides.max_steps) config.max_steps = *overrides.max_steps;
  if (!(config.dt > 0.0) || !(config.t_end > 0.0)) throw ConfigInvalid("dt and t_end overrides must be positive");

  Simulation sim(config, overrides.exec);
  std::filesystem::path dir(config.output_dir);
  std::unique_ptr<TimeSeriesWriter> series;
  if (overrides.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    series = std::make_unique<TimeSeriesWriter>((dir / "timeseries.csv").string());
  }

  RunResult result;
  auto record = [&](const InvariantReport& r) {
    result.reports.push_back(r);
    if (series) series->append(r);
  };
  record(sim.report());
  if (overrides.write_files && config.snapshot_interval > 0)
    write_snapshot((dir / snapshot_name(0)).string(), sim.grid(), sim.flow(), sim.species());

  const double eps_t = 1e-12 * config.t_end;
  while (sim.time() < config.t_end - eps_t && (config.max_steps < 0 || sim.steps() < config.max_steps)) {
    try {
      record(sim.advance(config.t_end - sim.time()));
    } catch (const StepRejected&) {
      InvariantReport r = sim.report();
      r.stepAccepted = false;
      record(r);
      throw;
    }
    if (overrides.write_files && config.snapshot_interval > 0 && sim.steps() % config.snapshot_interval == 0)
      write_snapshot((dir / snapshot_name(sim.steps())).string(), sim.grid(), sim.flow(), sim.species());
  }
  if (overrides.write_files) write_snapshot((dir / "final.vtk").string(), sim.grid(), sim.flow(), sim.species());

  result.steps = sim.steps();
  result.time = sim.time();
  result.halvings = sim.halvings();
  result.species = sim.species();
  result.flow = sim.flow();
  return result;
}

}  // namespace rfsim
