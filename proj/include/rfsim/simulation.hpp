#pragma once

#include "rfsim/config.hpp"
#include "rfsim/diagnostics.hpp"
#include "rfsim/hydro.hpp"
#include "rfsim/rd_solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rfsim {

struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<long> max_steps;
  bool write_files = true;
  Exec exec = Exec::Parallel;
};

struct RunResult {
  long steps = 0;
  double time = 0.0;
  int halvings = 0;  // total dt halvings over the run
  std::vector<InvariantReport> reports;  // initial state first
  SpeciesField species;
  FlowState flow;
};

/// Operator-split integrator: flow, temperature, species, report. A
/// rejected step is retried from the saved state with half the time step.
class Simulation {
 public:
  explicit Simulation(RunConfig config, Exec exec = Exec::Parallel);

  const RunConfig& config() const { return config_; }
  const Grid& grid() const { return grid_; }
  const SpeciesSet& species_set() const { return species_; }
  const SpeciesField& species() const { return Y_; }
  const FlowState& flow() const { return flow_; }
  double time() const { return time_; }
  long steps() const { return steps_; }
  int halvings() const { return halvings_; }

  /// Time step the next call to advance() starts from.
  double next_dt() const;

  /// Takes one accepted step of at most `dt_max`. Throws StepRejected once
  /// max_halvings retries are exhausted.
  InvariantReport advance(double dt_max);

  InvariantReport report() const;

 private:
  void try_step(double dt);

  RunConfig config_;
  Exec exec_;
  Grid grid_;
  SpeciesSet species_;
  std::shared_ptr<const RateModel> model_;
  GibbsParams gibbs_;
  SpeciesStepOptions species_opts_;
  SpeciesField Y_;
  FlowState flow_;
  FlowStepper flow_stepper_;
  SpeciesStepper species_stepper_;
  double time_ = 0.0;
  long steps_ = 0;
  int halvings_ = 0;
};

/// Runs a config to t_end (or max_steps), writing timeseries.csv and VTK
/// snapshots into the output directory. Throws on unrecoverable failure
/// after recording a final row with stepAccepted = 0.
RunResult run_simulation(const RunConfig& config, const RunOverrides& overrides = {});

}  // namespace rfsim
