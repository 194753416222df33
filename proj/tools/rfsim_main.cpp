#include "rfsim/config.hpp"
#include "rfsim/errors.hpp"
#include "rfsim/simulation.hpp"
#include "rfsim/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#ifndef RFSIM_PRESET_DIR
#define RFSIM_PRESET_DIR "presets"
#endif

namespace {

rfsim::Exec parse_exec(const std::string& s) { return s == "serial" ? rfsim::Exec::Serial : rfsim::Exec::Parallel; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reacting multicomponent flow simulator"};
  app.require_subcommand(1);
  std::string exec = "parallel";
  app.add_option("--exec", exec, "Kernel execution mode")->check(CLI::IsMember({"serial", "parallel"}));

  auto* run = app.add_subcommand("run", "Run a simulation from a JSON config");
  std::string config_path;
  std::string output_dir;
  double t_end = 0.0, dt = 0.0;
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--output-dir", output_dir, "Output directory");
  run->add_option("--t-end", t_end, "Final time")->check(CLI::PositiveNumber);
  run->add_option("--dt", dt, "Time step cap")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run acceptance suites");
  std::string suite = "all";
  std::string presets = RFSIM_PRESET_DIR;
  verify->add_option("suite", suite, "Suite name or 'all'");
  verify->add_option("--presets", presets, "Preset directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const rfsim::RunConfig config = rfsim::load_config(config_path);
      rfsim::RunOverrides ov;
      if (!output_dir.empty()) ov.output_dir = output_dir;
      if (run->count("--t-end")) ov.t_end = t_end;
      if (run->count("--dt")) ov.dt = dt;
      ov.exec = parse_exec(exec);
      const rfsim::RunResult res = rfsim::run_simulation(config, ov);
      std::printf("%s: %ld steps, t = %.6g, %d halvings\n", config.name.c_str(), res.steps, res.time, res.halvings);
      return 0;
    }
    rfsim::VerifyOptions opts{presets, parse_exec(exec)};
    std::vector<rfsim::SuiteResult> results;
    if (suite == "all")
      results = rfsim::run_all(opts);
    else
      results.push_back(rfsim::run_suite(suite, opts));
    bool ok = true;
    for (const auto& r : results) {
      std::printf("[%s] %2d %-18s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.criterion, r.name.c_str(), r.seconds,
                  r.detail.c_str());
      ok = ok && r.passed;
    }
    return ok ? 0 : 1;
  } catch (const rfsim::Error& e) {
    std::cerr << "rfsim: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rfsim: unexpected error: " << e.what() << "\n";
    return 3;
  }
}
