#include "doctest.h"

#include "rfsim/config.hpp"
#include "rfsim/errors.hpp"
#include "rfsim/io.hpp"
#include "rfsim/simulation.hpp"

#include <omp.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace rfsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rfsim_test_simulation" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig preset(const std::string& name) { return load_config(std::string(RFSIM_PRESET_DIR) + "/" + name + ".json"); }

bool same(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && std::equal(a.data(), a.data() + a.size(), b.data());
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(RFSIM_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("repeated runs write identical files") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  RunOverrides ov;
  ov.max_steps = 15;
  ov.output_dir = a.string();
  run_simulation(preset("binary_fick"), ov);
  ov.output_dir = b.string();
  run_simulation(preset("binary_fick"), ov);
  CHECK(lines(a / "timeseries.csv").size() == 17);
  CHECK(slurp(a / "timeseries.csv") == slurp(b / "timeseries.csv"));
  CHECK(slurp(a / "final.vtk") == slurp(b / "final.vtk"));
}

TEST_CASE("serial and parallel runs agree bitwise") {
  omp_set_num_threads(4);
  for (const char* name : {"diffusion_box", "flame_channel"}) {
    CAPTURE(name);
    RunOverrides ov;
    ov.max_steps = 4;
    ov.write_files = false;
    ov.exec = Exec::Serial;
    const RunResult s = run_simulation(preset(name), ov);
    ov.exec = Exec::Parallel;
    const RunResult p = run_simulation(preset(name), ov);
    CHECK(same(s.species.Y, p.species.Y));
    CHECK(same(s.flow.theta, p.flow.theta));
    CHECK(same(s.flow.v.w, p.flow.v.w));
    REQUIRE(s.reports.size() == p.reports.size());
    for (std::size_t i = 0; i < s.reports.size(); ++i) CHECK(csv_row(s.reports[i]) == csv_row(p.reports[i]));
  }
}

TEST_CASE("output layout") {
  RunConfig c = preset("binary_fick");
  c.snapshot_interval = 5;
  RunOverrides ov;
  ov.max_steps = 10;
  ov.output_dir = scratch("layout").string();
  const RunResult r = run_simulation(c, ov);
  CHECK(r.steps == 10);
  CHECK(r.reports.size() == 11);
  const fs::path dir(*ov.output_dir);
  const auto rows = lines(dir / "timeseries.csv");
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == csv_header());
  CHECK(rows[1].rfind("0,0,", 0) == 0);
  for (const char* f : {"snapshot_000000.vtk", "snapshot_000005.vtk", "snapshot_000010.vtk", "final.vtk"})
    CHECK(fs::exists(dir / f));
  CHECK_FALSE(fs::exists(dir / "snapshot_000001.vtk"));
  const Snapshot snap = read_snapshot((dir / "final.vtk").string());
  CHECK(snap.nx == c.nx);
  CHECK(snap.scalar("Y_2").size() == static_cast<std::size_t>(c.nx * c.nz));
}

TEST_CASE("the last step lands on t_end") {
  RunConfig c = preset("binary_fick");
  c.dt = 3e-3;
  c.t_end = 1e-2;
  RunOverrides ov;
  ov.write_files = false;
  const RunResult r = run_simulation(c, ov);
  CHECK(r.steps == 4);
  CHECK(r.time == doctest::Approx(1e-2).epsilon(1e-14));
  CHECK(r.reports.back().time == r.time);
}

TEST_CASE("closed box run conserves species and stays admissible") {
  RunConfig c = preset("diffusion_box");
  RunOverrides ov;
  ov.max_steps = 20;
  ov.write_files = false;
  const Simulation fresh(c);
  const Eigen::VectorXd before = fresh.species().Y.rowwise().sum();
  const RunResult r = run_simulation(c, ov);
  CHECK((r.species.Y.rowwise().sum() - before).cwiseAbs().maxCoeff() * fresh.grid().cell_area() <= 1e-10);
  for (const auto& rep : r.reports) CHECK(within_tolerances(rep));
  // mixing never raises the free energy
  for (std::size_t i = 1; i < r.reports.size(); ++i)
    CHECK(r.reports[i].gibbsEnergy <= r.reports[i - 1].gibbsEnergy + 1e-12);
}

TEST_CASE("rejected steps are halved and retried from the saved state") {
  RunConfig c = preset("binary_fick");
  c.tol_sum = 1e-300;  // no step can pass
  c.max_halvings = 3;
  Simulation sim(c);
  const Eigen::MatrixXd Y0 = sim.species().Y;
  CHECK_THROWS_AS(sim.advance(c.dt), StepRejected);
  CHECK(sim.halvings() == 3);
  CHECK(sim.steps() == 0);
  CHECK(sim.time() == 0.0);
  CHECK(same(sim.species().Y, Y0));

  RunOverrides ov;
  ov.output_dir = scratch("rejected").string();
  CHECK_THROWS_AS(run_simulation(c, ov), StepRejected);
  const auto rows = lines(fs::path(*ov.output_dir) / "timeseries.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].back() == '1');
  CHECK(rows[2].back() == '0');
}

TEST_CASE("invalid overrides") {
  RunOverrides ov;
  ov.write_files = false;
  ov.dt = -1.0;
  CHECK_THROWS_AS(run_simulation(preset("binary_fick"), ov), ConfigInvalid);
}

TEST_CASE("command line") {
  const fs::path cfg = scratch("cli") / "broken.json";
  const fs::path out = scratch("cli_out");
  fs::create_directories(cfg.parent_path());
  std::ofstream(cfg) << R"({"species":{"molar_masses":[1,1],"diffusion":[[0,1],[1,0]]},"grid":{},)"
                        R"("physics":{"inlet":[0.6,0.6]},"numerics":{}})";
  CHECK(run_cli("run " + cfg.string() + " --output-dir " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));

  CHECK(run_cli("run " + std::string(RFSIM_PRESET_DIR) + "/binary_fick.json --t-end 2e-3 --output-dir " +
                out.string()) == 0);
  CHECK(lines(out / "timeseries.csv").size() == 10);
  CHECK(run_cli("--exec serial verify oracle") == 0);
  CHECK(run_cli("verify no_such_suite") != 0);
}
