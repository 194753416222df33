#include "rfsim/config.hpp"

#include "rfsim/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace rfsim {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw ConfigInvalid("config: " + msg); }

const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) invalid(std::string(where) + "." + key + " is required");
  return j.at(key);
}

// Rejects keys outside `allowed` so that typos do not fall back to defaults.
void known_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) invalid("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(std::string(key) + ": " + e.what());
  }
}

Eigen::VectorXd vector_of(const json& j, const char* what) {
  if (!j.is_array()) invalid(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) invalid(std::string(what) + " must contain numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<double> std_vector_of(const json& j, const char* what) {
  const Eigen::VectorXd v = vector_of(j, what);
  return {v.data(), v.data() + v.size()};
}

void check_simplex(const Eigen::VectorXd& y, Eigen::Index n, const char* what, bool open) {
  if (y.size() != n) invalid(std::string(what) + " must have one entry per species");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(y(i)) || y(i) < 0.0 || (open && y(i) <= 0.0))
      invalid(std::string(what) + (open ? " entries must be positive" : " entries must be nonnegative"));
  }
  if (std::abs(y.sum() - 1.0) > 1e-12) invalid(std::string(what) + " must sum to 1");
}

ProfileSpec parse_profile(const json& j) {
  ProfileSpec p;
  if (j.is_null()) return p;
  known_keys(j, {"type", "shape", "background", "peak", "center", "width", "amplitude", "value"}, "initial profile");
  p.type = get_or<std::string>(j, "type", p.type);
  p.shape = get_or<std::string>(j, "shape", p.shape);
  if (j.contains("background")) p.background = std_vector_of(j.at("background"), "background");
  if (j.contains("peak")) p.peak = std_vector_of(j.at("peak"), "peak");
  if (j.contains("center")) {
    const auto c = std_vector_of(j.at("center"), "center");
    if (c.size() != 2) invalid("center must have two entries");
    p.center = {c[0], c[1]};
  }
  p.width = get_or<double>(j, "width", p.width);
  p.amplitude = get_or<double>(j, "amplitude", p.amplitude);
  p.value = get_or<double>(j, "value", p.value);
  if (p.shape != "gaussian" && p.shape != "cosine") invalid("unknown profile shape '" + p.shape + "'");
  if (!(p.width > 0.0)) invalid("profile width must be positive");
  return p;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("parse error: ") + e.what());
  }
  known_keys(root, {"name", "species", "kinetics", "grid", "physics", "numerics", "output"}, "config");

  RunConfig c;
  c.name = get_or<std::string>(root, "name", c.name);

  const json& sp = require(root, "species", "config");
  known_keys(sp, {"molar_masses", "diffusion", "kappa", "flux_model"}, "species");
  c.molar_masses = vector_of(require(sp, "molar_masses", "species"), "species.molar_masses");
  const Eigen::Index n = c.molar_masses.size();
  if (n < 1 || n > kMaxSpecies) invalid("species count must be between 1 and " + std::to_string(kMaxSpecies));
  const json& dj = require(sp, "diffusion", "species");
  if (!dj.is_array() || static_cast<Eigen::Index>(dj.size()) != n) invalid("species.diffusion must be N x N");
  c.diffusion.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd row = vector_of(dj[static_cast<std::size_t>(i)], "species.diffusion row");
    if (row.size() != n) invalid("species.diffusion must be N x N");
    c.diffusion.row(i) = row.transpose();
  }
  c.kappa = get_or<double>(sp, "kappa", c.kappa);
  const std::string fm = get_or<std::string>(sp, "flux_model", "stefan_maxwell");
  if (fm == "stefan_maxwell")
    c.flux_model = FluxModel::StefanMaxwell;
  else if (fm == "three_species_closed_form")
    c.flux_model = FluxModel::ThreeSpeciesClosedForm;
  else
    invalid("unknown flux_model '" + fm + "'");
  if (c.flux_model == FluxModel::ThreeSpeciesClosedForm && n != 3) invalid("three_species_closed_form needs N = 3");

  if (root.contains("kinetics")) {
    const json& kj = root.at("kinetics");
    known_keys(kj, {"model", "params", "heats"}, "kinetics");
    c.model = get_or<std::string>(kj, "model", c.model);
    if (kj.contains("params")) {
      if (!kj.at("params").is_object()) invalid("kinetics.params must be an object");
      for (const auto& [key, val] : kj.at("params").items()) {
        if (!val.is_number()) invalid("kinetics.params." + key + " must be a number");
        c.model_params.emplace_back(key, val.get<double>());
      }
    }
    if (kj.contains("heats")) c.heats = std_vector_of(kj.at("heats"), "kinetics.heats");
  }

  const json& gj = require(root, "grid", "config");
  known_keys(gj, {"nx", "nz", "lx", "lz"}, "grid");
  c.nx = get_or<int>(gj, "nx", c.nx);
  c.nz = get_or<int>(gj, "nz", c.nz);
  c.lx = get_or<double>(gj, "lx", c.lx);
  c.lz = get_or<double>(gj, "lz", c.lz);
  if (c.nx < 2 || c.nz < 2) invalid("grid.nx and grid.nz must be at least 2");
  if (!(c.lx > 0.0) || !(c.lz > 0.0)) invalid("grid lengths must be positive");

  const json& pj = require(root, "physics", "config");
  known_keys(pj, {"Pr", "sigma", "inlet", "boundary", "solve_flow", "velocity", "initial"}, "physics");
  c.Pr = get_or<double>(pj, "Pr", c.Pr);
  c.sigma = get_or<double>(pj, "sigma", c.sigma);
  if (!(c.Pr > 0.0)) invalid("physics.Pr must be positive");
  if (!std::isfinite(c.sigma)) invalid("physics.sigma must be finite");
  c.inlet = vector_of(require(pj, "inlet", "physics"), "physics.inlet");
  check_simplex(c.inlet, n, "physics.inlet", true);
  const std::string bc = get_or<std::string>(pj, "boundary", "channel");
  if (bc == "channel")
    c.boundary = SpeciesBoundary::Channel;
  else if (bc == "closed")
    c.boundary = SpeciesBoundary::Closed;
  else
    invalid("physics.boundary must be 'channel' or 'closed'");
  c.solve_flow = get_or<bool>(pj, "solve_flow", c.solve_flow);
  c.velocity = get_or<std::string>(pj, "velocity", c.velocity);
  if (c.velocity != "lifting" && c.velocity != "zero") invalid("physics.velocity must be 'lifting' or 'zero'");
  if (c.boundary == SpeciesBoundary::Closed && c.velocity != "zero")
    invalid("a closed box needs physics.velocity = 'zero'");
  if (c.boundary == SpeciesBoundary::Closed && c.solve_flow) invalid("a closed box needs physics.solve_flow = false");
  if (c.solve_flow && c.velocity != "lifting") invalid("the flow solver starts from physics.velocity = 'lifting'");
  if (pj.contains("initial")) {
    const json& ij = pj.at("initial");
    known_keys(ij, {"species", "theta"}, "physics.initial");
    if (ij.contains("species")) c.initial_species = parse_profile(ij.at("species"));
    if (ij.contains("theta")) c.initial_theta = parse_profile(ij.at("theta"));
  }
  {
    const ProfileSpec& s = c.initial_species;
    if (s.type != "uniform" && s.type != "blend") invalid("initial species type must be 'uniform' or 'blend'");
    if (!s.background.empty()) check_simplex(Eigen::Map<const Eigen::VectorXd>(s.background.data(), static_cast<Eigen::Index>(s.background.size())), n, "initial species background", false);
    if (s.type == "blend") {
      if (s.peak.empty()) invalid("blend profile needs a peak composition");
      check_simplex(Eigen::Map<const Eigen::VectorXd>(s.peak.data(), static_cast<Eigen::Index>(s.peak.size())), n, "initial species peak", false);
      if (!(s.amplitude >= 0.0 && s.amplitude <= 1.0)) invalid("blend amplitude must lie in [0,1]");
    }
    const ProfileSpec& t = c.initial_theta;
    if (t.type != "uniform" && t.type != "gaussian") invalid("initial theta type must be 'uniform' or 'gaussian'");
    if (t.value < 0.0 || t.amplitude < 0.0) invalid("initial theta must be nonnegative");
  }

  const json& nj = require(root, "numerics", "config");
  known_keys(nj, {"dt", "t_end", "max_steps", "epsilon", "q", "tol_pos", "tol_sum", "eta", "max_halvings",
                  "solver_tolerance"},
             "numerics");
  c.dt = get_or<double>(nj, "dt", c.dt);
  c.t_end = get_or<double>(nj, "t_end", c.t_end);
  c.max_steps = get_or<long>(nj, "max_steps", c.max_steps);
  c.reg.epsilon = get_or<double>(nj, "epsilon", c.reg.epsilon);
  c.reg.q = get_or<double>(nj, "q", c.reg.q);
  c.tol_pos = get_or<double>(nj, "tol_pos", c.tol_pos);
  c.tol_sum = get_or<double>(nj, "tol_sum", c.tol_sum);
  c.eta = get_or<double>(nj, "eta", c.eta);
  c.max_halvings = get_or<int>(nj, "max_halvings", c.max_halvings);
  c.solver_tolerance = get_or<double>(nj, "solver_tolerance", c.solver_tolerance);
  if (!(c.dt > 0.0)) invalid("numerics.dt must be positive");
  if (!(c.t_end > 0.0)) invalid("numerics.t_end must be positive");
  if (!(c.reg.epsilon >= 0.0)) invalid("numerics.epsilon must be nonnegative");
  if (!(c.reg.q > 2.0)) invalid("numerics.q must exceed 2");
  if (!(c.eta > 0.0 && c.eta < 1.0)) invalid("numerics.eta must lie in (0,1)");
  if (!(c.tol_pos > 0.0) || !(c.tol_sum > 0.0)) invalid("tolerances must be positive");
  if (c.max_halvings < 0) invalid("numerics.max_halvings must be nonnegative");
  if (!(c.solver_tolerance > 0.0 && c.solver_tolerance < 1e-6)) invalid("numerics.solver_tolerance must lie in (0, 1e-6)");

  if (root.contains("output")) {
    const json& oj = root.at("output");
    known_keys(oj, {"directory", "snapshot_interval"}, "output");
    c.output_dir = get_or<std::string>(oj, "directory", c.output_dir);
    c.snapshot_interval = get_or<int>(oj, "snapshot_interval", c.snapshot_interval);
    if (c.snapshot_interval < 0) invalid("output.snapshot_interval must be nonnegative");
  }

  // Chemistry checks reuse the library constructors.
  try {
    (void)make_species(c);
  } catch (const DomainError& e) {
    invalid(e.what());
  }
  (void)make_rate_model(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

SpeciesSet make_species(const RunConfig& config) {
  return SpeciesSet(config.molar_masses, config.diffusion, config.kappa);
}

std::shared_ptr<const RateModel> make_rate_model(const RunConfig& config) {
  return make_model(config.model, static_cast<std::size_t>(config.molar_masses.size()), config.model_params,
                    config.heats);
}

Grid make_grid(const RunConfig& config) { return Grid(config.nx, config.nz, config.lx, config.lz); }

namespace {

double shape_value(const ProfileSpec& p, const RunConfig& c, double x, double z) {
  if (p.shape == "cosine")
    return 0.5 * (1.0 + std::cos(M_PI * x / c.lx) * std::cos(M_PI * z / c.lz));
  const double dx = x - p.center[0], dz = z - p.center[1];
  return std::exp(-(dx * dx + dz * dz) / (2.0 * p.width * p.width));
}

}  // namespace

SpeciesField initial_species(const RunConfig& config, const Grid& grid) {
  const ProfileSpec& p = config.initial_species;
  const Eigen::Index n = config.inlet.size();
  const Eigen::VectorXd background =
      p.background.empty() ? config.inlet : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(p.background.data(), n));
  SpeciesField f;
  f.inlet = config.inlet;
  f.boundary = config.boundary;
  f.Y.resize(n, grid.cells());
  for (int k = 0; k < grid.nz(); ++k)
    for (int i = 0; i < grid.nx(); ++i) {
      const int c = grid.cell(i, k);
      if (p.type == "blend") {
        const Eigen::Map<const Eigen::VectorXd> peak(p.peak.data(), n);
        const double b = p.amplitude * shape_value(p, config, grid.xc(i), grid.zc(k));
        f.Y.col(c) = (1.0 - b) * background + b * peak;
      } else {
        f.Y.col(c) = background;
      }
    }
  return f;
}

Eigen::VectorXd initial_theta(const RunConfig& config, const Grid& grid) {
  const ProfileSpec& p = config.initial_theta;
  Eigen::VectorXd t = Eigen::VectorXd::Constant(grid.cells(), p.value);
  if (p.type == "gaussian") {
    for (int k = 0; k < grid.nz(); ++k)
      for (int i = 0; i < grid.nx(); ++i)
        t(grid.cell(i, k)) += p.amplitude * shape_value(p, config, grid.xc(i), grid.zc(k));
  }
  return t;
}

}  // namespace rfsim
