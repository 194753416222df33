#include "rfsim/verify.hpp"

#include "rfsim/config.hpp"
#include "rfsim/diagnostics.hpp"
#include "rfsim/errors.hpp"
#include "rfsim/hydro.hpp"
#include "rfsim/kinetics.hpp"
#include "rfsim/rd_solver.hpp"
#include "rfsim/simulation.hpp"
#include "rfsim/stefan_maxwell.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace rfsim {

namespace {

using Clock = std::chrono::steady_clock;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

  Eigen::VectorXd simplex(Eigen::Index n) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = -std::log(uniform(1e-300, 1.0));
    return y / y.sum();
  }

  // With probability face_prob some coordinates are zeroed exactly.
  Eigen::VectorXd closed_simplex(Eigen::Index n, double face_prob = 0.3) {
    Eigen::VectorXd y = simplex(n);
    if (n > 1 && uniform() < face_prob) {
      const Eigen::Index zeros = 1 + static_cast<Eigen::Index>(uniform() * static_cast<double>(n - 1));
      for (Eigen::Index z = 0; z < zeros; ++z) y(static_cast<Eigen::Index>(uniform() * static_cast<double>(n)) % n) = 0.0;
      if (y.sum() == 0.0) y(0) = 1.0;
      y /= y.sum();
    }
    return y;
  }

  Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = uniform(-1.0, 1.0);
    return m;
  }

  Eigen::MatrixXd balanced(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m = matrix(r, c);
    const Eigen::RowVectorXd mean = m.colwise().mean();
    m.rowwise() -= mean;
    return m;
  }

  SpeciesSet species(Eigen::Index n) {
    Eigen::VectorXd M(n);
    for (Eigen::Index i = 0; i < n; ++i) M(i) = uniform(1.0, 4.0);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) D(i, j) = D(j, i) = uniform(0.2, 2.0);
    return SpeciesSet(M, D, uniform(0.5, 2.0));
  }

 private:
  std::mt19937_64 gen_;
};

std::string preset_path(const VerifyOptions& opts, const std::string& name) {
  return opts.preset_dir + "/" + name + ".json";
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// 1. closed form vs general solve on random closed-simplex compositions
SuiteResult oracle(const VerifyOptions& opts) {
  SuiteResult r;
  const SpeciesSet species = make_species(load_config(preset_path(opts, "three_species_oracle")));
  Rng rng(101);
  double worst = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const Eigen::VectorXd Y = rng.closed_simplex(3);
    const Eigen::MatrixXd P = rng.balanced(3, 2);
    const Eigen::MatrixXd general = solve_fluxes(species, Y, P).F;
    const Eigen::MatrixXd closed = three_species_fluxes(species, Y, P);
    const double scale = std::max(general.cwiseAbs().maxCoeff(), 1e-300);
    worst = std::max(worst, (general - closed).cwiseAbs().maxCoeff() / scale);
  }
  r.passed = worst <= 1e-10;
  r.detail = "max relative difference " + sci(worst) + " over 1e4 samples";
  return r;
}

// 2. sum_i F~_i = 0 for arbitrary gradients
SuiteResult flux_conservation(const VerifyOptions&) {
  SuiteResult r;
  Rng rng(202);
  double worst = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const Eigen::Index n = 2 + s % 6;
    const SpeciesSet species = rng.species(n);
    const Eigen::VectorXd Y = rng.closed_simplex(n);
    const Eigen::MatrixXd grad = rng.matrix(n, 2);  // column sums nonzero in general
    const Eigen::MatrixXd F = generalized_fluxes(species, Y, grad).F;
    worst = std::max(worst, F.colwise().sum().cwiseAbs().maxCoeff());
  }
  r.passed = worst <= 1e-12;
  r.detail = "max |sum_i F_i| " + sci(worst) + " over 1e4 samples";
  return r;
}

// 3. B symmetry and zero sums, quadratic form, coercivity of C
SuiteResult matrix_structure(const VerifyOptions&) {
  SuiteResult r;
  Rng rng(303);
  double asym = 0.0, sums = 0.0, quad = 0.0, coerc = 1e300;
  for (int s = 0; s < 10000; ++s) {
    const Eigen::Index n = 2 + s % 6;
    const SpeciesSet species = rng.species(n);
    Eigen::VectorXd Y = rng.simplex(n) * rng.uniform(0.5, 1.5);
    const SMMatrix m = assemble(species, Y);
    asym = std::max(asym, (m.B - m.B.transpose()).cwiseAbs().maxCoeff());
    sums = std::max(sums, std::max(m.B.rowwise().sum().cwiseAbs().maxCoeff(), m.B.colwise().sum().cwiseAbs().maxCoeff()));
    const Eigen::MatrixXd V = rng.matrix(n, 2);
    const auto& dp = species.scaled_resistance();
    double lhs = 0.0, rhs = 0.0, weighted = 0.0, cform = 0.0;
    for (Eigen::Index d = 0; d < 2; ++d) {
      lhs += V.col(d).dot(m.B * V.col(d));
      cform += V.col(d).dot(m.C * V.col(d));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      weighted += Y(i) * V.row(i).squaredNorm();
      for (Eigen::Index j = i + 1; j < n; ++j) rhs += dp(i, j) * Y(i) * Y(j) * (V.row(i) - V.row(j)).squaredNorm();
    }
    quad = std::max(quad, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    const double bound = m.gamma * Y.sum() * weighted;
    coerc = std::min(coerc, cform - bound * (1.0 - 1e-12));
  }
  r.passed = asym == 0.0 && sums <= 1e-14 && quad <= 1e-12 && coerc >= 0.0;
  r.detail = "asymmetry " + sci(asym) + ", max row/col sum " + sci(sums) + ", quadratic-form error " + sci(quad) +
             ", min (CV,V) - bound " + sci(coerc);
  return r;
}

// 4. dissipation sign and empirical coercivity constant
SuiteResult dissipation(const VerifyOptions& opts) {
  SuiteResult r;
  const SpeciesSet species = make_species(load_config(preset_path(opts, "three_species_oracle")));
  auto estimate = [&](std::uint64_t seed, double& lowest_rate, double& lowest_ratio) {
    Rng rng(seed);
    lowest_rate = 1e300;
    lowest_ratio = 1e300;
    for (int s = 0; s < 100000; ++s) {
      // Sign on the closed simplex, ratio on strictly positive compositions.
      // A nonnegative field has zero gradient where it vanishes.
      const Eigen::VectorXd Yc = rng.closed_simplex(3);
      Eigen::MatrixXd gc = rng.balanced(3, 2);
      const double present = static_cast<double>((Yc.array() > 0.0).count());
      for (Eigen::Index i = 0; i < 3; ++i)
        if (Yc(i) == 0.0) gc.row(i).setZero();
      const Eigen::RowVectorXd mean = gc.colwise().sum() / present;
      for (Eigen::Index i = 0; i < 3; ++i)
        if (Yc(i) > 0.0) gc.row(i) -= mean;
      lowest_rate = std::min(lowest_rate, dissipation_rate(species, Yc, gc));
      const Eigen::VectorXd Y = rng.simplex(3);
      const Eigen::MatrixXd g = rng.balanced(3, 2);
      lowest_ratio = std::min(lowest_ratio, dissipation_rate(species, Y, g) / g.squaredNorm());
    }
  };
  double rate1, ratio1, rate2, ratio2;
  estimate(404, rate1, ratio1);
  estimate(405, rate2, ratio2);
  const double lowest_rate = std::min(rate1, rate2);
  r.passed = lowest_rate >= 0.0 && ratio1 > 0.0 && ratio2 > 0.0;
  r.detail = "min rate " + sci(lowest_rate) + ", empirical c1 " + sci(ratio1) + " (resample " + sci(ratio2) +
             ") over 1e5 samples";
  return r;
}

// 5. closed box, no flow, no reactions
SuiteResult closed_box(const VerifyOptions& opts) {
  SuiteResult r;
  RunConfig cfg = load_config(preset_path(opts, "diffusion_box"));
  RunOverrides ov;
  ov.write_files = false;
  ov.max_steps = 2000;
  ov.exec = opts.exec;
  const Grid grid = make_grid(cfg);
  const SpeciesField Y0 = initial_species(cfg, grid);
  const RunResult res = run_simulation(cfg, ov);

  double min_y = 1e300, sum_dev = 0.0, gibbs_rise = -1e300;
  for (std::size_t k = 0; k < res.reports.size(); ++k) {
    min_y = std::min(min_y, res.reports[k].minY);
    sum_dev = std::max(sum_dev, res.reports[k].maxSumDeviation);
    if (k > 0) gibbs_rise = std::max(gibbs_rise, res.reports[k].gibbsEnergy - res.reports[k - 1].gibbsEnergy);
  }
  const Eigen::VectorXd m0 = Y0.Y.rowwise().sum();
  const Eigen::VectorXd m1 = res.species.Y.rowwise().sum();
  const double drift = ((m1 - m0).array() / m0.array()).abs().maxCoeff();
  r.passed = res.steps == 2000 && min_y >= -1e-10 && sum_dev <= 1e-8 && drift <= 1e-8 && gibbs_rise <= 1e-8;
  r.detail = std::to_string(res.steps) + " steps on " + std::to_string(cfg.nx) + "x" + std::to_string(cfg.nz) +
             ": min Y " + sci(min_y) + ", max |sum Y - 1| " + sci(sum_dev) + ", mass drift " + sci(drift) +
             ", max Gibbs increase " + sci(gibbs_rise) + " (energy " + sci(res.reports.front().gibbsEnergy) + " -> " +
             sci(res.reports.back().gibbsEnergy) + ")";
  return r;
}

// 6. coupled flame channel
SuiteResult flame_channel(const VerifyOptions& opts) {
  SuiteResult r;
  RunConfig cfg = load_config(preset_path(opts, "flame_channel"));
  RunOverrides ov;
  ov.write_files = false;
  ov.max_steps = 1000;
  ov.exec = opts.exec;
  const RunResult res = run_simulation(cfg, ov);
  bool ok = res.steps == 1000;
  double min_y = 1e300, sum_dev = 0.0, min_theta = 1e300, div = 0.0, max_theta = -1e300;
  for (const auto& rep : res.reports) {
    ok = ok && within_tolerances(rep);
    min_y = std::min(min_y, rep.minY);
    sum_dev = std::max(sum_dev, rep.maxSumDeviation);
    min_theta = std::min(min_theta, rep.minTheta);
    div = std::max(div, rep.maxDivV);
  }
  max_theta = res.flow.theta.maxCoeff();
  r.passed = ok;
  r.detail = std::to_string(res.steps) + " steps to t=" + sci(res.time) + " (" + std::to_string(res.halvings) +
             " halvings): min Y " + sci(min_y) + ", max |sum Y - 1| " + sci(sum_dev) + ", min theta " +
             sci(min_theta) + ", max theta " + sci(max_theta) + ", max |div v| " + sci(div);
  return r;
}

// 7. binary Fick reduction: operator identity and manufactured convergence
SuiteResult binary_fick(const VerifyOptions& opts) {
  SuiteResult r;
  const double dprime = 2.0;
  Eigen::MatrixXd D(2, 2);
  D << 0.0, 1.0 / dprime, 1.0 / dprime, 0.0;
  const SpeciesSet species(Eigen::Vector2d(1.0, 1.0), D, 1.0);

  // Operator identity against a hand-built Neumann Laplacian.
  double op_err = 0.0;
  {
    const Grid g(64, 64, 1.0, 1.0);
    Rng rng(707);
    SpeciesField Y;
    Y.boundary = SpeciesBoundary::Closed;
    Y.inlet = Eigen::Vector2d(0.5, 0.5);
    Y.Y.resize(2, g.cells());
    for (int trial = 0; trial < 2; ++trial) {
      for (int k = 0; k < g.nz(); ++k)
        for (int i = 0; i < g.nx(); ++i) {
          const double y1 = trial == 0 ? 0.5 + 0.3 * std::cos(M_PI * g.xc(i)) * std::cos(2 * M_PI * g.zc(k))
                                       : rng.uniform(0.1, 0.9);
          Y.Y(0, g.cell(i, k)) = y1;
          Y.Y(1, g.cell(i, k)) = 1.0 - y1;
        }
      const Eigen::MatrixXd div = flux_divergence(g, species, Y, FluxModel::StefanMaxwell, opts.exec);
      double worst = 0.0, scale = 0.0;
      for (int k = 0; k < g.nz(); ++k)
        for (int i = 0; i < g.nx(); ++i) {
          const int c = g.cell(i, k);
          double lap = 0.0;
          if (i > 0) lap += (Y.Y(0, g.cell(i - 1, k)) - Y.Y(0, c)) / (g.dx() * g.dx());
          if (i < g.nx() - 1) lap += (Y.Y(0, g.cell(i + 1, k)) - Y.Y(0, c)) / (g.dx() * g.dx());
          if (k > 0) lap += (Y.Y(0, g.cell(i, k - 1)) - Y.Y(0, c)) / (g.dz() * g.dz());
          if (k < g.nz() - 1) lap += (Y.Y(0, g.cell(i, k + 1)) - Y.Y(0, c)) / (g.dz() * g.dz());
          const double ref = -lap / dprime;
          worst = std::max(worst, std::abs(div(0, c) - ref));
          scale = std::max(scale, std::abs(ref));
        }
      op_err = std::max(op_err, worst / scale);
    }
  }

  // Decaying cosine mode in the closed unit box, dt proportional to h^2.
  auto run = [&](int n) {
    const Grid g(n, n, 1.0, 1.0);
    const double T = 0.05;
    const double h = g.dx();
    const long steps = static_cast<long>(std::ceil(T / (0.25 * h * h)));
    const double dt = T / static_cast<double>(steps);
    auto exact = [&](double x, double z, double t) {
      return 0.5 + 0.25 * std::cos(M_PI * x) * std::cos(M_PI * z) * std::exp(-2.0 * M_PI * M_PI * t / dprime);
    };
    SpeciesField Y;
    Y.boundary = SpeciesBoundary::Closed;
    Y.inlet = Eigen::Vector2d(0.5, 0.5);
    Y.Y.resize(2, g.cells());
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        Y.Y(0, g.cell(i, k)) = exact(g.xc(i), g.zc(k), 0.0);
        Y.Y(1, g.cell(i, k)) = 1.0 - Y.Y(0, g.cell(i, k));
      }
    const InertModel inert(2);
    const VelocityField v = VelocityField::zero(g);
    SpeciesStepper stepper(g, 2);
    SpeciesStepOptions so;
    so.exec = opts.exec;
    for (long s = 0; s < steps; ++s) Y = stepper.step(species, inert, Y, v, Eigen::VectorXd(), dt, so);
    double err = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        const double e = Y.Y(0, g.cell(i, k)) - exact(g.xc(i), g.zc(k), T);
        err += e * e * g.cell_area();
      }
    return std::sqrt(err);
  };
  const double e32 = run(32), e64 = run(64);
  const double order = std::log2(e32 / e64);
  r.passed = op_err <= 1e-12 && order >= 1.8;
  r.detail = "operator relative error " + sci(op_err) + ", L2 errors " + sci(e32) + " (32^2) " + sci(e64) +
             " (64^2), observed order " + std::to_string(order);
  return r;
}

// 8. q-Laplacian regularization: differences shrink with eps
SuiteResult epsilon_study(const VerifyOptions& opts) {
  SuiteResult r;
  const RunConfig base = load_config(preset_path(opts, "epsilon_study"));
  RunOverrides ov;
  ov.write_files = false;
  ov.exec = opts.exec;
  auto final_state = [&](double eps, long& steps) {
    RunConfig c = base;
    c.reg.epsilon = eps;
    const RunResult res = run_simulation(c, ov);
    steps = res.steps;
    return res.species.Y;
  };
  const Grid g = make_grid(base);
  long ref_steps = 0;
  const Eigen::MatrixXd ref = final_state(0.0, ref_steps);
  std::vector<double> diffs;
  bool same_steps = true;
  std::ostringstream os;
  os << "q=" << base.reg.q << ", " << ref_steps << " steps; L2 differences:";
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    long steps = 0;
    const Eigen::MatrixXd y = final_state(eps, steps);
    same_steps = same_steps && steps == ref_steps;
    diffs.push_back(std::sqrt((y - ref).squaredNorm() * g.cell_area()));
    os << " eps=" << sci(eps) << ": " << sci(diffs.back());
  }
  r.passed = same_steps && diffs[0] > diffs[1] && diffs[1] > diffs[2] && diffs[2] > 0.0;
  if (!same_steps) os << " (time step changed between runs)";
  r.detail = os.str();
  return r;
}

// Production term of species 2 is negative: violates the sign assumption.
class NegativeProductionModel final : public RateModel {
 public:
  NegativeProductionModel() : h_(Eigen::Vector2d(1.0, 0.0)) {}
  std::string name() const override { return "negative_production"; }
  std::size_t species_count() const override { return 2; }
  Eigen::VectorXd production(double, const Eigen::VectorXd& Y) const override { return Eigen::Vector2d(-0.1 * Y(1), 0.0); }
  Eigen::VectorXd removal(double, const Eigen::VectorXd&) const override { return Eigen::Vector2d(0.0, 0.0); }
  const Eigen::VectorXd& heats() const override { return h_; }
  double rate_bound() const override { return 1.0; }
  double lipschitz() const override { return 1.0; }

 private:
  Eigen::VectorXd h_;
};

// 9. rate-model admissibility gate
SuiteResult kinetics_gate(const VerifyOptions&) {
  SuiteResult r;
  std::ostringstream os;
  bool ok = true;
  ValidationOptions vo;
  vo.samples = 100000;
  const std::vector<std::shared_ptr<const RateModel>> shipped = {
      std::make_shared<InertModel>(3), std::make_shared<SingleStepModel>(),
      std::make_shared<ChainModel>(1.0, 4.0, 0.5, 6.0, Eigen::Vector3d(3.0, 2.0, 1.0))};
  for (const auto& m : shipped) {
    try {
      validate_model(*m, vo);
      os << m->name() << " accepted; ";
    } catch (const ModelRejected& e) {
      ok = false;
      os << m->name() << " REJECTED (" << e.what() << "); ";
    }
  }
  bool broken_rejected = false;
  try {
    validate_model(NegativeProductionModel(), vo);
  } catch (const ModelRejected&) {
    broken_rejected = true;
  }
  os << "negative-production model " << (broken_rejected ? "rejected" : "ACCEPTED");
  // Same gate at config load: a negative prefactor gives negative production.
  bool config_rejected = false;
  try {
    const std::string text =
        R"({"species":{"molar_masses":[1,1],"diffusion":[[0,1],[1,0]]},"kinetics":{"model":"single_step","params":{"A0":-1}},)"
        R"("grid":{"nx":4,"nz":4},"physics":{"inlet":[0.5,0.5]},"numerics":{"dt":0.1,"t_end":1}})";
    (void)parse_config(text);
  } catch (const ModelRejected&) {
    config_rejected = true;
  }
  os << ", negative prefactor in config " << (config_rejected ? "rejected at load" : "ACCEPTED");
  r.passed = ok && broken_rejected && config_rejected;
  r.detail = os.str();
  return r;
}

// 10. v = e_n is a fixed point of the flow step when theta = 0
SuiteResult hydro_fixed_point(const VerifyOptions& opts) {
  SuiteResult r;
  const Grid g(64, 64, 1.0, 1.0);
  FlowState s = FlowState::at_rest(g, Eigen::VectorXd::Zero(g.cells()));
  FlowStepper stepper(g, opts.exec);
  const double dt = 0.5 * std::min(g.dx(), g.dz());
  double dev = 0.0, prange = 0.0, div = 0.0;
  for (int step = 0; step < 100; ++step) {
    stepper.step_flow(s, dt);
    dev = std::max({dev, s.v.u.cwiseAbs().maxCoeff(), (s.v.w.array() - 1.0).abs().maxCoeff()});
    prange = std::max(prange, s.p.maxCoeff() - s.p.minCoeff());
    div = std::max(div, max_divergence(g, s.v, opts.exec));
  }
  r.passed = dev <= 1e-12 && prange <= 1e-12 && div <= 1e-10;
  r.detail = "100 steps on 64x64: max |v - e_n| " + sci(dev) + ", pressure range " + sci(prange) + ", max |div v| " +
             sci(div);
  return r;
}

struct Entry {
  const char* name;
  std::function<SuiteResult(const VerifyOptions&)> run;
  double time_limit;  // seconds, 0 = none
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {"oracle", oracle, 5.0},
      {"flux_conservation", flux_conservation, 0.0},
      {"matrix_structure", matrix_structure, 0.0},
      {"dissipation", dissipation, 0.0},
      {"closed_box", closed_box, 60.0},
      {"flame_channel", flame_channel, 120.0},
      {"binary_fick", binary_fick, 0.0},
      {"epsilon_study", epsilon_study, 0.0},
      {"kinetics_gate", kinetics_gate, 0.0},
      {"hydro_fixed_point", hydro_fixed_point, 0.0},
  };
  return e;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& e : entries()) n.emplace_back(e.name);
    return n;
  }();
  return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& opts) {
  const auto& all = entries();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (name != all[i].name) continue;
    const auto start = Clock::now();
    SuiteResult r;
    try {
      r = all[i].run(opts);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.criterion = static_cast<int>(i) + 1;
    r.name = all[i].name;
    if (all[i].time_limit > 0.0 && r.seconds > all[i].time_limit) {
      r.passed = false;
      r.detail += "; exceeded time limit of " + std::to_string(static_cast<int>(all[i].time_limit)) + " s";
    }
    return r;
  }
  throw DomainError("unknown verification suite '" + name + "'");
}

std::vector<SuiteResult> run_all(const VerifyOptions& opts) {
  std::vector<SuiteResult> out;
  for (const auto& name : suite_names()) out.push_back(run_suite(name, opts));
  return out;
}

}  // namespace rfsim
