#include "rfsim/kinetics.hpp"

#include "rfsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rfsim {

Eigen::VectorXd InertModel::production(double, const Eigen::VectorXd&) const {
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
}

Eigen::VectorXd InertModel::removal(double, const Eigen::VectorXd&) const {
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
}

double arrhenius(double prefactor, double activation, double theta) {
  if (theta <= 0.0) return 0.0;
  return prefactor * std::exp(-activation / theta);
}

namespace {

// max over theta > 0 of d/dtheta [A exp(-E/theta)] = 4 A exp(-2) / E.
double arrhenius_slope_bound(double prefactor, double activation) {
  return 4.0 * prefactor * std::exp(-2.0) / activation;
}

}  // namespace

SingleStepModel::SingleStepModel(double prefactor, double activation, double heat)
    : prefactor_(prefactor), activation_(activation), h_(Eigen::Vector2d(heat, 0.0)) {
  if (!(prefactor_ >= 0.0) || !(activation_ > 0.0) || !(heat >= 0.0))
    throw ModelRejected("single_step: need A0 >= 0, E > 0, h1 >= 0");
}

Eigen::VectorXd SingleStepModel::production(double theta, const Eigen::VectorXd& Y) const {
  return Eigen::Vector2d(0.0, Y(0) * arrhenius(prefactor_, activation_, theta));
}

Eigen::VectorXd SingleStepModel::removal(double theta, const Eigen::VectorXd&) const {
  return Eigen::Vector2d(arrhenius(prefactor_, activation_, theta), 0.0);
}

double SingleStepModel::lipschitz() const {
  return prefactor_ + arrhenius_slope_bound(prefactor_, activation_);
}

ChainModel::ChainModel(double prefactor1, double activation1, double prefactor2, double activation2,
                       Eigen::Vector3d heats)
    : prefactor1_(prefactor1),
      activation1_(activation1),
      prefactor2_(prefactor2),
      activation2_(activation2),
      h_(heats) {
  if (!(prefactor1_ >= 0.0) || !(prefactor2_ >= 0.0) || !(activation1_ > 0.0) || !(activation2_ > 0.0))
    throw ModelRejected("chain: need prefactors >= 0 and activation energies > 0");
}

Eigen::VectorXd ChainModel::production(double theta, const Eigen::VectorXd& Y) const {
  const double k1 = arrhenius(prefactor1_, activation1_, theta);
  const double k2 = arrhenius(prefactor2_, activation2_, theta);
  return Eigen::Vector3d(0.0, Y(0) * k1, Y(1) * k2);
}

Eigen::VectorXd ChainModel::removal(double theta, const Eigen::VectorXd&) const {
  return Eigen::Vector3d(arrhenius(prefactor1_, activation1_, theta), arrhenius(prefactor2_, activation2_, theta), 0.0);
}

double ChainModel::lipschitz() const {
  return prefactor1_ + prefactor2_ + arrhenius_slope_bound(prefactor1_, activation1_) +
         arrhenius_slope_bound(prefactor2_, activation2_);
}

namespace {

Eigen::VectorXd evaluate(const RateModel& model, double theta, const Eigen::VectorXd& Y) {
  return model.production(theta, Y) - Y.cwiseProduct(model.removal(theta, Y));
}

}  // namespace

Eigen::VectorXd rates(const RateModel& model, double theta, const Eigen::VectorXd& Y) {
  if (static_cast<std::size_t>(Y.size()) != model.species_count()) throw DomainError("rates: size mismatch");
  if (!(theta >= 0.0)) throw DomainError("rates: theta must be nonnegative");
  if (Y.minCoeff() < 0.0 || Y.maxCoeff() > 1.0) throw DomainError("rates: mass fractions outside [0,1]");
  return evaluate(model, theta, Y);
}

Eigen::VectorXd extended_rates(const RateModel& model, double theta, const Eigen::VectorXd& Y) {
  if (static_cast<std::size_t>(Y.size()) != model.species_count()) throw DomainError("extended_rates: size mismatch");
  const Eigen::VectorXd clipped = Y.cwiseMax(0.0).cwiseMin(1.0);
  return evaluate(model, std::max(theta, 0.0), clipped);
}

double heat_release(const RateModel& model, double theta, const Eigen::VectorXd& Y) {
  return -model.heats().dot(extended_rates(model, theta, Y));
}

void validate_model(const RateModel& model, const ValidationOptions& opts) {
  const Eigen::Index n = static_cast<Eigen::Index>(model.species_count());
  if (model.heats().size() != n) throw ModelRejected(model.name() + ": heats must have one entry per species");
  if (model.heats().minCoeff() < 0.0) throw ModelRejected(model.name() + ": heats must be nonnegative");

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double bound = model.rate_bound() * (1.0 + 1e-12) + 1e-300;

  auto fail = [&](const std::string& what, double theta, const Eigen::VectorXd& Y) {
    std::ostringstream os;
    os.precision(17);
    os << model.name() << ": " << what << " at theta=" << theta << " Y=(" << Y.transpose() << ")";
    throw ModelRejected(os.str());
  };

  Eigen::VectorXd Y(n);
  for (std::size_t s = 0; s < opts.samples; ++s) {
    // theta covers [0, inf) through u / (1 - u); every 16th sample sits at 0.
    const double u = unit(rng);
    const double theta = (s % 16 == 0) ? 0.0 : 10.0 * u / (1.0 - u + 1e-12);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = unit(rng);
      Y(i) = r < 0.05 ? 0.0 : (r > 0.95 ? 1.0 : unit(rng));
    }

    const Eigen::VectorXd alpha = model.production(theta, Y);
    const Eigen::VectorXd beta = model.removal(theta, Y);
    if (alpha.minCoeff() < 0.0) fail("negative production rate", theta, Y);
    if (beta.minCoeff() < 0.0) fail("negative removal factor", theta, Y);
    const Eigen::VectorXd omega = alpha - Y.cwiseProduct(beta);
    const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
    if (std::abs(omega.sum()) > opts.sum_tolerance * scale) fail("rates do not sum to zero", theta, Y);
    if (alpha.cwiseAbs().maxCoeff() > bound || beta.cwiseAbs().maxCoeff() > bound ||
        omega.cwiseAbs().maxCoeff() > bound)
      fail("rate exceeds declared bound", theta, Y);
    const double cold = model.heats().dot(rates(model, 0.0, Y));
    if (cold > 1e-12 * std::max(1.0, model.heats().cwiseAbs().maxCoeff())) fail("heat release at theta=0 is negative", 0.0, Y);

    // Unrestricted sample through the extension.
    Eigen::VectorXd Z(n);
    for (Eigen::Index i = 0; i < n; ++i) Z(i) = 6.0 * unit(rng) - 3.0;
    const double t_any = 40.0 * unit(rng) - 20.0;
    if (extended_rates(model, t_any, Z).cwiseAbs().maxCoeff() > bound) fail("extended rate exceeds bound", t_any, Z);
  }
}

std::shared_ptr<const RateModel> make_model(const std::string& name, std::size_t species_count,
                                            const std::vector<std::pair<std::string, double>>& params,
                                            const std::vector<double>& heats) {
  auto param = [&](const std::string& key, double fallback) {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return fallback;
  };
  std::shared_ptr<const RateModel> model;
  if (name == "none") {
    model = std::make_shared<InertModel>(species_count);
  } else if (name == "single_step") {
    if (species_count != 2) throw ModelRejected("single_step model needs exactly 2 species");
    const double h1 = heats.empty() ? param("h1", 1.0) : heats.at(0);
    if (!heats.empty() && (heats.size() != 2 || heats[1] != 0.0))
      throw ModelRejected("single_step model takes heats (h1, 0)");
    model = std::make_shared<SingleStepModel>(param("A0", 1.0), param("E", 4.0), h1);
  } else if (name == "chain") {
    if (species_count != 3) throw ModelRejected("chain model needs exactly 3 species");
    Eigen::Vector3d h(3.0, 2.0, 1.0);
    if (!heats.empty()) {
      if (heats.size() != 3) throw ModelRejected("chain model takes three heats");
      h = Eigen::Vector3d(heats[0], heats[1], heats[2]);
    }
    model = std::make_shared<ChainModel>(param("A1", 1.0), param("E1", 4.0), param("A2", 0.5), param("E2", 6.0), h);
  } else {
    throw ModelRejected("unknown rate model '" + name + "'");
  }
  validate_model(*model);
  return model;
}

}  // namespace rfsim
