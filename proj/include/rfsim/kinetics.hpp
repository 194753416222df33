#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rfsim {

/// Reaction rates of the form omega_i = alpha_i(theta, Y) - Y_i beta_i(theta, Y).
///
/// Implementations are evaluated only on theta >= 0 and Y in [0,1]^N; the
/// free functions below take care of clipping. A model also declares a bound
/// on alpha, beta and omega over that domain, and a Lipschitz constant in
/// (theta, Y) used for time-step control.
class RateModel {
 public:
  virtual ~RateModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t species_count() const = 0;
  virtual Eigen::VectorXd production(double theta, const Eigen::VectorXd& Y) const = 0;
  virtual Eigen::VectorXd removal(double theta, const Eigen::VectorXd& Y) const = 0;
  virtual const Eigen::VectorXd& heats() const = 0;
  virtual double rate_bound() const = 0;
  virtual double lipschitz() const = 0;
};

/// No reactions.
class InertModel final : public RateModel {
 public:
  explicit InertModel(std::size_t n) : n_(n), h_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}
  std::string name() const override { return "none"; }
  std::size_t species_count() const override { return n_; }
  Eigen::VectorXd production(double, const Eigen::VectorXd&) const override;
  Eigen::VectorXd removal(double, const Eigen::VectorXd&) const override;
  const Eigen::VectorXd& heats() const override { return h_; }
  double rate_bound() const override { return 0.0; }
  double lipschitz() const override { return 0.0; }

 private:
  std::size_t n_;
  Eigen::VectorXd h_;
};

/// Arrhenius factor A exp(-E/theta), continuously extended by 0 at theta <= 0.
double arrhenius(double prefactor, double activation, double theta);

/// Single step A -> B with rate Y_A A0 exp(-E/theta), heats (h1, 0).
class SingleStepModel final : public RateModel {
 public:
  SingleStepModel(double prefactor = 1.0, double activation = 4.0, double heat = 1.0);
  std::string name() const override { return "single_step"; }
  std::size_t species_count() const override { return 2; }
  Eigen::VectorXd production(double theta, const Eigen::VectorXd& Y) const override;
  Eigen::VectorXd removal(double theta, const Eigen::VectorXd& Y) const override;
  const Eigen::VectorXd& heats() const override { return h_; }
  double rate_bound() const override { return prefactor_; }
  double lipschitz() const override;

 private:
  double prefactor_;
  double activation_;
  Eigen::VectorXd h_;
};

/// Chain A -> B -> C, each step first order with its own Arrhenius factor.
class ChainModel final : public RateModel {
 public:
  ChainModel(double prefactor1, double activation1, double prefactor2, double activation2, Eigen::Vector3d heats);
  std::string name() const override { return "chain"; }
  std::size_t species_count() const override { return 3; }
  Eigen::VectorXd production(double theta, const Eigen::VectorXd& Y) const override;
  Eigen::VectorXd removal(double theta, const Eigen::VectorXd& Y) const override;
  const Eigen::VectorXd& heats() const override { return h_; }
  double rate_bound() const override { return prefactor1_ + prefactor2_; }
  double lipschitz() const override;

 private:
  double prefactor1_, activation1_, prefactor2_, activation2_;
  Eigen::VectorXd h_;
};

/// omega_i on the physical domain. Throws DomainError for theta < 0 or Y
/// outside [0,1]^N.
Eigen::VectorXd rates(const RateModel& model, double theta, const Eigen::VectorXd& Y);

/// omega_i(theta^+, clamp(Y, 0, 1)); defined everywhere.
Eigen::VectorXd extended_rates(const RateModel& model, double theta, const Eigen::VectorXd& Y);

/// -sum_i h_i omega_i, using the extended rates.
double heat_release(const RateModel& model, double theta, const Eigen::VectorXd& Y);

struct ValidationOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 20240611;
  double sum_tolerance = 1e-12;
};

/// Samples (theta, Y) and checks nonnegativity of alpha and beta, rate
/// balance, the declared bound (also on unclipped inputs through the
/// extension) and nonpositive heat release at theta = 0. Throws ModelRejected
/// naming the first failed check.
void validate_model(const RateModel& model, const ValidationOptions& opts = {});

/// Builds a shipped model by name ("none", "single_step", "chain") and
/// validates it. Parameters missing from `params` take their defaults.
std::shared_ptr<const RateModel> make_model(const std::string& name, std::size_t species_count,
                                            const std::vector<std::pair<std::string, double>>& params,
                                            const std::vector<double>& heats = {});

}  // namespace rfsim
