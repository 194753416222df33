#include "rfsim/mixture.hpp"

#include "rfsim/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rfsim {

SpeciesSet::SpeciesSet(Eigen::VectorXd molar_masses, Eigen::MatrixXd binary_diffusion, double kappa)
    : molar_masses_(std::move(molar_masses)),
      binary_diffusion_(std::move(binary_diffusion)),
      kappa_(kappa) {
  const Eigen::Index n = molar_masses_.size();
  if (n < 1) throw DomainError("SpeciesSet: need at least one species");
  if (n > kMaxSpecies) throw DomainError("SpeciesSet: at most " + std::to_string(kMaxSpecies) + " species supported");
  if (binary_diffusion_.rows() != n || binary_diffusion_.cols() != n)
    throw DomainError("SpeciesSet: D must be N x N");
  if (!(kappa_ > 0.0) || !std::isfinite(kappa_)) throw DomainError("SpeciesSet: kappa must be positive");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(molar_masses_(i) > 0.0) || !std::isfinite(molar_masses_(i)))
      throw DomainError("SpeciesSet: molar mass " + std::to_string(i) + " must be positive");
  }

  resistance_ = Eigen::MatrixXd::Zero(n, n);
  scaled_resistance_ = Eigen::MatrixXd::Zero(n, n);
  dprime_low_ = std::numeric_limits<double>::infinity();
  dprime_high_ = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dij = binary_diffusion_(i, j);
      if (!(dij > 0.0) || !std::isfinite(dij))
        throw DomainError("SpeciesSet: D(" + std::to_string(i) + "," + std::to_string(j) + ") must be positive");
      if (std::abs(dij - binary_diffusion_(j, i)) > 1e-14 * std::abs(dij))
        throw DomainError("SpeciesSet: D must be symmetric");
      resistance_(i, j) = kappa_ / dij;
      scaled_resistance_(i, j) = resistance_(i, j) / (molar_masses_(i) * molar_masses_(j));
      dprime_low_ = std::min(dprime_low_, scaled_resistance_(i, j));
      dprime_high_ = std::max(dprime_high_, scaled_resistance_(i, j));
    }
  }
  // A single species has no pairs; keep gamma finite and positive.
  if (n == 1) {
    dprime_low_ = 1.0;
    dprime_high_ = 1.0;
  }
  mass_low_ = molar_masses_.minCoeff();
  mass_high_ = molar_masses_.maxCoeff();
}

bool is_physical(const Composition& Y, double tol) {
  return Y.minCoeff() >= -tol && std::abs(Y.sum() - 1.0) <= tol;
}

MoleData mole_fractions(const SpeciesSet& species, const Composition& Y) {
  if (static_cast<std::size_t>(Y.size()) != species.size()) throw DomainError("mole_fractions: size mismatch");
  if (Y.minCoeff() < 0.0) throw DomainError("mole_fractions: negative mass fraction");
  if (Y.sum() <= kDegeneracyThreshold) throw DegenerateComposition("mole_fractions: all mass fractions vanish");

  const Eigen::VectorXd z = Y.cwiseQuotient(species.molar_masses());
  const double molar_sum = z.sum();
  MoleData out;
  out.X = z / molar_sum;
  out.molar_sum = molar_sum;
  out.mass_sum = species.molar_masses().dot(out.X);
  return out;
}

Composition mass_from_mole(const SpeciesSet& species, const Eigen::VectorXd& X) {
  const double mass_sum = species.molar_masses().dot(X);
  if (mass_sum <= kDegeneracyThreshold) throw DegenerateComposition("mass_from_mole: mass sum vanishes");
  return species.molar_masses().cwiseProduct(X) / mass_sum;
}

Eigen::MatrixXd grad_mole_from_mass(const SpeciesSet& species, const Composition& Y,
                                    const Eigen::MatrixXd& gradY) {
  const auto& M = species.molar_masses();
  if (gradY.rows() != Y.size()) throw DomainError("grad_mole_from_mass: gradient rows must equal N");
  if (Y.sum() <= kDegeneracyThreshold) throw DegenerateComposition("grad_mole_from_mass: all mass fractions vanish");
  const double molar_sum = Y.cwiseQuotient(M).sum();
  if (molar_sum <= kDegeneracyThreshold) throw DegenerateComposition("grad_mole_from_mass: molar sum vanishes");

  // grad Y_M = sum_l grad Y_l / M_l
  const Eigen::RowVectorXd grad_molar_sum = M.cwiseInverse().transpose() * gradY;
  Eigen::MatrixXd gradX(gradY.rows(), gradY.cols());
  for (Eigen::Index i = 0; i < gradY.rows(); ++i) {
    gradX.row(i) = gradY.row(i) / (M(i) * molar_sum) -
                   (Y(i) / (M(i) * molar_sum * molar_sum)) * grad_molar_sum;
  }
  return gradX;
}

double gradient_norm(const Eigen::MatrixXd& grad) { return grad.norm(); }

}  // namespace rfsim
