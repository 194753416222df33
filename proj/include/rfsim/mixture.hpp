#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace rfsim {

/// Below this total the molar sum is treated as zero.
inline constexpr double kDegeneracyThreshold = 1e-12;

/// Upper bound on the species count; per-point algebra uses fixed-capacity
/// storage so the grid kernels never allocate.
inline constexpr int kMaxSpecies = 12;

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxSpecies, kMaxSpecies>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSpecies, 1>;

/// Immutable chemistry description: molar masses, binary diffusion
/// coefficients and the thermal diffusion constant. The derived mass-scaled
/// resistances d'_ij = kappa / (D_ij M_i M_j) are cached at construction.
class SpeciesSet {
 public:
  /// Throws DomainError if N > kMaxSpecies, a mass is non-positive, D is not symmetric, or an
  /// off-diagonal D_ij is non-positive. The diagonal of D is ignored.
  SpeciesSet(Eigen::VectorXd molar_masses, Eigen::MatrixXd binary_diffusion, double kappa);

  std::size_t size() const { return static_cast<std::size_t>(molar_masses_.size()); }
  const Eigen::VectorXd& molar_masses() const { return molar_masses_; }
  double molar_mass(std::size_t i) const { return molar_masses_(static_cast<Eigen::Index>(i)); }
  const Eigen::MatrixXd& binary_diffusion() const { return binary_diffusion_; }
  double kappa() const { return kappa_; }

  /// d_ij = kappa / D_ij (zero on the diagonal).
  const Eigen::MatrixXd& resistance() const { return resistance_; }
  /// d'_ij = d_ij / (M_i M_j) (zero on the diagonal).
  const Eigen::MatrixXd& scaled_resistance() const { return scaled_resistance_; }

  double mass_low() const { return mass_low_; }
  double mass_high() const { return mass_high_; }
  double mass_ratio() const { return mass_high_ / mass_low_; }
  /// min and max of d'_ij over i != j.
  double scaled_resistance_low() const { return dprime_low_; }
  double scaled_resistance_high() const { return dprime_high_; }

 private:
  Eigen::VectorXd molar_masses_;
  Eigen::MatrixXd binary_diffusion_;
  double kappa_;
  Eigen::MatrixXd resistance_;
  Eigen::MatrixXd scaled_resistance_;
  double mass_low_ = 0.0;
  double mass_high_ = 0.0;
  double dprime_low_ = 0.0;
  double dprime_high_ = 0.0;
};

/// Mass-fraction vector of one point.
using Composition = Eigen::VectorXd;

struct MoleData {
  Eigen::VectorXd X;   // mole fractions
  double molar_sum;    // Y_M = sum_j Y_j / M_j
  double mass_sum;     // X_M = sum_j M_j X_j
};

/// True when every Y_i >= -tol and |sum Y - 1| <= tol.
bool is_physical(const Composition& Y, double tol = 1e-12);

/// X_i = Y_i / (M_i Y_M). Throws DomainError on negative entries and
/// DegenerateComposition when sum Y <= kDegeneracyThreshold.
MoleData mole_fractions(const SpeciesSet& species, const Composition& Y);

/// Inverse map Y_i = M_i X_i / X_M. Always lands on the simplex.
Composition mass_from_mole(const SpeciesSet& species, const Eigen::VectorXd& X);

/// Gradient of mole fractions from gradients of mass fractions, one row per
/// species and one column per spatial direction.
Eigen::MatrixXd grad_mole_from_mass(const SpeciesSet& species, const Composition& Y,
                                    const Eigen::MatrixXd& gradY);

/// |A| = sqrt(sum of squares) over all species and directions.
double gradient_norm(const Eigen::MatrixXd& grad);

}  // namespace rfsim
