#include "rfsim/stefan_maxwell.hpp"

#include "rfsim/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace rfsim {

namespace {

constexpr double kResidualTolerance = 1e-10;

using SmallLU = Eigen::PartialPivLU<SmallMatrix>;

void check_nonnegative(const double* Y, Eigen::Index n, const char* where) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (Y[i] < 0.0) throw DomainError(std::string(where) + ": negative mass fraction");
    total += Y[i];
  }
  if (total <= kDegeneracyThreshold) throw DegenerateComposition(std::string(where) + ": all mass fractions vanish");
}

void check_size(const SpeciesSet& species, const Composition& Y, const char* where) {
  if (static_cast<std::size_t>(Y.size()) != species.size()) throw DomainError(std::string(where) + ": size mismatch");
}

// F = f P for the regularized system, with absent species split off.
void response_general(const SpeciesSet& species, const double* Y, SmallMatrix& f) {
  const Eigen::Index n = static_cast<Eigen::Index>(species.size());
  const auto& dp = species.scaled_resistance();
  const double gamma = species.scaled_resistance_low();

  std::array<Eigen::Index, kMaxSpecies> act{};
  std::array<Eigen::Index, kMaxSpecies> inact{};
  Eigen::Index na = 0;
  Eigen::Index ni = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (Y[i] > kDegeneracyThreshold)
      act[static_cast<std::size_t>(na++)] = i;
    else
      inact[static_cast<std::size_t>(ni++)] = i;
  }
  if (na == 0) throw DegenerateComposition("flux_response: no active species");

  f.setZero(n, n);
  for (Eigen::Index b = 0; b < ni; ++b) {
    const Eigen::Index i = inact[static_cast<std::size_t>(b)];
    double s = 0.0;
    for (Eigen::Index a = 0; a < na; ++a) {
      const Eigen::Index j = act[static_cast<std::size_t>(a)];
      s += dp(i, j) * Y[j];
    }
    f(i, i) = 1.0 / s;
  }

  // Active block: rows of C(Y) diag(1/Y) restricted to the active species.
  SmallMatrix A = SmallMatrix::Zero(na, na);
  for (Eigen::Index a = 0; a < na; ++a) {
    const Eigen::Index i = act[static_cast<std::size_t>(a)];
    double diag = gamma * Y[i];
    for (Eigen::Index b = 0; b < na; ++b) {
      const Eigen::Index j = act[static_cast<std::size_t>(b)];
      if (j == i) continue;
      diag += dp(i, j) * Y[j];
      A(a, b) = -Y[i] * (dp(i, j) - gamma);
    }
    A(a, a) = diag;
  }
  // Absent fluxes enter the active rows as Y_i (d'_ij - gamma) F_j.
  SmallMatrix rhs = SmallMatrix::Zero(na, n);
  for (Eigen::Index a = 0; a < na; ++a) {
    const Eigen::Index i = act[static_cast<std::size_t>(a)];
    rhs(a, i) = 1.0;
    for (Eigen::Index b = 0; b < ni; ++b) {
      const Eigen::Index j = inact[static_cast<std::size_t>(b)];
      rhs(a, j) += Y[i] * (dp(i, j) - gamma) * f(j, j);
    }
  }
  const SmallLU lu(A);
  const SmallMatrix sol = lu.solve(rhs);
  const double res = (A * sol - rhs).norm();
  if (!std::isfinite(res) || res > kResidualTolerance * (rhs.norm() + A.norm() * sol.norm()))
    throw DegenerateComposition("flux_response: active block solve rejected (residual too large)");
  for (Eigen::Index a = 0; a < na; ++a) f.row(act[static_cast<std::size_t>(a)]) = sol.row(a);
}

struct ClosedForm {
  Eigen::Vector3d w;  // (d'_23, d'_13, d'_12)
  double rho_tilde;
  double total;
};

ClosedForm closed_form_setup(const SpeciesSet& species, const double* Y) {
  if (species.size() != 3) throw DomainError("three_species_fluxes: requires N = 3");
  check_nonnegative(Y, 3, "three_species_fluxes");
  const auto& dp = species.scaled_resistance();
  ClosedForm c;
  c.w = Eigen::Vector3d(dp(1, 2), dp(0, 2), dp(0, 1));
  c.rho_tilde = dp(0, 2) * dp(1, 2) * Y[2] + dp(0, 1) * dp(0, 2) * Y[0] + dp(0, 1) * dp(1, 2) * Y[1];
  c.total = Y[0] + Y[1] + Y[2];
  const double low = species.scaled_resistance_low();
  if (c.rho_tilde <= kDegeneracyThreshold * low * low) throw DegenerateComposition("three_species_fluxes: rho~ vanishes");
  return c;
}

void response_closed_form(const SpeciesSet& species, const double* Y, SmallMatrix& f) {
  const ClosedForm c = closed_form_setup(species, Y);
  f.resize(3, 3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) f(i, j) = -(Y[i] / c.total) * c.w(j);
    f(i, i) += c.w(i);
  }
  f /= c.rho_tilde;
}

// a = f G with G_lj = (delta_lj Y_M - Y_l / M_l) / M_j.
void apply_gradient_map(const SpeciesSet& species, const double* Y, const SmallMatrix& f, SmallMatrix& a) {
  const Eigen::Index n = f.rows();
  const auto& M = species.molar_masses();
  SmallVector y_over_m(n);
  for (Eigen::Index l = 0; l < n; ++l) y_over_m(l) = Y[l] / M(l);
  const double molar_sum = y_over_m.sum();
  if (molar_sum <= kDegeneracyThreshold) throw DegenerateComposition("flux_coefficients: molar sum vanishes");
  // f y_over_m is shared by every column.
  const SmallVector fy = f * y_over_m;
  a.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) a.col(j) = (molar_sum * f.col(j) - fy) / M(j);
}

}  // namespace

SMMatrix assemble(const SpeciesSet& species, const Composition& Y) {
  check_size(species, Y, "assemble");
  const Eigen::Index n = Y.size();
  const auto& dp = species.scaled_resistance();
  SMMatrix m;
  m.gamma = species.scaled_resistance_low();
  m.B = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = dp(std::min(i, j), std::max(i, j)) * (Y(i) * Y(j));  // bitwise symmetric
      m.B(i, j) = -v;
      diag += v;
    }
    m.B(i, i) = diag;
  }
  m.C = m.B + m.gamma * Y * Y.transpose();
  return m;
}

Eigen::MatrixXd solve_velocities(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& P) {
  check_size(species, Y, "solve_velocities");
  if (P.rows() != Y.size()) throw DomainError("solve_velocities: P must have N rows");
  if (Y.minCoeff() <= kDegeneracyThreshold)
    throw NotStrictlyPositive("solve_velocities: every mass fraction must exceed the degeneracy threshold");
  const SMMatrix m = assemble(species, Y);
  Eigen::LLT<Eigen::MatrixXd> llt(m.C);
  if (llt.info() != Eigen::Success) throw NotStrictlyPositive("solve_velocities: C(Y) not positive definite");
  return llt.solve(P);
}

Eigen::MatrixXd flux_response(const SpeciesSet& species, const Composition& Y) {
  check_size(species, Y, "flux_response");
  check_nonnegative(Y.data(), Y.size(), "flux_response");
  SmallMatrix f;
  response_general(species, Y.data(), f);
  return f;
}

FluxSolve solve_fluxes(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& P) {
  if (P.rows() != Y.size()) throw DomainError("solve_fluxes: P must have N rows");
  const Eigen::MatrixXd f = flux_response(species, Y);
  FluxSolve out;
  out.F = f * P;
  out.active.resize(static_cast<std::size_t>(Y.size()));
  bool all = true;
  for (Eigen::Index i = 0; i < Y.size(); ++i) {
    out.active[static_cast<std::size_t>(i)] = Y(i) > kDegeneracyThreshold;
    all = all && out.active[static_cast<std::size_t>(i)];
  }
  if (all) out.V = Y.cwiseInverse().asDiagonal() * out.F;
  return out;
}

Eigen::MatrixXd three_species_fluxes(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& P) {
  check_size(species, Y, "three_species_fluxes");
  const ClosedForm c = closed_form_setup(species, Y.data());
  if (P.rows() != 3) throw DomainError("three_species_fluxes: P must have 3 rows");
  if (P.colwise().sum().norm() > 1e-10 * (P.norm() + 1e-300))
    throw DomainError("three_species_fluxes: requires sum_i P_i = 0");

  const Eigen::RowVectorXd weighted = c.w.transpose() * P;
  Eigen::MatrixXd F(3, P.cols());
  for (Eigen::Index i = 0; i < 3; ++i) F.row(i) = (c.w(i) * P.row(i) - (Y(i) / c.total) * weighted) / c.rho_tilde;
  return F;
}

Eigen::MatrixXd coefficients_from_response(const SpeciesSet& species, const Composition& Y,
                                           const Eigen::MatrixXd& response) {
  check_size(species, Y, "coefficients_from_response");
  SmallMatrix a;
  apply_gradient_map(species, Y.data(), response, a);
  return a;
}

void flux_coefficients_into(const SpeciesSet& species, const double* Y, FluxModel model, SmallMatrix& out) {
  check_nonnegative(Y, static_cast<Eigen::Index>(species.size()), "flux_coefficients");
  SmallMatrix f;
  if (model == FluxModel::ThreeSpeciesClosedForm)
    response_closed_form(species, Y, f);
  else
    response_general(species, Y, f);
  apply_gradient_map(species, Y, f, out);
}

Eigen::MatrixXd flux_coefficients(const SpeciesSet& species, const Composition& Y) {
  check_size(species, Y, "flux_coefficients");
  SmallMatrix a;
  flux_coefficients_into(species, Y.data(), FluxModel::StefanMaxwell, a);
  return a;
}

Eigen::MatrixXd three_species_flux_coefficients(const SpeciesSet& species, const Composition& Y) {
  check_size(species, Y, "three_species_flux_coefficients");
  SmallMatrix a;
  flux_coefficients_into(species, Y.data(), FluxModel::ThreeSpeciesClosedForm, a);
  return a;
}

FluxSolve generalized_fluxes(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& gradY) {
  if (gradY.rows() != Y.size()) throw DomainError("generalized_fluxes: gradient must have N rows");
  const Eigen::MatrixXd a = flux_coefficients(species, Y);
  FluxSolve out;
  out.F = -a * gradY;
  out.active.resize(static_cast<std::size_t>(Y.size()));
  bool all = true;
  for (Eigen::Index i = 0; i < Y.size(); ++i) {
    out.active[static_cast<std::size_t>(i)] = Y(i) > kDegeneracyThreshold;
    all = all && out.active[static_cast<std::size_t>(i)];
  }
  if (all) out.V = Y.cwiseInverse().asDiagonal() * out.F;
  return out;
}

double dissipation_rate(const SpeciesSet& species, const Composition& Y, const Eigen::MatrixXd& gradY) {
  check_size(species, Y, "dissipation_rate");
  if (gradY.rows() != Y.size()) throw DomainError("dissipation_rate: gradient must have N rows");
  if (Y.minCoeff() < 0.0 || Y.maxCoeff() > 1.0) throw DomainError("dissipation_rate: mass fractions outside [0,1]");
  if (std::abs(Y.sum() - 1.0) > 1e-8) throw DomainError("dissipation_rate: mass fractions must sum to one");

  const Eigen::Index n = Y.size();
  const auto& M = species.molar_masses();
  SmallMatrix a;
  flux_coefficients_into(species, Y.data(), FluxModel::StefanMaxwell, a);

  double molar_sum = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) molar_sum += Y(l) / M(l);

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double X = Y(i) / (M(i) * molar_sum);
    if (X <= kDegeneracyThreshold) continue;
    for (Eigen::Index d = 0; d < gradY.cols(); ++d) {
      double grad_molar_sum = 0.0;
      for (Eigen::Index l = 0; l < n; ++l) grad_molar_sum += gradY(l, d) / M(l);
      const double gradX = gradY(i, d) / (M(i) * molar_sum) - Y(i) / (M(i) * molar_sum * molar_sum) * grad_molar_sum;
      double F = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) F -= a(i, j) * gradY(j, d);
      total -= F * gradX / (M(i) * X);
    }
  }
  return total;
}

}  // namespace rfsim
