#include "rfsim/hydro.hpp"

#include "parallel.hpp"
#include "rfsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace rfsim {

using detail::for_each_2d;
using Trip = Eigen::Triplet<double>;

FlowState FlowState::at_rest(const Grid& grid, Eigen::VectorXd theta, double Pr, double sigma) {
  FlowState s;
  s.v = VelocityField::lifting(grid);
  s.p = Eigen::VectorXd::Zero(grid.cells());
  s.theta = std::move(theta);
  s.Pr = Pr;
  s.sigma = sigma;
  return s;
}

FlowStepper::FlowStepper(const Grid& grid, Exec exec) : grid_(grid), exec_(exec) {}

namespace {

// Interior u unknowns: i = 1..nx-1. Interior w unknowns: k = 1..nz-1.
int u_index(const Grid& g, int i, int k) { return (i - 1) + (g.nx() - 1) * k; }
int w_index(const Grid& g, int i, int k) { return i + g.nx() * (k - 1); }

template <class Solver>
void factorize(Solver& solver, const Eigen::SparseMatrix<double>& m, const char* what) {
  solver.compute(m);
  if (solver.info() != Eigen::Success) throw DomainError(std::string(what) + ": factorization failed");
}

}  // namespace

void FlowStepper::prepare_momentum(double dt, double Pr) {
  if (dt == momentum_dt_ && Pr == momentum_pr_) return;
  const Grid& g = grid_;
  const int nx = g.nx(), nz = g.nz();
  const double cx = dt * Pr / (g.dx() * g.dx());
  const double cz = dt * Pr / (g.dz() * g.dz());

  std::vector<Trip> t;
  const int nu = (nx - 1) * nz;
  for (int k = 0; k < nz; ++k)
    for (int i = 1; i < nx; ++i) {
      const int r = u_index(g, i, k);
      double diag = 1.0 + 2.0 * cx;  // u = 0 on i = 0 and i = nx
      if (i > 1) t.emplace_back(r, u_index(g, i - 1, k), -cx);
      if (i < nx - 1) t.emplace_back(r, u_index(g, i + 1, k), -cx);
      for (int kk : {k - 1, k + 1}) {
        if (kk < 0 || kk >= nz) {
          diag += 2.0 * cz;  // ghost -u puts u = 0 on the face
        } else {
          diag += cz;
          t.emplace_back(r, u_index(g, i, kk), -cz);
        }
      }
      t.emplace_back(r, r, diag);
    }
  SpMat mu(nu, nu);
  mu.setFromTriplets(t.begin(), t.end());
  if (nu > 0) factorize(u_solver_, mu, "momentum (u)");

  t.clear();
  const int nw = nx * (nz - 1);
  w_boundary_rhs_ = Eigen::VectorXd::Zero(nw);
  for (int k = 1; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      const int r = w_index(g, i, k);
      double diag = 1.0;
      for (int ii : {i - 1, i + 1}) {
        if (ii < 0 || ii >= nx) continue;  // ghost equals the cell: no flux
        diag += cx;
        t.emplace_back(r, w_index(g, ii, k), -cx);
      }
      for (int kk : {k - 1, k + 1}) {
        diag += cz;
        if (kk == 0 || kk == nz)
          w_boundary_rhs_(r) += cz;  // w = 1 on inlet and outlet
        else
          t.emplace_back(r, w_index(g, i, kk), -cz);
      }
      t.emplace_back(r, r, diag);
    }
  SpMat mw(nw, nw);
  mw.setFromTriplets(t.begin(), t.end());
  if (nw > 0) factorize(w_solver_, mw, "momentum (w)");
  momentum_dt_ = dt;
  momentum_pr_ = Pr;
}

void FlowStepper::prepare_poisson() {
  if (poisson_ready_) return;
  const Grid& g = grid_;
  const double ax = 1.0 / (g.dx() * g.dx()), az = 1.0 / (g.dz() * g.dz());
  std::vector<Trip> t;
  for (int k = 0; k < g.nz(); ++k)
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.cell(i, k);
      double diag = 0.0;
      if (i > 0) { diag += ax; t.emplace_back(c, g.cell(i - 1, k), -ax); }
      if (i < g.nx() - 1) { diag += ax; t.emplace_back(c, g.cell(i + 1, k), -ax); }
      if (k > 0) { diag += az; t.emplace_back(c, g.cell(i, k - 1), -az); }
      if (k < g.nz() - 1) { diag += az; t.emplace_back(c, g.cell(i, k + 1), -az); }
      // Pinning cell 0 leaves compatible right-hand sides unchanged: the
      // rows of the Neumann operator sum to zero, forcing phi_0 = 0.
      if (c == 0) diag += ax;
      t.emplace_back(c, c, diag);
    }
  poisson_.resize(g.cells(), g.cells());
  poisson_.setFromTriplets(t.begin(), t.end());
  factorize(p_solver_, poisson_, "pressure Poisson");
  poisson_ready_ = true;
}

void FlowStepper::step_flow(FlowState& s, double dt) {
  if (!(dt > 0.0)) throw DomainError("step_flow: dt must be positive");
  const Grid& g = grid_;
  const int nx = g.nx(), nz = g.nz();
  if (s.v.u.size() != g.xfaces() || s.v.w.size() != g.zfaces() || s.p.size() != g.cells() ||
      s.theta.size() != g.cells())
    throw DomainError("step_flow: state does not match grid");
  prepare_momentum(dt, s.Pr);
  prepare_poisson();

  const double idx = 1.0 / g.dx(), idz = 1.0 / g.dz();
  const Eigen::VectorXd& u = s.v.u;
  const Eigen::VectorXd& w = s.v.w;

  // Provisional velocity.
  Eigen::VectorXd ru((nx - 1) * nz), rw(nx * (nz - 1));
  for_each_2d(exec_, nx - 1, nz, [&](int im, int k) {
    const int i = im + 1;
    const double uc = u(g.xface(i, k));
    const double wbar = 0.25 * (w(g.zface(i - 1, k)) + w(g.zface(i, k)) + w(g.zface(i - 1, k + 1)) + w(g.zface(i, k + 1)));
    const double dudx = uc > 0.0 ? (uc - u(g.xface(i - 1, k))) * idx : (u(g.xface(i + 1, k)) - uc) * idx;
    const double below = k > 0 ? u(g.xface(i, k - 1)) : -uc;
    const double above = k < nz - 1 ? u(g.xface(i, k + 1)) : -uc;
    const double dudz = wbar > 0.0 ? (uc - below) * idz : (above - uc) * idz;
    const double gradp = (s.p(g.cell(i, k)) - s.p(g.cell(i - 1, k))) * idx;
    ru(u_index(g, i, k)) = uc - dt * (uc * dudx + wbar * dudz) - dt * gradp;
  });
  for_each_2d(exec_, nx, nz - 1, [&](int i, int km) {
    const int k = km + 1;
    const double wc = w(g.zface(i, k));
    const double ubar = 0.25 * (u(g.xface(i, k - 1)) + u(g.xface(i + 1, k - 1)) + u(g.xface(i, k)) + u(g.xface(i + 1, k)));
    const double left = i > 0 ? w(g.zface(i - 1, k)) : wc;
    const double right = i < nx - 1 ? w(g.zface(i + 1, k)) : wc;
    const double dwdx = ubar > 0.0 ? (wc - left) * idx : (right - wc) * idx;
    const double dwdz = wc > 0.0 ? (wc - w(g.zface(i, k - 1))) * idz : (w(g.zface(i, k + 1)) - wc) * idz;
    const double gradp = (s.p(g.cell(i, k)) - s.p(g.cell(i, k - 1))) * idz;
    const double buoy = s.sigma * 0.5 * (s.theta(g.cell(i, k - 1)) + s.theta(g.cell(i, k)));
    rw(w_index(g, i, k)) = wc - dt * (ubar * dwdx + wc * dwdz) - dt * gradp + dt * buoy;
  });
  rw += w_boundary_rhs_;

  VelocityField star = s.v;
  if (ru.size() > 0) {
    const Eigen::VectorXd us = u_solver_.solve(ru);
    for (int k = 0; k < nz; ++k)
      for (int i = 1; i < nx; ++i) star.u(g.xface(i, k)) = us(u_index(g, i, k));
  }
  if (rw.size() > 0) {
    const Eigen::VectorXd ws = w_solver_.solve(rw);
    for (int k = 1; k < nz; ++k)
      for (int i = 0; i < nx; ++i) star.w(g.zface(i, k)) = ws(w_index(g, i, k));
  }

  // Projection: -L phi = -(div v* / dt) with the mean removed.
  Eigen::VectorXd div;
  velocity_divergence(g, star, exec_, div);
  Eigen::VectorXd b = -div / dt;
  b.array() -= b.mean();
  const Eigen::VectorXd phi = p_solver_.solve(b);
  const double bnorm = b.norm();
  const double res = (poisson_ * phi - b).norm();
  if (!std::isfinite(res) || (bnorm > 0.0 && res > 1e-10 * bnorm)) {
    std::ostringstream os;
    os << "pressure Poisson residual " << res << " exceeds tolerance (rhs norm " << bnorm << ")";
    throw PoissonSolveFailed(os.str());
  }

  for (int k = 0; k < nz; ++k)
    for (int i = 1; i < nx; ++i)
      star.u(g.xface(i, k)) -= dt * (phi(g.cell(i, k)) - phi(g.cell(i - 1, k))) * idx;
  for (int k = 1; k < nz; ++k)
    for (int i = 0; i < nx; ++i)
      star.w(g.zface(i, k)) -= dt * (phi(g.cell(i, k)) - phi(g.cell(i, k - 1))) * idz;

  s.v = std::move(star);
  s.p += phi;
  s.p.array() -= s.p.mean();
}

void FlowStepper::prepare_temperature(double dt, bool inlet_dirichlet) {
  if (dt == temperature_dt_ && inlet_dirichlet == temperature_inlet_) return;
  const Grid& g = grid_;
  const double cx = dt / (g.dx() * g.dx()), cz = dt / (g.dz() * g.dz());
  std::vector<Trip> t;
  for (int k = 0; k < g.nz(); ++k)
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.cell(i, k);
      double diag = 1.0;
      if (i > 0) { diag += cx; t.emplace_back(c, g.cell(i - 1, k), -cx); }
      if (i < g.nx() - 1) { diag += cx; t.emplace_back(c, g.cell(i + 1, k), -cx); }
      if (k > 0) { diag += cz; t.emplace_back(c, g.cell(i, k - 1), -cz); }
      else if (inlet_dirichlet) diag += 2.0 * cz;  // ghost -theta
      if (k < g.nz() - 1) { diag += cz; t.emplace_back(c, g.cell(i, k + 1), -cz); }
      t.emplace_back(c, c, diag);
    }
  SpMat m(g.cells(), g.cells());
  m.setFromTriplets(t.begin(), t.end());
  factorize(t_solver_, m, "temperature");
  temperature_dt_ = dt;
  temperature_inlet_ = inlet_dirichlet;
}

void FlowStepper::step_temperature(FlowState& s, const RateModel& model, const Eigen::MatrixXd& Y, double dt,
                                   bool inlet_dirichlet) {
  if (!(dt > 0.0)) throw DomainError("step_temperature: dt must be positive");
  const Grid& g = grid_;
  if (s.theta.size() != g.cells() || Y.cols() != g.cells())
    throw DomainError("step_temperature: state does not match grid");
  if (static_cast<std::size_t>(Y.rows()) != model.species_count())
    throw DomainError("step_temperature: rate model species count mismatch");
  prepare_temperature(dt, inlet_dirichlet);

  const PaddedField padded = pad_scalar(g, s.theta, inlet_dirichlet, 0.0);
  Eigen::MatrixXd adv;
  upwind_advection(g, s.v, padded, exec_, adv);
  Eigen::VectorXd rhs = s.theta - dt * adv.row(0).transpose();
  if (model.rate_bound() > 0.0) {
    for_each_2d(exec_, g.nx(), g.nz(), [&](int i, int k) {
      const int c = g.cell(i, k);
      rhs(c) += dt * heat_release(model, s.theta(c), Y.col(c));
    });
  }
  Eigen::VectorXd next = t_solver_.solve(rhs);
  const double lowest = next.minCoeff();
  if (!next.allFinite() || lowest < -1e-10) {
    std::ostringstream os;
    os << "temperature state rejected: min theta = " << lowest;
    throw StepRejected(os.str());
  }
  s.theta = std::move(next);
}

FlowState step_flow(const Grid& grid, const FlowState& state, double dt) {
  FlowStepper stepper(grid);
  FlowState out = state;
  stepper.step_flow(out, dt);
  return out;
}

FlowState step_temperature(const Grid& grid, const RateModel& model, const FlowState& state, const Eigen::MatrixXd& Y,
                           double dt, bool inlet_dirichlet) {
  FlowStepper stepper(grid);
  FlowState out = state;
  stepper.step_temperature(out, model, Y, dt, inlet_dirichlet);
  return out;
}

double max_divergence(const Grid& grid, const VelocityField& v, Exec exec) {
  Eigen::VectorXd div;
  velocity_divergence(grid, v, exec, div);
  return div.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd cell_velocity(const Grid& grid, const VelocityField& v) {
  Eigen::MatrixXd out(2, grid.cells());
  for (int k = 0; k < grid.nz(); ++k)
    for (int i = 0; i < grid.nx(); ++i) {
      const int c = grid.cell(i, k);
      out(0, c) = 0.5 * (v.u(grid.xface(i, k)) + v.u(grid.xface(i + 1, k)));
      out(1, c) = 0.5 * (v.w(grid.zface(i, k)) + v.w(grid.zface(i, k + 1)));
    }
  return out;
}

}  // namespace rfsim
