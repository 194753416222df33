#include "rfsim/kernels.hpp"

#include "parallel.hpp"
#include "rfsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rfsim {

using detail::for_each_2d;

namespace {

void face_block(const SpeciesSet& species, FluxModel model, int n, const double* a, const double* b, double* dst) {
  double mean[kMaxSpecies] = {};
  for (int s = 0; s < n; ++s) mean[s] = std::max(0.0, 0.5 * (a[s] + b[s]));
  SmallMatrix m;
  flux_coefficients_into(species, mean, model, m);
  std::copy(m.data(), m.data() + n * n, dst);
}

// F_s = -sum_j A_sj (right_j - left_j) / h
void face_flux(const double* A, const double* left, const double* right, double inv_h, int n, double* F) {
  double g[kMaxSpecies];
  for (int j = 0; j < n; ++j) g[j] = (right[j] - left[j]) * inv_h;
  for (int s = 0; s < n; ++s) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += A[s + j * n] * g[j];
    F[s] = -acc;
  }
}

}  // namespace

void face_coefficients(const Grid& grid, const SpeciesSet& species, const PaddedField& Y, FluxModel model, Exec exec,
                       FaceCoefficients& out) {
  const int n = Y.components();
  if (static_cast<std::size_t>(n) != species.size()) throw DomainError("face_coefficients: species count mismatch");
  const std::size_t block = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  out.n = n;
  out.x.assign(block * static_cast<std::size_t>(grid.xfaces()), 0.0);
  out.z.assign(block * static_cast<std::size_t>(grid.zfaces()), 0.0);
  for_each_2d(exec, grid.nx() + 1, grid.nz(), [&](int i, int k) {
    face_block(species, model, n, Y.at(i - 1, k), Y.at(i, k), out.x.data() + block * grid.xface(i, k));
  });
  for_each_2d(exec, grid.nx(), grid.nz() + 1, [&](int i, int k) {
    face_block(species, model, n, Y.at(i, k - 1), Y.at(i, k), out.z.data() + block * grid.zface(i, k));
  });
}

void diffusive_divergence(const Grid& grid, const PaddedField& Y, const FaceCoefficients& coeffs, Exec exec,
                          Eigen::MatrixXd& out) {
  const int n = Y.components();
  const double idx = 1.0 / grid.dx(), idz = 1.0 / grid.dz();
  out.resize(n, grid.cells());
  for_each_2d(exec, grid.nx(), grid.nz(), [&](int i, int k) {
    double fl[kMaxSpecies], fr[kMaxSpecies], fb[kMaxSpecies], ft[kMaxSpecies];
    face_flux(coeffs.xface(grid.xface(i, k)), Y.at(i - 1, k), Y.at(i, k), idx, n, fl);
    face_flux(coeffs.xface(grid.xface(i + 1, k)), Y.at(i, k), Y.at(i + 1, k), idx, n, fr);
    face_flux(coeffs.zface(grid.zface(i, k)), Y.at(i, k - 1), Y.at(i, k), idz, n, fb);
    face_flux(coeffs.zface(grid.zface(i, k + 1)), Y.at(i, k), Y.at(i, k + 1), idz, n, ft);
    double* dst = out.col(grid.cell(i, k)).data();
    for (int s = 0; s < n; ++s) dst[s] = (fr[s] - fl[s]) * idx + (ft[s] - fb[s]) * idz;
  });
}

namespace {

// Regularized flux on the face between cells `a` and `b` (b on the positive
// side). a_lo/a_hi and b_lo/b_hi are the tangential neighbours.
double q_face(int n, const double* a, const double* b, const double* a_lo, const double* a_hi, const double* b_lo,
              const double* b_hi, double inv_h, double inv_t, double* gn) {
  double g2 = 0.0;
  for (int s = 0; s < n; ++s) {
    gn[s] = (b[s] - a[s]) * inv_h;
    const double gt = 0.25 * ((a_hi[s] - a_lo[s]) + (b_hi[s] - b_lo[s])) * inv_t;
    g2 += gn[s] * gn[s] + gt * gt;
  }
  return g2;
}

double q_xface(const PaddedField& Y, int i, int k, double idx, double idz, double* gn) {
  return q_face(Y.components(), Y.at(i - 1, k), Y.at(i, k), Y.at(i - 1, k - 1), Y.at(i - 1, k + 1), Y.at(i, k - 1),
                Y.at(i, k + 1), idx, idz, gn);
}

double q_zface(const PaddedField& Y, int i, int k, double idx, double idz, double* gn) {
  return q_face(Y.components(), Y.at(i, k - 1), Y.at(i, k), Y.at(i - 1, k - 1), Y.at(i + 1, k - 1), Y.at(i - 1, k),
                Y.at(i + 1, k), idz, idx, gn);
}

}  // namespace

void q_laplacian(const Grid& grid, const PaddedField& Y, double eps, double q, Exec exec, Eigen::MatrixXd& out) {
  const int n = Y.components();
  out.setZero(n, grid.cells());
  if (eps == 0.0) return;
  if (!(q > 2.0)) throw DomainError("q_laplacian: q must exceed 2");
  const double idx = 1.0 / grid.dx(), idz = 1.0 / grid.dz();
  const double power = 0.5 * (q - 2.0);
  for_each_2d(exec, grid.nx(), grid.nz(), [&](int i, int k) {
    double gl[kMaxSpecies], gr[kMaxSpecies], gb[kMaxSpecies], gt[kMaxSpecies];
    const double cl = eps * std::pow(q_xface(Y, i, k, idx, idz, gl), power);
    const double cr = eps * std::pow(q_xface(Y, i + 1, k, idx, idz, gr), power);
    const double cb = eps * std::pow(q_zface(Y, i, k, idx, idz, gb), power);
    const double ct = eps * std::pow(q_zface(Y, i, k + 1, idx, idz, gt), power);
    double* dst = out.col(grid.cell(i, k)).data();
    for (int s = 0; s < n; ++s) dst[s] = (cr * gr[s] - cl * gl[s]) * idx + (ct * gt[s] - cb * gb[s]) * idz;
  });
}

double max_face_gradient(const Grid& grid, const PaddedField& Y, Exec exec) {
  const double idx = 1.0 / grid.dx(), idz = 1.0 / grid.dz();
  std::vector<double> xs(static_cast<std::size_t>(grid.xfaces())), zs(static_cast<std::size_t>(grid.zfaces()));
  for_each_2d(exec, grid.nx() + 1, grid.nz(), [&](int i, int k) {
    double g[kMaxSpecies];
    xs[static_cast<std::size_t>(grid.xface(i, k))] = q_xface(Y, i, k, idx, idz, g);
  });
  for_each_2d(exec, grid.nx(), grid.nz() + 1, [&](int i, int k) {
    double g[kMaxSpecies];
    zs[static_cast<std::size_t>(grid.zface(i, k))] = q_zface(Y, i, k, idx, idz, g);
  });
  const double m = std::max(*std::max_element(xs.begin(), xs.end()), *std::max_element(zs.begin(), zs.end()));
  return std::sqrt(m);
}

void upwind_advection(const Grid& grid, const VelocityField& v, const PaddedField& f, Exec exec, Eigen::MatrixXd& out) {
  const int n = f.components();
  const int nx = grid.nx(), nz = grid.nz();
  const double idx = 1.0 / grid.dx(), idz = 1.0 / grid.dz();
  out.resize(n, grid.cells());
  for_each_2d(exec, nx, nz, [&](int i, int k) {
    const double* c = f.at(i, k);
    double* dst = out.col(grid.cell(i, k)).data();
    for (int s = 0; s < n; ++s) dst[s] = 0.0;
    auto add = [&](double rate, const double* nb, bool boundary) {
      for (int s = 0; s < n; ++s) {
        const double up = boundary ? 0.5 * (c[s] + nb[s]) : nb[s];
        dst[s] += rate * (c[s] - up);
      }
    };
    const double ul = v.u(grid.xface(i, k));
    const double ur = v.u(grid.xface(i + 1, k));
    const double wb = v.w(grid.zface(i, k));
    const double wt = v.w(grid.zface(i, k + 1));
    if (ul > 0.0) add(ul * idx, f.at(i - 1, k), i == 0);
    if (ur < 0.0) add(-ur * idx, f.at(i + 1, k), i == nx - 1);
    if (wb > 0.0) add(wb * idz, f.at(i, k - 1), k == 0);
    if (wt < 0.0) add(-wt * idz, f.at(i, k + 1), k == nz - 1);
  });
}

double max_inflow_rate(const Grid& grid, const VelocityField& v) {
  const double idx = 1.0 / grid.dx(), idz = 1.0 / grid.dz();
  double best = 0.0;
  for (int k = 0; k < grid.nz(); ++k)
    for (int i = 0; i < grid.nx(); ++i) {
      double r = 0.0;
      r += std::max(0.0, v.u(grid.xface(i, k))) * idx;
      r += std::max(0.0, -v.u(grid.xface(i + 1, k))) * idx;
      r += std::max(0.0, v.w(grid.zface(i, k))) * idz;
      r += std::max(0.0, -v.w(grid.zface(i, k + 1))) * idz;
      best = std::max(best, r);
    }
  return best;
}

void cell_gradients(const Grid& grid, const PaddedField& Y, Exec exec, Eigen::MatrixXd& gx, Eigen::MatrixXd& gz) {
  const int n = Y.components();
  const double hx = 0.5 / grid.dx(), hz = 0.5 / grid.dz();
  gx.resize(n, grid.cells());
  gz.resize(n, grid.cells());
  for_each_2d(exec, grid.nx(), grid.nz(), [&](int i, int k) {
    const int c = grid.cell(i, k);
    for (int s = 0; s < n; ++s) {
      gx(s, c) = (Y.at(i + 1, k)[s] - Y.at(i - 1, k)[s]) * hx;
      gz(s, c) = (Y.at(i, k + 1)[s] - Y.at(i, k - 1)[s]) * hz;
    }
  });
}

void dissipation_density(const Grid& grid, const SpeciesSet& species, const PaddedField& Y, Exec exec,
                         Eigen::VectorXd& out) {
  const int n = Y.components();
  Eigen::MatrixXd gx, gz;
  cell_gradients(grid, Y, exec, gx, gz);
  out.resize(grid.cells());
  for_each_2d(exec, grid.nx(), grid.nz(), [&](int i, int k) {
    const int c = grid.cell(i, k);
    Composition y(n);
    for (int s = 0; s < n; ++s) y(s) = std::max(0.0, Y.at(i, k)[s]);
    const double total = y.sum();
    if (total <= kDegeneracyThreshold) {
      out(c) = 0.0;
      return;
    }
    y /= total;
    Eigen::MatrixXd grad(n, 2);
    grad.col(0) = gx.col(c);
    grad.col(1) = gz.col(c);
    out(c) = dissipation_rate(species, y, grad);
  });
}

void velocity_divergence(const Grid& grid, const VelocityField& v, Exec exec, Eigen::VectorXd& out) {
  const double idx = 1.0 / grid.dx(), idz = 1.0 / grid.dz();
  out.resize(grid.cells());
  for_each_2d(exec, grid.nx(), grid.nz(), [&](int i, int k) {
    out(grid.cell(i, k)) = (v.u(grid.xface(i + 1, k)) - v.u(grid.xface(i, k))) * idx +
                           (v.w(grid.zface(i, k + 1)) - v.w(grid.zface(i, k))) * idz;
  });
}

}  // namespace rfsim
