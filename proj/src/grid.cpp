#include "rfsim/grid.hpp"

#include "rfsim/errors.hpp"

#include <cmath>

namespace rfsim {

Grid::Grid(int nx, int nz, double lx, double lz) : nx_(nx), nz_(nz), lx_(lx), lz_(lz) {
  if (nx < 1 || nz < 1) throw DomainError("Grid: cell counts must be positive");
  if (!(lx > 0.0) || !(lz > 0.0) || !std::isfinite(lx) || !std::isfinite(lz))
    throw DomainError("Grid: lengths must be positive");
}

VelocityField VelocityField::zero(const Grid& grid) {
  return {Eigen::VectorXd::Zero(grid.xfaces()), Eigen::VectorXd::Zero(grid.zfaces())};
}

VelocityField VelocityField::lifting(const Grid& grid) {
  return {Eigen::VectorXd::Zero(grid.xfaces()), Eigen::VectorXd::Ones(grid.zfaces())};
}

PaddedField::PaddedField(int nx, int nz, int components)
    : nx_(nx), nz_(nz), n_(components),
      data_(static_cast<std::size_t>(nx + 2) * static_cast<std::size_t>(nz + 2) * static_cast<std::size_t>(components),
            0.0) {}

void PaddedField::set_interior(const Eigen::MatrixXd& values) {
  for (int k = 0; k < nz_; ++k)
    for (int i = 0; i < nx_; ++i) {
      const double* src = values.col(i + nx_ * k).data();
      double* dst = at(i, k);
      for (int s = 0; s < n_; ++s) dst[s] = src[s];
    }
}

void PaddedField::fill_corners() {
  for (int k : {-1, nz_}) {
    for (int i : {-1, nx_}) {
      const double* src = at(i, k < 0 ? 0 : nz_ - 1);
      double* dst = at(i, k);
      // side ghost + end ghost - corner cell
      const double* other = at(i < 0 ? 0 : nx_ - 1, k);
      const double* cell = at(i < 0 ? 0 : nx_ - 1, k < 0 ? 0 : nz_ - 1);
      for (int s = 0; s < n_; ++s) dst[s] = src[s] + other[s] - cell[s];
    }
  }
}

PaddedField pad_field(const Grid& grid, const Eigen::MatrixXd& values, const Eigen::VectorXd* inlet) {
  const int n = static_cast<int>(values.rows());
  const int nx = grid.nx(), nz = grid.nz();
  PaddedField p(nx, nz, n);
  p.set_interior(values);
  for (int k = 0; k < nz; ++k) {
    for (int s = 0; s < n; ++s) {
      p.at(-1, k)[s] = p.at(0, k)[s];
      p.at(nx, k)[s] = p.at(nx - 1, k)[s];
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int s = 0; s < n; ++s) {
      p.at(i, nz)[s] = p.at(i, nz - 1)[s];
      p.at(i, -1)[s] = inlet ? 2.0 * (*inlet)(s) - p.at(i, 0)[s] : p.at(i, 0)[s];
    }
  }
  p.fill_corners();
  return p;
}

PaddedField pad_scalar(const Grid& grid, const Eigen::VectorXd& values, bool inlet_dirichlet, double inlet_value) {
  const Eigen::VectorXd in = Eigen::VectorXd::Constant(1, inlet_value);
  return pad_field(grid, values.transpose(), inlet_dirichlet ? &in : nullptr);
}

}  // namespace rfsim
