#pragma once

#include <Eigen/Dense>

#include <vector>

namespace rfsim {

/// Uniform MAC grid on (0,lx) x (0,lz). Scalars live at cell centers, the
/// x-velocity on vertical faces and the z-velocity on horizontal faces.
/// z = 0 is the inlet, z = lz the outlet, x = 0 and x = lx the side walls.
class Grid {
 public:
  Grid(int nx, int nz, double lx, double lz);

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  double lx() const { return lx_; }
  double lz() const { return lz_; }
  double dx() const { return lx_ / nx_; }
  double dz() const { return lz_ / nz_; }
  double cell_area() const { return dx() * dz(); }

  int cells() const { return nx_ * nz_; }
  int cell(int i, int k) const { return i + nx_ * k; }
  double xc(int i) const { return (i + 0.5) * dx(); }
  double zc(int k) const { return (k + 0.5) * dz(); }

  /// Vertical faces: (nx+1) x nz, index i + (nx+1) k.
  int xfaces() const { return (nx_ + 1) * nz_; }
  int xface(int i, int k) const { return i + (nx_ + 1) * k; }
  /// Horizontal faces: nx x (nz+1), index i + nx k.
  int zfaces() const { return nx_ * (nz_ + 1); }
  int zface(int i, int k) const { return i + nx_ * k; }

 private:
  int nx_, nz_;
  double lx_, lz_;
};

/// Boundary treatment of the species and temperature at z = 0.
enum class SpeciesBoundary {
  Channel,  // Dirichlet inlet values on z = 0, zero normal gradient elsewhere
  Closed,   // zero normal gradient on every side
};

/// Mass fractions, one column per cell (species contiguous per cell).
struct SpeciesField {
  Eigen::MatrixXd Y;
  Eigen::VectorXd inlet;
  SpeciesBoundary boundary = SpeciesBoundary::Channel;

  int species() const { return static_cast<int>(Y.rows()); }
};

/// Face-normal velocity components on the staggered grid.
struct VelocityField {
  Eigen::VectorXd u;  // xfaces
  Eigen::VectorXd w;  // zfaces

  static VelocityField zero(const Grid& grid);
  /// v = e_n: u = 0, w = 1.
  static VelocityField lifting(const Grid& grid);
};

/// Cell values with one layer of ghost cells, indices i in [-1, nx] and
/// k in [-1, nz]. Components of one cell are contiguous.
class PaddedField {
 public:
  PaddedField() = default;
  PaddedField(int nx, int nz, int components);

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  int components() const { return n_; }
  double* at(int i, int k) { return data_.data() + offset(i, k); }
  const double* at(int i, int k) const { return data_.data() + offset(i, k); }

  /// Loads interior cells from an n x cells matrix.
  void set_interior(const Eigen::MatrixXd& values);
  /// Corner ghosts by bilinear extrapolation from the side and end ghosts.
  void fill_corners();

 private:
  std::size_t offset(int i, int k) const {
    return (static_cast<std::size_t>(k + 1) * static_cast<std::size_t>(nx_ + 2) + static_cast<std::size_t>(i + 1)) *
           static_cast<std::size_t>(n_);
  }
  int nx_ = 0, nz_ = 0, n_ = 0;
  std::vector<double> data_;
};

/// Ghosting of a cell field: zero normal gradient on the walls and the
/// outlet; at the inlet either mirrored about `inlet` (Dirichlet, the face
/// mean equals the inlet value) or zero gradient when `inlet` is null.
PaddedField pad_field(const Grid& grid, const Eigen::MatrixXd& values, const Eigen::VectorXd* inlet);

/// Dirichlet-inlet ghosting for a scalar field with inlet value `inlet_value`.
PaddedField pad_scalar(const Grid& grid, const Eigen::VectorXd& values, bool inlet_dirichlet, double inlet_value);

}  // namespace rfsim
