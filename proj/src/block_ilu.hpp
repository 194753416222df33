#pragma once

#include "rfsim/mixture.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <vector>

namespace rfsim::detail {

// Block ILU(0) preconditioner for a row-major matrix made of dense n x n
// blocks whose pattern is block-symmetric. For a five-point stencil in
// natural order only the diagonal blocks change, so the factors are the
// original off-diagonal blocks plus one inverse per block row.
class BlockIlu0 {
 public:
  BlockIlu0() = default;

  void set_block_size(int n) { n_ = n; }

  template <typename MatType>
  BlockIlu0& analyzePattern(const MatType&) {
    return *this;
  }

  template <typename MatType>
  BlockIlu0& factorize(const MatType& a) {
    outer_ = a.outerIndexPtr();
    inner_ = a.innerIndexPtr();
    values_ = a.valuePtr();
    rows_ = static_cast<int>(a.rows()) / n_;
    factor();
    return *this;
  }

  template <typename MatType>
  BlockIlu0& compute(const MatType& a) {
    return factorize(a);
  }

  Eigen::ComputationInfo info() const { return info_; }

  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    const int n = n_;
    Eigen::VectorXd y(b.size());
    double t[kMaxSpecies];
    for (int c = 0; c < rows_; ++c) {
      for (int s = 0; s < n; ++s) t[s] = b(c * n + s);
      const int blocks = block_count(c);
      for (int q = 0; q < blocks; ++q) {
        const int col = block_col(c, q);
        if (col >= c) break;
        for (int s = 0; s < n; ++s) {
          const double* row = values_ + outer_[c * n + s] + q * n;
          for (int j = 0; j < n; ++j) t[s] -= row[j] * y(col * n + j);
        }
      }
      apply_inverse(c, t, y.data() + c * n);
    }
    for (int c = rows_ - 1; c >= 0; --c) {
      for (int s = 0; s < n; ++s) t[s] = 0.0;
      const int blocks = block_count(c);
      for (int q = blocks - 1; q >= 0; --q) {
        const int col = block_col(c, q);
        if (col <= c) break;
        for (int s = 0; s < n; ++s) {
          const double* row = values_ + outer_[c * n + s] + q * n;
          for (int j = 0; j < n; ++j) t[s] += row[j] * y(col * n + j);
        }
      }
      double u[kMaxSpecies];
      apply_inverse(c, t, u);
      for (int s = 0; s < n; ++s) y(c * n + s) -= u[s];
    }
    return y;
  }

 private:
  using Block = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxSpecies, kMaxSpecies>;

  int block_count(int c) const { return (outer_[c * n_ + 1] - outer_[c * n_]) / n_; }
  int block_col(int c, int q) const { return inner_[outer_[c * n_] + q * n_] / n_; }
  double entry(int c, int q, int s, int j) const { return values_[outer_[c * n_ + s] + q * n_ + j]; }

  int find_block(int c, int col) const {
    const int blocks = block_count(c);
    for (int q = 0; q < blocks; ++q)
      if (block_col(c, q) == col) return q;
    return -1;
  }

  void apply_inverse(int c, const double* in, double* out) const {
    const double* inv = inverse_.data() + static_cast<std::size_t>(c) * n_ * n_;
    for (int s = 0; s < n_; ++s) {
      double acc = 0.0;
      for (int j = 0; j < n_; ++j) acc += inv[s + j * n_] * in[j];
      out[s] = acc;
    }
  }

  void factor() {
    const int n = n_;
    inverse_.assign(static_cast<std::size_t>(rows_) * n * n, 0.0);
    info_ = Eigen::Success;
    Block D(n, n), lower(n, n), upper(n, n);
    for (int c = 0; c < rows_; ++c) {
      const int self = find_block(c, c);
      if (self < 0) {
        info_ = Eigen::NumericalIssue;
        return;
      }
      for (int s = 0; s < n; ++s)
        for (int j = 0; j < n; ++j) D(s, j) = entry(c, self, s, j);
      for (int q = 0; q < self; ++q) {
        const int p = block_col(c, q);
        const int back = find_block(p, c);
        if (back < 0) continue;
        for (int s = 0; s < n; ++s)
          for (int j = 0; j < n; ++j) {
            lower(s, j) = entry(c, q, s, j);
            upper(s, j) = entry(p, back, s, j);
          }
        const Eigen::Map<const Block> pinv(inverse_.data() + static_cast<std::size_t>(p) * n * n, n, n);
        D.noalias() -= lower * (pinv * upper);
      }
      const Eigen::PartialPivLU<Block> lu(D);
      const Block inv = lu.inverse();
      if (!inv.allFinite()) {
        info_ = Eigen::NumericalIssue;
        return;
      }
      std::copy(inv.data(), inv.data() + n * n, inverse_.data() + static_cast<std::size_t>(c) * n * n);
    }
  }

  int n_ = 1;
  int rows_ = 0;
  const int* outer_ = nullptr;
  const int* inner_ = nullptr;
  const double* values_ = nullptr;
  std::vector<double> inverse_;
  Eigen::ComputationInfo info_ = Eigen::Success;
};

}  // namespace rfsim::detail
