#pragma once

// Seeded generators for complex Gaussian matrices, Haar-like unitaries and
// random projections. One engine per Rng; identical seeds give identical
// streams on a given standard library.

#include <cstdint>
#include <random>

#include "mframe/linalg.hpp"

namespace mframe {

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  Complex complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian();
    return m;
  }

  /// Unitary from the QR factorization of a Gaussian matrix, phases fixed so
  /// that R has a positive diagonal.
  Matrix unitary(Eigen::Index n) {
    if (n == 0) return Matrix(0, 0);
    Matrix g = gaussian_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(r(i, i));
      if (a > 0) q.col(i) *= r(i, i) / a;
    }
    return q;
  }

  /// Orthogonal projection of the given rank onto a random subspace.
  Matrix projection(Eigen::Index n, Eigen::Index rank) {
    Matrix u = unitary(n);
    Matrix q = u.leftCols(rank);
    Matrix p = q * q.adjoint();
    return linalg::hermitian_part(p);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mframe
