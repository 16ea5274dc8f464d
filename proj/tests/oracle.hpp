#pragma once

// Reference computations written independently of the library: plain loops
// over the flattened blocks, eigenvalues from Eigen directly.

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mframe/frames.hpp"

namespace oracle {

using mframe::Complex;
using mframe::Matrix;

// sum_j X_j^* X_j in block k, entry by entry.
inline Matrix frame_operator_block(const mframe::Frame& f, std::size_t k) {
  const Eigen::Index n = f.element(0).block(k).cols();
  const Eigen::Index d = f.element(0).block(k).rows();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& x : f.elements()) {
    const Matrix& m = x.block(k);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) {
        Complex s(0.0);
        for (Eigen::Index i = 0; i < d; ++i) s += std::conj(m(i, r)) * m(i, c);
        out(r, c) += s;
      }
  }
  return out;
}

struct Bounds {
  double lower, upper;
};

// Extreme eigenvalues of the frame operator on the range of the module
// projection, over all blocks.
inline Bounds bounds(const mframe::Frame& f) {
  double lo = 1e300, hi = 0.0;
  for (std::size_t k = 0; k < f.module().algebra().block_count(); ++k) {
    const Matrix& p = f.module().projection(k);
    if (p.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> ep(p);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      if (ep.eigenvalues()(i) > 0.5) keep.push_back(i);
    if (keep.empty()) continue;
    Matrix q(p.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) q.col(static_cast<Eigen::Index>(i)) = ep.eigenvectors().col(keep[i]);
    const Matrix fr = q.adjoint() * frame_operator_block(f, k) * q;
    Eigen::SelfAdjointEigenSolver<Matrix> e((fr + fr.adjoint()) / 2.0);
    lo = std::min(lo, e.eigenvalues()(0));
    hi = std::max(hi, e.eigenvalues()(e.eigenvalues().size() - 1));
  }
  return {lo, hi};
}

// Hilbert space case: sum_j x_j x_j^T for real vectors.
inline std::vector<std::vector<double>> outer_sum(const std::vector<std::vector<double>>& xs) {
  const std::size_t n = xs.at(0).size();
  std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
  for (const auto& x : xs)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s[i][j] += x[i] * x[j];
  return s;
}

// max over blocks of the entrywise distance.
inline double block_distance(const mframe::Blocks& a, const mframe::Blocks& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, (a[k] - b[k]).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace oracle
