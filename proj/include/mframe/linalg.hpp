#pragma once

// Dense complex helpers shared by the algebra and operator layers. Everything
// here works on a single complex matrix; block structure lives one level up.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace mframe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// One complex matrix per direct summand of the algebra.
using Blocks = std::vector<Matrix>;

inline constexpr double kDefaultTol = 1e-9;

namespace linalg {

inline RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector(0);
  if (m.rows() == 1 || m.cols() == 1) {
    RealVector s(1);
    s(0) = m.norm();
    return s;
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

/// Largest singular value (operator norm on l2).
inline double spectral_norm(const Matrix& m) {
  RealVector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

/// Largest |m_ij - conj(m_ji)|.
inline double hermitian_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

struct Eigh {
  RealVector values;  // ascending
  Matrix vectors;     // columns orthonormal
};

/// Eigendecomposition of the Hermitian part of `m`.
inline Eigh eigh(const Matrix& m) {
  Eigh out;
  if (m.rows() == 0) {
    out.values = RealVector(0);
    out.vectors = Matrix(0, 0);
    return out;
  }
  if (m.rows() == 1) {
    // exact for scalars; keeps dyadic grid values bit-exact
    out.values = RealVector::Constant(1, m(0, 0).real());
    out.vectors = Matrix::Identity(1, 1);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  return out;
}

/// U diag(f(lambda)) U* for a computed eigendecomposition.
template <typename F>
Matrix spectral_apply(const Eigh& e, F&& f) {
  const Eigen::Index n = e.values.size();
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = f(e.values(i));
  return e.vectors * d.asDiagonal() * e.vectors.adjoint();
}

struct PolarFactors {
  Matrix isometry;  // partial isometry V
  Matrix modulus;   // R = (a* a)^{1/2}
};

/// a = V R with R = |a| and V the partial isometry whose initial space is
/// ran R. Singular values at or below `threshold` are treated as zero.
inline PolarFactors right_polar(const Matrix& a, double threshold) {
  PolarFactors out;
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  out.isometry = Matrix::Zero(m, n);
  out.modulus = Matrix::Zero(n, n);
  if (a.size() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const Matrix& u = svd.matrixU();
  const Matrix& w = svd.matrixV();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  out.modulus = w * s.cast<Complex>().asDiagonal() * w.adjoint();
  out.isometry = u.leftCols(rank) * w.leftCols(rank).adjoint();
  return out;
}

/// Orthonormal columns spanning {v : m v = 0}, singular values <= threshold
/// counted as zero.
inline Matrix null_space(const Matrix& m, double threshold) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

/// Orthonormal basis of the range of a Hermitian projection.
inline Matrix projection_range_basis(const Matrix& p) {
  Eigh e = eigh(p);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) > 0.5) keep.push_back(i);
  Matrix q(p.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    q.col(static_cast<Eigen::Index>(c)) = e.vectors.col(keep[c]);
  return q;
}

/// Number of eigenvalues of a Hermitian projection above 1/2.
inline Eigen::Index projection_rank(const Matrix& p) {
  if (p.rows() == 0) return 0;
  return static_cast<Eigen::Index>(std::lround(p.trace().real()));
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace linalg
}  // namespace mframe
