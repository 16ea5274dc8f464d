#pragma once

// Seeded random frames, operators and frame pairs. A given seed always yields
// the same objects.

#include <cstdint>
#include <string>
#include <vector>

#include "mframe/frames.hpp"
#include "mframe/random.hpp"

namespace mframe {

/// Small algebras: every total dimension is at most 6.
inline AlgebraDescriptor random_algebra(Rng& rng) {
  static const std::vector<std::vector<int>> shapes = {{1}, {2}, {1, 1}, {2, 1}, {1, 1, 1}};
  return AlgebraDescriptor(shapes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(shapes.size()) - 1))]);
}

/// x_j = row block j of a (J d_k) x (n d_k) matrix in each block k.
inline Frame frame_from_synthesis_rows(const HilbertModule& h, const Blocks& rows, int count, double tol = kDefaultTol) {
  const auto& a = h.algebra();
  std::vector<ModuleVector> xs;
  for (int j = 0; j < count; ++j) {
    Blocks b;
    for (std::size_t k = 0; k < a.block_count(); ++k) {
      const int d = a.dim(k);
      b.push_back(rows[k].middleRows(j * d, d));
    }
    xs.push_back(ModuleVector::project(h, b));
  }
  return Frame(h, std::move(xs), tol);
}

/// Per block, the first `cols` columns of a random unitary of size J d_k.
inline Blocks random_isometry_columns(Rng& rng, const AlgebraDescriptor& a, int count, int offset, int cols) {
  Blocks out;
  for (std::size_t k = 0; k < a.block_count(); ++k) {
    const int d = a.dim(k);
    const Matrix u = rng.unitary(count * d);
    out.push_back(u.middleCols(offset * d, cols * d));
  }
  return out;
}

/// Normalized tight frame of J elements in A^n.
inline Frame random_snt_frame(Rng& rng, const AlgebraDescriptor& a, int rank, int count, double tol = kDefaultTol) {
  return frame_from_synthesis_rows(HilbertModule(a, rank), random_isometry_columns(rng, a, count, 0, rank), count, tol);
}

/// Gaussian family of J elements in A^n (a frame almost surely when J >= n).
inline Frame random_standard_frame(Rng& rng, const AlgebraDescriptor& a, int rank, int count, double tol = kDefaultTol) {
  Blocks rows;
  for (std::size_t k = 0; k < a.block_count(); ++k) rows.push_back(rng.gaussian_matrix(count * a.dim(k), rank * a.dim(k)));
  return frame_from_synthesis_rows(HilbertModule(a, rank), rows, count, tol);
}

/// Random projection onto a summand of A^n with rank r_k in block k.
inline HilbertModule random_summand(Rng& rng, const AlgebraDescriptor& a, int rank) {
  Blocks p;
  for (std::size_t k = 0; k < a.block_count(); ++k) {
    const int nd = rank * a.dim(k);
    p.push_back(rng.projection(nd, rng.uniform_int(1, nd)));
  }
  return HilbertModule(a, rank, std::move(p));
}

/// Random invertible operator on a module: identity plus a small Gaussian
/// perturbation, compressed to the summand.
inline ModuleOperator random_invertible(Rng& rng, const HilbertModule& h, double spread = 0.4) {
  Blocks b;
  for (std::size_t k = 0; k < h.algebra().block_count(); ++k) {
    const Matrix& p = h.projection(k);
    const Matrix g = rng.gaussian_matrix(p.rows(), p.cols());
    const double n = linalg::spectral_norm(g);
    b.push_back(p * (Matrix::Identity(p.rows(), p.cols()) + (spread / std::max(n, 1e-300)) * g) * p);
  }
  return ModuleOperator(h, h, std::move(b));
}

inline ModuleOperator random_unitary(Rng& rng, const HilbertModule& h) {
  if (!h.is_free()) throw PreconditionError("random_unitary needs a free module", 0.0);
  Blocks b;
  for (std::size_t k = 0; k < h.algebra().block_count(); ++k) b.push_back(rng.unitary(h.rank() * h.algebra().dim(k)));
  return ModuleOperator(h, h, std::move(b));
}

inline ModuleOperator random_operator(Rng& rng, const HilbertModule& source, const HilbertModule& target) {
  Blocks b;
  for (std::size_t k = 0; k < source.algebra().block_count(); ++k) {
    const int d = source.algebra().dim(k);
    b.push_back(source.projection(k) * rng.gaussian_matrix(source.rank() * d, target.rank() * d) * target.projection(k));
  }
  return ModuleOperator(source, target, std::move(b));
}

/// Two normalized tight frames of A^n and A^m with orthogonal transform
/// ranges in A^J, J = n + m + extra. extra = 0 gives a strongly
/// complementary pair.
inline std::vector<Frame> random_orthogonal_pair(Rng& rng, const AlgebraDescriptor& a, int n, int m, int extra,
                                                 double tol = kDefaultTol) {
  const int count = n + m + extra;
  Blocks xs, ys;
  for (std::size_t k = 0; k < a.block_count(); ++k) {
    const int d = a.dim(k);
    const Matrix u = rng.unitary(count * d);
    xs.push_back(u.leftCols(n * d));
    ys.push_back(u.middleCols(n * d, m * d));
  }
  return {frame_from_synthesis_rows(HilbertModule(a, n), xs, count, tol),
          frame_from_synthesis_rows(HilbertModule(a, m), ys, count, tol)};
}

inline const std::vector<std::string>& fixture_kinds() {
  static const std::vector<std::string> kinds = {"snt", "standard", "riesz", "disjoint-pair", "complementary-pair"};
  return kinds;
}

/// One frame (or two for the pair kinds) drawn from the seed.
inline std::vector<Frame> random_fixture(const std::string& kind, std::uint64_t seed, double tol = kDefaultTol) {
  Rng rng(seed);
  const AlgebraDescriptor a = random_algebra(rng);
  const int n = rng.uniform_int(1, 3);
  if (kind == "snt") return {random_snt_frame(rng, a, n, n + rng.uniform_int(0, 3), tol)};
  if (kind == "standard") return {random_standard_frame(rng, a, n, n + rng.uniform_int(1, 3), tol)};
  if (kind == "riesz") return {random_standard_frame(rng, a, n, n, tol)};
  if (kind == "disjoint-pair") return random_orthogonal_pair(rng, a, n, rng.uniform_int(1, 2), rng.uniform_int(1, 2), tol);
  if (kind == "complementary-pair") return random_orthogonal_pair(rng, a, n, rng.uniform_int(1, 2), 0, tol);
  throw DomainError("unknown fixture kind '" + kind + "'");
}

}  // namespace mframe
