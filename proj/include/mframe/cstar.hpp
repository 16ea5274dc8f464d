#pragma once

// Finite-dimensional C*-algebras A = M_{d_1}(C) + ... + M_{d_K}(C) and their
// elements. Norms, positivity and functional calculus are computed block by
// block from Hermitian eigendecompositions or singular value factorizations.

#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mframe/error.hpp"
#include "mframe/linalg.hpp"

namespace mframe {

class AlgebraDescriptor {
 public:
  AlgebraDescriptor() : AlgebraDescriptor(std::vector<int>{1}) {}

  explicit AlgebraDescriptor(std::vector<int> blocks) {
    if (blocks.empty()) throw StructuralError("algebra needs at least one block");
    for (int d : blocks)
      if (d < 1) throw StructuralError("block dimension must be positive, got " + std::to_string(d));
    blocks_ = std::make_shared<const std::vector<int>>(std::move(blocks));
  }

  static AlgebraDescriptor complex_numbers() { return AlgebraDescriptor({1}); }
  static AlgebraDescriptor matrices(int d) { return AlgebraDescriptor({d}); }
  /// C^m with pointwise multiplication.
  static AlgebraDescriptor diagonal(int m) { return AlgebraDescriptor(std::vector<int>(static_cast<std::size_t>(m), 1)); }

  std::size_t block_count() const noexcept { return blocks_->size(); }
  int dim(std::size_t k) const { return (*blocks_)[k]; }
  const std::vector<int>& blocks() const noexcept { return *blocks_; }

  /// Complex dimension sum_k d_k^2.
  int total_dimension() const {
    return std::accumulate(blocks_->begin(), blocks_->end(), 0, [](int acc, int d) { return acc + d * d; });
  }

  friend bool operator==(const AlgebraDescriptor& a, const AlgebraDescriptor& b) {
    return a.blocks_ == b.blocks_ || *a.blocks_ == *b.blocks_;
  }

 private:
  std::shared_ptr<const std::vector<int>> blocks_;
};

inline std::string to_string(const AlgebraDescriptor& a) {
  std::string s = "(";
  for (std::size_t k = 0; k < a.block_count(); ++k) {
    if (k) s += ",";
    s += std::to_string(a.dim(k));
  }
  return s + ")";
}

class AlgElement {
 public:
  AlgElement() = default;

  AlgElement(AlgebraDescriptor algebra, Blocks blocks) : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
    if (blocks_.size() != algebra_.block_count())
      throw StructuralError("element has " + std::to_string(blocks_.size()) + " blocks, algebra " +
                            to_string(algebra_) + " needs " + std::to_string(algebra_.block_count()));
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const int d = algebra_.dim(k);
      if (blocks_[k].rows() != d || blocks_[k].cols() != d)
        throw StructuralError("block " + std::to_string(k) + " must be " + std::to_string(d) + "x" +
                              std::to_string(d));
    }
  }

  static AlgElement zero(const AlgebraDescriptor& a) { return scalar(a, 0.0); }
  static AlgElement unit(const AlgebraDescriptor& a) { return scalar(a, 1.0); }
  static AlgElement scalar(const AlgebraDescriptor& a, Complex c) {
    Blocks b;
    b.reserve(a.block_count());
    for (std::size_t k = 0; k < a.block_count(); ++k) b.push_back(c * Matrix::Identity(a.dim(k), a.dim(k)));
    return AlgElement(a, std::move(b));
  }

  const AlgebraDescriptor& algebra() const noexcept { return algebra_; }
  const Blocks& blocks() const noexcept { return blocks_; }
  const Matrix& block(std::size_t k) const { return blocks_[k]; }

  AlgElement adjoint() const {
    Blocks b;
    b.reserve(blocks_.size());
    for (const auto& m : blocks_) b.push_back(m.adjoint());
    return AlgElement(algebra_, std::move(b));
  }

  /// C*-norm: the largest operator norm over the blocks.
  double norm() const {
    double n = 0.0;
    for (const auto& m : blocks_) n = std::max(n, linalg::spectral_norm(m));
    return n;
  }

  friend AlgElement operator+(const AlgElement& a, const AlgElement& b) { return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x + y; }); }
  friend AlgElement operator-(const AlgElement& a, const AlgElement& b) { return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x - y; }); }
  friend AlgElement operator*(const AlgElement& a, const AlgElement& b) { return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x * y; }); }
  friend AlgElement operator*(Complex c, const AlgElement& a) {
    Blocks b;
    b.reserve(a.blocks_.size());
    for (const auto& m : a.blocks_) b.push_back(c * m);
    return AlgElement(a.algebra_, std::move(b));
  }
  friend AlgElement operator*(const AlgElement& a, Complex c) { return c * a; }
  AlgElement operator-() const { return Complex(-1.0) * *this; }

 private:
  template <typename Op>
  static AlgElement zip(const AlgElement& a, const AlgElement& b, Op op) {
    if (!(a.algebra_ == b.algebra_))
      throw StructuralError("algebra mismatch: " + to_string(a.algebra_) + " vs " + to_string(b.algebra_));
    Blocks out;
    out.reserve(a.blocks_.size());
    for (std::size_t k = 0; k < a.blocks_.size(); ++k) out.push_back(op(a.blocks_[k], b.blocks_[k]));
    return AlgElement(a.algebra_, std::move(out));
  }

  AlgebraDescriptor algebra_;
  Blocks blocks_;
};

/// Largest entrywise deviation between two elements of the same algebra.
inline double max_abs_difference(const AlgElement& a, const AlgElement& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.blocks().size(); ++k) m = std::max(m, linalg::max_abs(a.block(k) - b.block(k)));
  return m;
}

/// Hermitian within tol*(1+|a|) and no eigenvalue below -tol*(1+|a|).
inline bool is_positive(const AlgElement& a, double tol = kDefaultTol) {
  const double slack = tol * (1.0 + a.norm());
  for (const auto& m : a.blocks()) {
    if (linalg::hermitian_defect(m) > slack) return false;
    linalg::Eigh e = linalg::eigh(m);
    if (e.values.size() > 0 && e.values(0) < -slack) return false;
  }
  return true;
}

enum class FuncKind { Sqrt, Inv, Pinv, RangeProj };

inline const char* to_string(FuncKind k) {
  switch (k) {
    case FuncKind::Sqrt: return "sqrt";
    case FuncKind::Inv: return "inv";
    case FuncKind::Pinv: return "pinv";
    case FuncKind::RangeProj: return "range_proj";
  }
  return "?";
}

namespace detail {

// Applies a scalar function to the spectrum of each Hermitian block. `scale`
// is the norm used for the relative thresholds; block indices in errors are
// offset by `block_offset`.
inline Blocks hermitian_funcalc(const Blocks& blocks, FuncKind kind, double tol, double scale) {
  const double slack = tol * (1.0 + scale);
  const double cutoff = tol * scale;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    if (linalg::hermitian_defect(blocks[k]) > slack)
      throw DomainError(std::string(to_string(kind)) + ": block " + std::to_string(k) + " is not Hermitian");
  Blocks out;
  out.reserve(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    linalg::Eigh e = linalg::eigh(blocks[k]);
    switch (kind) {
      case FuncKind::Sqrt:
        if (e.values.size() > 0 && e.values(0) < -slack)
          throw DomainError("sqrt: block " + std::to_string(k) + " has negative eigenvalue " +
                            std::to_string(e.values(0)));
        out.push_back(linalg::spectral_apply(e, [](double l) { return Complex(std::sqrt(std::max(l, 0.0))); }));
        break;
      case FuncKind::Inv:
        for (Eigen::Index i = 0; i < e.values.size(); ++i)
          if (std::abs(e.values(i)) <= cutoff) throw SingularityError(k, e.values(i));
        out.push_back(linalg::spectral_apply(e, [](double l) { return Complex(1.0 / l); }));
        break;
      case FuncKind::Pinv:
        out.push_back(linalg::spectral_apply(
            e, [cutoff](double l) { return std::abs(l) <= cutoff ? Complex(0.0) : Complex(1.0 / l); }));
        break;
      case FuncKind::RangeProj:
        out.push_back(linalg::spectral_apply(
            e, [cutoff](double l) { return std::abs(l) <= cutoff ? Complex(0.0) : Complex(1.0); }));
        break;
    }
  }
  return out;
}

inline double blocks_norm(const Blocks& blocks) {
  double n = 0.0;
  for (const auto& m : blocks) n = std::max(n, linalg::spectral_norm(m));
  return n;
}

}  // namespace detail

/// Continuous functional calculus on a Hermitian element. `pinv` and
/// `range_proj` treat eigenvalues with |lambda| <= tol*|a| as zero.
inline AlgElement funcalc(const AlgElement& a, FuncKind kind, double tol = kDefaultTol) {
  return AlgElement(a.algebra(), detail::hermitian_funcalc(a.blocks(), kind, tol, a.norm()));
}

struct PolarDecomposition {
  AlgElement isometry;  // V
  AlgElement modulus;   // R = |a|
};

/// a = V R with R = (a* a)^{1/2}. V is zero on ker R, so it is a partial
/// isometry in general and unitary when a is invertible.
inline PolarDecomposition polar(const AlgElement& a, double tol = kDefaultTol) {
  const double cutoff = tol * a.norm();
  Blocks v, r;
  for (const auto& m : a.blocks()) {
    linalg::PolarFactors f = linalg::right_polar(m, cutoff);
    v.push_back(std::move(f.isometry));
    r.push_back(std::move(f.modulus));
  }
  return {AlgElement(a.algebra(), std::move(v)), AlgElement(a.algebra(), std::move(r))};
}

}  // namespace mframe
