#pragma once

// Hilbert A-modules presented as orthogonal summands P(A^n) of free modules.
//
// Storage convention: in block k (dimension d) a vector x = (x_1, ..., x_n) is
// the d x (n d) matrix [x_1^(k) ... x_n^(k)], and the projection P is the
// (n d) x (n d) matrix acting from the right, so membership reads X P = X.
// With this layout <x, y> = sum_i x_i y_i^* is simply X Y^* in each block.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mframe/cstar.hpp"

namespace mframe {

class HilbertModule {
 public:
  HilbertModule() : HilbertModule(AlgebraDescriptor(), 0) {}

  /// The free module A^rank.
  HilbertModule(AlgebraDescriptor algebra, int rank) {
    if (rank < 0) throw StructuralError("module rank must be non-negative");
    Blocks p;
    for (std::size_t k = 0; k < algebra.block_count(); ++k) {
      const int nd = rank * algebra.dim(k);
      p.push_back(Matrix::Identity(nd, nd));
    }
    data_ = std::make_shared<const Data>(Data{std::move(algebra), rank, std::move(p), true});
  }

  /// The summand P(A^rank); P must be a self-adjoint idempotent within tol.
  HilbertModule(AlgebraDescriptor algebra, int rank, Blocks projection, double tol = kDefaultTol) {
    if (rank < 0) throw StructuralError("module rank must be non-negative");
    if (projection.size() != algebra.block_count())
      throw StructuralError("projection has " + std::to_string(projection.size()) + " blocks, expected " +
                            std::to_string(algebra.block_count()));
    bool full = true;
    for (std::size_t k = 0; k < projection.size(); ++k) {
      const int nd = rank * algebra.dim(k);
      const Matrix& p = projection[k];
      if (p.rows() != nd || p.cols() != nd)
        throw StructuralError("projection block " + std::to_string(k) + " must be " + std::to_string(nd) + "x" +
                              std::to_string(nd));
      const double idem = linalg::spectral_norm(p * p - p);
      const double herm = linalg::spectral_norm(p - p.adjoint());
      if (idem > tol || herm > tol)
        throw StructuralError("projection block " + std::to_string(k) +
                              " is not a self-adjoint idempotent (defect " + std::to_string(std::max(idem, herm)) +
                              ")");
      if (linalg::max_abs(p - Matrix::Identity(nd, nd)) != 0.0) full = false;
    }
    data_ = std::make_shared<const Data>(Data{std::move(algebra), rank, std::move(projection), full});
  }

  static HilbertModule free(const AlgebraDescriptor& a, int rank) { return HilbertModule(a, rank); }

  const AlgebraDescriptor& algebra() const noexcept { return data_->algebra; }
  int rank() const noexcept { return data_->rank; }
  /// Flattened projection blocks, (rank d_k) x (rank d_k).
  const Blocks& projection() const noexcept { return data_->projection; }
  const Matrix& projection(std::size_t k) const { return data_->projection[k]; }
  /// True when the projection is exactly the identity.
  bool is_free() const noexcept { return data_->free; }

  /// Same algebra and rank, projections agreeing to 1e-9.
  friend bool operator==(const HilbertModule& a, const HilbertModule& b) {
    if (a.data_ == b.data_) return true;
    if (!(a.algebra() == b.algebra()) || a.rank() != b.rank()) return false;
    if (a.is_free() && b.is_free()) return true;
    for (std::size_t k = 0; k < a.projection().size(); ++k)
      if (linalg::max_abs(a.projection(k) - b.projection(k)) > 1e-9) return false;
    return true;
  }
  friend bool operator!=(const HilbertModule& a, const HilbertModule& b) { return !(a == b); }

 private:
  struct Data {
    AlgebraDescriptor algebra;
    int rank;
    Blocks projection;
    bool free;
  };
  std::shared_ptr<const Data> data_;
};

class ModuleVector {
 public:
  ModuleVector() = default;

  /// Takes flattened blocks (d_k x rank d_k); rejects vectors outside the
  /// summand (|X P - X| > 1e-9 (1 + |X|)).
  ModuleVector(HilbertModule module, Blocks blocks) : module_(std::move(module)), blocks_(std::move(blocks)) {
    const auto& a = module_.algebra();
    if (blocks_.size() != a.block_count()) throw StructuralError("vector block count does not match the algebra");
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const int d = a.dim(k);
      if (blocks_[k].rows() != d || blocks_[k].cols() != module_.rank() * d)
        throw StructuralError("vector block " + std::to_string(k) + " has wrong shape");
    }
    const double dev = membership_defect(module_, blocks_);
    if (dev > 1e-9 * (1.0 + flat_norm(blocks_)))
      throw StructuralError("vector is not in the module (|Px - x| = " + std::to_string(dev) + ")");
  }

  /// Builds a vector from its coordinates x_1..x_n.
  static ModuleVector from_coords(const HilbertModule& module, const std::vector<AlgElement>& coords) {
    if (static_cast<int>(coords.size()) != module.rank())
      throw StructuralError("expected " + std::to_string(module.rank()) + " coordinates, got " +
                            std::to_string(coords.size()));
    const auto& a = module.algebra();
    Blocks b;
    for (std::size_t k = 0; k < a.block_count(); ++k) {
      const int d = a.dim(k);
      Matrix m(d, module.rank() * d);
      for (int i = 0; i < module.rank(); ++i) {
        if (!(coords[i].algebra() == a)) throw StructuralError("coordinate algebra mismatch");
        m.middleCols(i * d, d) = coords[i].block(k);
      }
      b.push_back(std::move(m));
    }
    return ModuleVector(module, std::move(b));
  }

  static ModuleVector zero(const HilbertModule& module) {
    const auto& a = module.algebra();
    Blocks b;
    for (std::size_t k = 0; k < a.block_count(); ++k) b.push_back(Matrix::Zero(a.dim(k), module.rank() * a.dim(k)));
    return ModuleVector(module, std::move(b));
  }

  /// Applies the module projection to arbitrary flattened blocks.
  static ModuleVector project(const HilbertModule& module, const Blocks& raw) {
    Blocks b;
    for (std::size_t k = 0; k < raw.size(); ++k) b.push_back(raw[k] * module.projection(k));
    return ModuleVector(module, std::move(b));
  }

  const HilbertModule& module() const noexcept { return module_; }
  const Blocks& blocks() const noexcept { return blocks_; }
  const Matrix& block(std::size_t k) const { return blocks_[k]; }

  AlgElement coord(int i) const {
    const auto& a = module_.algebra();
    Blocks b;
    for (std::size_t k = 0; k < a.block_count(); ++k) {
      const int d = a.dim(k);
      b.push_back(blocks_[k].middleCols(i * d, d));
    }
    return AlgElement(a, std::move(b));
  }

  friend ModuleVector operator+(const ModuleVector& x, const ModuleVector& y) {
    check_same(x, y);
    Blocks b;
    for (std::size_t k = 0; k < x.blocks_.size(); ++k) b.push_back(x.blocks_[k] + y.blocks_[k]);
    return ModuleVector(x.module_, std::move(b), Unchecked{});
  }
  friend ModuleVector operator-(const ModuleVector& x, const ModuleVector& y) {
    check_same(x, y);
    Blocks b;
    for (std::size_t k = 0; k < x.blocks_.size(); ++k) b.push_back(x.blocks_[k] - y.blocks_[k]);
    return ModuleVector(x.module_, std::move(b), Unchecked{});
  }
  friend ModuleVector operator*(Complex c, const ModuleVector& x) {
    Blocks b;
    for (const auto& m : x.blocks_) b.push_back(c * m);
    return ModuleVector(x.module_, std::move(b), Unchecked{});
  }

  static void check_same(const ModuleVector& x, const ModuleVector& y) {
    if (x.module_ != y.module_) throw StructuralError("module mismatch");
  }

 private:
  friend class ModuleOperator;
  friend ModuleVector module_action(const AlgElement& a, const ModuleVector& x);

  struct Unchecked {};
  ModuleVector(HilbertModule module, Blocks blocks, Unchecked) : module_(std::move(module)), blocks_(std::move(blocks)) {}

  static double flat_norm(const Blocks& b) {
    double n = 0.0;
    for (const auto& m : b) n = std::max(n, linalg::max_abs(m));
    return n;
  }
  static double membership_defect(const HilbertModule& module, const Blocks& b) {
    if (module.is_free()) return 0.0;
    double dev = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) dev = std::max(dev, linalg::max_abs(b[k] * module.projection(k) - b[k]));
    return dev;
  }

  HilbertModule module_;
  Blocks blocks_;
};

/// A-valued inner product <x, y> = sum_i x_i y_i^*.
inline AlgElement inner(const ModuleVector& x, const ModuleVector& y) {
  ModuleVector::check_same(x, y);
  Blocks b;
  for (std::size_t k = 0; k < x.blocks().size(); ++k) b.push_back(x.block(k) * y.block(k).adjoint());
  return AlgElement(x.module().algebra(), std::move(b));
}

/// Left module action (a x)_i = a x_i.
inline ModuleVector module_action(const AlgElement& a, const ModuleVector& x) {
  if (!(a.algebra() == x.module().algebra())) throw StructuralError("algebra mismatch in module action");
  Blocks b;
  for (std::size_t k = 0; k < x.blocks().size(); ++k) b.push_back(a.block(k) * x.block(k));
  return ModuleVector(x.module(), std::move(b), ModuleVector::Unchecked{});
}

/// |x| = |<x, x>|^{1/2}.
inline double module_norm(const ModuleVector& x) { return std::sqrt(inner(x, x).norm()); }

/// (P e_1, ..., P e_n).
inline std::vector<ModuleVector> standard_basis(const HilbertModule& module) {
  const auto& a = module.algebra();
  std::vector<ModuleVector> out;
  for (int j = 0; j < module.rank(); ++j) {
    Blocks raw;
    for (std::size_t k = 0; k < a.block_count(); ++k) {
      const int d = a.dim(k);
      Matrix m = Matrix::Zero(d, module.rank() * d);
      m.middleCols(j * d, d) = Matrix::Identity(d, d);
      raw.push_back(std::move(m));
    }
    out.push_back(ModuleVector::project(module, raw));
  }
  return out;
}

}  // namespace mframe
