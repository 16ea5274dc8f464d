#pragma once

// Adjointable A-linear maps between Hilbert modules.
//
// An operator T : P(A^n) -> Q(A^m) is an n x m matrix (t_ik) over A acting by
// right multiplication, T(x)_k = sum_i x_i t_ik, which makes left A-linearity
// automatic. Flattened, block k of T is the (n d) x (m d) matrix M_k with
// X |-> X M_k. Consequently
//
//   flatten(compose(T, U)) = flatten(U) * flatten(T)     (compose(T, U) = T o U)
//   flatten(adjoint(T))    = flatten(T)^*
//
// In this finite model every A-linear map is adjointable, so the distinction
// between bounded module maps and adjointable ones does not arise.

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mframe/hmodule.hpp"

namespace mframe {

class ModuleOperator {
 public:
  ModuleOperator() = default;

  /// Wraps flattened blocks; checks shapes and P_source T P_target = T.
  ModuleOperator(HilbertModule source, HilbertModule target, Blocks blocks, double tol = kDefaultTol)
      : source_(std::move(source)), target_(std::move(target)), blocks_(std::move(blocks)) {
    if (!(source_.algebra() == target_.algebra())) throw StructuralError("operator between different algebras");
    const auto& a = source_.algebra();
    if (blocks_.size() != a.block_count()) throw StructuralError("operator block count does not match the algebra");
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const int d = a.dim(k);
      if (blocks_[k].rows() != source_.rank() * d || blocks_[k].cols() != target_.rank() * d)
        throw StructuralError("operator block " + std::to_string(k) + " has wrong shape");
    }
    if (!source_.is_free() || !target_.is_free()) {
      double dev = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const Matrix& m = blocks_[k];
        dev = std::max(dev, linalg::spectral_norm(source_.projection(k) * m * target_.projection(k) - m));
        scale = std::max(scale, linalg::spectral_norm(m));
      }
      if (dev > tol * (1.0 + scale))
        throw StructuralError("operator does not map the source summand into the target summand (defect " +
                              std::to_string(dev) + ")");
    }
  }

  /// From an n x m matrix of algebra entries.
  static ModuleOperator from_entries(const HilbertModule& source, const HilbertModule& target,
                                     const std::vector<std::vector<AlgElement>>& entries, double tol = kDefaultTol) {
    const int n = source.rank(), m = target.rank();
    if (static_cast<int>(entries.size()) != n) throw StructuralError("entry matrix has wrong row count");
    const auto& a = source.algebra();
    Blocks b;
    for (std::size_t k = 0; k < a.block_count(); ++k) {
      const int d = a.dim(k);
      Matrix mk(n * d, m * d);
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(entries[i].size()) != m) throw StructuralError("entry matrix has wrong column count");
        for (int j = 0; j < m; ++j) {
          if (!(entries[i][j].algebra() == a)) throw StructuralError("entry algebra mismatch");
          mk.block(i * d, j * d, d, d) = entries[i][j].block(k);
        }
      }
      b.push_back(std::move(mk));
    }
    return ModuleOperator(source, target, std::move(b), tol);
  }

  /// Identity of a module, i.e. its projection.
  static ModuleOperator identity(const HilbertModule& h) { return ModuleOperator(h, h, h.projection(), Unchecked{}); }

  static ModuleOperator zero(const HilbertModule& source, const HilbertModule& target) {
    const auto& a = source.algebra();
    Blocks b;
    for (std::size_t k = 0; k < a.block_count(); ++k)
      b.push_back(Matrix::Zero(source.rank() * a.dim(k), target.rank() * a.dim(k)));
    return ModuleOperator(source, target, std::move(b));
  }

  /// Scalar multiple of the identity of h.
  static ModuleOperator scalar(const HilbertModule& h, Complex c) { return c * identity(h); }

  const HilbertModule& source() const noexcept { return source_; }
  const HilbertModule& target() const noexcept { return target_; }
  const Blocks& flatten() const noexcept { return blocks_; }
  const Matrix& block(std::size_t k) const { return blocks_[k]; }
  bool is_endomorphism() const { return source_ == target_; }

  static ModuleOperator unflatten(const HilbertModule& source, const HilbertModule& target, Blocks blocks) {
    return ModuleOperator(source, target, std::move(blocks));
  }

  AlgElement entry(int i, int j) const {
    const auto& a = source_.algebra();
    Blocks b;
    for (std::size_t k = 0; k < a.block_count(); ++k) {
      const int d = a.dim(k);
      b.push_back(blocks_[k].block(i * d, j * d, d, d));
    }
    return AlgElement(a, std::move(b));
  }

  ModuleVector apply(const ModuleVector& x) const {
    if (x.module() != source_) throw StructuralError("operator applied to a vector of another module");
    Blocks b;
    for (std::size_t k = 0; k < blocks_.size(); ++k) b.push_back(x.block(k) * blocks_[k]);
    return ModuleVector(target_, std::move(b), ModuleVector::Unchecked{});
  }
  ModuleVector operator()(const ModuleVector& x) const { return apply(x); }

  ModuleOperator adjoint() const {
    Blocks b;
    for (const auto& m : blocks_) b.push_back(m.adjoint());
    return ModuleOperator(target_, source_, std::move(b), Unchecked{});
  }

  /// Operator norm: the largest singular value over all blocks.
  double norm() const { return detail::blocks_norm(blocks_); }

  friend ModuleOperator operator+(const ModuleOperator& t, const ModuleOperator& u) {
    check_parallel(t, u);
    Blocks b;
    for (std::size_t k = 0; k < t.blocks_.size(); ++k) b.push_back(t.blocks_[k] + u.blocks_[k]);
    return ModuleOperator(t.source_, t.target_, std::move(b), Unchecked{});
  }
  friend ModuleOperator operator-(const ModuleOperator& t, const ModuleOperator& u) {
    check_parallel(t, u);
    Blocks b;
    for (std::size_t k = 0; k < t.blocks_.size(); ++k) b.push_back(t.blocks_[k] - u.blocks_[k]);
    return ModuleOperator(t.source_, t.target_, std::move(b), Unchecked{});
  }
  friend ModuleOperator operator*(Complex c, const ModuleOperator& t) {
    Blocks b;
    for (const auto& m : t.blocks_) b.push_back(c * m);
    return ModuleOperator(t.source_, t.target_, std::move(b), Unchecked{});
  }

  /// Largest operator-norm distance to another operator with the same shape.
  double distance(const ModuleOperator& u) const { return (*this - u).norm(); }

 private:
  friend ModuleOperator compose(const ModuleOperator& t, const ModuleOperator& u);
  struct Unchecked {};
  ModuleOperator(HilbertModule source, HilbertModule target, Blocks blocks, Unchecked)
      : source_(std::move(source)), target_(std::move(target)), blocks_(std::move(blocks)) {}

  static void check_parallel(const ModuleOperator& t, const ModuleOperator& u) {
    if (t.source_ != u.source_ || t.target_ != u.target_) throw StructuralError("operators act between different modules");
  }

  HilbertModule source_;
  HilbertModule target_;
  Blocks blocks_;
};

/// t o u: apply u first, then t.
inline ModuleOperator compose(const ModuleOperator& t, const ModuleOperator& u) {
  if (u.target() != t.source()) throw StructuralError("composition of operators with mismatched modules");
  Blocks b;
  for (std::size_t k = 0; k < t.flatten().size(); ++k) b.push_back(u.block(k) * t.block(k));
  return ModuleOperator(u.source(), t.target(), std::move(b), ModuleOperator::Unchecked{});
}

/// Functional calculus on a self-adjoint endomorphism of H; `inv` inverts on H
/// (the complement of H is not part of the spectrum).
inline ModuleOperator op_funcalc(const ModuleOperator& t, FuncKind kind, double tol = kDefaultTol) {
  if (!t.is_endomorphism()) throw StructuralError("functional calculus needs an endomorphism");
  const HilbertModule& h = t.source();
  const double scale = t.norm();
  if (kind == FuncKind::Inv && !h.is_free()) {
    // invert T + (I - P) and remove the shift again
    Blocks shifted;
    for (std::size_t k = 0; k < t.flatten().size(); ++k) {
      const Matrix& p = h.projection(k);
      shifted.push_back(t.block(k) + Matrix::Identity(p.rows(), p.cols()) - p);
    }
    Blocks inv = detail::hermitian_funcalc(shifted, kind, tol, scale);
    for (std::size_t k = 0; k < inv.size(); ++k) {
      const Matrix& p = h.projection(k);
      inv[k] -= Matrix::Identity(p.rows(), p.cols()) - p;
      inv[k] = p * inv[k] * p;
    }
    return ModuleOperator(h, h, std::move(inv));
  }
  return ModuleOperator(h, h, detail::hermitian_funcalc(t.flatten(), kind, tol, scale));
}

struct OperatorPolar {
  ModuleOperator isometry;  // V : source -> target
  ModuleOperator modulus;   // R = |T| on source
};

/// T = V o |T| with |T| = (T* T)^{1/2} and V a partial isometry with initial
/// space ran |T|.
inline OperatorPolar op_polar(const ModuleOperator& t, double tol = kDefaultTol) {
  // X M = X R_flat V_flat  <=>  M = R_flat V_flat, the left polar form of M;
  // obtained from the right polar form of M^*.
  const double cutoff = tol * t.norm();
  Blocks v, r;
  for (const auto& m : t.flatten()) {
    linalg::PolarFactors f = linalg::right_polar(m.adjoint(), cutoff);
    v.push_back(f.isometry.adjoint());
    r.push_back(f.modulus);
  }
  return {ModuleOperator(t.source(), t.target(), std::move(v)), ModuleOperator(t.source(), t.source(), std::move(r))};
}

/// Projection of the target onto the closure of ran T: the spectral projection
/// of T o T^* for eigenvalues above tol |T|^2.
inline ModuleOperator range_projection(const ModuleOperator& t, double tol = kDefaultTol) {
  const double scale = t.norm();
  const double cutoff = tol * scale * scale;
  Blocks out;
  for (const auto& m : t.flatten()) {
    linalg::Eigh e = linalg::eigh(m.adjoint() * m);
    out.push_back(linalg::spectral_apply(e, [cutoff](double l) { return l > cutoff ? Complex(1.0) : Complex(0.0); }));
  }
  return ModuleOperator(t.target(), t.target(), std::move(out));
}

struct OperatorReport {
  bool is_unitary = false;
  bool is_partial_isometry = false;
  bool is_projection = false;
  bool is_invertible = false;
  double unitary_defect = 0.0;           // max(|T*T - I|, |TT* - I|)
  double partial_isometry_defect = 0.0;  // |T T* T - T|
  double projection_defect = 0.0;        // |T^2 - T| + |T* - T|, infinite for non-endomorphisms
  double min_singular_value = 0.0;       // over the source summand, all blocks
};

inline OperatorReport op_predicates(const ModuleOperator& t, double tol = kDefaultTol) {
  OperatorReport r;
  const ModuleOperator ts = t.adjoint();
  const ModuleOperator id_s = ModuleOperator::identity(t.source());
  const ModuleOperator id_t = ModuleOperator::identity(t.target());
  r.unitary_defect = std::max(compose(ts, t).distance(id_s), compose(t, ts).distance(id_t));
  r.partial_isometry_defect = compose(t, compose(ts, t)).distance(t);
  if (t.is_endomorphism()) {
    ModuleOperator tt(t.source(), t.source(), t.flatten());
    r.projection_defect = compose(tt, tt).distance(tt) + ts.distance(t);
  } else {
    r.projection_defect = std::numeric_limits<double>::infinity();
  }
  double smin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k < t.flatten().size(); ++k) {
    const Eigen::Index rs = linalg::projection_rank(t.source().projection(k));
    const Eigen::Index rt = linalg::projection_rank(t.target().projection(k));
    if (rs == 0 && rt == 0) continue;
    any = true;
    if (rs != rt) {
      smin = 0.0;
      continue;
    }
    RealVector s = linalg::singular_values(t.block(k));
    smin = std::min(smin, s.size() >= rs ? s(rs - 1) : 0.0);
  }
  r.min_singular_value = any ? smin : 0.0;
  const double norm = t.norm();
  r.is_unitary = r.unitary_defect <= tol * (1.0 + norm);
  r.is_partial_isometry = r.partial_isometry_defect <= tol * (1.0 + norm);
  r.is_projection = r.projection_defect <= tol * (1.0 + norm);
  r.is_invertible = any && r.min_singular_value > tol * std::max(1.0, norm);
  return r;
}

/// Orthonormal bases of ker T inside the source summand, one matrix per block.
/// Columns are flattened coefficient rows v in C^{n d} with v M_k = 0.
inline std::vector<Matrix> kernel_basis(const ModuleOperator& t, double tol = kDefaultTol) {
  const double cutoff = tol * t.norm();
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < t.flatten().size(); ++k) {
    const Matrix& m = t.block(k);
    const Matrix& p = t.source().projection(k);
    // v M = 0 and v (I - P) = 0, written as column equations on v^T
    Matrix stacked(m.cols() + p.cols(), m.rows());
    stacked.topRows(m.cols()) = m.transpose();
    stacked.bottomRows(p.cols()) = (Matrix::Identity(p.rows(), p.cols()) - p).transpose();
    out.push_back(linalg::null_space(stacked, std::max(cutoff, 1e-12)));
  }
  return out;
}

}  // namespace mframe
