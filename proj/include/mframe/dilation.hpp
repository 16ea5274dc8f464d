#pragma once

// Direct and inner sums, complements inside A^J, and orthogonal Hilbert basis
// certificates. A complement of a frame of H with J elements is always
// realized in (I - P)(A^J), P being the range projection of its transform.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mframe/frames.hpp"

namespace mframe {

/// H + K with block-diagonal projection.
inline HilbertModule direct_sum(const HilbertModule& a, const HilbertModule& b) {
  if (!(a.algebra() == b.algebra())) throw StructuralError("direct sum of modules over different algebras");
  if (a.is_free() && b.is_free()) return HilbertModule(a.algebra(), a.rank() + b.rank());
  const auto& alg = a.algebra();
  Blocks p;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const int d = alg.dim(k), na = a.rank() * d, nb = b.rank() * d;
    Matrix m = Matrix::Zero(na + nb, na + nb);
    m.topLeftCorner(na, na) = a.projection(k);
    m.bottomRightCorner(nb, nb) = b.projection(k);
    p.push_back(std::move(m));
  }
  return HilbertModule(alg, a.rank() + b.rank(), std::move(p));
}

/// x + y as a vector of the direct sum.
inline ModuleVector concat(const HilbertModule& sum, const ModuleVector& x, const ModuleVector& y) {
  Blocks b;
  for (std::size_t k = 0; k < x.blocks().size(); ++k) {
    Matrix m(x.block(k).rows(), x.block(k).cols() + y.block(k).cols());
    m << x.block(k), y.block(k);
    b.push_back(std::move(m));
  }
  return ModuleVector(sum, std::move(b));
}

/// {x_j + y_j} in H + K.
inline Frame inner_sum(const Frame& x, const Frame& y) {
  if (x.size() != y.size())
    throw StructuralError("inner sum needs equal index counts (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  const HilbertModule sum = direct_sum(x.module(), y.module());
  std::vector<ModuleVector> elems;
  for (std::size_t j = 0; j < x.size(); ++j) elems.push_back(concat(sum, x.element(j), y.element(j)));
  return Frame(sum, std::move(elems), x.tol());
}

/// Drops coordinates beyond the rank of h: the inverse of inner_sum on the
/// first summand.
inline Frame compress(const Frame& dilated, const HilbertModule& h) {
  if (h.rank() > dilated.module().rank()) throw StructuralError("compression target is larger than the dilated module");
  std::vector<ModuleVector> xs;
  for (const auto& b : dilated.elements()) {
    Blocks blocks;
    for (std::size_t k = 0; k < b.blocks().size(); ++k) {
      const int d = h.algebra().dim(k);
      blocks.push_back(b.block(k).leftCols(h.rank() * d));
    }
    xs.emplace_back(h, std::move(blocks));
  }
  return Frame(h, std::move(xs), dilated.tol());
}

struct BasisCertificate {
  bool pass = false;
  bool unit_norms = false;            // every <b_j, b_j> = 1_A
  double orthogonality_defect = 0.0;  // max_{j != k} |<b_j, b_k>|
  double idempotency_defect = 0.0;    // max_j |<b_j,b_j>^2 - <b_j,b_j>| + Hermitian defect
  double unit_defect = 0.0;           // max_j |<b_j,b_j> - 1|
  double generation_defect = 0.0;     // |range(theta^*) - P_H|
  double reconstruction_residual = 0.0;
};

/// Orthogonal Hilbert basis with idempotent self-inner products.
inline BasisCertificate verify_orthogonal_hilbert_basis(const Frame& f, double tol = kDefaultTol) {
  BasisCertificate c;
  const auto& a = f.module().algebra();
  const AlgElement one = AlgElement::unit(a);
  double scale = 1.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const AlgElement g = inner(f.element(j), f.element(j));
    scale = std::max(scale, g.norm());
    double herm = 0.0;
    for (const auto& m : g.blocks()) herm = std::max(herm, linalg::spectral_norm(m - m.adjoint()));
    c.idempotency_defect = std::max(c.idempotency_defect, (g * g - g).norm() + herm);
    c.unit_defect = std::max(c.unit_defect, (g - one).norm());
    for (std::size_t k = j + 1; k < f.size(); ++k)
      c.orthogonality_defect = std::max(c.orthogonality_defect, inner(f.element(j), f.element(k)).norm());
  }
  c.generation_defect = range_projection(f.synthesis(), tol).distance(ModuleOperator::identity(f.module()));
  for (const auto& e : standard_basis(f.module()))
    c.reconstruction_residual = std::max(c.reconstruction_residual, reconstruct(f, f, e).residual);
  const double t = tol * (1.0 + scale);
  c.unit_norms = c.unit_defect <= t;
  c.pass = c.orthogonality_defect <= t && c.idempotency_defect <= t && c.generation_defect <= t &&
           c.reconstruction_residual <= t;
  return c;
}

struct DilationResult {
  HilbertModule complement_module;  // (I - P)(A^J)
  Frame complement_frame;
  Frame dilated_basis;              // {x_j + y_j} on H + M
  BasisCertificate basis;           // orthogonal Hilbert basis checks
  RieszReport riesz;
  FrameBounds bounds;               // optimal bounds of the dilated basis
  double scale = 1.0;               // y_j = scale (I - P) e_j
};

namespace detail {

inline DilationResult dilate(const Frame& f, double scale, double tol) {
  const HilbertModule coeffs = f.transform().target();
  const ModuleOperator p = range_projection(f.transform(), tol);
  // I - P snapped to an exact projection, so an empty complement is exactly zero
  const ModuleOperator raw = ModuleOperator::identity(coeffs) - p;
  Blocks qb;
  for (const auto& b : raw.flatten())
    qb.push_back(linalg::spectral_apply(linalg::eigh(linalg::hermitian_part(b)), [](double l) { return Complex(l > 0.5 ? 1.0 : 0.0); }));
  const ModuleOperator q(coeffs, coeffs, std::move(qb));
  const HilbertModule m(coeffs.algebra(), coeffs.rank(), q.flatten(), std::sqrt(tol));
  std::vector<ModuleVector> ys;
  for (const auto& e : standard_basis(coeffs)) ys.push_back(ModuleVector(m, (Complex(scale) * q(e)).blocks()));
  DilationResult r;
  r.complement_module = m;
  r.complement_frame = Frame(m, std::move(ys), f.tol());
  r.dilated_basis = inner_sum(f, r.complement_frame);
  r.basis = verify_orthogonal_hilbert_basis(r.dilated_basis, tol);
  r.riesz = r.dilated_basis.riesz_report();
  r.bounds = r.dilated_basis.bounds();
  r.scale = scale;
  return r;
}

}  // namespace detail

/// Complement of a normalized tight frame; the inner sum is an orthogonal
/// Hilbert basis of H + M.
inline DilationResult tight_complement(const Frame& f, double tol = kDefaultTol) {
  if (!f.is_normalized()) {
    const double defect = std::max(std::abs(f.bounds().lower - 1.0), std::abs(f.bounds().upper - 1.0));
    throw PreconditionError("frame is not normalized tight (bounds " + std::to_string(f.bounds().lower) + ", " +
                                std::to_string(f.bounds().upper) + ")",
                            defect);
  }
  return detail::dilate(f, 1.0, tol);
}

/// Complement of a frame making the inner sum a Riesz basis with the same
/// optimal bounds. The complement is scaled by s with s^2 the point of
/// [C, D] closest to 1, so tight inputs reduce to tight_complement.
inline DilationResult riesz_complement(const Frame& f, double tol = kDefaultTol) {
  if (!f.is_frame())
    throw PreconditionError("not a frame: optimal lower bound " + std::to_string(f.bounds().lower), f.bounds().lower);
  const double s2 = std::clamp(1.0, f.bounds().lower, f.bounds().upper);
  return detail::dilate(f, std::sqrt(s2), tol);
}

struct UniquenessResult {
  ModuleOperator unitary;  // U : M -> N with U(y_j) = z_j
  double map_residual = 0.0;
  double unitary_defect = 0.0;
  double norm_gap = 0.0;  // max_j |<y_j,y_j> - <z_j,z_j>|
};

/// Unitary between two complements Y, Z of the same frame X. Hypotheses are
/// checked in order; the first failure raises a precondition error naming it.
/// Returns nothing when the constructed map is not unitary within tol.
inline std::optional<UniquenessResult> complement_uniqueness_unitary(const Frame& x, const Frame& y, const Frame& z,
                                                                     double tol = kDefaultTol) {
  if (x.size() != y.size() || x.size() != z.size()) throw StructuralError("frames have different index counts");
  const BasisCertificate cy = verify_orthogonal_hilbert_basis(inner_sum(x, y), tol);
  if (!cy.pass) throw PreconditionError("x + y is not an orthogonal Hilbert basis", cy.orthogonality_defect + cy.generation_defect);
  const BasisCertificate cz = verify_orthogonal_hilbert_basis(inner_sum(x, z), tol);
  if (!cz.pass) throw PreconditionError("x + z is not an orthogonal Hilbert basis", cz.orthogonality_defect + cz.generation_defect);
  UniquenessResult r;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const AlgElement gy = inner(y.element(j), y.element(j));
    const AlgElement gz = inner(z.element(j), z.element(j));
    const double gap = (gy - gz).norm();
    r.norm_gap = std::max(r.norm_gap, gap);
    if (gap > tol * (1.0 + gy.norm()))
      throw PreconditionError("<y_j,y_j> differs from <z_j,z_j> at j = " + std::to_string(j), gap);
  }
  // theta_z^* theta_y pinv(F_y); on an empty complement this is the zero map
  const ModuleOperator sy = op_funcalc(y.gram_operator(), FuncKind::Pinv, tol);
  r.unitary = compose(z.synthesis(), compose(y.transform(), sy));
  for (std::size_t j = 0; j < y.size(); ++j)
    r.map_residual = std::max(r.map_residual, module_norm(r.unitary(y.element(j)) - z.element(j)));
  r.unitary_defect = op_predicates(r.unitary, tol).unitary_defect;
  const double t = std::sqrt(tol);
  if (r.unitary_defect > t || r.map_residual > t) return std::nullopt;
  return r;
}

}  // namespace mframe
