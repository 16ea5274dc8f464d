#pragma once

// Module frames {x_j} of a Hilbert A-module H = P(A^n), indexed by a finite
// set J, so the frame transform theta : H -> A^J, theta(x) = (<x, x_j>)_j,
// lands in a free module and every frame is standard.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mframe/modop.hpp"
#include "mframe/random.hpp"

namespace mframe {

struct FrameBounds {
  double lower = 0.0;  // C
  double upper = 0.0;  // D
  bool is_frame = false;
};

struct RieszReport {
  bool riesz = false;
  double worst_summand = 0.0;  // largest |a_j x_j| over kernel basis vectors
  /// Coefficients (a_j) of a kernel relation with some a_j x_j != 0.
  std::optional<std::vector<AlgElement>> witness;
};

namespace detail {

// Eigenvalues of a Hermitian block compressed to the range of p.
inline RealVector restricted_spectrum(const Matrix& f, const Matrix& p, bool free) {
  if (free) return linalg::eigh(f).values;
  Matrix q = linalg::projection_range_basis(p);
  if (q.cols() == 0) return RealVector(0);
  return linalg::eigh(q.adjoint() * f * q).values;
}

inline RieszReport riesz_check(const HilbertModule& h, const std::vector<ModuleVector>& elements,
                               const ModuleOperator& synthesis, double tol) {
  RieszReport out;
  out.riesz = true;
  const auto& a = h.algebra();
  double scale = 1.0;
  for (const auto& x : elements) scale = std::max(scale, module_norm(x));
  const std::vector<Matrix> ker = kernel_basis(synthesis, tol);
  const int count = static_cast<int>(elements.size());
  for (std::size_t k = 0; k < ker.size(); ++k) {
    const int d = a.dim(k);
    for (Eigen::Index c = 0; c < ker[k].cols(); ++c) {
      // coefficient row v; summand j is v_j X_j with v_j the j-th length-d slice
      const Matrix v = ker[k].col(c).transpose();
      double worst = 0.0;
      for (int j = 0; j < count; ++j) {
        const Matrix piece = v.middleCols(j * d, d) * elements[j].block(k);
        worst = std::max(worst, piece.norm());
      }
      out.worst_summand = std::max(out.worst_summand, worst);
      if (worst > tol * scale && !out.witness) {
        out.riesz = false;
        Eigen::Index row = 0, arg = 0;
        v.cwiseAbs().maxCoeff(&row, &arg);
        const Complex phase = std::abs(v(0, arg)) > 0 ? std::conj(v(0, arg)) / std::abs(v(0, arg)) : Complex(1.0);
        std::vector<AlgElement> coeffs;
        for (int j = 0; j < count; ++j) {
          Blocks b;
          for (std::size_t kk = 0; kk < a.block_count(); ++kk) b.push_back(Matrix::Zero(a.dim(kk), a.dim(kk)));
          b[k].row(0) = phase * v.middleCols(j * d, d);
          coeffs.emplace_back(a, std::move(b));
        }
        out.witness = std::move(coeffs);
      }
    }
  }
  return out;
}

}  // namespace detail

class Frame {
 public:
  Frame() = default;

  Frame(HilbertModule module, std::vector<ModuleVector> elements, double tol = kDefaultTol) {
    if (elements.empty()) throw StructuralError("a frame needs at least one element");
    for (std::size_t j = 0; j < elements.size(); ++j)
      if (elements[j].module() != module) throw StructuralError("frame element " + std::to_string(j) + " lies in another module");
    auto d = std::make_shared<Data>();
    d->module = std::move(module);
    d->elements = std::move(elements);
    d->tol = tol;
    build(*d);
    data_ = std::move(d);
  }

  /// Frame {T(e_j)} for an operator T : A^J -> H.
  static Frame from_synthesis(const ModuleOperator& synthesis, double tol = kDefaultTol) {
    std::vector<ModuleVector> xs;
    for (const auto& e : standard_basis(synthesis.source())) xs.push_back(synthesis(e));
    return Frame(synthesis.target(), std::move(xs), tol);
  }

  const HilbertModule& module() const { return data_->module; }
  const std::vector<ModuleVector>& elements() const { return data_->elements; }
  const ModuleVector& element(std::size_t j) const { return data_->elements[j]; }
  std::size_t size() const { return data_->elements.size(); }
  double tol() const { return data_->tol; }

  /// theta : H -> A^J.
  const ModuleOperator& transform() const { return data_->transform; }
  /// theta^* : A^J -> H, e_j |-> x_j.
  const ModuleOperator& synthesis() const { return data_->synthesis; }
  /// theta^* theta on H.
  const ModuleOperator& gram_operator() const { return data_->gram; }

  const FrameBounds& bounds() const { return data_->bounds; }
  bool is_frame() const { return data_->bounds.is_frame; }
  bool is_tight() const { return data_->tight; }
  bool is_normalized() const { return data_->normalized; }
  bool is_riesz() const { return data_->riesz.riesz; }
  const RieszReport& riesz_report() const { return data_->riesz; }

 private:
  struct Data {
    HilbertModule module;
    std::vector<ModuleVector> elements;
    double tol = kDefaultTol;
    ModuleOperator transform, synthesis, gram;
    FrameBounds bounds;
    bool tight = false, normalized = false;
    RieszReport riesz;
  };

  static void build(Data& d) {
    const auto& a = d.module.algebra();
    const int count = static_cast<int>(d.elements.size());
    const HilbertModule coeffs = HilbertModule::free(a, count);
    Blocks theta;
    for (std::size_t k = 0; k < a.block_count(); ++k) {
      const int dk = a.dim(k);
      Matrix m(d.module.rank() * dk, count * dk);
      for (int j = 0; j < count; ++j) m.middleCols(j * dk, dk) = d.elements[j].block(k).adjoint();
      theta.push_back(std::move(m));
    }
    d.transform = ModuleOperator(d.module, coeffs, std::move(theta));
    d.synthesis = d.transform.adjoint();
    d.gram = compose(d.synthesis, d.transform);

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < a.block_count(); ++k) {
      RealVector s = detail::restricted_spectrum(d.gram.block(k), d.module.projection(k), d.module.is_free());
      if (s.size() == 0) continue;
      any = true;
      lo = std::min(lo, s(0));
      hi = std::max(hi, s(s.size() - 1));
    }
    if (!any) lo = hi = 0.0;
    lo = std::max(lo, 0.0);
    d.bounds = {lo, hi, any && hi > 0.0 && lo > d.tol * hi};
    d.tight = d.bounds.is_frame && (hi - lo) <= d.tol * (1.0 + hi);
    d.normalized = d.bounds.is_frame && std::abs(lo - 1.0) <= d.tol && std::abs(hi - 1.0) <= d.tol;
    d.riesz = detail::riesz_check(d.module, d.elements, d.synthesis, d.tol);
  }

  std::shared_ptr<const Data> data_;
};

inline const ModuleOperator& frame_transform(const Frame& f) { return f.transform(); }
inline const FrameBounds& optimal_bounds(const Frame& f) { return f.bounds(); }

struct FrameCheck {
  bool pass = false;
  bool operator_pass = false;  // F - C P >= 0 and D P - F >= 0 on H
  bool sample_pass = false;    // A-valued inequality at random x
  double worst_violation = 0.0;
  int samples = 0;
};

/// Random vector of H: the projection of a Gaussian coefficient row.
inline ModuleVector random_vector(const HilbertModule& h, Rng& rng) {
  Blocks raw;
  for (std::size_t k = 0; k < h.algebra().block_count(); ++k) {
    const int d = h.algebra().dim(k);
    raw.push_back(rng.gaussian_matrix(d, h.rank() * d));
  }
  return ModuleVector::project(h, raw);
}

/// Checks C <x,x> <= sum_j <x,x_j><x_j,x> <= D <x,x> as operator inequalities
/// on H and as A-valued inequalities at `samples` random vectors.
inline FrameCheck verify_frame(const Frame& f, double lower, double upper, double tol = kDefaultTol,
                               std::uint64_t seed = 0, int samples = 50) {
  FrameCheck out;
  const double slack = tol * std::max(1.0, upper);
  const HilbertModule& h = f.module();
  double worst = 0.0;
  for (std::size_t k = 0; k < h.algebra().block_count(); ++k) {
    const Matrix& g = f.gram_operator().block(k);
    const Matrix& p = h.projection(k);
    RealVector lo = detail::restricted_spectrum(g - lower * p, p, h.is_free());
    RealVector hi = detail::restricted_spectrum(upper * p - g, p, h.is_free());
    if (lo.size() > 0) worst = std::min(worst, lo(0));
    if (hi.size() > 0) worst = std::min(worst, hi(0));
  }
  out.operator_pass = worst >= -slack;

  Rng rng(seed);
  out.sample_pass = true;
  for (int s = 0; s < samples; ++s) {
    const ModuleVector x = random_vector(h, rng);
    const AlgElement xx = inner(x, x);
    AlgElement sum = AlgElement::zero(h.algebra());
    for (const auto& xj : f.elements()) {
      const AlgElement c = inner(x, xj);
      sum = sum + c * c.adjoint();
    }
    const AlgElement low_gap = sum - Complex(lower) * xx;
    const AlgElement high_gap = Complex(upper) * xx - sum;
    for (const AlgElement* gap : {&low_gap, &high_gap}) {
      if (!is_positive(*gap, tol * std::max(1.0, upper))) out.sample_pass = false;
      for (const auto& b : gap->blocks()) {
        RealVector ev = linalg::eigh(b).values;
        if (ev.size() > 0) worst = std::min(worst, ev(0) / (1.0 + xx.norm()));
      }
    }
  }
  out.samples = samples;
  out.worst_violation = -worst;
  out.pass = out.operator_pass && out.sample_pass;
  return out;
}

/// S = (theta^* theta)^{-1} on H.
inline ModuleOperator frame_operator(const Frame& f, double tol = kDefaultTol) {
  if (!f.is_frame())
    throw PreconditionError("not a frame: optimal lower bound " + std::to_string(f.bounds().lower), f.bounds().lower);
  return op_funcalc(f.gram_operator(), FuncKind::Inv, tol);
}

inline Frame transform_frame(const ModuleOperator& t, const Frame& f, double tol = kDefaultTol);

/// {S x_j}.
inline Frame canonical_dual(const Frame& f, double tol = kDefaultTol) {
  return transform_frame(frame_operator(f, tol), f, f.tol());
}

struct Reconstruction {
  ModuleVector value;
  double residual = 0.0;  // |x - value|
};

/// sum_j <x, y_j> x_j.
inline Reconstruction reconstruct(const Frame& f, const Frame& dual, const ModuleVector& x) {
  if (f.size() != dual.size()) throw StructuralError("frame and dual have different index counts");
  if (f.module() != dual.module() || x.module() != f.module()) throw StructuralError("module mismatch in reconstruction");
  ModuleVector acc = ModuleVector::zero(f.module());
  for (std::size_t j = 0; j < f.size(); ++j) acc = acc + module_action(inner(x, dual.element(j)), f.element(j));
  return {acc, module_norm(x - acc)};
}

/// y_j = S x_j + R (I - P) e_j with P the projection onto ran theta and
/// R : A^J -> H arbitrary.
inline Frame alternate_dual(const Frame& f, const ModuleOperator& r, double tol = kDefaultTol) {
  const HilbertModule coeffs = f.transform().target();
  if (r.source() != coeffs || r.target() != f.module())
    throw StructuralError("alternate dual operator must map A^J into the frame's module");
  const ModuleOperator s = frame_operator(f, tol);
  const ModuleOperator p = range_projection(f.transform(), tol);
  const ModuleOperator comp = compose(r, ModuleOperator::identity(coeffs) - p);
  std::vector<ModuleVector> ys;
  const auto basis = standard_basis(coeffs);
  for (std::size_t j = 0; j < f.size(); ++j) ys.push_back(s(f.element(j)) + comp(basis[j]));
  return Frame(f.module(), std::move(ys), f.tol());
}

/// sum_j <x,y_j><y_j,x> - sum_j <x,S x_j><S x_j,x>; positive for every dual y.
inline AlgElement dual_quadratic_gap(const Frame& f, const Frame& dual, const ModuleVector& x, double tol = kDefaultTol) {
  const Frame canon = canonical_dual(f, tol);
  AlgElement gap = AlgElement::zero(f.module().algebra());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const AlgElement a = inner(x, dual.element(j));
    const AlgElement b = inner(x, canon.element(j));
    gap = gap + a * a.adjoint() - b * b.adjoint();
  }
  return gap;
}

/// Riesz test by summand-wise annihilation of every relation sum_j a_j x_j = 0.
inline RieszReport is_riesz_basis(const Frame& f, double tol = kDefaultTol) {
  return detail::riesz_check(f.module(), f.elements(), f.synthesis(), tol);
}

enum class SimilarityKind { UnitarilyEquivalent, Similar, None };

inline const char* to_string(SimilarityKind k) {
  switch (k) {
    case SimilarityKind::UnitarilyEquivalent: return "unitarily_equivalent";
    case SimilarityKind::Similar: return "similar";
    case SimilarityKind::None: return "none";
  }
  return "?";
}

struct SimilarityReport {
  SimilarityKind kind = SimilarityKind::None;
  std::optional<ModuleOperator> map;  // T with T(x_j) = y_j
  double range_gap = 0.0;             // |P_x - P_y|
  double kernel_gap = 0.0;            // distance of the synthesis kernels
  bool kernels_agree = false;
  double map_residual = 0.0;          // max_j |T x_j - y_j|
};

/// Frames with the same index count are similar iff their transforms have the
/// same range; then T = theta_y^* theta_x S_x.
inline SimilarityReport similarity(const Frame& x, const Frame& y, double tol = kDefaultTol) {
  if (x.size() != y.size()) throw StructuralError("similarity needs equal index counts");
  SimilarityReport out;
  const ModuleOperator px = range_projection(x.transform(), tol);
  const ModuleOperator py = range_projection(y.transform(), tol);
  out.range_gap = px.distance(py);

  const std::vector<Matrix> kx = kernel_basis(x.synthesis(), tol);
  const std::vector<Matrix> ky = kernel_basis(y.synthesis(), tol);
  for (std::size_t k = 0; k < kx.size(); ++k) {
    if (kx[k].cols() != ky[k].cols()) {
      out.kernel_gap = std::max(out.kernel_gap, 1.0);
      continue;
    }
    const Matrix diff = kx[k] * kx[k].adjoint() - ky[k] * ky[k].adjoint();
    out.kernel_gap = std::max(out.kernel_gap, linalg::spectral_norm(diff));
  }
  const double gap_tol = std::sqrt(tol);
  out.kernels_agree = out.kernel_gap <= gap_tol;

  if (out.range_gap > gap_tol || !x.is_frame() || !y.is_frame()) return out;
  const ModuleOperator t = compose(y.synthesis(), compose(x.transform(), frame_operator(x, tol)));
  for (std::size_t j = 0; j < x.size(); ++j)
    out.map_residual = std::max(out.map_residual, module_norm(t(x.element(j)) - y.element(j)));
  const OperatorReport rep = op_predicates(t, tol);
  out.kind = rep.unitary_defect <= std::sqrt(tol) ? SimilarityKind::UnitarilyEquivalent : SimilarityKind::Similar;
  out.map = t;
  return out;
}

/// {V e_j} is a normalized tight frame of ran V.
inline Frame frame_from_partial_isometry(const ModuleOperator& v, double tol = kDefaultTol) {
  const OperatorReport rep = op_predicates(v, tol);
  if (!rep.is_partial_isometry)
    throw PreconditionError("operator is not a partial isometry (defect " + std::to_string(rep.partial_isometry_defect) + ")",
                            rep.partial_isometry_defect);
  const ModuleOperator p = range_projection(v, tol);
  const HilbertModule image(v.target().algebra(), v.target().rank(), p.flatten());
  std::vector<ModuleVector> xs;
  for (const auto& e : standard_basis(v.source())) xs.push_back(ModuleVector(image, v(e).blocks()));
  return Frame(image, std::move(xs), tol);
}

/// {T x_j} in the target module of T.
inline Frame transform_frame(const ModuleOperator& t, const Frame& f, double tol) {
  if (t.source() != f.module()) throw StructuralError("operator source differs from the frame's module");
  std::vector<ModuleVector> ys;
  for (const auto& x : f.elements()) ys.push_back(t(x));
  return Frame(t.target(), std::move(ys), tol);
}

}  // namespace mframe
