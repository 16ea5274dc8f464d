#pragma once

// Operator and frame decompositions into unitaries, partial isometries,
// orthonormal bases and Riesz bases. Every result carries its recombination
// residual so callers can certify it.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mframe/dilation.hpp"

namespace mframe {

struct DecompositionPart {
  std::string label;
  ModuleOperator op;
  OperatorReport report;
};

/// input = scalar * (sum of parts), up to residual.
struct Decomposition {
  Complex scalar{1.0};
  std::vector<DecompositionPart> parts;
  double residual = 0.0;
  double input_norm = 0.0;

  ModuleOperator recombine() const {
    ModuleOperator acc = parts.at(0).op;
    for (std::size_t i = 1; i < parts.size(); ++i) acc = acc + parts[i].op;
    return scalar * acc;
  }
};

namespace detail {

inline Decomposition finish(const ModuleOperator& t, Complex scalar,
                            std::vector<std::pair<std::string, ModuleOperator>> parts, double tol) {
  Decomposition d;
  d.scalar = scalar;
  for (auto& [label, op] : parts) {
    OperatorReport rep = op_predicates(op, tol);
    d.parts.push_back({std::move(label), std::move(op), rep});
  }
  d.input_norm = t.norm();
  d.residual = d.recombine().distance(t);
  return d;
}

inline void require_full_endomorphism(const ModuleOperator& t, const char* what) {
  if (!t.is_endomorphism() || !t.source().is_free())
    throw PreconditionError(std::string(what) + " needs an operator on a free module A^n", 0.0);
}

// |a| +- i (P - |a|^2)^{1/2} for a positive contraction |a| on h.
inline std::pair<ModuleOperator, ModuleOperator> unitary_pair(const ModuleOperator& modulus, double tol) {
  const HilbertModule& h = modulus.source();
  const ModuleOperator id = ModuleOperator::identity(h);
  ModuleOperator gap = id - compose(modulus, modulus);
  // symmetrize before the square root; rounding leaves tiny skew parts
  gap = Complex(0.5) * (gap + gap.adjoint());
  // eigenvalues of I - |T|^2 at rounding level are zeros; their square roots
  // would otherwise show up as sqrt(eps) noise in both unitaries
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + gap.norm());
  Blocks roots;
  for (const auto& m : gap.flatten()) {
    const linalg::Eigh e = linalg::eigh(m);
    if (e.values.size() > 0 && e.values(0) < -tol * (1.0 + gap.norm()))
      throw DomainError("modulus is not a contraction (I - |T|^2 has eigenvalue " + std::to_string(e.values(0)) + ")");
    roots.push_back(linalg::spectral_apply(e, [floor](double l) { return Complex(l <= floor ? 0.0 : std::sqrt(l)); }));
  }
  const ModuleOperator root(h, h, std::move(roots));
  const Complex i(0.0, 1.0);
  return {modulus + i * root, modulus - i * root};
}

}  // namespace detail

/// T = lambda (V U + V U^* - I) with lambda = (1 + eps) |T|, from the polar
/// form T' = V |T'| of T' = I/2 + T / (2 lambda) and U = |T'| + i (I - |T'|^2)^{1/2}.
inline Decomposition three_unitaries(const ModuleOperator& t, double eps, double tol = kDefaultTol) {
  if (!(eps > 0.0)) throw DomainError("three_unitaries needs eps > 0");
  detail::require_full_endomorphism(t, "three_unitaries");
  const HilbertModule& h = t.source();
  const ModuleOperator id = ModuleOperator::identity(h);
  const double norm = t.norm();
  if (norm == 0.0) {
    const Complex w = std::polar(1.0, std::numbers::pi / 3.0);
    return detail::finish(t, eps, {{"U1", ModuleOperator::scalar(h, w)}, {"U2", ModuleOperator::scalar(h, std::conj(w))}, {"U3", Complex(-1.0) * id}}, tol);
  }
  const double lambda = (1.0 + eps) * norm;
  const ModuleOperator tp = Complex(0.5) * id + Complex(1.0 / (2.0 * lambda)) * t;
  const OperatorPolar pol = op_polar(tp, tol);
  const auto [u, us] = detail::unitary_pair(pol.modulus, tol);
  return detail::finish(t, lambda, {{"U1", compose(pol.isometry, u)}, {"U2", compose(pol.isometry, us)}, {"U3", Complex(-1.0) * id}}, tol);
}

/// T = (|T|/2)(W1 + W2) with W_{1,2} = V(|T^| +- i(I - |T^|^2)^{1/2}), T^ = T/|T|.
/// T must map onto its target module.
inline Decomposition two_partial_isometries(const ModuleOperator& t, double tol = kDefaultTol) {
  const double norm = t.norm();
  const ModuleOperator range = norm > 0.0 ? range_projection(t, tol) : ModuleOperator::zero(t.target(), t.target());
  const double range_defect = range.distance(ModuleOperator::identity(t.target()));
  if (range_defect > tol * (1.0 + norm))
    throw PreconditionError("operator is not surjective onto its target (range defect " + std::to_string(range_defect) + ")",
                            range_defect);
  if (norm == 0.0) return detail::finish(t, 0.0, {{"W1", t}, {"W2", t}}, tol);
  const ModuleOperator unit = Complex(1.0 / norm) * t;
  const OperatorPolar pol = op_polar(unit, tol);
  const auto [up, um] = detail::unitary_pair(pol.modulus, tol);
  return detail::finish(t, norm / 2.0, {{"W1", compose(pol.isometry, up)}, {"W2", compose(pol.isometry, um)}}, tol);
}

struct TwoTightResult {
  double mu = 0.0;  // x_j = mu (a_j + b_j)
  Frame a, b;
  Decomposition decomposition;  // of theta^*
  double residual = 0.0;        // max_j |x_j - mu (a_j + b_j)|
};

/// Every frame is a multiple of the sum of two normalized tight frames.
inline TwoTightResult frame_two_tight(const Frame& f, double tol = kDefaultTol) {
  if (!f.is_frame())
    throw PreconditionError("not a frame: optimal lower bound " + std::to_string(f.bounds().lower), f.bounds().lower);
  TwoTightResult r;
  r.decomposition = two_partial_isometries(f.synthesis(), tol);
  r.mu = r.decomposition.scalar.real();
  r.a = Frame::from_synthesis(r.decomposition.parts[0].op, f.tol());
  r.b = Frame::from_synthesis(r.decomposition.parts[1].op, f.tol());
  for (std::size_t j = 0; j < f.size(); ++j)
    r.residual = std::max(r.residual, module_norm(f.element(j) - Complex(r.mu) * (r.a.element(j) + r.b.element(j))));
  return r;
}

/// T = (|T|/2)(U1 + U2) with unitaries U_i when T is invertible; nothing otherwise.
inline std::optional<Decomposition> two_unitaries_iff_invertible(const ModuleOperator& t, double tol = kDefaultTol) {
  if (!op_predicates(t, tol).is_invertible) return std::nullopt;
  Decomposition d = two_partial_isometries(t, tol);
  d.parts[0].label = "U1";
  d.parts[1].label = "U2";
  return d;
}

struct TwoOnbResult {
  double mu = 0.0;  // x_j = mu (f_j + g_j)
  Frame onb1, onb2;
  BasisCertificate cert1, cert2;
  Decomposition decomposition;
  double residual = 0.0;
};

/// Square frames of A^n that are Riesz bases split into two orthonormal
/// bases; nothing is returned for any other input.
inline std::optional<TwoOnbResult> riesz_two_onb(const Frame& f, double tol = kDefaultTol) {
  if (!f.module().is_free() || static_cast<int>(f.size()) != f.module().rank() || !f.is_riesz()) return std::nullopt;
  std::optional<Decomposition> d = two_unitaries_iff_invertible(f.synthesis(), tol);
  if (!d) return std::nullopt;
  TwoOnbResult r;
  r.mu = d->scalar.real();
  r.onb1 = Frame::from_synthesis(d->parts[0].op, f.tol());
  r.onb2 = Frame::from_synthesis(d->parts[1].op, f.tol());
  r.cert1 = verify_orthogonal_hilbert_basis(r.onb1, tol);
  r.cert2 = verify_orthogonal_hilbert_basis(r.onb2, tol);
  for (std::size_t j = 0; j < f.size(); ++j)
    r.residual = std::max(r.residual, module_norm(f.element(j) - Complex(r.mu) * (r.onb1.element(j) + r.onb2.element(j))));
  r.decomposition = std::move(*d);
  return r;
}

struct ThreeOnbResult {
  double c = 0.0;  // x_j = c (f_j + g_j + h_j) with h_j = -e_j
  Frame onb1, onb2, onb3;
  Decomposition decomposition;
  double residual = 0.0;
  double synthesis_norm = 0.0;  // |theta^*| = sqrt(D)
  double upper_bound = 0.0;     // D
};

/// Square frames of A^N as a multiple of the sum of three orthonormal bases.
inline ThreeOnbResult frame_three_onb(const Frame& f, double eps, double tol = kDefaultTol) {
  if (!f.module().is_free() || static_cast<int>(f.size()) != f.module().rank())
    throw PreconditionError("frame_three_onb needs |J| = N elements in A^N (got " + std::to_string(f.size()) +
                                " in rank " + std::to_string(f.module().rank()) + ")",
                            std::abs(static_cast<double>(f.size()) - f.module().rank()));
  ThreeOnbResult r;
  r.decomposition = three_unitaries(f.synthesis(), eps, tol);
  r.c = r.decomposition.scalar.real();
  r.onb1 = Frame::from_synthesis(r.decomposition.parts[0].op, f.tol());
  r.onb2 = Frame::from_synthesis(r.decomposition.parts[1].op, f.tol());
  r.onb3 = Frame::from_synthesis(r.decomposition.parts[2].op, f.tol());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const ModuleVector sum = r.onb1.element(j) + r.onb2.element(j) + r.onb3.element(j);
    r.residual = std::max(r.residual, module_norm(f.element(j) - Complex(r.c) * sum));
  }
  r.synthesis_norm = f.synthesis().norm();
  r.upper_bound = f.bounds().upper;
  return r;
}

struct HalfSumResult {
  Frame onb_f, onb_g;       // bases (or Riesz bases) of A^J
  ModuleOperator dilation;  // 2P - I, or the dilated operator for general frames
  double residual = 0.0;    // max_j |theta(h_j) - (f_j + g_j)/2|
  BasisCertificate cert_f, cert_g;
  RieszReport riesz_f, riesz_g;
};

/// For a normalized tight frame, theta(h_j) = (e_j + (2P - I) e_j)/2.
inline HalfSumResult tight_half_sum(const Frame& f, double tol = kDefaultTol) {
  if (!f.is_normalized())
    throw PreconditionError("frame is not normalized tight", std::abs(f.bounds().upper - 1.0) + std::abs(f.bounds().lower - 1.0));
  const HilbertModule coeffs = f.transform().target();
  const ModuleOperator id = ModuleOperator::identity(coeffs);
  const ModuleOperator p = range_projection(f.transform(), tol);
  HalfSumResult r;
  r.dilation = Complex(2.0) * p - id;
  const auto basis = standard_basis(coeffs);
  std::vector<ModuleVector> fs, gs;
  for (const auto& e : basis) {
    fs.push_back(e);
    gs.push_back(r.dilation(e));
  }
  r.onb_f = Frame(coeffs, std::move(fs), f.tol());
  r.onb_g = Frame(coeffs, std::move(gs), f.tol());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const ModuleVector half = Complex(0.5) * (r.onb_f.element(j) + r.onb_g.element(j));
    r.residual = std::max(r.residual, module_norm(f.transform()(f.element(j)) - half));
  }
  r.cert_f = verify_orthogonal_hilbert_basis(r.onb_f, tol);
  r.cert_g = verify_orthogonal_hilbert_basis(r.onb_g, tol);
  r.riesz_f = r.onb_f.riesz_report();
  r.riesz_g = r.onb_g.riesz_report();
  return r;
}

/// General frames: x_j = T(h_j) with h_j = S^{1/2} x_j normalized tight and
/// T = F^{1/2}. With theta' the transform of {h_j} and P its range
/// projection, T~ = theta' T theta'^* + (I - P) is invertible on A^J and
/// theta'(x_j) = (T~ f_j + T~ g_j)/2.
inline HalfSumResult frame_half_sum_riesz(const Frame& f, double tol = kDefaultTol) {
  const ModuleOperator s = frame_operator(f, tol);
  const ModuleOperator root_s = op_funcalc(s, FuncKind::Sqrt, tol);
  const ModuleOperator t = op_funcalc(f.gram_operator(), FuncKind::Sqrt, tol);
  const Frame snt = transform_frame(root_s, f, f.tol());
  const HalfSumResult base = tight_half_sum(snt, tol);
  const HilbertModule coeffs = snt.transform().target();
  const ModuleOperator p = range_projection(snt.transform(), tol);
  const ModuleOperator tt =
      compose(snt.transform(), compose(t, snt.synthesis())) + (ModuleOperator::identity(coeffs) - p);
  HalfSumResult r;
  r.dilation = tt;
  r.onb_f = transform_frame(tt, base.onb_f, f.tol());
  r.onb_g = transform_frame(tt, base.onb_g, f.tol());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const ModuleVector half = Complex(0.5) * (r.onb_f.element(j) + r.onb_g.element(j));
    r.residual = std::max(r.residual, module_norm(snt.transform()(f.element(j)) - half));
  }
  r.cert_f = verify_orthogonal_hilbert_basis(r.onb_f, tol);
  r.cert_g = verify_orthogonal_hilbert_basis(r.onb_g, tol);
  r.riesz_f = r.onb_f.riesz_report();
  r.riesz_g = r.onb_g.riesz_report();
  return r;
}

struct OnbRieszResult {
  double mu = 0.0;  // 2 |theta^*| / (1 - eps)
  double c = 0.5;   // shift, derived from the recombination
  Frame onb;        // W1 e_j
  Frame riesz;      // (W2 - c I) e_j
  double contraction = 0.0;  // |I - T'|
  double residual = 0.0;     // |theta^* - mu (W1 + W2 - c I)|
  double frame_residual = 0.0;
  OperatorReport w1, w2, shifted;
  BasisCertificate onb_cert;
  RieszReport riesz_report;
};

/// Square frames of A^N: 4T' = I + (1 - eps) theta^*/|theta^*| splits as
/// T' = (W1 + W2)/2 with W1 = V U, W2 = V U^* unitary, giving
/// theta^* = mu (W1 + W2 - c I).
inline OnbRieszResult frame_onb_plus_riesz(const Frame& f, double eps, double tol = kDefaultTol) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("frame_onb_plus_riesz needs 0 < eps < 1");
  if (!f.module().is_free() || static_cast<int>(f.size()) != f.module().rank())
    throw PreconditionError("frame_onb_plus_riesz needs |J| = N elements in A^N",
                            std::abs(static_cast<double>(f.size()) - f.module().rank()));
  const ModuleOperator& ts = f.synthesis();
  const double norm = ts.norm();
  if (norm == 0.0) throw PreconditionError("zero frame", 0.0);
  const HilbertModule& h = ts.source();
  const ModuleOperator id = ModuleOperator::identity(h);
  const ModuleOperator tsh(h, h, ts.flatten());
  const ModuleOperator tp = Complex(0.25) * (id + Complex((1.0 - eps) / norm) * tsh);
  OnbRieszResult r;
  r.contraction = (id - tp).norm();
  const OperatorPolar pol = op_polar(tp, tol);
  const auto [u, us] = detail::unitary_pair(pol.modulus, tol);
  const ModuleOperator w1 = compose(pol.isometry, u), w2 = compose(pol.isometry, us);
  r.mu = 2.0 * norm / (1.0 - eps);
  const ModuleOperator gap = w1 + w2 - Complex(1.0 / r.mu) * tsh;
  double trace = 0.0, dim = 0.0;
  for (const auto& m : gap.flatten()) {
    trace += m.trace().real();
    dim += static_cast<double>(m.rows());
  }
  r.c = trace / dim;
  const ModuleOperator shifted = w2 - Complex(r.c) * id;
  r.residual = (Complex(r.mu) * (w1 + shifted)).distance(tsh);
  r.w1 = op_predicates(w1, tol);
  r.w2 = op_predicates(w2, tol);
  r.shifted = op_predicates(shifted, tol);
  r.onb = Frame::from_synthesis(w1, f.tol());
  r.riesz = Frame::from_synthesis(shifted, f.tol());
  for (std::size_t j = 0; j < f.size(); ++j)
    r.frame_residual =
        std::max(r.frame_residual, module_norm(f.element(j) - Complex(r.mu) * (r.onb.element(j) + r.riesz.element(j))));
  r.onb_cert = verify_orthogonal_hilbert_basis(r.onb, tol);
  r.riesz_report = r.riesz.riesz_report();
  return r;
}

}  // namespace mframe
