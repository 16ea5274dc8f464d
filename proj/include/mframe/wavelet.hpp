#pragma once

// Sampled examples over commutative algebras C^m (functions on an m-point
// grid): the dyadic partition-of-unity frame on (0,1], the single-generator
// collapse, and bracket products of integer-translate systems.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mframe/frames.hpp"

namespace mframe {

namespace detail {

inline double cantor_g(double t) {
  if (t < 0.0 || t > 1.0) return 0.0;
  if (t <= 0.5) return 2.0 * t;
  return 2.0 * std::sqrt(t - t * t);
}

}  // namespace detail

/// f_n on (0,1]; n >= 1.
inline double cantor_element(int n, double t) {
  if (n == 1) return t >= 0.5 ? detail::cantor_g(t - 0.5) : 0.0;
  const double lo = std::ldexp(1.0, -n), mid = std::ldexp(1.0, -(n - 1)), hi = std::ldexp(1.0, -(n - 2));
  if (t >= lo && t <= mid) return detail::cantor_g(std::ldexp(t, n - 1) - 0.5);
  if (t > mid && t <= hi) return detail::cantor_g(std::ldexp(t, n - 2));
  return 0.0;
}

/// Grid t_i = i / 2^L, i = 1..2^L.
inline std::vector<double> dyadic_grid(int levels) {
  if (levels < 1) throw DomainError("levels must be at least 1");
  const std::int64_t m = std::int64_t{1} << levels;
  std::vector<double> t(static_cast<std::size_t>(m));
  for (std::int64_t i = 1; i <= m; ++i) t[static_cast<std::size_t>(i - 1)] = std::ldexp(static_cast<double>(i), -levels);
  return t;
}

/// Rank-one module over C^{2^L} from grid samples of a function.
inline ModuleVector sampled_vector(const HilbertModule& h, const std::vector<double>& values) {
  Blocks b;
  for (double v : values) b.push_back(Matrix::Constant(1, 1, Complex(v)));
  return ModuleVector(h, std::move(b));
}

/// {f_1, ..., f_{L+1}} on the dyadic grid: a normalized tight frame of
/// C^{2^L} since sum_n f_n^2 = 1 pointwise.
inline Frame cantor_frame(int levels, double tol = kDefaultTol) {
  const std::vector<double> grid = dyadic_grid(levels);
  const HilbertModule h(AlgebraDescriptor::diagonal(static_cast<int>(grid.size())), 1);
  std::vector<ModuleVector> xs;
  for (int n = 1; n <= levels + 1; ++n) {
    std::vector<double> v;
    for (double t : grid) v.push_back(cantor_element(n, t));
    xs.push_back(sampled_vector(h, v));
  }
  return Frame(h, std::move(xs), tol);
}

/// max_i |sum_n f_n(t_i)^2 - 1|.
inline double cantor_partition_defect(int levels) {
  double worst = 0.0;
  for (double t : dyadic_grid(levels)) {
    double s = 0.0;
    for (int n = 1; n <= levels + 1; ++n) s += cantor_element(n, t) * cantor_element(n, t);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

/// The one-element set {t} on the grid.
inline Frame single_generator_frame(int levels, double tol = kDefaultTol) {
  const std::vector<double> grid = dyadic_grid(levels);
  const HilbertModule h(AlgebraDescriptor::diagonal(static_cast<int>(grid.size())), 1);
  return Frame(h, {sampled_vector(h, grid)}, tol);
}

/// Optimal lower bound of {t}: min_i t_i^2 = 4^{-L}.
inline double single_generator_bound(int levels) { return single_generator_frame(levels).bounds().lower; }

/// Samples phi(start + k/m), k = 0..n-1, of a compactly supported function.
struct SampledFunction {
  int samples_per_unit = 1;
  std::int64_t support_start = 0;
  std::vector<Complex> samples;

  void validate() const {
    if (samples_per_unit < 1) throw StructuralError("samples_per_unit must be positive");
  }
};

/// Indicator of [a, b) for integers or multiples of 1/m.
inline SampledFunction indicator(int m, double a, double b) {
  SampledFunction f;
  f.samples_per_unit = m;
  f.support_start = static_cast<std::int64_t>(std::floor(a));
  const std::int64_t first = f.support_start * m;
  const std::int64_t last = static_cast<std::int64_t>(std::ceil(b * m));
  for (std::int64_t k = first; k < last; ++k) {
    const double t = static_cast<double>(k) / m;
    f.samples.emplace_back(t >= a && t < b ? 1.0 : 0.0);
  }
  return f;
}

/// m values on one period, an element of C^m.
struct PeriodizedElement {
  std::vector<Complex> values;

  AlgElement to_element() const {
    const AlgebraDescriptor a = AlgebraDescriptor::diagonal(static_cast<int>(values.size()));
    Blocks b;
    for (const Complex& v : values) b.push_back(Matrix::Constant(1, 1, v));
    return AlgElement(a, std::move(b));
  }
};

/// <phi, psi>(t) = sum_p conj(phi) psi (t - p), folded onto one period.
inline PeriodizedElement bracket(const SampledFunction& phi, const SampledFunction& psi) {
  phi.validate();
  psi.validate();
  if (phi.samples_per_unit != psi.samples_per_unit)
    throw StructuralError("bracket of functions on different grids (" + std::to_string(phi.samples_per_unit) + " vs " +
                          std::to_string(psi.samples_per_unit) + " samples per unit)");
  const std::int64_t m = phi.samples_per_unit;
  PeriodizedElement out{std::vector<Complex>(static_cast<std::size_t>(m), Complex(0.0))};
  const std::int64_t a0 = phi.support_start * m, b0 = psi.support_start * m;
  const std::int64_t a1 = a0 + static_cast<std::int64_t>(phi.samples.size());
  const std::int64_t b1 = b0 + static_cast<std::int64_t>(psi.samples.size());
  for (std::int64_t k = std::max(a0, b0); k < std::min(a1, b1); ++k) {
    const std::int64_t r = ((k % m) + m) % m;
    out.values[static_cast<std::size_t>(r)] +=
        std::conj(phi.samples[static_cast<std::size_t>(k - a0)]) * psi.samples[static_cast<std::size_t>(k - b0)];
  }
  return out;
}

/// Gram matrix G(t) = (<phi_i, phi_l>(t))_{il} at each grid point.
inline std::vector<Matrix> bracket_gram(const std::vector<SampledFunction>& gens) {
  if (gens.empty()) throw StructuralError("need at least one generator");
  const int m = gens[0].samples_per_unit;
  const int k = static_cast<int>(gens.size());
  std::vector<Matrix> g(static_cast<std::size_t>(m), Matrix::Zero(k, k));
  for (int i = 0; i < k; ++i)
    for (int l = 0; l < k; ++l) {
      const PeriodizedElement b = bracket(gens[i], gens[l]);
      // bracket is conjugate-linear in the first slot; G_il = <phi_i, phi_l>_A = conj(bracket(phi_i, phi_l))
      for (int t = 0; t < m; ++t) g[t](i, l) = std::conj(b.values[t]);
    }
  return g;
}

/// Translate system of k generators as a frame of B^k over B = C^m: the
/// generator phi_i becomes row i of G^{1/2}, so the frame operator is G.
inline Frame translates_to_module_frame(const std::vector<SampledFunction>& gens, double tol = kDefaultTol) {
  const std::vector<Matrix> g = bracket_gram(gens);
  const int m = static_cast<int>(g.size());
  const int k = static_cast<int>(gens.size());
  const HilbertModule h(AlgebraDescriptor::diagonal(m), k);
  std::vector<Matrix> roots;
  for (const auto& gt : g) {
    double scale = linalg::spectral_norm(gt);
    roots.push_back(detail::hermitian_funcalc({linalg::hermitian_part(gt)}, FuncKind::Sqrt, tol, scale)[0]);
  }
  std::vector<ModuleVector> xs;
  for (int i = 0; i < k; ++i) {
    Blocks b;
    for (int t = 0; t < m; ++t) b.push_back(roots[t].row(i));
    xs.emplace_back(h, std::move(b));
  }
  return Frame(h, std::move(xs), tol);
}

}  // namespace mframe
