#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "mframe/mframe.hpp"

namespace support {

using namespace mframe;

inline const AlgebraDescriptor& scalars() {
  static const AlgebraDescriptor a({1});
  return a;
}

// Vector of C^n with real coordinates.
inline ModuleVector cvec(const HilbertModule& h, std::initializer_list<double> xs) {
  Matrix m(1, static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) m(0, i++) = x;
  return ModuleVector(h, {m});
}

inline Frame hilbert_frame(const std::vector<std::vector<double>>& rows) {
  const HilbertModule h(scalars(), static_cast<int>(rows.at(0).size()));
  std::vector<ModuleVector> xs;
  for (const auto& r : rows) {
    Matrix m(1, static_cast<Eigen::Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = r[i];
    xs.emplace_back(h, Blocks{m});
  }
  return Frame(h, std::move(xs));
}

inline Frame e1e2e1() { return hilbert_frame({{1, 0}, {0, 1}, {1, 0}}); }

inline const std::vector<std::vector<double>>& mercedes_rows() {
  static const double s = std::sqrt(3.0) / 2.0;
  static const std::vector<std::vector<double>> rows = {{0.0, 1.0}, {-s, -0.5}, {s, -0.5}};
  return rows;
}

inline Frame onb(const AlgebraDescriptor& a, int n) {
  const HilbertModule h(a, n);
  return Frame(h, standard_basis(h));
}

inline AlgElement diag_element(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (Complex c : d) m(i, i) = c, ++i;
  return AlgElement(AlgebraDescriptor({static_cast<int>(d.size())}), {m});
}

inline AlgElement random_element(Rng& rng, const AlgebraDescriptor& a) {
  Blocks b;
  for (std::size_t k = 0; k < a.block_count(); ++k) b.push_back(rng.gaussian_matrix(a.dim(k), a.dim(k)));
  return AlgElement(a, std::move(b));
}

inline double max_element_distance(const Frame& a, const Frame& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, module_norm(a.element(j) - b.element(j)));
  return d;
}

}  // namespace support

namespace support {

// z_j = W(y_j) for a random unitary W of the ambient free module, with z in
// the rotated summand. Returns the frame z and the map y -> z.
struct Twin {
  Frame z;
  ModuleOperator map;
};

inline Twin rotated_twin(Rng& rng, const Frame& y) {
  const HilbertModule& m = y.module();
  const auto& a = m.algebra();
  Blocks w, q, map;
  for (std::size_t k = 0; k < a.block_count(); ++k) {
    const Matrix u = rng.unitary(m.projection(k).rows());
    w.push_back(u);
    q.push_back(linalg::hermitian_part(u.adjoint() * m.projection(k) * u));
    map.push_back(m.projection(k) * u);
  }
  const HilbertModule n(a, m.rank(), q);
  std::vector<ModuleVector> zs;
  for (const auto& v : y.elements()) {
    Blocks b;
    for (std::size_t k = 0; k < a.block_count(); ++k) b.push_back(v.block(k) * w[k]);
    zs.push_back(ModuleVector::project(n, b));
  }
  return {Frame(n, std::move(zs), y.tol()), ModuleOperator(m, n, std::move(map))};
}

}  // namespace support
