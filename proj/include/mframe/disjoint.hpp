#pragma once

// Joint position of frame pairs and tuples, read off from the range
// projections P, Q of their transforms in A^J.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mframe/dilation.hpp"

namespace mframe {

struct PairClassification {
  bool strongly_complementary = false;
  bool complementary = false;
  bool strongly_disjoint = false;
  bool disjoint = false;
  bool weakly_disjoint = false;  // same as disjoint here: finite sums of submodules are closed
  double complement_gap = 0.0;   // |P - (I - Q)|
  double pq_norm = 0.0;          // max(|PQ|, |QP|)
  double lambda_min = 0.0;       // of P + Q
  double lambda_max = 0.0;
  double difference_min_sv = 0.0;  // smallest singular value of P - Q
  double tol = kDefaultTol;
};

namespace detail {

inline void require_pair(const Frame& a, const Frame& b) {
  if (a.size() != b.size())
    throw StructuralError("frames have different index counts (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  if (!(a.module().algebra() == b.module().algebra())) throw StructuralError("frames over different algebras");
  for (const Frame* f : {&a, &b})
    if (!f->is_frame())
      throw PreconditionError("not a frame: optimal lower bound " + std::to_string(f->bounds().lower), f->bounds().lower);
}

}  // namespace detail

inline PairClassification classify_pair(const Frame& a, const Frame& b, double tol = kDefaultTol) {
  detail::require_pair(a, b);
  PairClassification c;
  c.tol = tol;
  const ModuleOperator p = range_projection(a.transform(), tol);
  const ModuleOperator q = range_projection(b.transform(), tol);
  const ModuleOperator id = ModuleOperator::identity(p.source());
  c.complement_gap = p.distance(id - q);
  c.pq_norm = std::max(compose(p, q).norm(), compose(q, p).norm());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, smin = lo;
  for (std::size_t k = 0; k < p.flatten().size(); ++k) {
    const Matrix sum = p.block(k) + q.block(k);
    const RealVector ev = linalg::eigh(linalg::hermitian_part(sum)).values;
    lo = std::min(lo, ev(0));
    hi = std::max(hi, ev(ev.size() - 1));
    const RealVector sv = linalg::singular_values(p.block(k) - q.block(k));
    smin = std::min(smin, sv(sv.size() - 1));
  }
  c.lambda_min = lo;
  c.lambda_max = hi;
  c.difference_min_sv = smin;
  c.strongly_complementary = c.complement_gap <= tol;
  c.strongly_disjoint = c.pq_norm <= tol;
  c.disjoint = c.lambda_max <= 2.0 - tol;
  c.weakly_disjoint = c.disjoint;
  c.complementary = c.disjoint && c.lambda_min >= tol;
  return c;
}

struct StrongDisjointReport {
  /// (i) |PQ|, (ii) the same for the canonical duals, (iii) |S_sum - S_x + S_y|,
  /// (iv)-(ix) norms of the six annihilation maps.
  std::array<double, 9> residuals{};
  std::array<bool, 9> holds{};
  bool all_agree = false;
  bool strongly_disjoint = false;
};

inline StrongDisjointReport strong_disjoint_conditions(const Frame& x, const Frame& y, double tol = kDefaultTol) {
  detail::require_pair(x, y);
  StrongDisjointReport r;
  const ModuleOperator sx = frame_operator(x, tol), sy = frame_operator(y, tol);
  const ModuleOperator& tx = x.transform();
  const ModuleOperator& ty = y.transform();
  std::array<double, 9> scale{};

  auto pq = [&](const Frame& a, const Frame& b) {
    const ModuleOperator p = range_projection(a.transform(), tol);
    const ModuleOperator q = range_projection(b.transform(), tol);
    return std::max(compose(p, q).norm(), compose(q, p).norm());
  };
  r.residuals[0] = pq(x, y);
  r.residuals[1] = pq(canonical_dual(x, tol), canonical_dual(y, tol));

  // frame operator of the inner sum, pseudo-inverted since the sum need not be a frame
  const Frame sum = inner_sum(x, y);
  const ModuleOperator ssum = op_funcalc(sum.gram_operator(), FuncKind::Pinv, tol);
  const HilbertModule& hk = sum.module();
  Blocks diag;
  for (std::size_t k = 0; k < sx.flatten().size(); ++k) {
    const Matrix& a = sx.block(k);
    const Matrix& b = sy.block(k);
    Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    diag.push_back(std::move(m));
  }
  const ModuleOperator sdiag(hk, hk, std::move(diag));
  r.residuals[2] = ssum.distance(sdiag);
  scale[2] = std::max(sx.norm(), sy.norm());

  const ModuleOperator txs = tx.adjoint(), tys = ty.adjoint();
  const std::array<ModuleOperator, 6> maps = {
      compose(tys, compose(tx, sx)),  // sum_j <x, S_x x_j> y_j
      compose(txs, compose(ty, sy)),  // sum_j <y, S_y y_j> x_j
      compose(sy, compose(tys, tx)),  // sum_j <x, x_j> S_y y_j
      compose(sx, compose(txs, ty)),  // sum_j <y, y_j> S_x x_j
      compose(tys, tx),               // sum_j <x, x_j> y_j
      compose(txs, ty),               // sum_j <y, y_j> x_j
  };
  const double nx = tx.norm(), ny = ty.norm();
  const std::array<double, 6> factor = {ny * nx * sx.norm(), nx * ny * sy.norm(), sy.norm() * ny * nx,
                                        sx.norm() * nx * ny, ny * nx, nx * ny};
  for (int i = 0; i < 6; ++i) {
    r.residuals[3 + i] = maps[i].norm();
    scale[3 + i] = factor[i];
  }
  for (int i = 0; i < 9; ++i) r.holds[i] = r.residuals[i] <= tol * (1.0 + scale[i]);
  r.all_agree = std::all_of(r.holds.begin(), r.holds.end(), [&](bool h) { return h == r.holds[0]; });
  r.strongly_disjoint = r.all_agree && r.holds[0];
  return r;
}

/// {sum_k T_k(x_kj)} for pairwise strongly disjoint normalized tight frames
/// of one module H and operators T_k : H -> K with sum_k T_k T_k^* = I_K.
inline Frame combine(const std::vector<Frame>& frames, const std::vector<ModuleOperator>& ops, double tol = kDefaultTol) {
  if (frames.empty() || frames.size() != ops.size()) throw StructuralError("combine needs one operator per frame");
  const HilbertModule& h = frames[0].module();
  const HilbertModule& k = ops[0].target();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].module() != h) throw StructuralError("combined frames must share one module");
    if (frames[i].size() != frames[0].size()) throw StructuralError("combined frames must have equal index counts");
    if (ops[i].source() != h || ops[i].target() != k) throw StructuralError("operator " + std::to_string(i) + " has the wrong modules");
    if (!frames[i].is_normalized())
      throw PreconditionError("frame " + std::to_string(i) + " is not normalized tight",
                              std::abs(frames[i].bounds().upper - 1.0) + std::abs(frames[i].bounds().lower - 1.0));
  }
  for (std::size_t i = 0; i < frames.size(); ++i)
    for (std::size_t j = i + 1; j < frames.size(); ++j) {
      const ModuleOperator p = range_projection(frames[i].transform(), tol);
      const ModuleOperator q = range_projection(frames[j].transform(), tol);
      const double d = compose(p, q).norm();
      if (d > tol)
        throw PreconditionError("frames " + std::to_string(i) + " and " + std::to_string(j) + " are not strongly disjoint", d);
    }
  ModuleOperator acc = ModuleOperator::zero(k, k);
  for (const auto& t : ops) acc = acc + compose(t, t.adjoint());
  const double defect = acc.distance(ModuleOperator::identity(k));
  if (defect > tol * (1.0 + acc.norm())) throw PreconditionError("sum of T_k T_k^* is not the identity", defect);

  std::vector<ModuleVector> out;
  for (std::size_t j = 0; j < frames[0].size(); ++j) {
    ModuleVector v = ModuleVector::zero(k);
    for (std::size_t i = 0; i < frames.size(); ++i) v = v + ops[i](frames[i].element(j));
    out.push_back(v);
  }
  return Frame(k, std::move(out), frames[0].tol());
}

/// Scalar case {alpha x_j + beta y_j}.
inline Frame combine(const Frame& x, const Frame& y, Complex alpha, Complex beta, double tol = kDefaultTol) {
  const HilbertModule& h = x.module();
  return combine({x, y}, {ModuleOperator::scalar(h, alpha), ModuleOperator::scalar(h, beta)}, tol);
}

struct TupleResult {
  std::optional<ModuleOperator> unitary;  // W : H_1 + ... + H_n -> A^J
  std::optional<Frame> basis;             // {W(x_1j + ... + x_nj)} = {e_j}
  double overlap_defect = 0.0;            // max_{k != l} |T_k T_k^* T_l T_l^*|
  double identity_defect = 0.0;           // |sum_k T_k T_k^* - I|
  double unitary_defect = 0.0;
  BasisCertificate certificate;
};

/// T_k = theta_k; succeeds when the ranges are pairwise orthogonal and fill A^J.
inline TupleResult tuple_to_onb(const std::vector<Frame>& frames, double tol = kDefaultTol) {
  if (frames.empty()) throw StructuralError("tuple_to_onb needs at least one frame");
  const std::size_t count = frames[0].size();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].size() != count) throw StructuralError("frames have different index counts");
    if (!frames[i].is_normalized())
      throw PreconditionError("frame " + std::to_string(i) + " is not normalized tight",
                              std::abs(frames[i].bounds().upper - 1.0) + std::abs(frames[i].bounds().lower - 1.0));
  }
  TupleResult r;
  const HilbertModule coeffs = frames[0].transform().target();
  std::vector<ModuleOperator> proj;
  for (const auto& f : frames) proj.push_back(compose(f.transform(), f.synthesis()));
  ModuleOperator acc = ModuleOperator::zero(coeffs, coeffs);
  for (std::size_t i = 0; i < proj.size(); ++i) {
    acc = acc + proj[i];
    for (std::size_t j = i + 1; j < proj.size(); ++j)
      r.overlap_defect = std::max(r.overlap_defect, compose(proj[i], proj[j]).norm());
  }
  r.identity_defect = acc.distance(ModuleOperator::identity(coeffs));
  if (r.overlap_defect > tol || r.identity_defect > tol) return r;

  HilbertModule sum = frames[0].module();
  for (std::size_t i = 1; i < frames.size(); ++i) sum = direct_sum(sum, frames[i].module());
  Blocks w;
  for (std::size_t k = 0; k < coeffs.algebra().block_count(); ++k) {
    Eigen::Index rows = 0;
    for (const auto& f : frames) rows += f.transform().block(k).rows();
    Matrix m(rows, frames[0].transform().block(k).cols());
    Eigen::Index at = 0;
    for (const auto& f : frames) {
      m.middleRows(at, f.transform().block(k).rows()) = f.transform().block(k);
      at += f.transform().block(k).rows();
    }
    w.push_back(std::move(m));
  }
  ModuleOperator wop(sum, coeffs, std::move(w));
  std::vector<ModuleVector> stacked;
  for (std::size_t j = 0; j < count; ++j) {
    ModuleVector v = frames[0].element(j);
    HilbertModule partial = frames[0].module();
    for (std::size_t i = 1; i < frames.size(); ++i) {
      partial = direct_sum(partial, frames[i].module());
      v = concat(partial, v, frames[i].element(j));
    }
    stacked.push_back(wop(ModuleVector(sum, v.blocks())));
  }
  r.unitary_defect = op_predicates(wop, tol).unitary_defect;
  r.basis = Frame(coeffs, std::move(stacked), frames[0].tol());
  r.certificate = verify_orthogonal_hilbert_basis(*r.basis, tol);
  r.unitary = std::move(wop);
  return r;
}

}  // namespace mframe
