#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "isopair_lab/isopair.hpp"
#include "isopair_lab/kernel.hpp"
#include "isopair_lab/linalg.hpp"

namespace isopair_lab::ideal {

using isopair::ShiftModel;
using kernel::AdmissibleTriple;
using kernel::MatrixBiPoly;
using poly2::BiPoly;
using poly2::VarietyPoint;

/// Q0(z,w) = Q(z,w) Q(base)*, an alpha x alpha polynomial matrix.
inline MatrixBiPoly q0_matrix(const MatrixBiPoly &q, const VarietyPoint &base) {
  return (q * CMatrix(q.eval(base).adjoint())).chopped(1e-13);
}

/// Vector polynomials v_j = Q(base)* adj(Q0) e_j, one per row of Q, so that
/// Q v_j = det(Q0) e_j. Each is returned as an M x 1 matrix.
inline std::vector<MatrixBiPoly> defect_generators(const MatrixBiPoly &q, const VarietyPoint &base) {
  const MatrixBiPoly q0 = q0_matrix(q, base);
  const CMatrix qb_star = q.eval(base).adjoint();
  if (linalg::singular_values(q0.eval(base)).minCoeff() <= 1e-8) {
    throw DomainError("defect_generators: Q0 is singular at the base point");
  }
  const MatrixBiPoly v = (qb_star * kernel::adjugate(q0)).chopped(1e-13);
  std::vector<MatrixBiPoly> out;
  for (int j = 0; j < v.cols(); ++j) out.push_back(v.block(0, j, v.rows(), 1));
  return out;
}

inline std::vector<MatrixBiPoly> defect_generators(const AdmissibleTriple &t, const VarietyPoint &base) {
  return defect_generators(t.Q, base);
}

/// Generator i of the sum is the sum of generator i over every source, for
/// direct sums whose components each carry their own triple.
inline std::vector<MatrixBiPoly> summed_generators(const std::vector<std::vector<MatrixBiPoly>> &sources) {
  std::vector<MatrixBiPoly> out;
  for (const auto &src : sources) {
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (i < out.size()) {
        out[i] = out[i] + src[i];
      } else {
        out.push_back(src[i]);
      }
    }
  }
  return out;
}

inline int max_generator_degree(const std::vector<MatrixBiPoly> &gens) {
  int d = 0;
  for (const auto &g : gens) d = std::max(d, g.max_total_degree());
  return d;
}

namespace detail {

/// g(S, T) applied to the constant vectors, with g = sum z^a w^b v_ab.
inline CVector model_vector(const MatrixBiPoly &g, const CMatrix &s, const CMatrix &t) {
  const auto m = g.rows();
  CVector out = CVector::Zero(s.rows());
  const int dz = [&] {
    int d = -1;
    for (int k = 0; k < m; ++k) d = std::max(d, g(k, 0).deg_z());
    return d;
  }();
  const int dw = [&] {
    int d = -1;
    for (int k = 0; k < m; ++k) d = std::max(d, g(k, 0).deg_w());
    return d;
  }();
  for (int b = 0; b <= dw; ++b) {
    for (int a = 0; a <= dz; ++a) {
      CVector c = CVector::Zero(s.rows());
      bool any = false;
      for (int k = 0; k < m; ++k) {
        const BiPoly &e = g(k, 0);
        if (a > e.deg_z() || b > e.deg_w()) continue;
        c(k) = e.coeff(a, b);
        any = any || c(k) != Complex(0.0);
      }
      if (!any) continue;
      for (int r = 0; r < b; ++r) c = t * c;
      for (int r = 0; r < a; ++r) c = s * c;
      out += c;
    }
  }
  return out;
}

} // namespace detail

/// Codimension of span{S^a T^b g_j : a + b <= D - deg} inside the block of
/// z-degree <= (D - deg) / 2, where deg is the largest generator degree.
/// Rank is decided in floating point at relative threshold 1e-7.
inline int defect_codimension(const ShiftModel &model, const std::vector<MatrixBiPoly> &gens, int D) {
  if (gens.empty()) throw InputError("defect_codimension: no generators");
  const int deg = max_generator_degree(gens);
  if (D < deg) throw InputError("defect_codimension: D is below the generator degree");
  if (model.truncation_degree() < D + deg) {
    throw DomainError("defect_codimension: truncation " + std::to_string(model.truncation_degree()) +
                      " is below D + generator degree = " + std::to_string(D + deg));
  }
  for (const auto &g : gens)
    if (g.rows() != model.M() || g.cols() != 1) throw InputError("defect_codimension: generator has the wrong shape");
  const int span = D - deg;
  const int k = span / 2;
  const Eigen::Index block = static_cast<Eigen::Index>(model.M()) * (k + 1);
  const CMatrix s = model.S();
  const CMatrix t = model.T();
  std::vector<CVector> columns;
  for (const auto &g : gens) {
    const CVector base = detail::model_vector(g, s, t);
    CVector tb = base;
    for (int b = 0; b <= span; ++b) {
      CVector v = tb;
      for (int a = 0; a + b <= span; ++a) {
        columns.push_back(v.head(block));
        v = s * v;
      }
      tb = t * tb;
    }
  }
  CMatrix m(block, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = columns[c];
  const int rank = columns.empty() ? 0 : linalg::numerical_rank(m, isopair::kRankTol);
  return static_cast<int>(block) - rank;
}

struct DefectSequence {
  std::vector<int> degrees;
  std::vector<int> codimensions;
  int generators = 0;
  int generator_degree = 0;
  bool stabilized = false;         ///< the last two codimensions agree
  std::optional<int> value;        ///< stabilized codimension
};

/// Codimensions over the truncation degrees `degrees` (ascending), each on a
/// model truncated at D + generator degree.
inline DefectSequence cyclic_defect(const colligation::Colligation &c, const std::vector<MatrixBiPoly> &gens,
                                    const std::vector<int> &degrees = {8, 10, 12}) {
  if (degrees.size() < 2) throw InputError("cyclic_defect: need at least two truncation degrees");
  DefectSequence out;
  out.degrees = degrees;
  out.generators = static_cast<int>(gens.size());
  out.generator_degree = max_generator_degree(gens);
  for (int D : degrees) {
    const ShiftModel model(c, std::max(1, D + out.generator_degree));
    out.codimensions.push_back(defect_codimension(model, gens, D));
  }
  const auto n = out.codimensions.size();
  out.stabilized = out.codimensions[n - 1] == out.codimensions[n - 2];
  if (out.stabilized) out.value = out.codimensions.back();
  return out;
}

/// Same with the first `count` generators of a single triple (all by default).
inline DefectSequence cyclic_defect(const colligation::Colligation &c, const AdmissibleTriple &t,
                                    const VarietyPoint &base, std::optional<int> count = std::nullopt,
                                    const std::vector<int> &degrees = {8, 10, 12}) {
  auto gens = defect_generators(t, base);
  if (count) {
    if (*count < 1 || *count > static_cast<int>(gens.size())) throw InputError("cyclic_defect: generator count out of range");
    gens.resize(static_cast<std::size_t>(*count));
  }
  return cyclic_defect(c, gens, degrees);
}

} // namespace isopair_lab::ideal
