#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "isopair_lab/colligation.hpp"
#include "isopair_lab/linalg.hpp"
#include "isopair_lab/poly2.hpp"
#include "isopair_lab/types.hpp"

namespace isopair_lab::kernel {

using colligation::Colligation;
using poly2::BiPoly;
using poly2::VarietyPoint;

/// Matrix whose entries are bivariate polynomials.
class MatrixBiPoly {
public:
  MatrixBiPoly() = default;
  MatrixBiPoly(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols)) {
    if (rows < 0 || cols < 0) throw InputError("MatrixBiPoly: negative shape");
  }

  static MatrixBiPoly constant(const CMatrix &m) {
    MatrixBiPoly out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < out.rows_; ++i)
      for (int j = 0; j < out.cols_; ++j) out(i, j) = BiPoly::constant(m(i, j));
    return out;
  }

  static MatrixBiPoly identity(int n, const BiPoly &diag = BiPoly::constant(1.0)) {
    MatrixBiPoly out(n, n);
    for (int i = 0; i < n; ++i) out(i, i) = diag;
    return out;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::pair<int, int> shape() const { return {rows_, cols_}; }

  BiPoly &operator()(int i, int j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
  const BiPoly &operator()(int i, int j) const { return e_[static_cast<std::size_t>(i * cols_ + j)]; }

  CMatrix eval(Complex z, Complex w) const {
    CMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j)(z, w);
    return out;
  }

  CMatrix eval(const VarietyPoint &x) const { return eval(x.z, x.w); }

  MatrixBiPoly block(int r0, int c0, int nr, int nc) const {
    MatrixBiPoly out(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto &p : e_) m = std::max(m, p.max_abs_coeff());
    return m;
  }

  int max_total_degree() const {
    int d = -1;
    for (const auto &p : e_) d = std::max(d, p.total_degree());
    return d;
  }

  MatrixBiPoly chopped(double rel_tol) const {
    const double cut = rel_tol * max_abs_coeff();
    MatrixBiPoly out = *this;
    for (auto &p : out.e_) {
      if (p.is_zero()) continue;
      const double local = p.max_abs_coeff();
      p = local <= cut ? BiPoly{} : p.chopped(cut / local);
    }
    return out;
  }

  friend MatrixBiPoly operator*(const MatrixBiPoly &a, const MatrixBiPoly &b) {
    if (a.cols_ != b.rows_) throw InputError("MatrixBiPoly: shape mismatch in product");
    MatrixBiPoly out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j)
        for (int k = 0; k < a.cols_; ++k) out(i, j) += a(i, k) * b(k, j);
    return out;
  }

  friend MatrixBiPoly operator*(const MatrixBiPoly &a, const CMatrix &m) { return a * constant(m); }
  friend MatrixBiPoly operator*(const CMatrix &m, const MatrixBiPoly &a) { return constant(m) * a; }

  friend MatrixBiPoly operator*(const BiPoly &s, const MatrixBiPoly &a) {
    MatrixBiPoly out = a;
    for (auto &p : out.e_) p = s * p;
    return out;
  }

  friend MatrixBiPoly operator+(const MatrixBiPoly &a, const MatrixBiPoly &b) {
    if (a.shape() != b.shape()) throw InputError("MatrixBiPoly: shape mismatch in sum");
    MatrixBiPoly out = a;
    for (std::size_t k = 0; k < out.e_.size(); ++k) out.e_[k] += b.e_[k];
    return out;
  }

  friend MatrixBiPoly operator-(const MatrixBiPoly &a, const MatrixBiPoly &b) {
    return a + BiPoly::constant(-1.0) * b;
  }

  /// Horizontal concatenation.
  static MatrixBiPoly hcat(const MatrixBiPoly &a, const MatrixBiPoly &b) {
    if (a.rows_ != b.rows_) throw InputError("MatrixBiPoly: row mismatch in concatenation");
    MatrixBiPoly out(a.rows_, a.cols_ + b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int j = 0; j < a.cols_; ++j) out(i, j) = a(i, j);
      for (int j = 0; j < b.cols_; ++j) out(i, a.cols_ + j) = b(i, j);
    }
    return out;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<BiPoly> e_;
};

/// Cofactor-expansion determinant (sizes here are tiny); 1 for the empty matrix.
inline BiPoly det(const MatrixBiPoly &m) {
  if (m.rows() != m.cols()) throw InputError("det: matrix must be square");
  const int n = m.rows();
  if (n == 0) return BiPoly::constant(1.0);
  if (n == 1) return m(0, 0);
  BiPoly out;
  for (int j = 0; j < n; ++j) {
    if (m(0, j).is_zero()) continue;
    MatrixBiPoly minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r)
      for (int c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    const BiPoly term = m(0, j) * det(minor);
    out += (j % 2 == 0) ? term : -term;
  }
  return out;
}

/// Classical adjugate, adj(m) m = m adj(m) = det(m) I.
inline MatrixBiPoly adjugate(const MatrixBiPoly &m) {
  if (m.rows() != m.cols()) throw InputError("adjugate: matrix must be square");
  const int n = m.rows();
  MatrixBiPoly out(n, n);
  if (n == 1) {
    out(0, 0) = BiPoly::constant(1.0);
    return out;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MatrixBiPoly minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c)
          if (c != j) minor(rr, cc++) = m(r, c);
        ++rr;
      }
      const BiPoly cof = det(minor);
      out(j, i) = ((i + j) % 2 == 0) ? cof : -cof;
    }
  return out;
}

/// I - zD as a matrix polynomial.
inline MatrixBiPoly resolvent_pencil(const Colligation &c) {
  return MatrixBiPoly::identity(c.N()) - BiPoly::z() * MatrixBiPoly::constant(c.D());
}

/// d(z) = det(I - zD).
inline BiPoly denominator(const Colligation &c) { return det(resolvent_pencil(c)); }

/// d(z) Phi(z) = d(z)A + zB adj(I - zD) C, polynomial in z.
inline MatrixBiPoly cleared_transfer(const Colligation &c) {
  const BiPoly d = denominator(c);
  MatrixBiPoly out = d * MatrixBiPoly::constant(c.A());
  if (c.N() > 0) out = out + BiPoly::z() * (MatrixBiPoly::constant(c.B()) * adjugate(resolvent_pencil(c)) *
                                            MatrixBiPoly::constant(c.C()));
  return out;
}

namespace detail {

/// Scales so the largest coefficient becomes 1.
inline std::pair<MatrixBiPoly, Complex> unit_normalized(const MatrixBiPoly &m) {
  Complex top = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const BiPoly &p = m(i, j);
      for (int a = 0; a <= p.deg_z(); ++a)
        for (int b = 0; b <= p.deg_w(); ++b)
          if (std::abs(p.coeff(a, b)) > std::abs(top)) top = p.coeff(a, b);
    }
  if (top == Complex(0.0)) throw DomainError("normalize: zero matrix polynomial");
  const Complex s = 1.0 / top;
  return {BiPoly::constant(s) * m, s};
}

} // namespace detail

/// Row polynomial Q (alpha x M) with Q(z,w)(Phi(z) - w) = 0 on the variety,
/// built from the SVD of Phi(lambda0) - mu0 and the Schur complement of the
/// invertible block.
inline MatrixBiPoly construct_Q(const Colligation &c, const VarietyPoint &base, int alpha) {
  const int m = c.M();
  if (alpha <= 0 || alpha > m) throw InputError("construct_Q: alpha out of range");
  const CMatrix x = colligation::transfer(c, base.z) - base.w * CMatrix::Identity(m, m);
  const int null = linalg::nullity(x, 1e-7, 1.0);
  if (null != alpha) {
    throw DomainError("construct_Q: nullity at the base point is " + std::to_string(null) + ", expected " +
                      std::to_string(alpha));
  }
  Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const int r = m - alpha;
  CMatrix left(m, m);
  CMatrix right(m, m);
  left << svd.matrixU().rightCols(alpha), svd.matrixU().leftCols(r);
  right << svd.matrixV().rightCols(alpha), svd.matrixV().leftCols(r);
  const CMatrix pi_star = left.adjoint();

  const BiPoly d = denominator(c);
  const MatrixBiPoly pencil = cleared_transfer(c) - MatrixBiPoly::identity(m, BiPoly::w() * d);
  const MatrixBiPoly sigma = pi_star * pencil * right;
  const MatrixBiPoly s12 = sigma.block(0, alpha, alpha, r);
  const MatrixBiPoly s22 = sigma.block(alpha, alpha, r, r);
  if (r > 0) {
    const double smallest = linalg::singular_values(s22.eval(base.z, base.w)).minCoeff();
    if (!(smallest > 1e-8)) throw DomainError("construct_Q: complementary block is not invertible at the base point");
  }
  const BiPoly det22 = det(s22);
  MatrixBiPoly head = MatrixBiPoly::identity(alpha, det22);
  MatrixBiPoly q = head;
  if (r > 0) q = MatrixBiPoly::hcat(head, BiPoly::constant(-1.0) * (s12 * adjugate(s22)));
  q = (q * pi_star).chopped(1e-13);
  return detail::unit_normalized(q).first;
}

/// P = Q B adj(I - zD); together with d(z)Q it satisfies the intertwining relation.
inline MatrixBiPoly construct_P(const MatrixBiPoly &q, const Colligation &c) {
  if (q.cols() != c.M()) throw InputError("construct_P: Q has the wrong number of columns");
  if (c.N() == 0) return MatrixBiPoly(q.rows(), 0);
  return (q * MatrixBiPoly::constant(c.B()) * adjugate(resolvent_pencil(c))).chopped(1e-13);
}

struct AdmissibleTriple {
  MatrixBiPoly Q;
  MatrixBiPoly P;
  int alpha = 0;
  BiPoly p;
  VarietyPoint witness;
};

/// (d Q, Q B adj(I - zD)) scaled so the largest coefficient of the first is 1.
inline AdmissibleTriple make_admissible_triple(const Colligation &c, const BiPoly &p, const VarietyPoint &base,
                                               int alpha) {
  const MatrixBiPoly q = construct_Q(c, base, alpha);
  const BiPoly d = denominator(c);
  const MatrixBiPoly qhat = (d.deg_z() > 0) ? d * q : q;
  const auto [qn, s] = detail::unit_normalized(qhat);
  const MatrixBiPoly pn = BiPoly::constant(s) * construct_P(q, c);
  return {qn, pn, alpha, p, base};
}

inline CMatrix phi_minus_w(const Colligation &c, Complex z, Complex w) {
  return colligation::transfer(c, z) - w * CMatrix::Identity(c.M(), c.M());
}

/// max ||Q(z,w)(Phi(z) - w)|| over the points.
inline double q_residual(const MatrixBiPoly &q, const Colligation &c, const std::vector<VarietyPoint> &points) {
  double worst = 0.0;
  for (const auto &x : points) worst = std::max(worst, linalg::spectral_norm(q.eval(x) * phi_minus_w(c, x.z, x.w)));
  return worst;
}

/// max ||(Q zP) U - (wQ P)|| over the points.
inline double intertwining_residual(const AdmissibleTriple &t, const Colligation &c,
                                    const std::vector<VarietyPoint> &points) {
  double worst = 0.0;
  const CMatrix u = c.unitary();
  for (const auto &x : points) {
    const CMatrix q = t.Q.eval(x);
    const CMatrix pp = t.P.eval(x);
    CMatrix lhs(q.rows(), q.cols() + pp.cols());
    CMatrix rhs(q.rows(), q.cols() + pp.cols());
    lhs << q, x.z * pp;
    rhs << x.w * q, pp;
    worst = std::max(worst, linalg::spectral_norm(lhs * u - rhs));
  }
  return worst;
}

using KernelFn = std::function<CMatrix(const VarietyPoint &, const VarietyPoint &)>;

/// K(x, y) = Q(x) Q(y)^* / (1 - z conj(zeta)).
inline CMatrix kernel_eval(const AdmissibleTriple &t, const VarietyPoint &x, const VarietyPoint &y) {
  const Complex den = 1.0 - x.z * std::conj(y.z);
  if (std::abs(den) < 1e-12) throw DomainError("kernel_eval: points too close to the boundary");
  return t.Q.eval(x) * t.Q.eval(y).adjoint() / den;
}

/// P(x) P(y)^* / (1 - w conj(eta)).
inline CMatrix kernel_eval_P(const AdmissibleTriple &t, const VarietyPoint &x, const VarietyPoint &y) {
  const Complex den = 1.0 - x.w * std::conj(y.w);
  if (std::abs(den) < 1e-12) throw DomainError("kernel_eval: points too close to the boundary");
  return t.P.eval(x) * t.P.eval(y).adjoint() / den;
}

/// G(x)^{-1} K(x,y) G(y)^{-*} with G the first alpha columns of Q. This removes
/// the left gauge of Q wherever G is invertible, so kernels from different
/// constructions can be compared pointwise.
inline CMatrix column_normalized_kernel(const AdmissibleTriple &t, const VarietyPoint &x, const VarietyPoint &y) {
  const CMatrix gx = t.Q.eval(x).leftCols(t.alpha);
  const CMatrix gy = t.Q.eval(y).leftCols(t.alpha);
  const CMatrix left = gx.partialPivLu().solve(kernel_eval(t, x, y));
  return gy.partialPivLu().solve(left.adjoint()).adjoint();
}

struct AdmissibleReport {
  double max_residual = 0.0;
  int Q_rank = 0;
  int P_rank = 0;
  int K_rank = 0;
  bool full_rank = false;
  int pairs = 0;
  bool pass = false;
};

/// Deterministic pairs of variety points drawn from p.
inline std::vector<std::pair<VarietyPoint, VarietyPoint>> variety_pairs(const BiPoly &p, int count,
                                                                         std::uint64_t seed) {
  const auto xs = poly2::sample_variety(p, count, seed);
  const auto ys = poly2::sample_variety(p, count, seed + 1);
  std::vector<std::pair<VarietyPoint, VarietyPoint>> out;
  for (int k = 0; k < count; ++k) out.emplace_back(xs[static_cast<std::size_t>(k)], ys[static_cast<std::size_t>(k)]);
  return out;
}

inline AdmissibleReport verify_admissible(const AdmissibleTriple &t, int pair_samples, std::uint64_t seed = 0,
                                          double tol = 1e-8) {
  AdmissibleReport rep;
  const auto pairs = variety_pairs(t.p, pair_samples, seed);
  rep.pairs = static_cast<int>(pairs.size());
  for (const auto &[x, y] : pairs) {
    const double r = linalg::spectral_norm(kernel_eval(t, x, y) - kernel_eval_P(t, x, y));
    rep.max_residual = std::max(rep.max_residual, r);
  }
  rep.Q_rank = linalg::numerical_rank(t.Q.eval(t.witness).transpose(), 1e-7, 1.0);
  rep.P_rank = linalg::numerical_rank(t.P.eval(t.witness).transpose(), 1e-7, 1.0);
  rep.K_rank = linalg::numerical_rank(kernel_eval(t, t.witness, t.witness), 1e-7, 1.0);
  rep.full_rank = rep.Q_rank == t.alpha && rep.P_rank == t.alpha && rep.K_rank == t.alpha;
  rep.pass = rep.max_residual <= tol && rep.full_rank;
  return rep;
}

inline constexpr int kQuadraturePoints = 512;

/// Compares the H^2 Gram matrix of s_zeta Q(y)^* e_a (trapezoidal quadrature
/// on the circle) with the kernel Gram matrix K(y_i, y_j).
inline double gram_unitarity_check(const AdmissibleTriple &t, const std::vector<VarietyPoint> &points,
                                   const std::optional<KernelFn> &kernel_override = std::nullopt) {
  const KernelFn kfn = kernel_override.value_or(
      KernelFn([&t](const VarietyPoint &x, const VarietyPoint &y) { return kernel_eval(t, x, y); }));
  const int a = t.alpha;
  const auto n = static_cast<Eigen::Index>(points.size());
  const int k = t.Q.cols();
  std::vector<CMatrix> qstar;
  for (const auto &y : points) qstar.push_back(t.Q.eval(y).adjoint());
  CMatrix gh = CMatrix::Zero(n * a, n * a);
  for (int s = 0; s < kQuadraturePoints; ++s) {
    const Complex e = unit_circle(2.0 * kPi * s / kQuadraturePoints);
    CMatrix h(k, n * a);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex szego = 1.0 / (1.0 - e * std::conj(points[static_cast<std::size_t>(i)].z));
      h.middleCols(i * a, a) = szego * qstar[static_cast<std::size_t>(i)];
    }
    gh += h.adjoint() * h;
  }
  gh /= static_cast<double>(kQuadraturePoints);
  CMatrix gk(n * a, n * a);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      gk.block(i * a, j * a, a, a) = kfn(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
  return (gh - gk).cwiseAbs().maxCoeff();
}

/// Under the identification z^a Q e_j -> z^a e_j, checks the reproducing
/// identity <z^a Q e_j, K_y e_k> = zeta^a Q_kj(y) by quadrature and the
/// orthonormality of the images.
inline double basis_orthonormality_check(const AdmissibleTriple &t, const Colligation &c, int a_max,
                                         const std::vector<VarietyPoint> &points) {
  if (t.Q.cols() != c.M()) throw InputError("basis_orthonormality_check: Q does not match the colligation");
  const int m = c.M();
  double worst = 0.0;
  for (const auto &y : points) {
    const CMatrix qy = t.Q.eval(y);
    for (int a = 0; a <= a_max; ++a) {
      Complex integral = 0.0;
      for (int s = 0; s < kQuadraturePoints; ++s) {
        const Complex e = unit_circle(2.0 * kPi * s / kQuadraturePoints);
        integral += std::pow(e, a) / (1.0 - y.z * std::conj(e));
      }
      integral /= static_cast<double>(kQuadraturePoints);
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < t.alpha; ++k) {
          const Complex lhs = std::pow(y.z, a) * qy(k, j);
          worst = std::max(worst, std::abs(lhs - integral * qy(k, j)));
        }
    }
  }
  const int size = (a_max + 1) * m;
  CMatrix gram = CMatrix::Zero(size, size);
  for (int s = 0; s < kQuadraturePoints; ++s) {
    const Complex e = unit_circle(2.0 * kPi * s / kQuadraturePoints);
    CVector v = CVector::Zero(size);
    for (int a = 0; a <= a_max; ++a)
      for (int j = 0; j < m; ++j) v(a * m + j) = std::pow(e, a);
    for (int r = 0; r < size; ++r)
      for (int q = 0; q < size; ++q)
        if (r % m == q % m) gram(r, q) += std::conj(v(r)) * v(q);
  }
  gram /= static_cast<double>(kQuadraturePoints);
  worst = std::max(worst, (gram - CMatrix::Identity(size, size)).cwiseAbs().maxCoeff());
  return worst;
}

/// Regular point of `component` (regular for p too) with nullity alpha
/// that maximizes the smallest nonzero singular value of Phi(lambda) - mu.
inline VarietyPoint choose_base_point(const Colligation &c, const BiPoly &p, const BiPoly &component, int alpha,
                                      std::uint64_t seed = 0, int candidates = 12) {
  const auto pts = poly2::sample_variety(component, candidates, seed, {}, {}, 0.6);
  std::optional<VarietyPoint> best;
  double best_gap = -1.0;
  const int m = c.M();
  for (const auto &pt : pts) {
    if (std::abs(p(pt.z, pt.w)) > 1e-8 * p.scale() || !poly2::is_regular_point(p, pt.z, pt.w)) continue;
    const CMatrix x = phi_minus_w(c, pt.z, pt.w);
    if (linalg::nullity(x, 1e-7, 1.0) != alpha) continue;
    const Eigen::VectorXd sv = linalg::singular_values(x);
    const double gap = alpha < m ? sv(m - alpha - 1) : 1.0;
    if (gap > best_gap) {
      best_gap = gap;
      best = pt;
    }
  }
  if (!best) throw DomainError("choose_base_point: no regular point with the requested nullity");
  return *best;
}

} // namespace isopair_lab::kernel
