#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "isopair_lab/colligation.hpp"
#include "isopair_lab/linalg.hpp"
#include "isopair_lab/parallel.hpp"
#include "isopair_lab/poly2.hpp"
#include "isopair_lab/types.hpp"

namespace isopair_lab::isopair {

using colligation::Colligation;
using poly2::BiPoly;
using poly2::UniPoly;
using poly2::VarietyPoint;

inline constexpr double kRankTol = 1e-7;

/// Truncation of (M_z, M_Phi) on H^2 with values in C^M to polynomials of
/// degree <= D. Basis vector z^a e_k has index a*M + k.
class ShiftModel {
public:
  ShiftModel(Colligation c, int truncation_degree) : c_(std::move(c)), d_(truncation_degree) {
    if (d_ < 1) throw InputError("ShiftModel: truncation degree must be at least 1");
  }

  const Colligation &colligation() const { return c_; }
  int truncation_degree() const { return d_; }
  int M() const { return c_.M(); }
  int N() const { return c_.N(); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(M()) * (d_ + 1); }

  CMatrix phi(Complex z) const { return colligation::transfer(c_, z); }

  /// Block shift: z^a e_k -> z^{a+1} e_k, the top degree falls off.
  CMatrix S() const {
    const int m = M();
    CMatrix s = CMatrix::Zero(dim(), dim());
    for (int a = 0; a < d_; ++a) s.block((a + 1) * m, a * m, m, m) = CMatrix::Identity(m, m);
    return s;
  }

  /// Lower block-triangular Toeplitz matrix of the Taylor coefficients of Phi.
  CMatrix T() const {
    const int m = M();
    CMatrix t = CMatrix::Zero(dim(), dim());
    for (int k = 0; k <= d_; ++k) {
      const CMatrix coeff = c_.taylor(k);
      for (int a = k; a <= d_; ++a) t.block(a * m, (a - k) * m, m, m) = coeff;
    }
    return t;
  }

private:
  Colligation c_;
  int d_;
};

/// p(lambda I, Phi(lambda)) = sum c_ij lambda^i Phi(lambda)^j.
inline CMatrix evaluate_on_pair(const BiPoly &p, Complex lambda, const CMatrix &phi) {
  const auto m = phi.rows();
  CMatrix out = CMatrix::Zero(m, m);
  CMatrix power = CMatrix::Identity(m, m);
  for (int j = 0; j <= p.deg_w(); ++j) {
    out += p.w_coefficient(j)(lambda) * power;
    power = power * phi;
  }
  return out;
}

/// Closed-disk sample grid: the circle plus the interior rings.
inline std::vector<Complex> closed_disk_samples(int boundary = 16) {
  std::vector<Complex> pts = colligation::default_interior_points();
  pts.push_back(0.0);
  for (int k = 0; k < boundary; ++k) pts.push_back(unit_circle(2.0 * kPi * (k + 0.5) / boundary));
  return pts;
}

inline double annihilation_residual(const ShiftModel &model, const BiPoly &p, const std::vector<Complex> &samples) {
  double worst = 0.0;
  for (const Complex lambda : samples) {
    worst = std::max(worst, linalg::spectral_norm(evaluate_on_pair(p, lambda, model.phi(lambda))));
  }
  return worst;
}

/// dim ker(Phi(lambda) - mu), the dimension of the joint eigenspace of (S*, T*).
inline int joint_kernel_dim(const ShiftModel &model, Complex lambda, Complex mu) {
  if (!(std::abs(lambda) < 1.0)) throw DomainError("joint_kernel_dim: lambda must lie in the open disk");
  const CMatrix gap = model.phi(lambda) - mu * CMatrix::Identity(model.M(), model.M());
  return linalg::nullity(gap, kRankTol, 1.0);
}

// ---------------------------------------------------------------------------
// Factorizations and the rank tuple
// ---------------------------------------------------------------------------

struct Factorization {
  std::vector<BiPoly> factors;
  BiPoly p;
  double product_check_residual = 0.0;
};

namespace detail {

/// Relative distance of `a` from the line spanned by `b`, coefficientwise.
inline double scalar_fit_residual(const BiPoly &a, const BiPoly &b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero() ? 0.0 : 1.0;
  const int n = std::max(a.deg_z(), b.deg_z());
  const int m = std::max(a.deg_w(), b.deg_w());
  Complex ab = 0.0;
  double bb = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= m; ++j) {
      ab += std::conj(b.coeff(i, j)) * a.coeff(i, j);
      bb += std::norm(b.coeff(i, j));
    }
  const Complex s = ab / bb;
  return poly2::coeff_distance(a, b * s) / a.max_abs_coeff();
}

} // namespace detail

/// Checks that the product of the supplied factors is p up to a nonzero
/// scalar and that no two factors are proportional. Irreducibility is taken
/// on trust. With an empty p the product itself is used.
inline Factorization make_factorization(std::vector<BiPoly> factors, std::optional<BiPoly> p = std::nullopt,
                                        double tol = 1e-8) {
  if (factors.empty()) throw InputError("factorization: no factors supplied");
  BiPoly product = BiPoly::constant(1.0);
  for (const auto &f : factors) {
    if (f.is_zero() || (f.deg_z() <= 0 && f.deg_w() <= 0)) throw InputError("factorization: factors must be nonconstant");
    product = product * f;
  }
  for (std::size_t i = 0; i < factors.size(); ++i)
    for (std::size_t j = i + 1; j < factors.size(); ++j)
      if (factors[i].bidegree() == factors[j].bidegree() && detail::scalar_fit_residual(factors[i], factors[j]) < tol)
        throw InputError("factorization: factors " + std::to_string(i) + " and " + std::to_string(j) +
                         " are proportional");
  Factorization out;
  out.factors = std::move(factors);
  out.p = p.value_or(product);
  out.product_check_residual = detail::scalar_fit_residual(out.p, product);
  if (!(out.product_check_residual <= tol)) {
    throw InputError("factorization: product of factors does not match the polynomial");
  }
  return out;
}

struct RankSample {
  VarietyPoint point;
  int dimension;
};

struct RankResult {
  std::vector<int> alpha;
  std::vector<std::vector<RankSample>> per_component_samples;
  std::vector<std::pair<int, int>> bidegrees;
  int M = 0;
  int N = 0;
  bool M_check = false;
  bool N_check = false;
};

/// Sum of alpha_j times the bidegrees.
inline std::pair<int, int> weighted_bidegree(const std::vector<int> &alpha, const std::vector<std::pair<int, int>> &bideg) {
  int n = 0;
  int m = 0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    n += alpha[j] * bideg[j].first;
    m += alpha[j] * bideg[j].second;
  }
  return {n, m};
}

/// All positive alpha with N = sum alpha_j n_j and M = sum alpha_j m_j.
inline std::vector<std::vector<int>> alpha_candidates(int M, int N, const std::vector<std::pair<int, int>> &bideg) {
  std::vector<std::vector<int>> found;
  std::vector<int> alpha(bideg.size(), 1);
  const int cap = std::max(M, N) + 1;
  if (bideg.empty()) return found;
  for (;;) {
    if (weighted_bidegree(alpha, bideg) == std::make_pair(N, M)) found.push_back(alpha);
    std::size_t k = 0;
    while (k < alpha.size() && ++alpha[k] > cap) alpha[k++] = 1;
    if (k == alpha.size()) break;
  }
  return found;
}

/// Measures alpha_j as the joint-kernel dimension at regular points of each
/// component, requiring the same value at every sampled point.
inline RankResult compute_rank(const ShiftModel &model, const Factorization &fac, int samples_per_component,
                               std::uint64_t seed = 0) {
  if (samples_per_component <= 0) throw InputError("compute_rank: samples per component must be positive");
  RankResult out;
  out.M = model.M();
  out.N = model.N();
  for (std::size_t j = 0; j < fac.factors.size(); ++j) {
    const BiPoly &f = fac.factors[j];
    out.bidegrees.push_back(f.bidegree());
    std::vector<VarietyPoint> regular;
    for (int round = 0; round < 100 && static_cast<int>(regular.size()) < samples_per_component; ++round) {
      const auto batch = poly2::sample_variety(f, samples_per_component, seed + 7919 * j + 104729 * round);
      for (const auto &pt : batch) {
        if (static_cast<int>(regular.size()) >= samples_per_component) break;
        if (std::abs(fac.p(pt.z, pt.w)) > poly2::Tolerances{}.residual * fac.p.scale()) continue;
        if (!poly2::is_regular_point(fac.p, pt.z, pt.w)) continue;
        VarietyPoint q = pt;
        q.regular = true;
        q.component_index = static_cast<int>(j);
        regular.push_back(q);
      }
    }
    if (static_cast<int>(regular.size()) < samples_per_component) {
      throw DomainError("compute_rank: could not find enough regular points on component " + std::to_string(j));
    }
    const auto dims = parallel::map_indexed(regular.size(), [&](std::size_t k) {
      return joint_kernel_dim(model, regular[k].z, regular[k].w);
    });
    std::vector<RankSample> samples;
    for (std::size_t k = 0; k < regular.size(); ++k) samples.push_back({regular[k], dims[k]});
    for (const auto &s : samples) {
      if (s.dimension != samples.front().dimension) {
        throw DomainError("compute_rank: joint kernel dimensions disagree on component " + std::to_string(j));
      }
    }
    out.alpha.push_back(samples.front().dimension);
    out.per_component_samples.push_back(std::move(samples));
  }
  const auto [n, m] = weighted_bidegree(out.alpha, out.bidegrees);
  out.N_check = n == out.N;
  out.M_check = m == out.M;
  return out;
}

struct CharPolyResult {
  double max_residual = 0.0;
  std::vector<Complex> skipped;
};

/// Compares det(wI - Phi(lambda)) with prod_j p_{j,lambda}^{alpha_j}, both monic.
inline CharPolyResult char_poly_check(const ShiftModel &model, const Factorization &fac, const std::vector<int> &alpha,
                                      const std::vector<Complex> &lambdas) {
  if (alpha.size() != fac.factors.size()) throw InputError("char_poly_check: alpha does not match the factors");
  std::vector<std::pair<int, int>> bideg;
  for (const auto &f : fac.factors) bideg.push_back(f.bidegree());
  const int expected = weighted_bidegree(alpha, bideg).second;
  CharPolyResult out;
  for (const Complex lambda : lambdas) {
    UniPoly rhs = UniPoly::constant(1.0);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      const UniPoly s = poly2::slice_at_z(fac.factors[j], lambda);
      for (int k = 0; k < alpha[j]; ++k) rhs = rhs * s;
    }
    if (rhs.is_zero() || std::abs(rhs.leading()) <= 1e-12 * rhs.max_abs_coeff() || rhs.degree() < expected) {
      out.skipped.push_back(lambda);
      continue;
    }
    Eigen::ComplexEigenSolver<CMatrix> es(model.phi(lambda), false);
    std::vector<Complex> eig(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    const UniPoly lhs = UniPoly::from_roots(eig);
    const UniPoly monic = rhs.monic();
    const int top = std::max(lhs.degree(), monic.degree());
    for (int k = 0; k <= top; ++k) {
      out.max_residual = std::max(out.max_residual, std::abs(lhs.coeff(k) - monic.coeff(k)));
    }
  }
  return out;
}

enum class Operator { S, T };

namespace detail {

inline int truncated_adjoint_nullity(const ShiftModel &model, Operator which) {
  const CMatrix op = which == Operator::S ? model.S() : model.T();
  return linalg::nullity(op.adjoint(), kRankTol, 1.0);
}

} // namespace detail

/// dim ker V* measured on polynomials of degree <= D, which the adjoint of an
/// analytic Toeplitz operator maps into itself. The value must agree with
/// the one at truncation D + 2.
inline int multiplicity(const ShiftModel &model, Operator which) {
  if (model.truncation_degree() < 2) throw DomainError("multiplicity: truncation degree must be at least 2");
  const int here = detail::truncated_adjoint_nullity(model, which);
  const int further =
      detail::truncated_adjoint_nullity(ShiftModel(model.colligation(), model.truncation_degree() + 2), which);
  if (here != further) throw DomainError("multiplicity: value not stable in the truncation degree");
  return here;
}

// ---------------------------------------------------------------------------
// Blaschke products and restriction
// ---------------------------------------------------------------------------

/// Finite Blaschke product prod (z - a)/(1 - conj(a) z) over zeros a in the disk.
class Blaschke {
public:
  explicit Blaschke(std::vector<Complex> zeros) : zeros_(std::move(zeros)) {
    for (const Complex a : zeros_)
      if (!(std::abs(a) < 1.0)) throw DomainError("Blaschke: zeros must lie in the open disk");
  }

  static Blaschke power_of_z(int k) { return Blaschke(std::vector<Complex>(static_cast<std::size_t>(k), 0.0)); }
  static Blaschke mobius(Complex a) { return Blaschke({a}); }

  const std::vector<Complex> &zeros() const { return zeros_; }
  int degree() const { return static_cast<int>(zeros_.size()); }

  UniPoly numerator() const { return UniPoly::from_roots(zeros_); }

  UniPoly denominator() const {
    UniPoly out = UniPoly::constant(1.0);
    for (const Complex a : zeros_) out = out * UniPoly{1.0, -std::conj(a)};
    return out;
  }

  Complex operator()(Complex z) const {
    Complex v = 1.0;
    for (const Complex a : zeros_) v *= (z - a) / (1.0 - std::conj(a) * z);
    return v;
  }

  /// First `count` Taylor coefficients at the origin.
  std::vector<Complex> taylor(int count) const { return series_quotient(numerator(), count); }

  /// Taylor coefficients of g / denominator for a polynomial g.
  std::vector<Complex> series_quotient(const UniPoly &g, int count) const {
    const UniPoly den = denominator();
    std::vector<Complex> out(static_cast<std::size_t>(count), 0.0);
    for (int k = 0; k < count; ++k) {
      Complex acc = g.coeff(k);
      for (int i = 1; i <= den.degree() && i <= k; ++i) acc -= den.coeff(i) * out[static_cast<std::size_t>(k - i)];
      out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
  }

  /// u(A) = numerator(A) denominator(A)^{-1}.
  CMatrix at_matrix(const CMatrix &a) const {
    const auto n = a.rows();
    CMatrix num = CMatrix::Identity(n, n);
    CMatrix den = CMatrix::Identity(n, n);
    for (const Complex z : zeros_) {
      num = num * (a - z * CMatrix::Identity(n, n));
      den = den * (CMatrix::Identity(n, n) - std::conj(z) * a);
    }
    return num * den.inverse();
  }

  double boundary_deviation(int samples) const {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k)
      worst = std::max(worst, std::abs(std::abs((*this)(unit_circle(2.0 * kPi * k / samples))) - 1.0));
    return worst;
  }

private:
  std::vector<Complex> zeros_;
};

/// Blaschke product vanishing on A: one factor per root of the minimal
/// polynomial, repeated by the size of the largest Jordan block.
inline Blaschke blaschke_annihilator(const CMatrix &a, double cluster_radius = 1e-6) {
  if (a.rows() != a.cols() || a.rows() == 0) throw InputError("blaschke_annihilator: matrix must be square");
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  std::vector<Complex> eig(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (const Complex e : eig)
    if (!(std::abs(e) < 1.0)) throw DomainError("blaschke_annihilator: eigenvalue outside the open disk");
  const auto n = a.rows();
  std::vector<Complex> zeros;
  for (const auto &[value, count] : poly2::cluster(eig, cluster_radius)) {
    const CMatrix shifted = a - value * CMatrix::Identity(n, n);
    CMatrix power = shifted;
    int index = 1;
    while (index < count && linalg::nullity(power, 1e-9, 1.0) < count) {
      power = power * shifted;
      ++index;
    }
    for (int k = 0; k < index; ++k) zeros.push_back(value);
  }
  Blaschke u(zeros);
  if (!(linalg::spectral_norm(u.at_matrix(a)) <= 1e-9)) {
    throw DomainError("blaschke_annihilator: u(A) does not vanish to tolerance");
  }
  return u;
}

/// Finite-dimensional data of the restriction of (S, T) to u(S)H^2.
struct Restriction {
  int degree = 0;          ///< d = deg u
  int codimension = 0;     ///< measured codim of the range of u(S)
  int expected = 0;        ///< d * M
  int truncation = 0;      ///< truncation used for the measurement
  CMatrix defect_basis;    ///< orthonormal basis of the complement of the range, truncated coefficients
  CMatrix compressed_S;    ///< compression of S to the complement
  CMatrix compressed_T;    ///< compression of T to the complement
  Blaschke u{std::vector<Complex>{}};
};

namespace detail {

/// Truncation so the tails of the Szego-type series at the zeros of u drop below 1e-14.
inline int restriction_truncation(const Blaschke &u) {
  double r = 0.0;
  for (const Complex a : u.zeros()) r = std::max(r, std::abs(a));
  int t = 40;
  if (r > 0.0) t = std::max(t, static_cast<int>(std::ceil(std::log(1e-14) / std::log(r))) + u.degree() + 2);
  return t;
}

inline CMatrix kron_identity(const std::vector<Complex> &coeffs, int m) {
  const auto len = static_cast<Eigen::Index>(coeffs.size());
  CMatrix out = CMatrix::Zero(len * m, m);
  for (Eigen::Index a = 0; a < len; ++a) out.block(a * m, 0, m, m) = coeffs[static_cast<std::size_t>(a)] * CMatrix::Identity(m, m);
  return out;
}

} // namespace detail

/// The complement of u(S)H^2 is spanned by z^r / prod(1 - conj(a_i) z) times
/// e_k for r < d. The codimension is measured independently as the nullity
/// of the truncated u(S)^*.
inline Restriction restrict_via_blaschke(const ShiftModel &model, const Blaschke &u) {
  if (u.degree() == 0) throw DomainError("restrict_via_blaschke: u must have positive degree");
  if (model.truncation_degree() < u.degree()) {
    throw DomainError("restrict_via_blaschke: truncation too small for the degree of u");
  }
  Restriction out;
  out.u = u;
  out.degree = u.degree();
  const int m = model.M();
  out.expected = out.degree * m;
  const int t = detail::restriction_truncation(u);
  out.truncation = t;
  const ShiftModel big(model.colligation(), t);

  const std::vector<Complex> uc = u.taylor(t + 1);
  CMatrix us = CMatrix::Zero(big.dim(), big.dim());
  for (int k = 0; k <= t; ++k)
    for (int a = k; a <= t; ++a) us.block(a * m, (a - k) * m, m, m) = uc[static_cast<std::size_t>(k)] * CMatrix::Identity(m, m);
  out.codimension = linalg::nullity(us.adjoint(), kRankTol, 1.0);

  CMatrix span(big.dim(), out.expected);
  for (int r = 0; r < out.degree; ++r) {
    std::vector<Complex> c(static_cast<std::size_t>(r + 1), 0.0);
    c.back() = 1.0;
    span.middleCols(r * m, m) = detail::kron_identity(u.series_quotient(UniPoly(c), t + 1), m);
  }
  Eigen::HouseholderQR<CMatrix> qr(span);
  out.defect_basis = qr.householderQ() * CMatrix::Identity(big.dim(), out.expected);
  out.compressed_S = out.defect_basis.adjoint() * big.S() * out.defect_basis;
  out.compressed_T = out.defect_basis.adjoint() * big.T() * out.defect_basis;
  return out;
}

/// ||p(A, B)|| for the compressed pair; vanishes because the complement is co-invariant.
inline double compressed_annihilation(const Restriction &r, const BiPoly &p) {
  const auto n = r.compressed_S.rows();
  CMatrix out = CMatrix::Zero(n, n);
  CMatrix zi = CMatrix::Identity(n, n);
  for (int i = 0; i <= p.deg_z(); ++i) {
    CMatrix wj = CMatrix::Identity(n, n);
    for (int j = 0; j <= p.deg_w(); ++j) {
      out += p.coeff(i, j) * zi * wj;
      wj = wj * r.compressed_T;
    }
    zi = zi * r.compressed_S;
  }
  return linalg::spectral_norm(out);
}

/// Joint-kernel dimension of the restricted pair at (lambda, mu), computed as
/// the rank of the projection of s_lambda ker(Phi(lambda) - mu)^* onto the range of u(S).
inline int restricted_joint_kernel_dim(const ShiftModel &model, const Restriction &r, Complex lambda, Complex mu) {
  const int m = model.M();
  const CMatrix gap = (model.phi(lambda) - mu * CMatrix::Identity(m, m)).adjoint();
  Eigen::JacobiSVD<CMatrix> svd(gap, Eigen::ComputeFullV);
  const int k = linalg::nullity(gap, kRankTol, 1.0);
  if (k == 0) return 0;
  const CMatrix v = svd.matrixV().rightCols(k);
  const int t = std::max(r.truncation,
                         static_cast<int>(std::ceil(std::log(1e-14) / std::log(std::max(std::abs(lambda), 1e-3)))));
  const Eigen::Index rows = static_cast<Eigen::Index>(m) * (t + 1);
  CMatrix l = CMatrix::Zero(rows, k);
  Complex power = 1.0;
  for (int a = 0; a <= t; ++a, power *= std::conj(lambda)) l.middleRows(a * m, m) = power * v;
  CMatrix basis = CMatrix::Zero(rows, r.defect_basis.cols());
  const Eigen::Index common = std::min(rows, r.defect_basis.rows());
  basis.topRows(common) = r.defect_basis.topRows(common);
  const CMatrix proj = basis.adjoint() * l;
  CMatrix gram = CMatrix::Identity(k, k) / (1.0 - std::norm(lambda)) - proj.adjoint() * proj;
  gram = 0.5 * (gram + gram.adjoint()).eval();
  return linalg::numerical_rank(gram, kRankTol, 1.0);
}

struct StabilityResult {
  bool stable = true;
  int checked = 0;
  int excluded = 0;
  std::vector<std::vector<int>> restricted_dims;
};

/// At the rank samples, the restricted pair must have the same joint-kernel
/// dimension alpha_j. Points with lambda in sigma(A) and mu in sigma(B) for
/// the compressed pair (A, B) are skipped.
inline StabilityResult rank_stability_check(const ShiftModel &model, const RankResult &rank, const Blaschke &u) {
  const Restriction r = restrict_via_blaschke(model, u);
  Eigen::ComplexEigenSolver<CMatrix> ea(r.compressed_S, false);
  Eigen::ComplexEigenSolver<CMatrix> eb(r.compressed_T, false);
  auto near = [](const Eigen::VectorXcd &spec, Complex x) {
    for (Eigen::Index i = 0; i < spec.size(); ++i)
      if (std::abs(spec(i) - x) < 1e-6) return true;
    return false;
  };
  StabilityResult out;
  for (std::size_t j = 0; j < rank.per_component_samples.size(); ++j) {
    std::vector<int> dims;
    for (const auto &s : rank.per_component_samples[j]) {
      if (near(ea.eigenvalues(), s.point.z) && near(eb.eigenvalues(), s.point.w)) {
        ++out.excluded;
        continue;
      }
      const int d = restricted_joint_kernel_dim(model, r, s.point.z, s.point.w);
      dims.push_back(d);
      ++out.checked;
      if (d != rank.alpha[j]) out.stable = false;
    }
    out.restricted_dims.push_back(std::move(dims));
  }
  return out;
}

} // namespace isopair_lab::isopair
