#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "isopair_lab/linalg.hpp"
#include "isopair_lab/types.hpp"

namespace isopair_lab::poly2 {

/// Default numerical thresholds of the module.
struct Tolerances {
  double residual = 1e-8;    ///< |p(z,w)| on the variety, scaled by 1+max|coeff|
  double regularity = 1e-6;  ///< |grad p| above this (same scaling) means regular
  double inner_toral = 1e-8; ///< boundary deviation ||mu|-1|
  double cluster = 1e-6;     ///< roots closer than this are one root
  double square_free = 1e-10;
};

// ---------------------------------------------------------------------------
// UniPoly
// ---------------------------------------------------------------------------

/// Dense univariate polynomial, coefficients in ascending powers.
class UniPoly {
public:
  UniPoly() = default;

  explicit UniPoly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }

  UniPoly(std::initializer_list<Complex> coeffs) : c_(coeffs) { trim(); }

  static UniPoly constant(Complex c) { return UniPoly(std::vector<Complex>{c}); }

  static UniPoly from_roots(std::span<const Complex> roots) {
    std::vector<Complex> c{1.0};
    for (const Complex r : roots) {
      std::vector<Complex> next(c.size() + 1, 0.0);
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k + 1] += c[k];
        next[k] -= r * c[k];
      }
      c = std::move(next);
    }
    return UniPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Complex> &coeffs() const { return c_; }

  Complex coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : 0.0;
  }

  Complex leading() const { return c_.empty() ? Complex(0.0) : c_.back(); }

  Complex operator()(Complex x) const {
    Complex acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      acc = acc * x + *it;
    }
    return acc;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const Complex v : c_) {
      m = std::max(m, std::abs(v));
    }
    return m;
  }

  UniPoly derivative() const {
    if (c_.size() <= 1) {
      return {};
    }
    std::vector<Complex> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) {
      d[k - 1] = static_cast<double>(k) * c_[k];
    }
    return UniPoly(std::move(d));
  }

  UniPoly monic() const {
    if (is_zero()) {
      throw DomainError("UniPoly::monic: zero polynomial");
    }
    std::vector<Complex> c = c_;
    const Complex lead = c.back();
    for (auto &v : c) {
      v /= lead;
    }
    return UniPoly(std::move(c));
  }

  /// Drops coefficients below rel_tol * max|coeff|.
  UniPoly chopped(double rel_tol) const {
    const double cut = rel_tol * max_abs_coeff();
    std::vector<Complex> c = c_;
    for (auto &v : c) {
      if (std::abs(v) <= cut) {
        v = 0.0;
      }
    }
    return UniPoly(std::move(c));
  }

  friend UniPoly operator+(const UniPoly &a, const UniPoly &b) {
    std::vector<Complex> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return UniPoly(std::move(c));
  }

  friend UniPoly operator-(const UniPoly &a, const UniPoly &b) { return a + b * Complex(-1.0); }

  friend UniPoly operator*(const UniPoly &a, const UniPoly &b) {
    if (a.is_zero() || b.is_zero()) {
      return {};
    }
    std::vector<Complex> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        c[i + j] += a.c_[i] * b.c_[j];
      }
    }
    return UniPoly(std::move(c));
  }

  friend UniPoly operator*(const UniPoly &a, Complex s) {
    std::vector<Complex> c = a.c_;
    for (auto &v : c) v *= s;
    return UniPoly(std::move(c));
  }

  /// Quotient of synthetic division by (x - r); the remainder is discarded.
  UniPoly deflate(Complex r) const {
    if (c_.size() <= 1) {
      return {};
    }
    std::vector<Complex> q(c_.size() - 1);
    Complex carry = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      q[k] = carry;
      carry = c_[k] + carry * r;
    }
    return UniPoly(std::move(q));
  }

private:
  void trim() {
    while (!c_.empty() && c_.back() == Complex(0.0)) {
      c_.pop_back();
    }
  }

  std::vector<Complex> c_;
};

// ---------------------------------------------------------------------------
// BiPoly
// ---------------------------------------------------------------------------

/// Dense bivariate polynomial; coeff(i, j) multiplies z^i w^j.
/// Storage is trimmed so the last row and column carry a nonzero entry;
/// the zero polynomial has an empty grid.
class BiPoly {
public:
  BiPoly() = default;

  /// Grid of (n+1) x (m+1) coefficients, row-major, row = power of z.
  BiPoly(int n, int m, std::vector<Complex> grid) : rows_(n + 1), cols_(m + 1), c_(std::move(grid)) {
    if (n < 0 || m < 0 || c_.size() != static_cast<std::size_t>(rows_ * cols_)) {
      throw InputError("BiPoly: grid size does not match bidegree");
    }
    normalize();
  }

  static BiPoly constant(Complex c) { return BiPoly(0, 0, {c}); }

  static BiPoly monomial(int i, int j, Complex c = 1.0) {
    std::vector<Complex> g(static_cast<std::size_t>((i + 1) * (j + 1)), 0.0);
    g.back() = c;
    return BiPoly(i, j, std::move(g));
  }

  static BiPoly z() { return monomial(1, 0); }
  static BiPoly w() { return monomial(0, 1); }

  /// Builds from (i, j, coefficient) triples; repeated terms add up.
  static BiPoly from_terms(std::initializer_list<std::tuple<int, int, Complex>> terms) {
    int n = 0;
    int m = 0;
    for (const auto &[i, j, c] : terms) {
      n = std::max(n, i);
      m = std::max(m, j);
    }
    std::vector<Complex> g(static_cast<std::size_t>((n + 1) * (m + 1)), 0.0);
    for (const auto &[i, j, c] : terms) {
      g[static_cast<std::size_t>(i * (m + 1) + j)] += c;
    }
    return BiPoly(n, m, std::move(g));
  }

  /// Polynomial in z alone.
  static BiPoly from_z(const UniPoly &u) {
    if (u.is_zero()) return {};
    return BiPoly(u.degree(), 0, u.coeffs());
  }

  /// Polynomial in w alone.
  static BiPoly from_w(const UniPoly &u) {
    if (u.is_zero()) return {};
    return BiPoly(0, u.degree(), u.coeffs());
  }

  bool is_zero() const { return c_.empty(); }
  int deg_z() const { return rows_ - 1; }
  int deg_w() const { return cols_ - 1; }
  std::pair<int, int> bidegree() const { return {deg_z(), deg_w()}; }

  int total_degree() const {
    int d = -1;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (at(i, j) != Complex(0.0)) d = std::max(d, i + j);
    return d;
  }

  Complex coeff(int i, int j) const {
    if (i < 0 || j < 0 || i >= rows_ || j >= cols_) return 0.0;
    return at(i, j);
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const Complex v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  double scale() const { return 1.0 + max_abs_coeff(); }

  Complex operator()(Complex z, Complex w) const {
    Complex acc = 0.0;
    for (int i = rows_ - 1; i >= 0; --i) {
      Complex row = 0.0;
      for (int j = cols_ - 1; j >= 0; --j) {
        row = row * w + at(i, j);
      }
      acc = acc * z + row;
    }
    return acc;
  }

  BiPoly dz() const {
    if (rows_ <= 1) return {};
    std::vector<Complex> g(static_cast<std::size_t>((rows_ - 1) * cols_));
    for (int i = 1; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        g[static_cast<std::size_t>((i - 1) * cols_ + j)] = static_cast<double>(i) * at(i, j);
    return BiPoly(rows_ - 2, cols_ - 1, std::move(g));
  }

  BiPoly dw() const { return swapped().dz().swapped(); }

  /// Exchanges the roles of z and w (transposed coefficient grid).
  BiPoly swapped() const {
    if (is_zero()) return {};
    std::vector<Complex> g(c_.size());
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        g[static_cast<std::size_t>(j * rows_ + i)] = at(i, j);
    return BiPoly(cols_ - 1, rows_ - 1, std::move(g));
  }

  /// Coefficient of w^j as a polynomial in z.
  UniPoly w_coefficient(int j) const {
    std::vector<Complex> u(static_cast<std::size_t>(std::max(rows_, 0)));
    for (int i = 0; i < rows_; ++i) u[static_cast<std::size_t>(i)] = coeff(i, j);
    return UniPoly(std::move(u));
  }

  BiPoly conj_coeffs() const {
    BiPoly out = *this;
    for (auto &v : out.c_) v = std::conj(v);
    return out;
  }

  BiPoly chopped(double rel_tol) const {
    const double cut = rel_tol * max_abs_coeff();
    BiPoly out = *this;
    for (auto &v : out.c_)
      if (std::abs(v) <= cut) v = 0.0;
    out.normalize();
    return out;
  }

  friend BiPoly operator+(const BiPoly &a, const BiPoly &b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const int r = std::max(a.rows_, b.rows_);
    const int c = std::max(a.cols_, b.cols_);
    std::vector<Complex> g(static_cast<std::size_t>(r * c), 0.0);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        g[static_cast<std::size_t>(i * c + j)] = a.coeff(i, j) + b.coeff(i, j);
    return BiPoly(r - 1, c - 1, std::move(g));
  }

  friend BiPoly operator*(const BiPoly &a, Complex s) {
    if (s == Complex(0.0)) return {};
    BiPoly out = a;
    for (auto &v : out.c_) v *= s;
    out.normalize();
    return out;
  }

  friend BiPoly operator*(Complex s, const BiPoly &a) { return a * s; }
  friend BiPoly operator-(const BiPoly &a) { return a * Complex(-1.0); }
  friend BiPoly operator-(const BiPoly &a, const BiPoly &b) { return a + (-b); }

  friend BiPoly operator*(const BiPoly &a, const BiPoly &b) {
    if (a.is_zero() || b.is_zero()) return {};
    const int r = a.rows_ + b.rows_ - 1;
    const int c = a.cols_ + b.cols_ - 1;
    std::vector<Complex> g(static_cast<std::size_t>(r * c), 0.0);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) {
        const Complex x = a.at(i, j);
        if (x == Complex(0.0)) continue;
        for (int k = 0; k < b.rows_; ++k)
          for (int l = 0; l < b.cols_; ++l)
            g[static_cast<std::size_t>((i + k) * c + j + l)] += x * b.at(k, l);
      }
    return BiPoly(r - 1, c - 1, std::move(g));
  }

  BiPoly &operator+=(const BiPoly &o) { return *this = *this + o; }
  BiPoly &operator*=(const BiPoly &o) { return *this = *this * o; }

  BiPoly pow(int e) const {
    BiPoly out = constant(1.0);
    for (int k = 0; k < e; ++k) out = out * *this;
    return out;
  }

  friend bool operator==(const BiPoly &a, const BiPoly &b) = default;

private:
  Complex at(int i, int j) const { return c_[static_cast<std::size_t>(i * cols_ + j)]; }

  void normalize() {
    int r = rows_;
    int c = cols_;
    auto row_zero = [&](int i) {
      for (int j = 0; j < c; ++j)
        if (c_[static_cast<std::size_t>(i * cols_ + j)] != Complex(0.0)) return false;
      return true;
    };
    auto col_zero = [&](int j) {
      for (int i = 0; i < r; ++i)
        if (c_[static_cast<std::size_t>(i * cols_ + j)] != Complex(0.0)) return false;
      return true;
    };
    while (r > 0 && row_zero(r - 1)) --r;
    while (c > 0 && r > 0 && col_zero(c - 1)) --c;
    if (r == 0 || c == 0) {
      rows_ = cols_ = 0;
      c_.clear();
      return;
    }
    if (r == rows_ && c == cols_) return;
    std::vector<Complex> g(static_cast<std::size_t>(r * c));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        g[static_cast<std::size_t>(i * c + j)] = c_[static_cast<std::size_t>(i * cols_ + j)];
    rows_ = r;
    cols_ = c;
    c_ = std::move(g);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> c_;
};

/// Max coefficient deviation between two polynomials.
inline double coeff_distance(const BiPoly &a, const BiPoly &b) {
  const BiPoly d = a - b;
  return d.max_abs_coeff();
}

// ---------------------------------------------------------------------------
// Evaluation, slices, gradient
// ---------------------------------------------------------------------------

inline Complex eval(const BiPoly &p, Complex z, Complex w) { return p(z, w); }

/// p_lambda(w) = p(lambda, w).
inline UniPoly slice_at_z(const BiPoly &p, Complex lambda) {
  std::vector<Complex> u(static_cast<std::size_t>(p.deg_w() + 1), 0.0);
  for (int j = 0; j <= p.deg_w(); ++j) u[static_cast<std::size_t>(j)] = p.w_coefficient(j)(lambda);
  return UniPoly(std::move(u));
}

/// p^mu(z) = p(z, mu).
inline UniPoly slice_at_w(const BiPoly &p, Complex mu) { return slice_at_z(p.swapped(), mu); }

inline std::pair<Complex, Complex> gradient(const BiPoly &p, Complex z, Complex w) {
  return {p.dz()(z, w), p.dw()(z, w)};
}

// ---------------------------------------------------------------------------
// Roots
// ---------------------------------------------------------------------------

namespace detail {

/// Diagonal similarity balancing (radix 2) in place.
inline void balance(CMatrix &a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool converged = false;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

} // namespace detail

/// All roots of a nonzero polynomial (with multiplicity) via eigenvalues of
/// the balanced companion matrix, followed by a guarded Newton polish.
inline std::vector<Complex> roots(const UniPoly &u) {
  if (u.is_zero()) {
    throw DomainError("roots: zero polynomial");
  }
  const auto &c = u.coeffs();
  std::vector<Complex> out;
  std::size_t low = 0;
  while (low < c.size() && c[low] == Complex(0.0)) {
    out.emplace_back(0.0);
    ++low;
  }
  const int n = u.degree() - static_cast<int>(low);
  if (n <= 0) {
    return out;
  }
  const Complex lead = c.back();
  CMatrix comp = CMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[low + static_cast<std::size_t>(i)] / lead;
  detail::balance(comp);
  Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
  const UniPoly du = u.derivative();
  for (int i = 0; i < n; ++i) {
    Complex r = es.eigenvalues()(i);
    for (int step = 0; step < 2; ++step) {
      const Complex f = u(r);
      const Complex df = du(r);
      if (std::abs(df) == 0.0) break;
      const Complex cand = r - f / df;
      if (std::abs(u(cand)) < std::abs(f)) {
        r = cand;
      } else {
        break;
      }
    }
    out.push_back(r);
  }
  return out;
}

/// Groups values closer than `radius`; returns cluster centroids and sizes
/// in a deterministic order (by real part, then imaginary part).
inline std::vector<std::pair<Complex, int>> cluster(std::span<const Complex> values, double radius) {
  std::vector<std::pair<Complex, int>> groups;
  std::vector<Complex> sums;
  for (const Complex v : values) {
    bool placed = false;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (std::abs(groups[g].first - v) <= radius) {
        sums[g] += v;
        ++groups[g].second;
        groups[g].first = sums[g] / static_cast<double>(groups[g].second);
        placed = true;
        break;
      }
    }
    if (!placed) {
      groups.emplace_back(v, 1);
      sums.push_back(v);
    }
  }
  std::sort(groups.begin(), groups.end(), [](const auto &a, const auto &b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  });
  return groups;
}

// ---------------------------------------------------------------------------
// Regular points
// ---------------------------------------------------------------------------

inline bool is_regular_point(const BiPoly &p, Complex z, Complex w, const Tolerances &tol = {}) {
  const double scale = p.scale();
  if (std::abs(p(z, w)) > tol.residual * scale) {
    throw DomainError("is_regular_point: point is not on the variety");
  }
  const auto [gz, gw] = gradient(p, z, w);
  return std::hypot(std::abs(gz), std::abs(gw)) > tol.regularity * scale;
}

// ---------------------------------------------------------------------------
// Resultants, content, square-freeness
// ---------------------------------------------------------------------------

/// Res_w(f, g) as a polynomial in z. The Sylvester determinant is sampled
/// at roots of unity and interpolated with the discrete Fourier transform.
inline UniPoly resultant_w(const BiPoly &f, const BiPoly &g) {
  if (f.is_zero() || g.is_zero()) {
    return {};
  }
  const int mf = f.deg_w();
  const int mg = g.deg_w();
  const int size = mf + mg;
  if (size == 0) {
    return UniPoly::constant(1.0);
  }
  const int bound = std::max(0, f.deg_z()) * mg + std::max(0, g.deg_z()) * mf;
  const int samples = bound + 1;
  std::vector<Complex> values(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const Complex z = unit_circle(2.0 * kPi * k / samples);
    CMatrix syl = CMatrix::Zero(size, size);
    for (int r = 0; r < mg; ++r)
      for (int j = 0; j <= mf; ++j) syl(r, r + mf - j) = f.w_coefficient(j)(z);
    for (int r = 0; r < mf; ++r)
      for (int j = 0; j <= mg; ++j) syl(mg + r, r + mg - j) = g.w_coefficient(j)(z);
    values[static_cast<std::size_t>(k)] = syl.determinant();
  }
  std::vector<Complex> coeffs(static_cast<std::size_t>(samples), 0.0);
  for (int d = 0; d < samples; ++d) {
    Complex acc = 0.0;
    for (int k = 0; k < samples; ++k) {
      acc += values[static_cast<std::size_t>(k)] * unit_circle(-2.0 * kPi * k * d / samples);
    }
    coeffs[static_cast<std::size_t>(d)] = acc / static_cast<double>(samples);
  }
  return UniPoly(std::move(coeffs));
}

/// Content of p with respect to w (gcd of its w-coefficients, a monic
/// polynomial in z) and the primitive part p / content.
struct ContentSplit {
  UniPoly content;
  BiPoly primitive;
  std::vector<Complex> content_roots;
};

inline ContentSplit content_in_z(const BiPoly &p, const Tolerances &tol = {}) {
  if (p.is_zero()) {
    throw DomainError("content_in_z: zero polynomial");
  }
  std::vector<UniPoly> cols;
  for (int j = 0; j <= p.deg_w(); ++j) cols.push_back(p.w_coefficient(j));
  std::vector<Complex> found;
  for (;;) {
    const UniPoly *lowest = nullptr;
    for (const auto &c : cols)
      if (!c.is_zero() && (lowest == nullptr || c.degree() < lowest->degree())) lowest = &c;
    if (lowest == nullptr || lowest->degree() <= 0) break;
    bool divided = false;
    for (const Complex r : roots(*lowest)) {
      bool common = true;
      for (const auto &c : cols) {
        if (!c.is_zero() && std::abs(c(r)) > tol.residual * (1.0 + c.max_abs_coeff())) {
          common = false;
          break;
        }
      }
      if (common) {
        for (auto &c : cols) {
          if (!c.is_zero()) c = c.deflate(r).chopped(1e-14);
        }
        found.push_back(r);
        divided = true;
        break;
      }
    }
    if (!divided) break;
  }
  const int rows = [&] {
    int d = 0;
    for (const auto &c : cols) d = std::max(d, c.degree());
    return d;
  }();
  std::vector<Complex> g(static_cast<std::size_t>((rows + 1) * (p.deg_w() + 1)), 0.0);
  for (int j = 0; j <= p.deg_w(); ++j)
    for (int i = 0; i <= rows; ++i)
      g[static_cast<std::size_t>(i * (p.deg_w() + 1) + j)] = cols[static_cast<std::size_t>(j)].coeff(i);
  return {UniPoly::from_roots(found), BiPoly(rows, p.deg_w(), std::move(g)), found};
}

struct SquareFreeReport {
  bool square_free = false;
  double resultant_norm = 0.0; ///< max |coeff| of Res_w(p~, dp~/dw) for unit-scaled primitive p~
  bool cross_check_agrees = true;
};

namespace detail {

struct DirectionalSquareFree {
  bool verdict;
  double resultant_norm;
};

inline DirectionalSquareFree square_free_in_w(const BiPoly &p, const Tolerances &tol) {
  const ContentSplit split = content_in_z(p, tol);
  bool content_ok = true;
  const auto groups = cluster(split.content_roots, tol.cluster);
  for (const auto &[value, count] : groups) {
    if (count > 1) content_ok = false;
  }
  if (split.primitive.deg_w() <= 0) {
    return {content_ok, 1.0};
  }
  const BiPoly unit = split.primitive * Complex(1.0 / split.primitive.max_abs_coeff());
  const double norm = resultant_w(unit, unit.dw()).max_abs_coeff();
  return {content_ok && norm > tol.square_free, norm};
}

} // namespace detail

/// Decides square-freeness of a nonconstant p numerically: the content in z
/// must have distinct roots and Res_w(primitive part, its w-derivative) must
/// not vanish identically. The same test with z and w exchanged runs as a
/// cross-check; both must pass.
inline SquareFreeReport is_square_free(const BiPoly &p, const Tolerances &tol = {}) {
  if (p.is_zero() || (p.deg_z() <= 0 && p.deg_w() <= 0)) {
    throw DomainError("is_square_free: polynomial must be nonconstant");
  }
  const auto in_w = detail::square_free_in_w(p, tol);
  const auto in_z = detail::square_free_in_w(p.swapped(), tol);
  SquareFreeReport rep;
  rep.square_free = in_w.verdict && in_z.verdict;
  rep.resultant_norm = p.deg_w() > 0 ? in_w.resultant_norm : in_z.resultant_norm;
  rep.cross_check_agrees = in_w.verdict == in_z.verdict;
  return rep;
}

/// The finitely many lambda in the open disk where p_lambda has a repeated
/// zero, drops degree, or vanishes identically.
inline std::vector<Complex> exceptional_lambdas(const BiPoly &p, const Tolerances &tol = {}) {
  if (p.is_zero() || p.deg_w() <= 0) {
    throw DomainError("exceptional_lambdas: polynomial needs positive w-degree");
  }
  const ContentSplit split = content_in_z(p, tol);
  const BiPoly unit = split.primitive * Complex(1.0 / split.primitive.max_abs_coeff());
  const UniPoly res = resultant_w(unit, unit.dw()).chopped(1e-12);
  if (res.max_abs_coeff() <= tol.square_free) {
    throw DomainError("exceptional_lambdas: resultant vanishes identically (not square free)");
  }
  std::vector<Complex> candidates;
  for (const Complex r : roots(res)) candidates.push_back(r);
  const UniPoly lead = p.w_coefficient(p.deg_w()).chopped(1e-14);
  if (lead.degree() > 0) {
    for (const Complex r : roots(lead)) candidates.push_back(r);
  }
  for (const Complex r : split.content_roots) candidates.push_back(r);
  std::vector<Complex> inside;
  for (const Complex r : candidates)
    if (std::abs(r) < 1.0 + tol.cluster) inside.push_back(r);
  std::vector<Complex> out;
  for (const auto &[value, count] : cluster(inside, tol.cluster)) out.push_back(value);
  return out;
}

// ---------------------------------------------------------------------------
// Inner-toral certification
// ---------------------------------------------------------------------------

struct Witness {
  Complex z;
  std::optional<Complex> w; ///< empty when the fiber degenerates (root at infinity)
  std::string reason;
};

struct InnerToralReport {
  bool pass = false;
  double boundary_max_deviation = 0.0;
  double interior_max_modulus = 0.0;
  double exterior_min_modulus = 0.0; ///< only meaningful when the exterior branch ran
  std::vector<Witness> witnesses;
  double tolerance = 0.0;
};

namespace detail {

inline constexpr std::size_t kMaxWitnesses = 16;
inline constexpr double kGoldenAngle = 2.39996322972865332;

/// Interior sample k of n: a sunflower pattern filling |lambda| <= 0.95.
inline Complex interior_sample(int k, int n) {
  const double r = 0.95 * std::sqrt((k + 0.5) / n);
  return std::polar(r, k * kGoldenAngle);
}

inline Complex boundary_sample(int k, int n) { return unit_circle(2.0 * kPi * (k + 0.5) / n); }

inline void inner_toral_direction(const BiPoly &p, int boundary_samples, int interior_samples, bool exterior,
                                  bool swapped, InnerToralReport &rep) {
  const double tol = rep.tolerance;
  const int m = p.deg_w();
  auto add_witness = [&](Complex lambda, std::optional<Complex> mu, const char *why) {
    if (rep.witnesses.size() >= kMaxWitnesses) return;
    if (swapped) {
      rep.witnesses.push_back({mu.value_or(Complex(std::nan(""), 0.0)), lambda, why});
      if (!mu) rep.witnesses.back().z = Complex(std::nan(""), 0.0);
    } else {
      rep.witnesses.push_back({lambda, mu, why});
    }
  };
  auto fiber = [&](Complex lambda) -> std::optional<std::vector<Complex>> {
    const UniPoly s = slice_at_z(p, lambda);
    const double cut = 1e-12 * p.scale();
    if (s.is_zero() || s.max_abs_coeff() <= cut) {
      add_witness(lambda, std::nullopt, "fiber vanishes identically");
      return std::nullopt;
    }
    if (std::abs(s.leading()) <= cut || s.degree() < m) {
      add_witness(lambda, std::nullopt, "fiber drops degree");
      return std::nullopt;
    }
    return roots(s);
  };
  for (int k = 0; k < boundary_samples; ++k) {
    const Complex lambda = boundary_sample(k, boundary_samples);
    const auto rs = fiber(lambda);
    if (!rs) {
      rep.boundary_max_deviation = std::max(rep.boundary_max_deviation, 1.0);
      continue;
    }
    for (const Complex mu : *rs) {
      const double dev = std::abs(std::abs(mu) - 1.0);
      rep.boundary_max_deviation = std::max(rep.boundary_max_deviation, dev);
      if (dev > tol) add_witness(lambda, mu, "boundary fiber root off the circle");
    }
  }
  for (int k = 0; k < interior_samples; ++k) {
    const Complex lambda = interior_sample(k, interior_samples);
    const auto rs = fiber(lambda);
    if (!rs) {
      rep.interior_max_modulus = std::max(rep.interior_max_modulus, 1.0);
      continue;
    }
    for (const Complex mu : *rs) {
      rep.interior_max_modulus = std::max(rep.interior_max_modulus, std::abs(mu));
      if (std::abs(mu) >= 1.0 - tol) add_witness(lambda, mu, "interior fiber root outside the disk");
    }
  }
  if (exterior) {
    for (int k = 0; k < interior_samples; ++k) {
      const Complex inner = interior_sample(k, interior_samples);
      const Complex lambda = 1.0 / std::conj(inner);
      const UniPoly s = slice_at_z(p, lambda);
      if (s.is_zero()) {
        add_witness(lambda, std::nullopt, "fiber vanishes identically");
        continue;
      }
      // Degree drop in the exterior means a root escaped to infinity, which
      // stays in the exterior bidisk.
      for (const Complex mu : roots(s.chopped(1e-14))) {
        const double mod = std::abs(mu);
        if (rep.exterior_min_modulus == 0.0 || mod < rep.exterior_min_modulus) rep.exterior_min_modulus = mod;
        if (mod <= 1.0 + tol) add_witness(lambda, mu, "exterior fiber root inside the closed disk");
      }
    }
  }
}

} // namespace detail

/// Samples fibers over the circle and the disk in both variables. Every root
/// over a boundary lambda must lie on the circle, every root over an
/// interior lambda inside the disk.
inline InnerToralReport check_inner_toral(const BiPoly &p, int boundary_samples, int interior_samples,
                                          double tolerance = Tolerances{}.inner_toral, bool exterior = false) {
  if (p.is_zero() || p.deg_z() <= 0 || p.deg_w() <= 0) {
    throw DomainError("check_inner_toral: polynomial must depend on both variables");
  }
  if (boundary_samples <= 0 || interior_samples <= 0) {
    throw InputError("check_inner_toral: sample counts must be positive");
  }
  InnerToralReport rep;
  rep.tolerance = tolerance;
  detail::inner_toral_direction(p, boundary_samples, interior_samples, exterior, false, rep);
  detail::inner_toral_direction(p.swapped(), boundary_samples, interior_samples, exterior, true, rep);
  rep.pass = rep.boundary_max_deviation <= tolerance && rep.interior_max_modulus < 1.0 - tolerance &&
             rep.witnesses.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Variety sampling
// ---------------------------------------------------------------------------

struct VarietyPoint {
  Complex z;
  Complex w;
  bool regular = false;
  std::optional<int> component_index;
};

/// Deterministic sample of points of Z(p) inside the bidisk. Fibers over
/// exceptional lambdas are skipped. When `factors` is non-empty each point
/// records which factor vanishes there.
inline std::vector<VarietyPoint> sample_variety(const BiPoly &p, int count, std::uint64_t seed,
                                                std::span<const BiPoly> factors = {},
                                                const Tolerances &tol = {}, double max_radius = 0.9) {
  if (count <= 0) return {};
  const std::vector<Complex> exceptional = exceptional_lambdas(p, tol);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VarietyPoint> out;
  const int max_attempts = 100 * count;
  const double scale = p.scale();
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count; ++attempt) {
    const double r = 0.05 + (max_radius - 0.05) * std::sqrt(unit(rng));
    const Complex lambda = std::polar(r, 2.0 * kPi * unit(rng));
    bool near_exceptional = false;
    for (const Complex e : exceptional)
      if (std::abs(lambda - e) < 1e-3) near_exceptional = true;
    if (near_exceptional) continue;
    for (const Complex mu : roots(slice_at_z(p, lambda))) {
      if (static_cast<int>(out.size()) >= count) break;
      if (std::abs(mu) >= 1.0) continue;
      if (std::abs(p(lambda, mu)) > tol.residual * scale) continue;
      VarietyPoint pt{lambda, mu, is_regular_point(p, lambda, mu, tol), std::nullopt};
      if (!factors.empty()) {
        int best = 0;
        double best_val = std::abs(factors[0](lambda, mu)) / factors[0].scale();
        for (std::size_t j = 1; j < factors.size(); ++j) {
          const double v = std::abs(factors[j](lambda, mu)) / factors[j].scale();
          if (v < best_val) {
            best_val = v;
            best = static_cast<int>(j);
          }
        }
        pt.component_index = best;
      }
      out.push_back(pt);
    }
  }
  if (static_cast<int>(out.size()) < count) {
    throw DomainError("sample_variety: not enough points found (degenerate polynomial?)");
  }
  return out;
}

} // namespace isopair_lab::poly2
