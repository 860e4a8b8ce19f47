#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "isopair_lab/poly2.hpp"
#include "isopair_lab/types.hpp"

namespace isopair_lab::ideal {

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

/// Nearest fraction to x within `tol`, from the continued-fraction expansion.
inline mpq_class rationalize(double x, double tol = 1e-12) {
  if (!std::isfinite(x)) throw InputError("rationalize: value is not finite");
  const bool negative = x < 0;
  double rest = std::abs(x);
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(rest));
  mpz_class k_prev = 0, k = 1;
  double frac = rest - std::floor(rest);
  for (int step = 0; step < 64; ++step) {
    const mpq_class approx(h, k);
    if (std::abs(approx.get_d() - std::abs(x)) <= tol || frac < 1e-300) break;
    rest = 1.0 / frac;
    const double a = std::floor(rest);
    frac = rest - a;
    const mpz_class az(a);
    const mpz_class h_next = az * h + h_prev;
    const mpz_class k_next = az * k + k_prev;
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
  }
  mpq_class out(h, k);
  out.canonicalize();
  return negative ? mpq_class(-out) : out;
}

class GaussianRational {
public:
  GaussianRational() = default;
  GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }
  GaussianRational(long re) : re_(re), im_(0) {}
  GaussianRational(int re) : re_(re), im_(0) {}

  static GaussianRational from_strings(const std::string &re, const std::string &im) {
    try {
      return {mpq_class(re), mpq_class(im)};
    } catch (const std::invalid_argument &) {
      throw InputError("GaussianRational: cannot parse '" + re + "' / '" + im + "'");
    }
  }

  static GaussianRational from_complex(Complex c, double tol = 1e-12) {
    return {rationalize(c.real(), tol), rationalize(c.imag(), tol)};
  }

  const mpq_class &re() const { return re_; }
  const mpq_class &im() const { return im_; }
  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  Complex to_complex() const { return {re_.get_d(), im_.get_d()}; }
  GaussianRational conj() const { return {re_, -im_}; }

  friend GaussianRational operator+(const GaussianRational &a, const GaussianRational &b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
  }
  friend GaussianRational operator-(const GaussianRational &a, const GaussianRational &b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
  }
  friend GaussianRational operator-(const GaussianRational &a) { return {-a.re_, -a.im_}; }
  friend GaussianRational operator*(const GaussianRational &a, const GaussianRational &b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
  }
  friend GaussianRational operator/(const GaussianRational &a, const GaussianRational &b) {
    const mpq_class den = b.re_ * b.re_ + b.im_ * b.im_;
    if (sgn(den) == 0) throw DomainError("GaussianRational: division by zero");
    return {(a.re_ * b.re_ + a.im_ * b.im_) / den, (a.im_ * b.re_ - a.re_ * b.im_) / den};
  }
  GaussianRational &operator+=(const GaussianRational &o) { return *this = *this + o; }
  GaussianRational &operator-=(const GaussianRational &o) { return *this = *this - o; }
  friend bool operator==(const GaussianRational &a, const GaussianRational &b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

private:
  mpq_class re_ = 0;
  mpq_class im_ = 0;
};

// ---------------------------------------------------------------------------
// Sparse exact bivariate polynomials
// ---------------------------------------------------------------------------

enum class TermOrder { lex_zw, degrevlex };

inline std::string to_string(TermOrder o) { return o == TermOrder::lex_zw ? "lex_zw" : "degrevlex"; }

inline TermOrder parse_order(const std::string &s) {
  if (s == "lex_zw" || s == "lex") return TermOrder::lex_zw;
  if (s == "degrevlex") return TermOrder::degrevlex;
  throw InputError("unknown term order '" + s + "'");
}

/// Exponents (i, j) of z^i w^j.
using Monomial = std::pair<int, int>;

/// True when a is strictly larger than b. With two variables and z > w,
/// degrevlex breaks ties in total degree by the z exponent.
inline bool monomial_greater(const Monomial &a, const Monomial &b, TermOrder order) {
  if (order == TermOrder::degrevlex) {
    const int da = a.first + a.second;
    const int db = b.first + b.second;
    if (da != db) return da > db;
  }
  if (a.first != b.first) return a.first > b.first;
  return a.second > b.second;
}

inline bool divides(const Monomial &a, const Monomial &b) { return a.first <= b.first && a.second <= b.second; }

class ExactBiPoly {
public:
  using Terms = std::map<Monomial, GaussianRational>;

  ExactBiPoly() = default;
  explicit ExactBiPoly(TermOrder order) : order_(order) {}

  static ExactBiPoly monomial(int i, int j, const GaussianRational &c = 1, TermOrder order = TermOrder::lex_zw) {
    ExactBiPoly out(order);
    out.add_term({i, j}, c);
    return out;
  }

  static ExactBiPoly constant(const GaussianRational &c, TermOrder order = TermOrder::lex_zw) {
    return monomial(0, 0, c, order);
  }

  static ExactBiPoly from_terms(std::initializer_list<std::tuple<int, int, GaussianRational>> terms,
                                TermOrder order = TermOrder::lex_zw) {
    ExactBiPoly out(order);
    for (const auto &[i, j, c] : terms) out.add_term({i, j}, c);
    return out;
  }

  /// Rationalizes each floating coefficient to within `tol`.
  static ExactBiPoly from_bipoly(const poly2::BiPoly &p, double tol = 1e-12, TermOrder order = TermOrder::lex_zw) {
    ExactBiPoly out(order);
    for (int i = 0; i <= p.deg_z(); ++i)
      for (int j = 0; j <= p.deg_w(); ++j)
        if (p.coeff(i, j) != Complex(0.0)) out.add_term({i, j}, GaussianRational::from_complex(p.coeff(i, j), tol));
    return out;
  }

  poly2::BiPoly to_bipoly() const {
    if (is_zero()) return {};
    const int n = deg_z();
    const int m = deg_w();
    std::vector<Complex> g(static_cast<std::size_t>((n + 1) * (m + 1)), 0.0);
    for (const auto &[mono, c] : terms_) g[static_cast<std::size_t>(mono.first * (m + 1) + mono.second)] = c.to_complex();
    return poly2::BiPoly(n, m, std::move(g));
  }

  TermOrder order() const { return order_; }
  ExactBiPoly with_order(TermOrder o) const {
    ExactBiPoly out = *this;
    out.order_ = o;
    return out;
  }

  const Terms &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int deg_z() const {
    int d = -1;
    for (const auto &[m, c] : terms_) d = std::max(d, m.first);
    return d;
  }
  int deg_w() const {
    int d = -1;
    for (const auto &[m, c] : terms_) d = std::max(d, m.second);
    return d;
  }
  int total_degree() const {
    int d = -1;
    for (const auto &[m, c] : terms_) d = std::max(d, m.first + m.second);
    return d;
  }

  GaussianRational coeff(const Monomial &m) const {
    const auto it = terms_.find(m);
    return it == terms_.end() ? GaussianRational{} : it->second;
  }

  Monomial leading_monomial() const {
    if (is_zero()) throw DomainError("ExactBiPoly: zero polynomial has no leading term");
    Monomial best = terms_.begin()->first;
    for (const auto &[m, c] : terms_)
      if (monomial_greater(m, best, order_)) best = m;
    return best;
  }

  GaussianRational leading_coeff() const { return coeff(leading_monomial()); }

  void add_term(const Monomial &m, const GaussianRational &c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  /// this += c * z^i w^j * other
  void add_scaled(const ExactBiPoly &other, const GaussianRational &c, const Monomial &shift) {
    if (c.is_zero()) return;
    for (const auto &[m, v] : other.terms_) add_term({m.first + shift.first, m.second + shift.second}, c * v);
  }

  ExactBiPoly scaled(const GaussianRational &c) const {
    ExactBiPoly out(order_);
    out.add_scaled(*this, c, {0, 0});
    return out;
  }

  /// Evaluation at z = z0 as a univariate polynomial in w (ascending coefficients).
  std::vector<GaussianRational> slice_at_z(const GaussianRational &z0) const {
    std::vector<GaussianRational> out(static_cast<std::size_t>(std::max(deg_w() + 1, 0)));
    for (const auto &[m, c] : terms_) {
      GaussianRational term = c;
      for (int k = 0; k < m.first; ++k) term = term * z0;
      out[static_cast<std::size_t>(m.second)] += term;
    }
    return out;
  }

  ExactBiPoly swapped() const {
    ExactBiPoly out(order_);
    for (const auto &[m, c] : terms_) out.add_term({m.second, m.first}, c);
    return out;
  }

  friend ExactBiPoly operator+(const ExactBiPoly &a, const ExactBiPoly &b) {
    ExactBiPoly out = a;
    out.add_scaled(b, 1, {0, 0});
    return out;
  }
  friend ExactBiPoly operator-(const ExactBiPoly &a, const ExactBiPoly &b) {
    ExactBiPoly out = a;
    out.add_scaled(b, -1, {0, 0});
    return out;
  }
  friend ExactBiPoly operator*(const ExactBiPoly &a, const ExactBiPoly &b) {
    ExactBiPoly out(a.order_);
    for (const auto &[m, c] : a.terms_) out.add_scaled(b, c, m);
    return out;
  }
  friend bool operator==(const ExactBiPoly &a, const ExactBiPoly &b) { return a.terms_ == b.terms_; }

private:
  Terms terms_;
  TermOrder order_ = TermOrder::lex_zw;
};

// ---------------------------------------------------------------------------
// Division and Groebner bases
// ---------------------------------------------------------------------------

struct Division {
  std::vector<ExactBiPoly> quotients;
  ExactBiPoly remainder;
};

/// Multivariate division: f = sum quotients[k] * divisors[k] + remainder,
/// with no term of the remainder divisible by a leading term of a divisor.
inline Division divide(const ExactBiPoly &f, const std::vector<ExactBiPoly> &divisors) {
  const TermOrder order = f.order();
  Division out{std::vector<ExactBiPoly>(divisors.size(), ExactBiPoly(order)), ExactBiPoly(order)};
  std::vector<Monomial> lts;
  std::vector<GaussianRational> lcs;
  for (const auto &g : divisors) {
    const ExactBiPoly go = g.with_order(order);
    lts.push_back(go.leading_monomial());
    lcs.push_back(go.leading_coeff());
  }
  ExactBiPoly p = f;
  while (!p.is_zero()) {
    const Monomial lt = p.leading_monomial();
    const GaussianRational lc = p.coeff(lt);
    bool reduced = false;
    for (std::size_t k = 0; k < divisors.size(); ++k) {
      if (!divides(lts[k], lt)) continue;
      const GaussianRational factor = lc / lcs[k];
      const Monomial shift{lt.first - lts[k].first, lt.second - lts[k].second};
      p.add_scaled(divisors[k], -factor, shift);
      out.quotients[k].add_term(shift, factor);
      reduced = true;
      break;
    }
    if (!reduced) {
      out.remainder.add_term(lt, lc);
      p.add_term(lt, -lc);
    }
  }
  return out;
}

/// Basis element g = a p + b q with its cofactors.
struct TrackedPoly {
  ExactBiPoly g;
  ExactBiPoly a;
  ExactBiPoly b;
};

struct GroebnerBasis {
  std::vector<TrackedPoly> elements; ///< reduced, monic, sorted by increasing leading term
  TermOrder order = TermOrder::lex_zw;
  ExactBiPoly p;
  ExactBiPoly q;

  std::vector<ExactBiPoly> generators() const {
    std::vector<ExactBiPoly> out;
    for (const auto &e : elements) out.push_back(e.g);
    return out;
  }

  std::vector<Monomial> leading_monomials() const {
    std::vector<Monomial> out;
    for (const auto &e : elements) out.push_back(e.g.leading_monomial());
    return out;
  }
};

namespace detail {

inline TrackedPoly combine(const TrackedPoly &x, const GaussianRational &cx, const Monomial &mx, const TrackedPoly &y,
                           const GaussianRational &cy, const Monomial &my, TermOrder order) {
  TrackedPoly out{ExactBiPoly(order), ExactBiPoly(order), ExactBiPoly(order)};
  out.g.add_scaled(x.g, cx, mx);
  out.g.add_scaled(y.g, cy, my);
  out.a.add_scaled(x.a, cx, mx);
  out.a.add_scaled(y.a, cy, my);
  out.b.add_scaled(x.b, cx, mx);
  out.b.add_scaled(y.b, cy, my);
  return out;
}

/// Fully reduces t.g by the basis, carrying the cofactors along.
inline TrackedPoly reduce(const TrackedPoly &t, const std::vector<TrackedPoly> &basis,
                          std::optional<std::size_t> skip = std::nullopt) {
  std::vector<ExactBiPoly> divisors;
  std::vector<std::size_t> index;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (skip && *skip == k) continue;
    divisors.push_back(basis[k].g);
    index.push_back(k);
  }
  const Division d = divide(t.g, divisors);
  TrackedPoly out{d.remainder, t.a, t.b};
  for (std::size_t k = 0; k < divisors.size(); ++k) {
    if (d.quotients[k].is_zero()) continue;
    out.a = out.a - d.quotients[k] * basis[index[k]].a;
    out.b = out.b - d.quotients[k] * basis[index[k]].b;
  }
  return out;
}

inline Monomial pair_lcm(const std::vector<TrackedPoly> &basis, const std::pair<std::size_t, std::size_t> &ij) {
  const Monomial a = basis[ij.first].g.leading_monomial();
  const Monomial b = basis[ij.second].g.leading_monomial();
  return {std::max(a.first, b.first), std::max(a.second, b.second)};
}

inline TrackedPoly make_monic(const TrackedPoly &t) {
  const GaussianRational inv = GaussianRational(1) / t.g.leading_coeff();
  return {t.g.scaled(inv), t.a.scaled(inv), t.b.scaled(inv)};
}

} // namespace detail

/// Reduced Groebner basis of (p, q) with cofactors relative to (p, q).
inline GroebnerBasis buchberger(const ExactBiPoly &p_in, const ExactBiPoly &q_in,
                                TermOrder order = TermOrder::lex_zw) {
  if (p_in.is_zero() || q_in.is_zero()) throw InputError("buchberger: generators must be nonzero");
  const ExactBiPoly p = p_in.with_order(order);
  const ExactBiPoly q = q_in.with_order(order);
  const ExactBiPoly one = ExactBiPoly::constant(1, order);
  const ExactBiPoly zero(order);
  std::vector<TrackedPoly> basis{{p, one, zero}, {q, zero, one}};
  std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}};
  while (!pairs.empty()) {
    // Normal strategy: the pair with the smallest lcm goes first.
    auto pick = pairs.begin();
    for (auto it = pairs.begin(); it != pairs.end(); ++it)
      if (monomial_greater(detail::pair_lcm(basis, *pick), detail::pair_lcm(basis, *it), order)) pick = it;
    const auto [i, j] = *pick;
    pairs.erase(pick);
    const Monomial li = basis[i].g.leading_monomial();
    const Monomial lj = basis[j].g.leading_monomial();
    if (std::min(li.first, lj.first) == 0 && std::min(li.second, lj.second) == 0) continue;
    const Monomial lcm{std::max(li.first, lj.first), std::max(li.second, lj.second)};
    const GaussianRational ci = GaussianRational(1) / basis[i].g.leading_coeff();
    const GaussianRational cj = -(GaussianRational(1) / basis[j].g.leading_coeff());
    TrackedPoly s = detail::combine(basis[i], ci, {lcm.first - li.first, lcm.second - li.second}, basis[j], cj,
                                    {lcm.first - lj.first, lcm.second - lj.second}, order);
    s = detail::reduce(s, basis);
    if (s.g.is_zero()) continue;
    basis.push_back(detail::make_monic(s));
    for (std::size_t k = 0; k + 1 < basis.size(); ++k) pairs.emplace_back(k, basis.size() - 1);
  }
  // Minimize: drop elements whose leading term is divisible by another's.
  std::vector<TrackedPoly> minimal;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Monomial lk = basis[k].g.leading_monomial();
    bool redundant = false;
    for (std::size_t l = 0; l < basis.size() && !redundant; ++l) {
      if (l == k) continue;
      const Monomial ll = basis[l].g.leading_monomial();
      if (divides(ll, lk) && (ll != lk || l < k)) redundant = true;
    }
    if (!redundant) minimal.push_back(detail::make_monic(basis[k]));
  }
  for (std::size_t k = 0; k < minimal.size(); ++k) {
    minimal[k] = detail::make_monic(detail::reduce(minimal[k], minimal, k));
  }
  std::sort(minimal.begin(), minimal.end(), [order](const TrackedPoly &x, const TrackedPoly &y) {
    return monomial_greater(y.g.leading_monomial(), x.g.leading_monomial(), order);
  });
  return {minimal, order, p, q};
}

/// Standard monomials when the ideal is zero-dimensional.
inline std::optional<std::vector<Monomial>> normal_set(const GroebnerBasis &gb) {
  const auto lts = gb.leading_monomials();
  std::optional<int> a;
  std::optional<int> b;
  for (const auto &m : lts) {
    if (m.second == 0) a = std::min(a.value_or(m.first), m.first);
    if (m.first == 0) b = std::min(b.value_or(m.second), m.second);
  }
  if (!a || !b) return std::nullopt;
  std::vector<Monomial> out;
  for (int i = 0; i < *a; ++i)
    for (int j = 0; j < *b; ++j) {
      bool standard = true;
      for (const auto &m : lts)
        if (divides(m, {i, j})) standard = false;
      if (standard) out.emplace_back(i, j);
    }
  std::sort(out.begin(), out.end(), [&gb](const Monomial &x, const Monomial &y) {
    return monomial_greater(y, x, gb.order);
  });
  return out;
}

/// dim C[z,w]/(p, q); empty optional stands for an infinite dimension.
inline std::optional<long> quotient_dim(const GroebnerBasis &gb) {
  const auto ns = normal_set(gb);
  if (!ns) return std::nullopt;
  return static_cast<long>(ns->size());
}

inline std::optional<long> quotient_dim(const ExactBiPoly &p, const ExactBiPoly &q,
                                        TermOrder order = TermOrder::lex_zw) {
  return quotient_dim(buchberger(p, q, order));
}

struct NormalForm {
  ExactBiPoly r;
  ExactBiPoly s;
  ExactBiPoly t;
  bool verified = false; ///< psi - s p - t q - r == 0 exactly
};

/// psi = s p + t q + r with r supported on the normal set.
inline NormalForm normal_form(const ExactBiPoly &psi, const GroebnerBasis &gb) {
  const Division d = divide(psi.with_order(gb.order), gb.generators());
  NormalForm out{d.remainder, ExactBiPoly(gb.order), ExactBiPoly(gb.order), false};
  for (std::size_t k = 0; k < gb.elements.size(); ++k) {
    out.s = out.s + d.quotients[k] * gb.elements[k].a;
    out.t = out.t + d.quotients[k] * gb.elements[k].b;
  }
  out.verified = (psi.with_order(gb.order) - out.s * gb.p - out.t * gb.q - out.r).is_zero();
  return out;
}

// ---------------------------------------------------------------------------
// Resultant cross-check, coprimality, exact division
// ---------------------------------------------------------------------------

/// Exact determinant by Gaussian elimination over the Gaussian rationals.
inline GaussianRational determinant(std::vector<std::vector<GaussianRational>> m) {
  const std::size_t n = m.size();
  GaussianRational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) ++pivot;
    if (pivot == n) return GaussianRational{};
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det = det * m[col][col];
    const GaussianRational inv = GaussianRational(1) / m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col].is_zero()) continue;
      const GaussianRational f = m[r][col] * inv;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

/// Res_w(p, q) evaluated at z = z0 through the Sylvester matrix.
inline GaussianRational resultant_w_at(const ExactBiPoly &p, const ExactBiPoly &q, const GaussianRational &z0) {
  auto f = p.slice_at_z(z0);
  auto g = q.slice_at_z(z0);
  while (!f.empty() && f.back().is_zero()) f.pop_back();
  while (!g.empty() && g.back().is_zero()) g.pop_back();
  const int m = static_cast<int>(f.size()) - 1;
  const int n = static_cast<int>(g.size()) - 1;
  if (m < 0 || n < 0) return GaussianRational{};
  const int size = m + n;
  if (size == 0) return 1;
  std::vector<std::vector<GaussianRational>> syl(static_cast<std::size_t>(size),
                                                 std::vector<GaussianRational>(static_cast<std::size_t>(size)));
  for (int r = 0; r < n; ++r)
    for (int j = 0; j <= m; ++j) syl[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + m - j)] = f[static_cast<std::size_t>(j)];
  for (int r = 0; r < m; ++r)
    for (int j = 0; j <= n; ++j)
      syl[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + n - j)] = g[static_cast<std::size_t>(j)];
  return determinant(std::move(syl));
}

namespace detail {

/// Whether Res_w(p, q) vanishes identically, judged at random rational
/// points of a set much larger than its degree.
inline bool resultant_w_vanishes(const ExactBiPoly &p, const ExactBiPoly &q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> num(-1000, 1000);
  std::uniform_int_distribution<long> den(1, 97);
  for (int trial = 0; trial < 6; ++trial) {
    const GaussianRational z0(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
    if (p.slice_at_z(z0).empty() || q.slice_at_z(z0).empty()) continue;
    if (p.slice_at_z(z0).back().is_zero() && q.slice_at_z(z0).back().is_zero()) continue;
    if (!resultant_w_at(p, q, z0).is_zero()) return false;
  }
  return true;
}

} // namespace detail

struct CoprimeReport {
  bool relatively_prime = false;
  bool cross_check_agrees = true;
  std::optional<long> quotient_dim;
};

/// Coprime iff the quotient is finite-dimensional; the dimension does not
/// depend on the term order, and degrevlex is the cheaper one. Cross-check: a common
/// factor of positive w-degree kills Res_w, one of positive z-degree kills Res_z.
inline CoprimeReport relatively_prime(const ExactBiPoly &p, const ExactBiPoly &q, TermOrder order = TermOrder::degrevlex,
                                      std::uint64_t seed = 0) {
  CoprimeReport rep;
  rep.quotient_dim = quotient_dim(p, q, order);
  rep.relatively_prime = rep.quotient_dim.has_value();
  bool common = false;
  if (p.deg_w() > 0 && q.deg_w() > 0) common = common || detail::resultant_w_vanishes(p, q, seed);
  if (p.deg_z() > 0 && q.deg_z() > 0) common = common || detail::resultant_w_vanishes(p.swapped(), q.swapped(), seed + 1);
  rep.cross_check_agrees = common != rep.relatively_prime;
  return rep;
}

/// Exact quotient p / f, or nothing when f does not divide p.
inline std::optional<ExactBiPoly> divide_exact(const ExactBiPoly &p, const ExactBiPoly &f) {
  if (f.is_zero()) throw InputError("divide_exact: divisor is zero");
  const Division d = divide(p, {f.with_order(p.order())});
  if (!d.remainder.is_zero()) return std::nullopt;
  return d.quotients[0];
}

/// Largest gamma with f^gamma dividing p (p nonzero, f nonconstant).
inline int factor_multiplicity(const ExactBiPoly &p, const ExactBiPoly &f) {
  if (p.is_zero()) throw InputError("factor_multiplicity: polynomial is zero");
  if (f.total_degree() <= 0) throw InputError("factor_multiplicity: factor must be nonconstant");
  int gamma = 0;
  ExactBiPoly rest = p;
  while (auto next = divide_exact(rest, f)) {
    rest = *next;
    ++gamma;
  }
  return gamma;
}

} // namespace isopair_lab::ideal
