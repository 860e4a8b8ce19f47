#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "isopair_lab/ideal.hpp"

using namespace isopair_lab;
using namespace isopair_lab::ideal;

namespace {

ExactBiPoly poly(std::initializer_list<std::tuple<int, int, GaussianRational>> terms) {
  return ExactBiPoly::from_terms(terms);
}

ExactBiPoly parabola() { return poly({{0, 2, 1}, {1, 0, -1}}); }
ExactBiPoly hyperbola() { return poly({{1, 1, 1}, {0, 0, -1}}); }

ExactBiPoly random_poly(std::mt19937_64 &rng, int max_total) {
  std::uniform_int_distribution<long> coef(-4, 4);
  ExactBiPoly p;
  for (int i = 0; i <= max_total; ++i)
    for (int j = 0; i + j <= max_total; ++j)
      if (rng() % 2) p.add_term({i, j}, GaussianRational(mpq_class(coef(rng)), mpq_class(coef(rng))));
  return p;
}

} // namespace

TEST(GaussianRational, Arithmetic) {
  const GaussianRational a(mpq_class(1, 2), mpq_class(-3));
  const GaussianRational b(mpq_class(2), mpq_class(1, 3));
  EXPECT_EQ((a * b) / b, a);
  EXPECT_EQ(a - a, GaussianRational{});
  EXPECT_THROW(a / GaussianRational{}, DomainError);
  EXPECT_EQ(GaussianRational::from_strings("3/6", "-1/4"), GaussianRational(mpq_class(1, 2), mpq_class(-1, 4)));
  EXPECT_THROW(GaussianRational::from_strings("x", "1"), InputError);
}

TEST(Rationalize, RecoversSimpleFractions) {
  EXPECT_EQ(rationalize(0.5), mpq_class(1, 2));
  EXPECT_EQ(rationalize(-1.0 / 3.0), mpq_class(-1, 3));
  EXPECT_EQ(rationalize(22.0 / 7.0), mpq_class(22, 7));
  EXPECT_EQ(rationalize(0.0), mpq_class(0));
  EXPECT_NEAR(rationalize(std::sqrt(2.0)).get_d(), std::sqrt(2.0), 1e-12);
}

TEST(ExactBiPoly, RoundTripThroughBiPoly) {
  const auto bp = poly2::BiPoly::from_terms({{0, 2, {0.5, -0.25}}, {1, 0, -1.0}});
  const ExactBiPoly e = ExactBiPoly::from_bipoly(bp);
  EXPECT_EQ(e, poly({{0, 2, GaussianRational(mpq_class(1, 2), mpq_class(-1, 4))}, {1, 0, -1}}));
  EXPECT_EQ(poly2::coeff_distance(e.to_bipoly(), bp), 0.0);
}

TEST(TermOrder, LeadingMonomials) {
  const ExactBiPoly p = poly({{0, 3, 1}, {1, 0, 1}});
  EXPECT_EQ(p.leading_monomial(), Monomial(1, 0));
  EXPECT_EQ(p.with_order(TermOrder::degrevlex).leading_monomial(), Monomial(0, 3));
  EXPECT_EQ(poly({{1, 1, 1}, {0, 2, 1}}).with_order(TermOrder::degrevlex).leading_monomial(), Monomial(1, 1));
}

TEST(Groebner, ParabolaAndHyperbola) {
  // w^2 = z and zw = 1 meet in three points.
  for (auto order : {TermOrder::lex_zw, TermOrder::degrevlex}) {
    const GroebnerBasis gb = buchberger(parabola(), hyperbola(), order);
    EXPECT_EQ(quotient_dim(gb), 3);
    for (const auto &e : gb.elements) EXPECT_TRUE((e.a * gb.p + e.b * gb.q - e.g).is_zero());
  }
  const GroebnerBasis lex = buchberger(parabola(), hyperbola());
  // The reduced lex basis is {w^3 - 1, z - w^2}.
  ASSERT_EQ(lex.elements.size(), 2u);
  EXPECT_EQ(lex.elements[0].g, poly({{0, 3, 1}, {0, 0, -1}}));
  EXPECT_EQ(lex.elements[1].g, poly({{1, 0, 1}, {0, 2, -1}}));
}

TEST(Groebner, ReducedBasisIgnoresInputOrder) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ExactBiPoly p = random_poly(rng, 3);
    const ExactBiPoly q = random_poly(rng, 3);
    if (p.is_zero() || q.is_zero()) continue;
    EXPECT_EQ(buchberger(p, q).generators(), buchberger(q, p).generators());
  }
}

TEST(Groebner, ZeroGeneratorRejected) { EXPECT_THROW(buchberger(ExactBiPoly{}, parabola()), InputError); }

TEST(QuotientDim, Examples) {
  EXPECT_EQ(quotient_dim(poly({{1, 0, 1}}), poly({{0, 1, 1}})), 1);
  EXPECT_EQ(quotient_dim(poly({{2, 0, 1}}), poly({{0, 3, 1}})), 6);
  EXPECT_EQ(quotient_dim(ExactBiPoly::constant(1), parabola()), 0);
  EXPECT_FALSE(quotient_dim(parabola(), parabola() * hyperbola()).has_value());
  EXPECT_FALSE(quotient_dim(poly({{1, 0, 1}}), poly({{1, 1, 1}})).has_value());
}

TEST(NormalForm, IdentityHoldsExactly) {
  const GroebnerBasis gb = buchberger(parabola(), hyperbola());
  const ExactBiPoly psi = poly({{4, 1, 3}, {2, 3, GaussianRational(0, 1)}, {0, 0, 5}});
  const NormalForm nf = normal_form(psi, gb);
  EXPECT_TRUE(nf.verified);
  EXPECT_TRUE((psi - nf.s * gb.p - nf.t * gb.q - nf.r).is_zero());
  const auto ns = normal_set(gb);
  ASSERT_TRUE(ns.has_value());
  for (const auto &[m, c] : nf.r.terms()) EXPECT_NE(std::find(ns->begin(), ns->end(), m), ns->end());
  EXPECT_TRUE(normal_form(parabola() * psi, gb).r.is_zero());
}

TEST(RelativelyPrime, Examples) {
  const auto yes = relatively_prime(parabola(), hyperbola());
  EXPECT_TRUE(yes.relatively_prime);
  EXPECT_TRUE(yes.cross_check_agrees);
  const auto no = relatively_prime(parabola() * hyperbola(), parabola() * poly({{1, 0, 1}, {0, 0, 2}}));
  EXPECT_FALSE(no.relatively_prime);
  EXPECT_TRUE(no.cross_check_agrees);
  const auto pure_z = relatively_prime(poly({{1, 0, 1}, {0, 0, -1}}), poly({{1, 1, 1}, {0, 1, -1}}));
  EXPECT_FALSE(pure_z.relatively_prime);
  EXPECT_TRUE(pure_z.cross_check_agrees);
}

TEST(RelativelyPrime, IsSymmetric) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const ExactBiPoly p = random_poly(rng, 3);
    const ExactBiPoly f = random_poly(rng, 1);
    const ExactBiPoly q = rng() % 2 ? random_poly(rng, 3) : p * f;
    if (p.is_zero() || q.is_zero()) continue;
    const auto a = relatively_prime(p, q);
    const auto b = relatively_prime(q, p);
    EXPECT_EQ(a.relatively_prime, b.relatively_prime);
    EXPECT_EQ(a.quotient_dim, b.quotient_dim);
    EXPECT_TRUE(a.cross_check_agrees);
  }
}

TEST(DivideExact, Examples) {
  const ExactBiPoly prod = parabola() * hyperbola() * hyperbola();
  const auto quo = divide_exact(prod, hyperbola());
  ASSERT_TRUE(quo.has_value());
  EXPECT_EQ(*quo, parabola() * hyperbola());
  EXPECT_FALSE(divide_exact(parabola(), hyperbola()).has_value());
  EXPECT_EQ(factor_multiplicity(prod, hyperbola()), 2);
  EXPECT_EQ(factor_multiplicity(prod, parabola()), 1);
  EXPECT_THROW(divide_exact(parabola(), ExactBiPoly{}), InputError);
}

TEST(Bezout, RandomCoprimePairsRespectBound) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  const auto start = std::chrono::steady_clock::now();
  while (checked < 50) {
    const ExactBiPoly p = random_poly(rng, 1 + static_cast<int>(rng() % 4));
    const ExactBiPoly q = random_poly(rng, 1 + static_cast<int>(rng() % 4));
    if (p.total_degree() <= 0 || q.total_degree() <= 0) continue;
    const auto rep = relatively_prime(p, q);
    EXPECT_TRUE(rep.cross_check_agrees);
    if (!rep.relatively_prime) continue;
    EXPECT_LE(*rep.quotient_dim, static_cast<long>(p.total_degree()) * q.total_degree());
    ++checked;
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 5.0);
}
