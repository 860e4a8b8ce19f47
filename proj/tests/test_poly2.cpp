#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "isopair_lab/poly2.hpp"

using namespace isopair_lab;
using namespace isopair_lab::poly2;

namespace {

BiPoly parabola() { return BiPoly::from_terms({{0, 2, 1.0}, {1, 0, -1.0}}); }
BiPoly diagonal() { return BiPoly::from_terms({{0, 1, 1.0}, {1, 0, -1.0}}); }
BiPoly anti_diagonal() { return BiPoly::from_terms({{0, 1, 1.0}, {1, 0, 1.0}}); }
BiPoly cross() { return diagonal() * anti_diagonal(); }

BiPoly random_poly(std::mt19937_64 &rng, int n, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> c(static_cast<std::size_t>((n + 1) * (m + 1)));
  for (auto &v : c) v = Complex(g(rng), g(rng));
  return BiPoly(n, m, c);
}

std::vector<Complex> sorted(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

} // namespace

TEST(BiPoly, NormalizedStorage) {
  const BiPoly p(2, 2, {1, 0, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_EQ(p.bidegree(), std::make_pair(0, 0));
  const BiPoly zero(1, 1, {0, 0, 0, 0});
  EXPECT_TRUE(zero.is_zero());
  EXPECT_EQ(zero.deg_z(), -1);
  EXPECT_EQ(parabola().bidegree(), std::make_pair(1, 2));
  EXPECT_TRUE((parabola() - parabola()).is_zero());
  EXPECT_THROW(BiPoly(1, 1, {1, 2}), InputError);
}

TEST(BiPoly, EvalExamples) {
  const BiPoly p = parabola();
  EXPECT_EQ(eval(p, 0.0, 0.0), Complex(0.0));
  EXPECT_EQ(eval(p, 1.0, 1.0), Complex(0.0));
  EXPECT_NEAR(std::abs(eval(p, 0.25, 0.5)), 0.0, 1e-15);
  EXPECT_EQ(eval(BiPoly{}, 0.3, 0.2), Complex(0.0));
}

TEST(BiPoly, Slices) {
  const UniPoly s0 = slice_at_z(parabola(), 0.0);
  EXPECT_EQ(s0.degree(), 2);
  EXPECT_EQ(s0.coeff(0), Complex(0.0));
  const UniPoly s1 = slice_at_z(parabola(), 0.25);
  EXPECT_EQ(s1.coeff(0), Complex(-0.25));
  EXPECT_EQ(s1.coeff(2), Complex(1.0));
  const UniPoly s2 = slice_at_z(cross(), Complex(0.0, 0.5));
  EXPECT_NEAR(std::abs(s2.coeff(0) - 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s2.coeff(1)), 0.0, 1e-15);
  EXPECT_EQ(s2.coeff(2), Complex(1.0));
  const UniPoly sw = slice_at_w(parabola(), 0.5);
  EXPECT_EQ(sw.degree(), 1);
  EXPECT_EQ(sw.coeff(0), Complex(0.25));
}

TEST(Roots, Examples) {
  auto r = sorted(roots(UniPoly{-0.25, 0.0, 1.0}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(std::abs(r[0] + 0.5), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(r[1] - 0.5), 0.0, 1e-14);
  r = roots(UniPoly{0.0, 0.0, 1.0});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0], Complex(0.0));
  EXPECT_EQ(r[1], Complex(0.0));
  r = roots(UniPoly{-0.125, 0.0, 0.0, 1.0});
  ASSERT_EQ(r.size(), 3u);
  for (const Complex x : r) {
    EXPECT_NEAR(std::abs(x), 0.5, 1e-14);
    EXPECT_NEAR(std::abs(x * x * x - 0.125), 0.0, 1e-14);
  }
  EXPECT_THROW(roots(UniPoly{}), DomainError);
}

TEST(Roots, ResidualOnRandomSlices) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> deg(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    const BiPoly p = random_poly(rng, deg(rng), deg(rng));
    const Complex lambda = std::polar(0.7, 0.3 * trial);
    for (const Complex mu : roots(slice_at_z(p, lambda))) {
      EXPECT_LT(std::abs(p(lambda, mu)), 1e-8 * p.scale() * std::max(1.0, std::pow(std::abs(mu), p.deg_w())));
    }
  }
}

TEST(Gradient, Examples) {
  auto [gz, gw] = gradient(parabola(), 0.0, 0.0);
  EXPECT_EQ(gz, Complex(-1.0));
  EXPECT_EQ(gw, Complex(0.0));
  std::tie(gz, gw) = gradient(parabola(), 0.25, 0.5);
  EXPECT_EQ(gz, Complex(-1.0));
  EXPECT_EQ(gw, Complex(1.0));
  const BiPoly sq = BiPoly::from_terms({{0, 2, 1.0}, {2, 0, -1.0}});
  std::tie(gz, gw) = gradient(sq, 0.0, 0.0);
  EXPECT_EQ(gz, Complex(0.0));
  EXPECT_EQ(gw, Complex(0.0));
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const BiPoly p = random_poly(rng, 3, 3);
    const Complex z(0.3, -0.2);
    const Complex w(-0.1, 0.4);
    const auto [gz, gw] = gradient(p, z, w);
    const Complex fz = (p(z + h, w) - p(z - h, w)) / (2 * h);
    const Complex fw = (p(z, w + h) - p(z, w - h)) / (2 * h);
    EXPECT_LT(std::abs(fz - gz), 1e-5 * std::max(1.0, std::abs(gz)));
    EXPECT_LT(std::abs(fw - gw), 1e-5 * std::max(1.0, std::abs(gw)));
  }
}

TEST(RegularPoint, Examples) {
  EXPECT_TRUE(is_regular_point(parabola(), 0.25, 0.5));
  EXPECT_FALSE(is_regular_point(BiPoly::from_terms({{0, 2, 1.0}, {2, 0, -1.0}}), 0.0, 0.0));
  EXPECT_TRUE(is_regular_point(diagonal(), 0.3, 0.3));
  EXPECT_THROW(is_regular_point(parabola(), 0.25, 0.4), DomainError);
}

TEST(InnerToral, Examples) {
  const auto good = check_inner_toral(parabola(), 64, 64);
  EXPECT_TRUE(good.pass);
  EXPECT_LE(good.boundary_max_deviation, 1e-8);
  EXPECT_LT(good.interior_max_modulus, 1.0);
  EXPECT_TRUE(check_inner_toral(diagonal(), 64, 64).pass);
  EXPECT_TRUE(check_inner_toral(cross(), 64, 64).pass);

  const BiPoly hyperbola = BiPoly::from_terms({{1, 1, 1.0}, {0, 0, -1.0}});
  const auto bad = check_inner_toral(hyperbola, 64, 64);
  EXPECT_FALSE(bad.pass);
  ASSERT_FALSE(bad.witnesses.empty());
  bool near = false;
  for (const auto &wit : bad.witnesses) {
    if (wit.w && std::abs(wit.z * *wit.w - 1.0) < 1e-10 && std::abs(wit.z) < 1.0 && std::abs(*wit.w) > 1.0) near = true;
  }
  EXPECT_TRUE(near);
  EXPECT_THROW(check_inner_toral(BiPoly::from_terms({{0, 2, 1.0}, {0, 0, -1.0}}), 8, 8), DomainError);
}

TEST(InnerToral, SwapInvariance) {
  const std::vector<BiPoly> corpus{parabola(), diagonal(), cross(),
                                   BiPoly::from_terms({{0, 3, 1.0}, {2, 0, -1.0}}),
                                   BiPoly::from_terms({{1, 1, 1.0}, {0, 0, -1.0}}),
                                   BiPoly::from_terms({{0, 1, 1.0}, {1, 0, -2.0}})};
  for (const auto &p : corpus) {
    EXPECT_EQ(check_inner_toral(p, 48, 48).pass, check_inner_toral(p.swapped(), 48, 48).pass);
  }
}

TEST(InnerToral, ExteriorBranch) {
  const auto rep = check_inner_toral(parabola(), 32, 32, 1e-8, true);
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.exterior_min_modulus, 1.0);
}

TEST(Resultant, ParabolaDiscriminant) {
  const UniPoly r = resultant_w(parabola(), parabola().dw()).chopped(1e-12);
  EXPECT_EQ(r.degree(), 1);
  EXPECT_NEAR(std::abs(r.coeff(1) + 4.0), 0.0, 1e-12);
  const UniPoly r2 = resultant_w(cross(), cross().dw()).chopped(1e-12);
  EXPECT_EQ(r2.degree(), 2);
  EXPECT_NEAR(std::abs(r2.coeff(2) + 4.0), 0.0, 1e-12);
}

TEST(Exceptional, Examples) {
  auto ex = exceptional_lambdas(parabola());
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_LT(std::abs(ex[0]), 1e-8);
  EXPECT_TRUE(exceptional_lambdas(diagonal()).empty());
  ex = exceptional_lambdas(cross());
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_LT(std::abs(ex[0]), 1e-6);
  EXPECT_THROW(exceptional_lambdas(parabola() * parabola()), DomainError);
}

TEST(Exceptional, OffListFibersAreDistinct) {
  const std::vector<BiPoly> corpus{parabola(), cross(), BiPoly::from_terms({{0, 3, 1.0}, {2, 0, -1.0}})};
  for (const auto &p : corpus) {
    const auto ex = exceptional_lambdas(p);
    const UniPoly res = resultant_w(p, p.dw()).chopped(1e-12);
    EXPECT_LE(static_cast<int>(ex.size()), res.degree());
    for (int k = 0; k < 30; ++k) {
      const Complex lambda = std::polar(0.1 + 0.8 * k / 30.0, 1.7 * k);
      auto rs = roots(slice_at_z(p, lambda));
      ASSERT_EQ(static_cast<int>(rs.size()), p.deg_w());
      for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = i + 1; j < rs.size(); ++j) EXPECT_GT(std::abs(rs[i] - rs[j]), 1e-5);
    }
  }
}

TEST(SquareFree, Examples) {
  EXPECT_FALSE(is_square_free(parabola() * parabola()).square_free);
  const auto rep = is_square_free(parabola());
  EXPECT_TRUE(rep.square_free);
  EXPECT_TRUE(rep.cross_check_agrees);
  EXPECT_GT(rep.resultant_norm, 1e-10);
  EXPECT_TRUE(is_square_free(cross()).square_free);
}

TEST(SquareFree, CorpusSquaresAndContent) {
  const std::vector<BiPoly> corpus{parabola(), diagonal(), cross(),
                                   BiPoly::from_terms({{0, 3, 1.0}, {2, 0, -1.0}})};
  for (const auto &p : corpus) {
    EXPECT_TRUE(is_square_free(p).square_free);
    EXPECT_FALSE(is_square_free(p * p).square_free);
  }
  // A squared factor depending on z only lives in the content.
  const BiPoly zfactor = BiPoly::from_terms({{1, 0, 1.0}, {0, 0, -0.5}});
  EXPECT_FALSE(is_square_free(parabola() * zfactor * zfactor).square_free);
  EXPECT_TRUE(is_square_free(parabola() * zfactor).square_free);
}

TEST(SampleVariety, Examples) {
  const auto pts = sample_variety(parabola(), 3, 7);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto &pt : pts) {
    EXPECT_LT(std::abs(pt.w * pt.w - pt.z), 1e-8);
    EXPECT_LT(std::abs(pt.z), 1.0);
    EXPECT_TRUE(pt.regular);
  }
  const auto again = sample_variety(parabola(), 3, 7);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    EXPECT_EQ(pts[k].z, again[k].z);
    EXPECT_EQ(pts[k].w, again[k].w);
  }
  for (const auto &pt : sample_variety(diagonal(), 5, 1)) EXPECT_LT(std::abs(pt.z - pt.w), 1e-12);
  const std::vector<BiPoly> factors{diagonal(), anti_diagonal()};
  bool seen[2] = {false, false};
  for (const auto &pt : sample_variety(cross(), 4, 3, factors)) {
    ASSERT_TRUE(pt.component_index.has_value());
    const int j = *pt.component_index;
    ASSERT_TRUE(j == 0 || j == 1);
    EXPECT_LT(std::abs(factors[static_cast<std::size_t>(j)](pt.z, pt.w)), 1e-10);
    seen[j] = true;
  }
  EXPECT_TRUE(seen[0] && seen[1]);
}
