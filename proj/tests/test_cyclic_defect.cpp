#include <gtest/gtest.h>

#include "isopair_lab/cyclic_defect.hpp"

using namespace isopair_lab;
using namespace isopair_lab::ideal;
namespace corpus = isopair_lab::colligation::corpus;

namespace {

BiPoly parabola() { return BiPoly::from_terms({{0, 2, 1.0}, {1, 0, -1.0}}); }
BiPoly diagonal() { return BiPoly::from_terms({{0, 1, 1.0}, {1, 0, -1.0}}); }
BiPoly anti_diagonal() { return BiPoly::from_terms({{0, 1, 1.0}, {1, 0, 1.0}}); }

VarietyPoint pt(Complex z, Complex w) { return {z, w, true, std::nullopt}; }

std::string describe(const DefectSequence &s) {
  std::string out;
  for (int c : s.codimensions) out += std::to_string(c) + " ";
  return out;
}

} // namespace

TEST(DefectGenerators, AnnihilatedByQUpToDeterminant) {
  const auto base = pt(0.25, 0.5);
  const auto t = kernel::make_admissible_triple(corpus::doubled_exemplar(), parabola(), base, 2);
  const auto gens = defect_generators(t, base);
  ASSERT_EQ(gens.size(), 2u);
  const MatrixBiPoly q0 = q0_matrix(t.Q, base);
  for (const auto &x : poly2::sample_variety(parabola(), 10, 4)) {
    const CMatrix q = t.Q.eval(x);
    const Complex d = q0.eval(x).determinant();
    for (int j = 0; j < 2; ++j) {
      CVector e = CVector::Zero(2);
      e(j) = d;
      EXPECT_LT((q * gens[static_cast<std::size_t>(j)].eval(x) - e).norm(), 1e-10);
    }
  }
}

TEST(DefectGenerators, DetQ0VanishesOnlyAtFinitelyManyPoints) {
  const auto base = pt(0.25, 0.5);
  const auto t = kernel::make_admissible_triple(corpus::exemplar(), parabola(), base, 1);
  const MatrixBiPoly q0 = q0_matrix(t.Q, base);
  int zeros = 0;
  for (const auto &x : poly2::sample_variety(parabola(), 40, 8)) zeros += std::abs(q0.eval(x)(0, 0)) < 1e-8;
  EXPECT_EQ(zeros, 0);
}

TEST(CyclicDefect, ScalarShiftIsCyclic) {
  const auto base = pt(0.3, 0.3);
  const auto t = kernel::make_admissible_triple(corpus::scalar_shift(), diagonal(), base, 1);
  const auto seq = cyclic_defect(corpus::scalar_shift(), t, base);
  EXPECT_TRUE(seq.stabilized) << describe(seq);
  EXPECT_EQ(seq.value, 0);
}

TEST(CyclicDefect, ExemplarStabilizesAtZero) {
  const auto base = pt(0.25, 0.5);
  const auto t = kernel::make_admissible_triple(corpus::exemplar(), parabola(), base, 1);
  const auto seq = cyclic_defect(corpus::exemplar(), t, base);
  EXPECT_TRUE(seq.stabilized) << describe(seq);
  EXPECT_EQ(seq.value, 0);
}

TEST(CyclicDefect, DoubledExemplarNeedsTwoGenerators) {
  const auto base = pt(0.25, 0.5);
  const auto t = kernel::make_admissible_triple(corpus::doubled_exemplar(), parabola(), base, 2);
  const auto one = cyclic_defect(corpus::doubled_exemplar(), t, base, 1);
  EXPECT_FALSE(one.stabilized) << describe(one);
  EXPECT_TRUE(std::is_sorted(one.codimensions.begin(), one.codimensions.end()));
  const auto two = cyclic_defect(corpus::doubled_exemplar(), t, base, 2);
  EXPECT_TRUE(two.stabilized) << describe(two);
}

TEST(CyclicDefect, DirectSumWithOneSummedGenerator) {
  const auto c = corpus::diag_pm();
  const auto p = diagonal() * anti_diagonal();
  const auto b1 = pt(0.3, 0.3);
  const auto b2 = pt(0.3, -0.3);
  const auto g1 = defect_generators(kernel::make_admissible_triple(c, p, b1, 1), b1);
  const auto g2 = defect_generators(kernel::make_admissible_triple(c, p, b2, 1), b2);
  const auto seq = cyclic_defect(c, summed_generators({g1, g2}));
  EXPECT_EQ(seq.generators, 1);
  EXPECT_TRUE(seq.stabilized) << describe(seq);
  // The joint kernel of (S*, T*) at the origin is two-dimensional, so one
  // generator leaves at least codimension one.
  ASSERT_TRUE(seq.value.has_value());
  EXPECT_EQ(*seq.value, 1);
}

TEST(CyclicDefect, InsufficientTruncationRejected) {
  const auto base = pt(0.25, 0.5);
  const auto t = kernel::make_admissible_triple(corpus::exemplar(), parabola(), base, 1);
  const auto gens = defect_generators(t, base);
  EXPECT_THROW(defect_codimension(isopair::ShiftModel(corpus::exemplar(), 4), gens, 8), DomainError);
  EXPECT_THROW(cyclic_defect(corpus::exemplar(), gens, {8}), InputError);
}
