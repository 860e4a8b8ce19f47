#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "isopair_lab/colligation.hpp"

using namespace isopair_lab;
using namespace isopair_lab::colligation;

namespace {

Colligation random_colligation(std::mt19937_64 &rng, int m, int n) {
  for (;;) {
    const CMatrix u = linalg::haar_unitary(m + n, rng);
    if (linalg::spectral_radius(u.bottomRightCorner(n, n)) < 0.999) return Colligation::from_unitary(u, m);
  }
}

CMatrix exemplar_phi(Complex z) {
  CMatrix v = CMatrix::Zero(2, 2);
  v(0, 1) = z;
  v(1, 0) = 1.0;
  return v;
}

} // namespace

TEST(Colligation, RejectsNonUnitary) {
  EXPECT_THROW(Colligation(CMatrix::Constant(1, 1, 0.5), CMatrix::Ones(1, 1), CMatrix::Ones(1, 1),
                           CMatrix::Zero(1, 1)),
               InputError);
  EXPECT_THROW(Colligation(CMatrix::Zero(1, 1), CMatrix::Ones(2, 1), CMatrix::Ones(1, 1), CMatrix::Zero(1, 1)),
               InputError);
}

TEST(Transfer, Examples) {
  EXPECT_NEAR(std::abs(transfer(corpus::scalar_shift(), 0.5)(0, 0) - 0.5), 0.0, 1e-15);
  const Complex z(0.3, -0.4);
  EXPECT_LT((transfer(corpus::exemplar(), z) - exemplar_phi(z)).norm(), 1e-15);
  std::mt19937_64 rng(3);
  const Colligation c = random_colligation(rng, 2, 2);
  EXPECT_EQ(transfer(c, 0.0), c.A());
}

TEST(Transfer, TaylorCoefficientsSumToTransfer) {
  std::mt19937_64 rng(9);
  const Colligation c = random_colligation(rng, 2, 3);
  const Complex z(0.2, 0.1);
  CMatrix sum = CMatrix::Zero(2, 2);
  Complex zk = 1.0;
  for (int k = 0; k < 60; ++k, zk *= z) sum += zk * c.taylor(k);
  EXPECT_LT((sum - transfer(c, z)).norm(), 1e-12);
}

TEST(VerifyInner, Examples) {
  EXPECT_LT(verify_inner(corpus::scalar_shift(), 64), 1e-14);
  EXPECT_LT(verify_inner(corpus::exemplar(), 64), 1e-14);
  const Evaluator half = [](Complex z) { return CMatrix::Constant(1, 1, z / 2.0); };
  EXPECT_NEAR(verify_inner(half, 16), 0.75, 1e-15);
}

TEST(VerifyInner, RandomColligationsAreInner) {
  std::mt19937_64 rng(17);
  for (const auto &[m, n] : {std::pair{1, 1}, {2, 1}, {2, 2}, {4, 2}}) {
    EXPECT_LT(verify_inner(random_colligation(rng, m, n), 48), 1e-8);
  }
}

TEST(DefectFactor, Examples) {
  const auto pts = default_interior_points();
  const DefectFactor shift = defect_factor(evaluator(corpus::scalar_shift()), pts);
  EXPECT_EQ(shift.N, 1);
  for (const auto &f : shift.F_values) EXPECT_NEAR(std::abs(f(0, 0)), 1.0, 1e-12);
  EXPECT_EQ(defect_factor(exemplar_phi, pts).N, 1);
  EXPECT_EQ(defect_factor(evaluator(corpus::diag_zz()), pts).N, 2);
  const Evaluator half = [](Complex z) { return CMatrix::Constant(1, 1, 2.0 * z); };
  EXPECT_THROW(defect_factor(half, pts), DomainError);
}

TEST(DefectFactor, SatisfiesFactorIdentity) {
  std::mt19937_64 rng(23);
  const Colligation c = random_colligation(rng, 2, 2);
  const Evaluator phi = evaluator(c);
  const DefectFactor f = defect_factor(phi, default_interior_points());
  EXPECT_EQ(f.N, 2);
  for (std::size_t i = 0; i < f.sample_points.size(); ++i) {
    for (std::size_t j = 0; j < f.sample_points.size(); ++j) {
      const Complex li = f.sample_points[i];
      const Complex mj = f.sample_points[j];
      const CMatrix lhs = CMatrix::Identity(2, 2) - phi(li).adjoint() * phi(mj);
      const CMatrix rhs = (1.0 - std::conj(li) * mj) * f.F_values[i].adjoint() * f.F_values[j];
      EXPECT_LT((lhs - rhs).norm(), 1e-8);
    }
  }
}

TEST(DefectFactor, RankInvariantUnderDoubling) {
  std::mt19937_64 rng(29);
  for (const auto &[m, n] : {std::pair{1, 1}, {2, 1}, {2, 2}, {4, 2}}) {
    const Evaluator phi = evaluator(random_colligation(rng, m, n));
    EXPECT_EQ(defect_factor(phi, default_interior_points(4)).N, n);
    EXPECT_EQ(defect_factor(phi, default_interior_points(8)).N, n);
  }
}

TEST(Realize, Examples) {
  const Realization shift = realize(evaluator(corpus::scalar_shift()));
  EXPECT_EQ(shift.colligation.N(), 1);
  EXPECT_NEAR(std::abs(transfer(shift.colligation, 0.3)(0, 0) - 0.3), 0.0, 1e-12);

  const Realization ex = realize(exemplar_phi);
  EXPECT_EQ(ex.colligation.M(), 2);
  EXPECT_EQ(ex.colligation.N(), 1);
  EXPECT_LT(transfer_distance(exemplar_phi, evaluator(ex.colligation), held_out_points(5)), 1e-7);

  CMatrix a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;
  const Evaluator constant = [a](Complex) { return a; };
  const Realization flat = realize(constant);
  EXPECT_EQ(flat.colligation.N(), 0);
  EXPECT_LT((flat.colligation.A() - a).norm(), 1e-12);
}

TEST(Realize, RoundTripOnRandomColligations) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    for (const auto &[m, n] : {std::pair{1, 1}, {2, 1}, {2, 2}, {4, 2}}) {
      const Colligation c = random_colligation(rng, m, n);
      const Realization r = realize(evaluator(c));
      EXPECT_EQ(r.colligation.N(), n);
      EXPECT_LT(transfer_distance(evaluator(c), evaluator(r.colligation), held_out_points(10)), 1e-7);
    }
  }
}

TEST(Realize, RejectsInconsistentFactor) {
  const auto pts = default_interior_points();
  DefectFactor f = defect_factor(exemplar_phi, pts);
  for (auto &v : f.F_values) v *= 1.5;
  std::vector<CMatrix> values;
  for (const Complex z : pts) values.push_back(exemplar_phi(z));
  EXPECT_THROW(realize_from_samples(values, f), DomainError);
}

TEST(Transfer, CauchyIntegralRecoversValueAtOrigin) {
  std::mt19937_64 rng(37);
  const Colligation c = random_colligation(rng, 2, 2);
  const int n = 256;
  CMatrix acc = CMatrix::Zero(2, 2);
  for (int k = 0; k < n; ++k) acc += transfer(c, unit_circle(2.0 * kPi * k / n));
  acc /= static_cast<double>(n);
  EXPECT_LT((acc - c.A()).norm(), 1e-8);
}

TEST(Transfer, CsvExport) {
  std::ostringstream out;
  write_transfer_csv(out, corpus::scalar_shift(), 4);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,re_00,im_00");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}
