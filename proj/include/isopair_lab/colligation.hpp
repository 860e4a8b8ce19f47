#pragma once

#include <cmath>
#include <functional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "isopair_lab/linalg.hpp"
#include "isopair_lab/types.hpp"

namespace isopair_lab::colligation {

/// Matrix-valued function of one complex variable.
using Evaluator = std::function<CMatrix(Complex)>;

/// Unitary block matrix U = [[A, B], [C, D]] with A: MxM, B: MxN, C: NxM,
/// D: NxN. Its transfer function A + zB(I - zD)^{-1}C is rational inner.
class Colligation {
public:
  static constexpr double kUnitaryTol = 1e-10;

  Colligation(CMatrix a, CMatrix b, CMatrix c, CMatrix d, double tol = kUnitaryTol)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    const auto m = a_.rows();
    const auto n = d_.rows();
    if (m == 0 || a_.cols() != m || d_.cols() != n || b_.rows() != m || b_.cols() != n || c_.rows() != n ||
        c_.cols() != m) {
      throw InputError("Colligation: block shapes are inconsistent");
    }
    const double defect = linalg::unitarity_defect(unitary());
    if (!(defect <= tol)) {
      throw InputError("Colligation: block matrix is not unitary (defect " + std::to_string(defect) + ")");
    }
    if (n > 0 && linalg::spectral_radius(d_) >= 1.0) {
      throw InputError("Colligation: spectral radius of D is not below 1");
    }
  }

  /// Splits a square unitary of size M+N into blocks.
  static Colligation from_unitary(const CMatrix &u, Eigen::Index m, double tol = kUnitaryTol) {
    const Eigen::Index n = u.rows() - m;
    if (u.rows() != u.cols() || m <= 0 || n < 0) {
      throw InputError("Colligation: unitary has the wrong shape");
    }
    return {u.topLeftCorner(m, m), u.topRightCorner(m, n), u.bottomLeftCorner(n, m), u.bottomRightCorner(n, n), tol};
  }

  const CMatrix &A() const { return a_; }
  const CMatrix &B() const { return b_; }
  const CMatrix &C() const { return c_; }
  const CMatrix &D() const { return d_; }
  int M() const { return static_cast<int>(a_.rows()); }
  int N() const { return static_cast<int>(d_.rows()); }

  CMatrix unitary() const {
    const auto m = a_.rows();
    const auto n = d_.rows();
    CMatrix u(m + n, m + n);
    u << a_, b_, c_, d_;
    return u;
  }

  /// Taylor coefficient of the transfer function: A for k = 0, B D^{k-1} C otherwise.
  CMatrix taylor(int k) const {
    if (k == 0) return a_;
    CMatrix right = c_;
    for (int i = 1; i < k; ++i) right = d_ * right;
    return b_ * right;
  }

private:
  CMatrix a_, b_, c_, d_;
};

/// Phi(z) = A + zB(I - zD)^{-1}C.
inline CMatrix transfer(const Colligation &c, Complex z) {
  if (c.N() == 0 || z == Complex(0.0)) {
    return c.A();
  }
  const CMatrix lhs = CMatrix::Identity(c.N(), c.N()) - z * c.D();
  Eigen::PartialPivLU<CMatrix> lu(lhs);
  if (!(std::abs(lu.determinant()) > 1e-14)) {
    throw DomainError("transfer: I - zD is singular");
  }
  return c.A() + z * c.B() * lu.solve(c.C());
}

inline Evaluator evaluator(const Colligation &c) {
  return [c](Complex z) { return transfer(c, z); };
}

/// F(z) = (I - zD)^{-1}C, the defect factor of the realization.
inline CMatrix defect_function(const Colligation &c, Complex z) {
  if (c.N() == 0) return CMatrix(0, c.M());
  const CMatrix lhs = CMatrix::Identity(c.N(), c.N()) - z * c.D();
  return lhs.partialPivLu().solve(c.C());
}

/// Largest ||Phi(e^{it})^* Phi(e^{it}) - I|| over equally spaced t, t = 0 included.
inline double verify_inner(const Evaluator &phi, int boundary_samples) {
  if (boundary_samples <= 0) throw InputError("verify_inner: need at least one sample");
  double worst = 0.0;
  for (int k = 0; k < boundary_samples; ++k) {
    const CMatrix v = phi(unit_circle(2.0 * kPi * k / boundary_samples));
    const CMatrix gap = v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols());
    worst = std::max(worst, linalg::spectral_norm(gap));
  }
  return worst;
}

inline double verify_inner(const Colligation &c, int boundary_samples) {
  return verify_inner(evaluator(c), boundary_samples);
}

/// Default interior sample grid: radii {0.3, 0.6, 0.9} times four angles.
inline std::vector<Complex> default_interior_points(int per_radius = 4) {
  std::vector<Complex> pts;
  const double radii[] = {0.3, 0.6, 0.9};
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < per_radius; ++k) {
      pts.push_back(std::polar(radii[r], 2.0 * kPi * (k + 0.25 * (r + 1)) / per_radius));
    }
  }
  return pts;
}

/// Held-out points not on the default grid.
inline std::vector<Complex> held_out_points(int count) {
  std::vector<Complex> pts;
  for (int k = 0; k < count; ++k) {
    pts.push_back(std::polar(0.15 + 0.7 * (k + 0.5) / count, 2.0 * kPi * 0.618033988749895 * (k + 1)));
  }
  return pts;
}

struct DefectFactor {
  std::vector<Complex> sample_points;
  std::vector<CMatrix> F_values; ///< N x M each
  int N = 0;
  double min_eigenvalue = 0.0; ///< smallest eigenvalue of the sampled Gram matrix
};

/// Factors G_ij = (I - Phi(mu_i)^* Phi(mu_j)) / (1 - conj(mu_i) mu_j) = F_i^* F_j
/// through the eigendecomposition of the stacked Gram matrix. N is its
/// numerical rank.
inline DefectFactor defect_factor(const Evaluator &phi, const std::vector<Complex> &points, double rank_tol = 1e-9) {
  if (points.empty()) throw InputError("defect_factor: no sample points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(std::abs(points[i]) < 1.0)) throw InputError("defect_factor: sample points must lie in the open disk");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(points[i] - points[j]) < 1e-12) throw InputError("defect_factor: sample points must be distinct");
  }
  std::vector<CMatrix> values;
  for (const Complex mu : points) values.push_back(phi(mu));
  const auto m = values.front().rows();
  const auto n = static_cast<Eigen::Index>(points.size());
  CMatrix gram(n * m, n * m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex mi = points[static_cast<std::size_t>(i)];
      const Complex mj = points[static_cast<std::size_t>(j)];
      const CMatrix num = CMatrix::Identity(m, m) -
                          values[static_cast<std::size_t>(i)].adjoint() * values[static_cast<std::size_t>(j)];
      gram.block(i * m, j * m, m, m) = num / (1.0 - std::conj(mi) * mj);
    }
  }
  gram = 0.5 * (gram + gram.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
  const Eigen::VectorXd ev = es.eigenvalues();
  DefectFactor out;
  out.sample_points = points;
  out.min_eigenvalue = ev(0);
  if (ev(0) < -1e-8) {
    throw DomainError("defect_factor: Gram matrix has a negative eigenvalue (Phi is not inner)");
  }
  const double top = std::max(ev(ev.size() - 1), 0.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) > rank_tol * std::max(top, 1.0)) ++rank;
  out.N = rank;
  const CMatrix vecs = es.eigenvectors().rightCols(rank);
  const Eigen::VectorXd roots = ev.tail(rank).cwiseSqrt();
  const CMatrix stacked = roots.asDiagonal() * vecs.adjoint();
  for (Eigen::Index i = 0; i < n; ++i) out.F_values.push_back(stacked.middleCols(i * m, m));
  return out;
}

/// Lurking-isometry realization: the map (gamma; mu F(mu) gamma) -> (Phi(mu) gamma; F(mu) gamma)
/// is solved on the span of the samples and completed to a unitary by
/// pairing orthonormal complements in index order.
inline Colligation realize_from_samples(const std::vector<CMatrix> &phi_values, const DefectFactor &f,
                                        double residual_tol = 1e-7) {
  const auto n_samples = static_cast<Eigen::Index>(f.sample_points.size());
  if (static_cast<Eigen::Index>(phi_values.size()) != n_samples || n_samples == 0) {
    throw InputError("realize_from_samples: sample count mismatch");
  }
  const auto m = phi_values.front().rows();
  const Eigen::Index nd = f.N;
  const Eigen::Index size = m + nd;
  CMatrix k(size, n_samples * m);
  CMatrix l(size, n_samples * m);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const Complex mu = f.sample_points[static_cast<std::size_t>(i)];
    const CMatrix &fi = f.F_values[static_cast<std::size_t>(i)];
    k.block(0, i * m, m, m) = CMatrix::Identity(m, m);
    l.block(0, i * m, m, m) = phi_values[static_cast<std::size_t>(i)];
    if (nd > 0) {
      k.block(m, i * m, nd, m) = mu * fi;
      l.block(m, i * m, nd, m) = fi;
    }
  }
  Eigen::JacobiSVD<CMatrix> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > 1e-9 * sv(0)) ++r;
  const CMatrix wr = svd.matrixU().leftCols(r);
  const CMatrix image = l * svd.matrixV().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal();
  const double isometry_gap = linalg::spectral_norm(image.adjoint() * image - CMatrix::Identity(r, r));
  if (!(isometry_gap <= residual_tol * 10)) {
    throw DomainError("realize_from_samples: sampled map is not isometric (inconsistent defect factor)");
  }
  const CMatrix image_q = linalg::nearest_isometry(image);
  CMatrix u;
  if (r == size) {
    u = image_q * wr.adjoint();
  } else {
    const CMatrix dom = linalg::orthonormal_complement(wr, size);
    const CMatrix cod = linalg::orthonormal_complement(image_q, size);
    CMatrix from(size, size);
    CMatrix to(size, size);
    from << wr, dom;
    to << image_q, cod;
    u = to * from.adjoint();
  }
  u = linalg::polar_unitary(u);
  const double fit = linalg::spectral_norm(u * k - l) / std::max(1.0, linalg::spectral_norm(l));
  if (!(fit <= residual_tol)) {
    throw DomainError("realize_from_samples: isometry residual above tolerance");
  }
  return Colligation::from_unitary(u, m, 1e-9);
}

struct Realization {
  Colligation colligation;
  DefectFactor factor;
  int samples_used;
};

/// Realizes Phi from interior samples, adding a ring of points until the
/// defect rank repeats.
inline Realization realize(const Evaluator &phi) {
  int per_radius = 4;
  DefectFactor f = defect_factor(phi, default_interior_points(per_radius));
  for (int round = 0; round < 4; ++round) {
    const DefectFactor g = defect_factor(phi, default_interior_points(per_radius * 2));
    if (g.N == f.N) {
      f = g;
      break;
    }
    per_radius *= 2;
    f = g;
  }
  std::vector<CMatrix> values;
  for (const Complex mu : f.sample_points) values.push_back(phi(mu));
  return {realize_from_samples(values, f), f, static_cast<int>(f.sample_points.size())};
}

/// Max ||Phi1(z) - Phi2(z)|| over the given points.
inline double transfer_distance(const Evaluator &a, const Evaluator &b, const std::vector<Complex> &points) {
  double worst = 0.0;
  for (const Complex z : points) worst = std::max(worst, linalg::spectral_norm(a(z) - b(z)));
  return worst;
}

/// Writes one CSV row per boundary angle t: t, then the entries of Phi(e^{it})
/// in row-major order as re,im pairs.
inline void write_transfer_csv(std::ostream &out, const Colligation &c, int samples) {
  out << "t";
  for (int i = 0; i < c.M(); ++i)
    for (int j = 0; j < c.M(); ++j) out << ",re_" << i << j << ",im_" << i << j;
  out << '\n';
  out.precision(17);
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * kPi * k / samples;
    const CMatrix v = transfer(c, unit_circle(t));
    out << t;
    for (int i = 0; i < c.M(); ++i)
      for (int j = 0; j < c.M(); ++j) out << ',' << v(i, j).real() << ',' << v(i, j).imag();
    out << '\n';
  }
}

/// Sample colligations used throughout the tests and the CLI corpus.
namespace corpus {

inline Colligation scalar_shift() {
  return {CMatrix::Zero(1, 1), CMatrix::Ones(1, 1), CMatrix::Ones(1, 1), CMatrix::Zero(1, 1)};
}

/// Phi(z) = [[0, z], [1, 0]].
inline Colligation exemplar() {
  CMatrix a = CMatrix::Zero(2, 2);
  a(1, 0) = 1.0;
  CMatrix b = CMatrix::Zero(2, 1);
  b(0, 0) = 1.0;
  CMatrix c = CMatrix::Zero(1, 2);
  c(0, 1) = 1.0;
  return {a, b, c, CMatrix::Zero(1, 1)};
}

inline Colligation direct_sum(const Colligation &x, const Colligation &y) {
  return {linalg::block_diag(x.A(), y.A()), linalg::block_diag(x.B(), y.B()), linalg::block_diag(x.C(), y.C()),
          linalg::block_diag(x.D(), y.D())};
}

inline Colligation doubled_exemplar() { return direct_sum(exemplar(), exemplar()); }

/// Phi(z) = diag(z, -z).
inline Colligation diag_pm() {
  CMatrix c = CMatrix::Identity(2, 2);
  c(1, 1) = -1.0;
  return {CMatrix::Zero(2, 2), CMatrix::Identity(2, 2), c, CMatrix::Zero(2, 2)};
}

/// Phi(z) = diag(z, z).
inline Colligation diag_zz() {
  return {CMatrix::Zero(2, 2), CMatrix::Identity(2, 2), CMatrix::Identity(2, 2), CMatrix::Zero(2, 2)};
}

} // namespace corpus

} // namespace isopair_lab::colligation
