#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "isopair_lab/types.hpp"

namespace isopair_lab::linalg {

inline Eigen::VectorXd singular_values(const CMatrix &m) {
  if (m.size() == 0) {
    return Eigen::VectorXd(0);
  }
  if (std::min(m.rows(), m.cols()) > 48) {
    Eigen::BDCSVD<CMatrix> svd(m);
    return svd.singularValues();
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues();
}

inline double spectral_norm(const CMatrix &m) {
  if (m.size() == 0) {
    return 0.0;
  }
  return singular_values(m)(0);
}

/// Number of singular values of `m` below `rel_tol * max(sigma_max, floor)`,
/// plus the column deficit when `m` is wide. This is dim ker(m).
inline int nullity(const CMatrix &m, double rel_tol, double floor = 0.0) {
  const auto cols = static_cast<int>(m.cols());
  if (m.rows() == 0) {
    return cols;
  }
  const Eigen::VectorXd sv = singular_values(m);
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  const double threshold = rel_tol * std::max(top, floor);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) {
      ++rank;
    }
  }
  return cols - rank;
}

inline int numerical_rank(const CMatrix &m, double rel_tol, double floor = 0.0) {
  return static_cast<int>(m.cols()) - nullity(m, rel_tol, floor);
}

inline double unitarity_defect(const CMatrix &u) {
  const auto n = u.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const double left = spectral_norm(u.adjoint() * u - id);
  const double right = spectral_norm(u * u.adjoint() - id);
  return std::max(left, right);
}

inline double spectral_radius(const CMatrix &m) {
  if (m.size() == 0) {
    return 0.0;
  }
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Orthonormal basis for the column space, rank decided by `rel_tol`.
inline CMatrix range_basis(const CMatrix &m, double rel_tol) {
  if (m.size() == 0) {
    return CMatrix(m.rows(), 0);
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double threshold = rel_tol * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) {
    ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `basis` inside C^n. Columns are produced by
/// Gram-Schmidt against the standard basis in index order, so the result
/// is deterministic.
inline CMatrix orthonormal_complement(const CMatrix &basis, Eigen::Index n) {
  const Eigen::Index want = n - basis.cols();
  CMatrix out(n, want);
  Eigen::Index found = 0;
  for (Eigen::Index k = 0; k < n && found < want; ++k) {
    CVector v = CVector::Zero(n);
    v(k) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) {
        v -= basis * (basis.adjoint() * v);
      }
      if (found > 0) {
        v -= out.leftCols(found) * (out.leftCols(found).adjoint() * v);
      }
    }
    const double len = v.norm();
    if (len > 1e-8) {
      out.col(found++) = v / len;
    }
  }
  if (found != want) {
    throw DomainError("orthonormal_complement: could not complete basis");
  }
  return out;
}

/// Nearest unitary (polar factor) of a square matrix.
inline CMatrix polar_unitary(const CMatrix &m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of diag(R) divided out.
template <typename Rng> CMatrix haar_unitary(Eigen::Index n, Rng &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = Complex(gauss(rng), gauss(rng));
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) {
      q.col(j) *= r(j, j) / mag;
    }
  }
  return q;
}

/// Nearest matrix with orthonormal columns (thin polar factor).
inline CMatrix nearest_isometry(const CMatrix &m) {
  if (m.cols() == 0) {
    return m;
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline CMatrix block_diag(const CMatrix &a, const CMatrix &b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

} // namespace isopair_lab::linalg
