#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "skewmix/common.hpp"

namespace skewmix {

/// Dense symmetric matrix. Construction symmetrizes the input and rejects
/// anything that is not square, finite, and symmetric to within 1e-12
/// relative, so downstream code can rely on exact symmetry.
class SymMatrix {
 public:
  SymMatrix() : m_(0, 0) {}

  explicit SymMatrix(Mat m) {
    require(m.rows() == m.cols(), "SymMatrix requires a square matrix");
    require_finite(m, "matrix");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double skew = (m - m.transpose()).cwiseAbs().maxCoeff();
    require(skew <= 1e-12 * scale,
            "SymMatrix requires symmetry within 1e-12 relative");
    m_ = 0.5 * (m + m.transpose());
  }

  explicit SymMatrix(double scalar) : m_(1, 1) {
    require_finite(scalar, "scalar");
    m_(0, 0) = scalar;
  }

  static SymMatrix identity(int k) { return SymMatrix(Mat::Identity(k, k)); }
  static SymMatrix zero(int k) { return SymMatrix(Mat::Zero(k, k)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Mat& mat() const { return m_; }

 private:
  Mat m_;
};

struct SymEigen {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns, matching order
};

inline SymEigen sym_eigen(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(m.mat());
  if (solver.info() != Eigen::Success)
    throw numeric_error("symmetric eigendecomposition failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

enum class PsdLabel {
  PositiveDefinite,
  PositiveSemidefiniteSingular,
  Indefinite,
  NegativeSemidefinite,
  NegativeDefinite,
};

inline const char* to_string(PsdLabel label) {
  switch (label) {
    case PsdLabel::PositiveDefinite: return "positive-definite";
    case PsdLabel::PositiveSemidefiniteSingular:
      return "positive-semidefinite-singular";
    case PsdLabel::Indefinite: return "indefinite";
    case PsdLabel::NegativeSemidefinite: return "negative-semidefinite";
    case PsdLabel::NegativeDefinite: return "negative-definite";
  }
  return "unknown";
}

struct PsdClass {
  PsdLabel label;
  double min_eigenvalue;
  double max_eigenvalue;
};

/// Classifies by eigenvalue signs; |lambda| below tol * max(1, |lambda|_max)
/// counts as zero. The all-zero matrix lands in the positive-semidefinite
/// bucket.
inline PsdClass psd_classify(const SymMatrix& m, double tol = 1e-10) {
  require(tol > 0.0, "tol must be positive");
  const SymEigen eig = sym_eigen(m);
  const double lo = eig.values(0);
  const double hi = eig.values(eig.values.size() - 1);
  const double band = tol * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  int pos = 0, neg = 0, zero = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (std::abs(v) < band)
      ++zero;
    else if (v > 0.0)
      ++pos;
    else
      ++neg;
  }
  PsdLabel label;
  if (neg == 0 && zero == 0)
    label = PsdLabel::PositiveDefinite;
  else if (neg == 0)
    label = PsdLabel::PositiveSemidefiniteSingular;
  else if (pos == 0 && zero == 0)
    label = PsdLabel::NegativeDefinite;
  else if (pos == 0)
    label = PsdLabel::NegativeSemidefinite;
  else
    label = PsdLabel::Indefinite;
  return {label, lo, hi};
}

/// Symmetric PSD square root via eigendecomposition. Eigenvalues inside the
/// tolerance band are clamped to zero; genuinely negative ones are rejected.
inline SymMatrix sym_matrix_sqrt(const SymMatrix& m, double tol = 1e-10) {
  const SymEigen eig = sym_eigen(m);
  const double band = tol * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  Vec roots(eig.values.size());
  for (int i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (v < -band)
      throw precondition_error("sym_matrix_sqrt requires a PSD matrix");
    roots(i) = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  Mat r = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  return SymMatrix(0.5 * (r + r.transpose()));
}

/// Orthonormal basis of the numerical null space; each returned column v
/// satisfies ||m v|| <= tol. May have zero columns.
inline Mat null_space(const SymMatrix& m, double tol = 1e-10) {
  const SymEigen eig = sym_eigen(m);
  int count = 0;
  for (int i = 0; i < eig.values.size(); ++i)
    if (std::abs(eig.values(i)) <= tol) ++count;
  Mat basis(m.dim(), count);
  int at = 0;
  for (int i = 0; i < eig.values.size(); ++i)
    if (std::abs(eig.values(i)) <= tol) basis.col(at++) = eig.vectors.col(i);
  return basis;
}

}  // namespace skewmix
