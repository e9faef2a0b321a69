#pragma once

// Density evaluation for the three families. Everything is computed in log
// space where a direct product would underflow; the only exception is the
// orthant factor of the matrix-shape family in dimension two and up, which
// comes out of the numeric cdf in direct space.

#include <cmath>

#include "skewmix/common.hpp"
#include "skewmix/linalg.hpp"
#include "skewmix/mvn.hpp"
#include "skewmix/params.hpp"
#include "skewmix/special.hpp"

namespace skewmix {

/// Log density of N(0, cov) at v.
inline double log_gauss_pdf(const Vec& v, const SymMatrix& cov) {
  require(v.size() == cov.dim(), "x and covariance dimensions must match");
  require_finite(v, "x");
  const Eigen::LLT<Mat> llt(cov.mat());
  require(llt.info() == Eigen::Success,
          "covariance must be positive definite");
  const Mat l = llt.matrixL();
  double half_log_det = 0.0;
  for (int i = 0; i < cov.dim(); ++i) half_log_det += std::log(l(i, i));
  const Vec w = l.triangularView<Eigen::Lower>().solve(v);
  return -static_cast<double>(v.size()) * detail::kLogSqrt2Pi - half_log_det -
         0.5 * w.squaredNorm();
}

inline double log_pdf(const SnParams& p, double x) {
  validate(p);
  require_finite(x, "x");
  const double z = (x - p.mu) / p.omega;
  return std::log(2.0) - std::log(p.omega) + log_std_normal_pdf(z) +
         log_std_normal_cdf(p.lambda * z);
}

inline double pdf(const SnParams& p, double x) {
  return std::exp(log_pdf(p, x));
}

inline double log_pdf(const MsnParams& p, const Vec& x) {
  validate(p);
  require(x.size() == p.mu.size(), "x and mu dimensions must match");
  require_finite(x, "x");
  const Vec v = x - p.mu;
  // Shape argument lambda' omega^{-1/2} v with the symmetric inverse root.
  const SymEigen eig = sym_eigen(p.omega_mat);
  const Vec w = eig.vectors.transpose() * v;
  const double arg = p.lambda_vec.dot(
      eig.vectors * (w.array() * eig.values.array().rsqrt()).matrix());
  return std::log(2.0) + log_gauss_pdf(v, p.omega_mat) +
         log_std_normal_cdf(arg);
}

inline double pdf(const MsnParams& p, const Vec& x) {
  return std::exp(log_pdf(p, x));
}

/// Matrix-shape log density. The orthant probability for K >= 2 is
/// evaluated numerically at `mvn_tol` and saturates at -inf once it
/// underflows; K = 1 uses the log-space cdf and has no such limit.
inline double log_pdf(const CfusnParams& p, const Vec& x,
                      double mvn_tol = 1e-8) {
  validate(p);
  require(x.size() == p.mu.size(), "x and mu dimensions must match");
  require_finite(x, "x");
  const int k = p.omega_mat.dim();
  const Vec v = x - p.mu;
  const Eigen::LLT<Mat> llt(p.omega_mat.mat());
  require(llt.info() == Eigen::Success, "omega must be positive definite");
  const Vec m = p.lambda_mat.transpose() * llt.solve(v);
  Mat dm = Mat::Identity(k, k) -
           p.lambda_mat.transpose() * llt.solve(p.lambda_mat);
  dm = 0.5 * (dm + dm.transpose());
  const SymMatrix delta(dm);
  require(psd_classify(delta).label == PsdLabel::PositiveDefinite,
          "density requires I - lambda' omega^{-1} lambda positive definite");
  double log_orthant;
  if (k == 1) {
    log_orthant = log_std_normal_cdf(m(0) / std::sqrt(dm(0, 0)));
  } else {
    log_orthant = std::log(mvn_cdf(m, delta, mvn_tol));
  }
  return k * std::log(2.0) + log_gauss_pdf(v, p.omega_mat) + log_orthant;
}

inline double pdf(const CfusnParams& p, const Vec& x, double mvn_tol = 1e-8) {
  return std::exp(log_pdf(p, x, mvn_tol));
}

inline double log_pdf(const FamilyParams& p, const Vec& x,
                      double mvn_tol = 1e-8) {
  if (const auto* s = std::get_if<SnParams>(&p)) {
    require(x.size() == 1, "x must be scalar for the univariate family");
    return log_pdf(*s, x(0));
  }
  if (const auto* m = std::get_if<MsnParams>(&p)) return log_pdf(*m, x);
  return log_pdf(std::get<CfusnParams>(p), x, mvn_tol);
}

inline double pdf(const FamilyParams& p, const Vec& x,
                  double mvn_tol = 1e-8) {
  return std::exp(log_pdf(p, x, mvn_tol));
}

}  // namespace skewmix
