#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Cholesky>

#include "skewmix/common.hpp"
#include "skewmix/linalg.hpp"
#include "skewmix/rng.hpp"
#include "skewmix/special.hpp"

namespace skewmix {

namespace detail {

// One-dimensional adaptive Simpson with absolute tolerance.
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Conditioning step: P(X <= u) = integral over x1 of phi(x1) * P(rest | x1).
// Recurses down to the univariate cdf, giving a tensor-product quadrature of
// dimension K-1.
inline double mvn_cdf_conditioned(const Vec& upper, const Mat& cov,
                                  double tol) {
  const int k = static_cast<int>(upper.size());
  const double sd = std::sqrt(cov(0, 0));
  if (k == 1) return std_normal_cdf(upper(0) / sd);

  const double lo = -9.0 * sd;
  const double hi = std::min(upper(0), 9.0 * sd);
  if (hi <= lo) return 0.0;

  const Vec c = cov.block(1, 0, k - 1, 1) / cov(0, 0);
  const Mat cond_cov = cov.block(1, 1, k - 1, k - 1) -
                       cov.block(1, 0, k - 1, 1) *
                           cov.block(0, 1, 1, k - 1) / cov(0, 0);
  const Vec rest = upper.tail(k - 1);

  const auto integrand = [&](double z) {
    const Vec shifted = rest - c * z;
    return std_normal_pdf(z / sd) / sd *
           mvn_cdf_conditioned(shifted, cond_cov, tol * 0.1);
  };
  return integrate(integrand, lo, hi, tol * 0.5);
}

// Genz-style transformation to the unit cube plus a shifted lattice rule.
inline double mvn_cdf_qmc(const Vec& upper, const Mat& chol_lower,
                          double tol) {
  const int k = static_cast<int>(upper.size());
  const int dims = k - 1;

  // Richtmyer generators: fractional parts of square roots of primes.
  static constexpr int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                   29, 31, 37, 41, 43, 47, 53, 59, 61};
  Vec q(dims);
  for (int i = 0; i < dims; ++i) {
    const double r = std::sqrt(static_cast<double>(primes[i]));
    q(i) = r - std::floor(r);
  }

  const int n_shifts = 12;
  const int batch = 4096;
  const int max_batches = 256;

  RngStream shift_rng(0x5EEDFACEULL);
  Mat shifts(n_shifts, dims);
  for (int s = 0; s < n_shifts; ++s)
    for (int i = 0; i < dims; ++i) shifts(s, i) = shift_rng.uniform01();

  // Sequential Genz evaluation for one cube point.
  const auto genz_value = [&](const Vec& w) {
    Vec y(k - 1);
    double e = std_normal_cdf(upper(0) / chol_lower(0, 0));
    double prod = e;
    for (int i = 1; i < k; ++i) {
      const double frac = std::clamp(w(i - 1) * e, 1e-300, 1.0 - 1e-16);
      y(i - 1) = inv_std_normal_cdf(frac);
      const double mean = chol_lower.row(i).head(i).dot(y.head(i));
      e = std_normal_cdf((upper(i) - mean) / chol_lower(i, i));
      prod *= e;
    }
    return prod;
  };

  Vec shift_sums = Vec::Zero(n_shifts);
  long counted = 0;
  double estimate = 0.0;
  double error = std::numeric_limits<double>::infinity();
  for (int b = 1; b <= max_batches; ++b) {
    for (int s = 0; s < n_shifts; ++s) {
      double acc = 0.0;
      Vec w(dims);
      for (int j = 0; j < batch; ++j) {
        const long idx = counted + j + 1;
        for (int i = 0; i < dims; ++i) {
          const double v = idx * q(i) + shifts(s, i);
          const double frac = v - std::floor(v);
          w(i) = std::abs(2.0 * frac - 1.0);  // baker fold for smoothness
        }
        acc += genz_value(w);
      }
      shift_sums(s) += acc;
    }
    counted += batch;
    const Vec means = shift_sums / static_cast<double>(counted);
    estimate = means.mean();
    const double var = (means.array() - estimate).square().sum() /
                       (n_shifts - 1.0) / n_shifts;
    error = 3.0 * std::sqrt(var);
    if (error < tol) return estimate;
  }
  throw numeric_error("mvn_cdf: quasi-Monte Carlo did not reach tolerance " +
                      std::to_string(tol) + " (error estimate " +
                      std::to_string(error) + ")");
}

}  // namespace detail

/// P(X <= upper) for X ~ N(0, cov).
///
/// K <= 3 uses nested adaptive quadrature after conditioning; 4 <= K <= 10
/// uses a Genz-style quasi-Monte Carlo rule with a fixed internal seed, so
/// results are deterministic. K > 10 is not supported.
inline double mvn_cdf(const Vec& upper, const SymMatrix& cov, double tol = 1e-8) {
  require(tol > 0.0, "tol must be positive");
  require_finite(upper, "upper");
  require(upper.size() == cov.dim(), "upper and cov dimensions must match");
  require(cov.dim() >= 1, "cov must be at least 1x1");
  require(cov.dim() <= 10, "mvn_cdf supports K <= 10");

  Eigen::LLT<Mat> llt(cov.mat());
  if (llt.info() != Eigen::Success)
    throw precondition_error("cov must be positive definite");

  const int k = cov.dim();
  if (k == 1) return std_normal_cdf(upper(0) / std::sqrt(cov(0, 0)));
  if (k <= 3) {
    const double raw = detail::mvn_cdf_conditioned(upper, cov.mat(), tol);
    return std::clamp(raw, 0.0, 1.0);
  }
  const Mat lower = llt.matrixL();
  return std::clamp(detail::mvn_cdf_qmc(upper, lower, tol), 0.0, 1.0);
}

}  // namespace skewmix
