#pragma once

#include <cmath>
#include <limits>

#include "skewmix/common.hpp"

namespace skewmix {

namespace detail {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kSqrt2OverPi = 0.79788456080286535588;
inline constexpr double kTwoOverSqrtPi = 1.1283791670955125739;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Maclaurin series of the scaled integral: integral_0^y exp(t^2) dt
// = sum y^(2n+1)/((2n+1) n!). All terms positive, so no cancellation.
inline double exp_integral_series(double y) {
  const double y2 = y * y;
  double term = y;
  double sum = y;
  for (int n = 1; n < 4000; ++n) {
    term *= y2 / static_cast<double>(n);
    const double contrib = term / static_cast<double>(2 * n + 1);
    sum += contrib;
    if (contrib < sum * 1e-17) break;
  }
  return sum;
}

// Asymptotic tail 1/(2y) * [1 + sum (2n-1)!!/(2y^2)^n], truncated where the
// terms stop improving.
inline double dawson_asymptotic(double y) {
  const double w = 2.0 * y * y;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 60; ++n) {
    const double next = term * static_cast<double>(2 * n - 1) / w;
    if (next >= term && n > 1) break;
    term = next;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum / (2.0 * y);
}

}  // namespace detail

inline double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x - detail::kLogSqrt2Pi);
}

inline double log_std_normal_pdf(double x) {
  return -0.5 * x * x - detail::kLogSqrt2Pi;
}

/// Standard normal cdf, absolute error below 1e-15 over the whole axis.
inline double std_normal_cdf(double x) {
  require_finite(x, "x");
  return 0.5 * std::erfc(-x * detail::kInvSqrt2);
}

/// log Phi(x), valid far into the left tail where Phi underflows.
inline double log_std_normal_cdf(double x) {
  require_finite(x, "x");
  if (x >= -26.0) return std::log(0.5 * std::erfc(-x * detail::kInvSqrt2));
  // Phi(x) = phi(x)/(-x) * [1 - 1/x^2 + 3/x^4 - ...] for x -> -inf
  const double ix2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 40; ++n) {
    term *= -static_cast<double>(2 * n - 1) * ix2;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return log_std_normal_pdf(x) - std::log(-x) + std::log(sum);
}

/// Inverse of std_normal_cdf on (0, 1). Rational approximation polished by a
/// Halley step against the erfc-based cdf; relative error near 1e-15.
inline double inv_std_normal_cdf(double p) {
  require_finite(p, "p");
  require(p > 0.0 && p < 1.0, "p must lie in (0,1)");

  // Acklam's coefficients.
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = std_normal_cdf(x) - p;
  const double u = e / std_normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

inline double log_abs_im(double x);

/// Dawson's integral D(y) = exp(-y^2) * integral_0^y exp(t^2) dt.
inline double dawson(double y) {
  require_finite(y, "y");
  const double a = std::abs(y);
  double v;
  if (a <= 6.0) {
    v = std::exp(-a * a) * detail::exp_integral_series(a);
  } else {
    v = detail::dawson_asymptotic(a);
  }
  return y < 0.0 ? -v : v;
}

/// Im(x) = integral_0^x sqrt(2/pi) exp(u^2/2) du, through the identity
/// Im(x) = 2/sqrt(pi) * exp(x^2/2) * D(x/sqrt(2)).
///
/// Accurate to better than 1e-12 relative for |x| <= 30; for larger |x| the
/// value is reconstructed from its logarithm and overflows to infinity past
/// |x| ~ 37.7, where no double can hold it. Use log_abs_im there.
inline double im_func(double x) {
  require_finite(x, "x");
  const double a = std::abs(x);
  if (a == 0.0) return 0.0;
  if (a <= 30.0) {
    return detail::kTwoOverSqrtPi * std::exp(0.5 * x * x) *
           dawson(x * detail::kInvSqrt2);
  }
  const double v = std::exp(log_abs_im(a));
  return x < 0.0 ? -v : v;
}

/// log |Im(x)|; finite for every finite x (apart from x = 0).
inline double log_abs_im(double x) {
  require_finite(x, "x");
  const double a = std::abs(x);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * a * a +
         std::log(detail::kTwoOverSqrtPi * dawson(a * detail::kInvSqrt2));
}

/// c * Im(c x) / exp(c^2 x^2 / 2), evaluated in log space so large c is safe.
inline double scaled_im(double c, double x) {
  require(c > 0.0, "c must be positive");
  require_finite(x, "x");
  if (x == 0.0) return 0.0;
  const double logmag = std::log(c) + log_abs_im(c * x) - 0.5 * c * c * x * x;
  const double v = std::exp(logmag);
  return x < 0.0 ? -v : v;
}

/// Truncated asymptotic series sqrt(2/pi) (1/x) [1 + sum_{n=1}^{N}
/// (2n-1)!!/(c x)^{2n}]; approximates scaled_im(c, x) with error O(c^{-2(N+1)}).
inline double r_n_expansion(double c, double x, int n_terms) {
  require_finite(c, "c");
  require_finite(x, "x");
  require(c > 0.0, "c must be positive");
  if (x == 0.0) throw precondition_error("x must be nonzero");
  require(n_terms >= 0, "n_terms must be nonnegative");
  const double w = (c * x) * (c * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    term *= static_cast<double>(2 * n - 1) / w;
    sum += term;
  }
  return detail::kSqrt2OverPi / x * sum;
}

}  // namespace skewmix
