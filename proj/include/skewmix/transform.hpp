#pragma once

// Characteristic and moment generating functions. The characteristic
// function is returned as a LogComplex so that ratios of transforms can be
// formed at arguments far beyond the overflow range of the odd integral
// factor; its phase is accumulated term by term and never wrapped.

#include <cmath>
#include <numbers>

#include "skewmix/common.hpp"
#include "skewmix/params.hpp"
#include "skewmix/special.hpp"

namespace skewmix {

namespace detail {

/// log magnitude and argument of 1 + i Im(a). Above the overflow point of
/// the odd integral the unit real part is beyond double resolution, so the
/// factor degenerates to i Im(a) exactly.
inline void one_plus_i_im(double a, double& log_term, double& phase_term) {
  if (std::abs(a) <= 30.0) {
    const double im = im_func(a);
    log_term = std::log(std::hypot(1.0, im));
    phase_term = std::atan(im);
  } else {
    log_term = log_abs_im(a);
    phase_term = std::copysign(std::numbers::pi / 2, a);
  }
}

}  // namespace detail

inline LogComplex log_cf(const SnParams& p, double t) {
  validate(p);
  require_finite(t, "t");
  const double delta = p.omega * p.lambda / std::sqrt(1.0 + p.lambda * p.lambda);
  double log_term, phase_term;
  detail::one_plus_i_im(delta * t, log_term, phase_term);
  return {-0.5 * t * t * p.omega * p.omega + log_term,
          p.mu * t + phase_term};
}

inline Complex cf(const SnParams& p, double t) { return log_cf(p, t).value(); }

inline double log_mgf(const SnParams& p, double t) {
  validate(p);
  require_finite(t, "t");
  const double delta = p.omega * p.lambda / std::sqrt(1.0 + p.lambda * p.lambda);
  return std::log(2.0) + p.mu * t + 0.5 * t * t * p.omega * p.omega +
         log_std_normal_cdf(delta * t);
}

inline double mgf(const SnParams& p, double t) {
  return std::exp(log_mgf(p, t));
}

inline LogComplex log_cf(const MsnParams& p, const Vec& t) {
  const MsnAlternate alt = to_alternate_msn(p);  // validates p
  require(t.size() == p.mu.size(), "t and mu dimensions must match");
  require_finite(t, "t");
  double log_term, phase_term;
  detail::one_plus_i_im(alt.delta.dot(t), log_term, phase_term);
  return {-0.5 * t.dot(p.omega_mat.mat() * t) + log_term,
          p.mu.dot(t) + phase_term};
}

inline Complex cf(const MsnParams& p, const Vec& t) {
  return log_cf(p, t).value();
}

inline double log_mgf(const MsnParams& p, const Vec& t) {
  const MsnAlternate alt = to_alternate_msn(p);
  require(t.size() == p.mu.size(), "t and mu dimensions must match");
  require_finite(t, "t");
  return std::log(2.0) + p.mu.dot(t) + 0.5 * t.dot(p.omega_mat.mat() * t) +
         log_std_normal_cdf(alt.delta.dot(t));
}

inline double mgf(const MsnParams& p, const Vec& t) {
  return std::exp(log_mgf(p, t));
}

inline LogComplex log_cf(const CfusnParams& p, const Vec& t) {
  validate(p);
  require(t.size() == p.mu.size(), "t and mu dimensions must match");
  require_finite(t, "t");
  const Vec a = p.lambda_mat.transpose() * t;
  double log_abs = -0.5 * t.dot(p.omega_mat.mat() * t);
  double phase = p.mu.dot(t);
  for (int i = 0; i < a.size(); ++i) {
    double log_term, phase_term;
    detail::one_plus_i_im(a(i), log_term, phase_term);
    log_abs += log_term;
    phase += phase_term;
  }
  return {log_abs, phase};
}

inline Complex cf(const CfusnParams& p, const Vec& t) {
  return log_cf(p, t).value();
}

inline double log_mgf(const CfusnParams& p, const Vec& t) {
  validate(p);
  require(t.size() == p.mu.size(), "t and mu dimensions must match");
  require_finite(t, "t");
  const Vec a = p.lambda_mat.transpose() * t;
  double out = a.size() * std::log(2.0) + p.mu.dot(t) +
               0.5 * t.dot(p.omega_mat.mat() * t);
  for (int i = 0; i < a.size(); ++i) out += log_std_normal_cdf(a(i));
  return out;
}

inline double mgf(const CfusnParams& p, const Vec& t) {
  return std::exp(log_mgf(p, t));
}

inline LogComplex log_cf(const FamilyParams& p, const Vec& t) {
  if (const auto* s = std::get_if<SnParams>(&p)) {
    require(t.size() == 1, "t must be scalar for the univariate family");
    return log_cf(*s, t(0));
  }
  if (const auto* m = std::get_if<MsnParams>(&p)) return log_cf(*m, t);
  return log_cf(std::get<CfusnParams>(p), t);
}

inline Complex cf(const FamilyParams& p, const Vec& t) {
  return log_cf(p, t).value();
}

inline double log_mgf(const FamilyParams& p, const Vec& t) {
  if (const auto* s = std::get_if<SnParams>(&p)) {
    require(t.size() == 1, "t must be scalar for the univariate family");
    return log_mgf(*s, t(0));
  }
  if (const auto* m = std::get_if<MsnParams>(&p)) return log_mgf(*m, t);
  return log_mgf(std::get<CfusnParams>(p), t);
}

inline double mgf(const FamilyParams& p, const Vec& t) {
  return std::exp(log_mgf(p, t));
}

}  // namespace skewmix
