#pragma once

// Parameter types for the three skew-normal families, plus the alternate
// parametrization that trades the scale matrix for the covariance of the
// symmetric part. The alternate form is what the identifiability conditions
// are stated in; the canonical form is what sampling and density evaluation
// want. Conversions in both directions live here.

#include <cmath>
#include <variant>

#include "skewmix/common.hpp"
#include "skewmix/linalg.hpp"

namespace skewmix {

enum class Family { Sn, Msn, Cfusn };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Sn:
      return "sn";
    case Family::Msn:
      return "msn";
    case Family::Cfusn:
      return "cfusn";
  }
  return "unknown";
}

/// Univariate skew normal: location mu, scale omega > 0, shape lambda.
struct SnParams {
  double mu;
  double omega;
  double lambda;
};

/// Multivariate skew normal with a vector shape parameter.
struct MsnParams {
  Vec mu;
  SymMatrix omega_mat;
  Vec lambda_vec;
};

/// Closed skew normal with a full K x K shape matrix. Requires
/// omega - lambda lambda' to stay positive semidefinite.
struct CfusnParams {
  Vec mu;
  SymMatrix omega_mat;
  Mat lambda_mat;
};

using FamilyParams = std::variant<SnParams, MsnParams, CfusnParams>;

/// Alternate form for SN: delta = omega * delta_small is the covariance
/// between the latent half normal and the observation, gamma is the
/// residual variance. Location is unchanged by the reparametrization and
/// is therefore not stored.
struct SnAlternate {
  double delta;
  double gamma;
  double delta_small;  // lambda / sqrt(1 + lambda^2), kept for convenience
};

struct MsnAlternate {
  Vec delta;
  SymMatrix gamma;
  Vec delta_small;
};

/// For the matrix-shape family the shape itself stays canonical; only the
/// scale moves between omega and gamma = omega - lambda lambda'. Keeping
/// lambda here is what makes the mapping invertible: (gamma, delta) alone
/// pin lambda down only up to right-multiplication by an orthogonal matrix.
struct CfusnAlternate {
  SymMatrix gamma;
  SymMatrix delta;  // I - lambda' omega^{-1} lambda
  Mat lambda;
};

using AlternateParams = std::variant<SnAlternate, MsnAlternate, CfusnAlternate>;

inline void validate(const SnParams& p) {
  require_finite(p.mu, "mu");
  require_finite(p.omega, "omega");
  require_finite(p.lambda, "lambda");
  require(p.omega > 0.0, "omega must be positive");
}

inline void validate(const MsnParams& p) {
  require_finite(p.mu, "mu");
  require_finite(p.lambda_vec, "lambda");
  const int k = p.omega_mat.dim();
  require(k >= 1, "omega must be at least 1 x 1");
  require(p.mu.size() == k, "mu and omega dimensions must match");
  require(p.lambda_vec.size() == k, "lambda and omega dimensions must match");
  require(psd_classify(p.omega_mat).label == PsdLabel::PositiveDefinite,
          "omega must be positive definite");
}

inline void validate(const CfusnParams& p) {
  require_finite(p.mu, "mu");
  require_finite(p.lambda_mat, "lambda");
  const int k = p.omega_mat.dim();
  require(k >= 1, "omega must be at least 1 x 1");
  require(p.mu.size() == k, "mu and omega dimensions must match");
  require(p.lambda_mat.rows() == k && p.lambda_mat.cols() == k,
          "lambda must be square and match omega");
  require(psd_classify(p.omega_mat).label == PsdLabel::PositiveDefinite,
          "omega must be positive definite");
  const SymMatrix gamma(
      Mat(p.omega_mat.mat() - p.lambda_mat * p.lambda_mat.transpose()));
  const PsdLabel label = psd_classify(gamma).label;
  require(label == PsdLabel::PositiveDefinite ||
              label == PsdLabel::PositiveSemidefiniteSingular,
          "omega - lambda lambda' must be positive semidefinite");
}

inline void validate(const FamilyParams& p) {
  std::visit([](const auto& q) { validate(q); }, p);
}

inline Family family_of(const FamilyParams& p) {
  if (std::holds_alternative<SnParams>(p)) return Family::Sn;
  if (std::holds_alternative<MsnParams>(p)) return Family::Msn;
  return Family::Cfusn;
}

inline int dim_of(const FamilyParams& p) {
  if (const auto* m = std::get_if<MsnParams>(&p)) return m->omega_mat.dim();
  if (const auto* c = std::get_if<CfusnParams>(&p)) return c->omega_mat.dim();
  return 1;
}

inline SnAlternate to_alternate_sn(const SnParams& p) {
  validate(p);
  const double ds = p.lambda / std::sqrt(1.0 + p.lambda * p.lambda);
  const double delta = p.omega * ds;
  const double gamma = p.omega * p.omega * (1.0 - ds * ds);
  return {delta, gamma, ds};
}

inline SnParams from_alternate_sn(const SnAlternate& a, double mu) {
  require_finite(mu, "mu");
  require_finite(a.delta, "delta");
  require_finite(a.gamma, "gamma");
  require(a.gamma > 0.0, "gamma must be positive");
  const double omega = std::sqrt(a.gamma + a.delta * a.delta);
  const double lambda =
      a.delta == 0.0 ? 0.0
                     : std::copysign(
                           std::sqrt(a.delta * a.delta / a.gamma), a.delta);
  return {mu, omega, lambda};
}

inline MsnAlternate to_alternate_msn(const MsnParams& p) {
  validate(p);
  const Vec ds = p.lambda_vec / std::sqrt(1.0 + p.lambda_vec.squaredNorm());
  const Vec delta = sym_matrix_sqrt(p.omega_mat).mat() * ds;
  const Mat gamma = p.omega_mat.mat() - delta * delta.transpose();
  return {delta, SymMatrix(gamma), ds};
}

inline MsnParams from_alternate_msn(const MsnAlternate& a, const Vec& mu) {
  require_finite(mu, "mu");
  require_finite(a.delta, "delta");
  const int k = a.gamma.dim();
  require(a.delta.size() == k, "delta and gamma dimensions must match");
  require(mu.size() == k, "mu and gamma dimensions must match");
  const SymMatrix omega(Mat(a.gamma.mat() + a.delta * a.delta.transpose()));
  require(psd_classify(omega).label == PsdLabel::PositiveDefinite,
          "gamma + delta delta' must be positive definite");
  // delta_small = omega^{-1/2} delta via the spectral inverse root.
  const SymEigen eig = sym_eigen(omega);
  const Vec ds = eig.vectors *
                 (eig.values.array().rsqrt() *
                  (eig.vectors.transpose() * a.delta).array())
                     .matrix();
  const double t = ds.squaredNorm();
  require(t < 1.0, "delta' omega^{-1} delta must be below one");
  return {mu, omega, ds / std::sqrt(1.0 - t)};
}

inline CfusnAlternate to_alternate_cfusn(const CfusnParams& p) {
  validate(p);
  const Mat gamma =
      p.omega_mat.mat() - p.lambda_mat * p.lambda_mat.transpose();
  // lambda' omega^{-1} lambda as s's with s = omega^{-1/2} lambda, which is
  // symmetric by construction instead of only up to solver rounding.
  const SymEigen eig = sym_eigen(p.omega_mat);
  const Mat s = eig.values.array().rsqrt().matrix().asDiagonal() *
                (eig.vectors.transpose() * p.lambda_mat);
  const Mat delta =
      Mat::Identity(p.omega_mat.dim(), p.omega_mat.dim()) - s.transpose() * s;
  return {SymMatrix(gamma), SymMatrix(delta), p.lambda_mat};
}

inline CfusnParams from_alternate_cfusn(const CfusnAlternate& a,
                                        const Vec& mu) {
  require_finite(mu, "mu");
  require_finite(a.lambda, "lambda");
  const int k = a.gamma.dim();
  require(a.lambda.rows() == k && a.lambda.cols() == k,
          "lambda must be square and match gamma");
  require(mu.size() == k, "mu and gamma dimensions must match");
  const SymMatrix omega(Mat(a.gamma.mat() + a.lambda * a.lambda.transpose()));
  CfusnParams p{mu, omega, a.lambda};
  validate(p);
  return p;
}

inline AlternateParams to_alternate(const FamilyParams& p) {
  if (const auto* s = std::get_if<SnParams>(&p))
    return to_alternate_sn(*s);
  if (const auto* m = std::get_if<MsnParams>(&p))
    return to_alternate_msn(*m);
  return to_alternate_cfusn(std::get<CfusnParams>(p));
}

inline FamilyParams from_alternate(const AlternateParams& a, const Vec& mu) {
  if (const auto* s = std::get_if<SnAlternate>(&a)) {
    require(mu.size() == 1, "mu must be scalar for the univariate family");
    return from_alternate_sn(*s, mu(0));
  }
  if (const auto* m = std::get_if<MsnAlternate>(&a))
    return from_alternate_msn(*m, mu);
  return from_alternate_cfusn(std::get<CfusnAlternate>(a), mu);
}

}  // namespace skewmix
