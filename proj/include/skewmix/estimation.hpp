#pragma once

// Mixing-proportion estimation for a two-component mixture whose first
// component is fully known. With both components known the profile
// log-likelihood in alpha is concave and a golden-section search is exact;
// with the second component unknown (univariate skew-normal only) a
// generalized EM alternates responsibilities with a short simplex polish of
// the component parameters.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/density.hpp"
#include "skewmix/identifiability.hpp"
#include "skewmix/mixture.hpp"
#include "skewmix/params.hpp"
#include "skewmix/special.hpp"

namespace skewmix {

struct EstimationResult {
  double alpha_hat = 0.0;
  std::optional<FamilyParams> f0_hat;
  double log_likelihood = 0.0;
  Vec trace;
  bool converged = false;
  IdentifiabilityReport identifiability_check;
};

struct EmOptions {
  int max_iterations = 500;
  double gain_tol = 1e-8;
  double alpha_init = 0.5;
};

namespace detail {

constexpr double kAlphaEps = 1e-6;

inline void check_sample(const Mat& sample, int dim) {
  require(sample.rows() > 0, "sample must be nonempty");
  require(sample.cols() == dim, "sample dimension must match the components");
  require_finite(sample, "sample");
}

inline bool sample_is_constant(const Mat& sample) {
  return (sample.rowwise() - sample.row(0)).cwiseAbs().maxCoeff() == 0.0;
}

inline Vec log_pdf_per_row(const FamilyParams& p, const Mat& sample) {
  Vec out(sample.rows());
  for (int i = 0; i < sample.rows(); ++i)
    out(i) = log_pdf(p, Vec(sample.row(i).transpose()));
  return out;
}

inline double two_term_lse(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double mixture_loglik(double alpha, const Vec& lf1, const Vec& lf0) {
  const double la = std::log(alpha);
  const double lb = std::log1p(-alpha);
  double s = 0.0;
  for (int i = 0; i < lf1.size(); ++i)
    s += two_term_lse(la + lf1(i), lb + lf0(i));
  return s;
}

// Weighted skew-normal log-likelihood with the validation hoisted out of the
// per-point loop; the caller guarantees omega > 0.
inline double weighted_sn_loglik(const Vec& x, const Vec& w, double mu,
                                 double omega, double lambda) {
  const double base = std::log(2.0) - std::log(omega) - kLogSqrt2Pi;
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double z = (x(i) - mu) / omega;
    s += w(i) * (base - 0.5 * z * z + log_std_normal_cdf(lambda * z));
  }
  return s;
}

struct SimplexResult {
  Vec point;
  double value = 0.0;
};

// Plain Nelder-Mead minimizer. The generalized EM step only needs an
// improvement over the start point, which sits in the initial simplex, so a
// modest evaluation budget is enough.
template <class F>
SimplexResult nelder_mead(F&& f, const Vec& start, double step,
                          int max_evals) {
  const int n = static_cast<int>(start.size());
  std::vector<Vec> pts(n + 1);
  std::vector<double> val(n + 1);
  pts[0] = start;
  val[0] = f(start);
  int evals = 1;
  for (int i = 1; i <= n; ++i) {
    pts[i] = start;
    pts[i](i - 1) += step;
    val[i] = f(pts[i]);
    ++evals;
  }

  std::vector<int> order(n + 1);
  while (evals < max_evals) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return val[a] < val[b]; });
    const int best = order[0], second = order[n - 1], worst = order[n];
    if (val[worst] - val[best] <=
        1e-12 * (std::abs(val[best]) + 1e-12))
      break;

    Vec centroid = Vec::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    const Vec refl = centroid + (centroid - pts[worst]);
    const double fr = f(refl);
    ++evals;
    if (fr < val[best]) {
      const Vec exp_pt = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(exp_pt);
      ++evals;
      if (fe < fr) {
        pts[worst] = exp_pt;
        val[worst] = fe;
      } else {
        pts[worst] = refl;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = refl;
      val[worst] = fr;
      continue;
    }
    const Vec contr = fr < val[worst] ? Vec(centroid + 0.5 * (refl - centroid))
                                      : Vec(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(contr);
    ++evals;
    if (fc < std::min(fr, val[worst])) {
      pts[worst] = contr;
      val[worst] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      val[i] = f(pts[i]);
      ++evals;
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (val[i] < val[best]) best = i;
  return {pts[best], val[best]};
}

}  // namespace detail

inline EstimationResult estimate_alpha_known_both(const Mat& sample,
                                                  const FamilyParams& f1,
                                                  const FamilyParams& f0) {
  validate(f1);
  validate(f0);
  require(family_of(f1) == family_of(f0),
          "components must come from the same family");
  require(dim_of(f1) == dim_of(f0), "components must share a dimension");
  detail::check_sample(sample, dim_of(f1));
  if (detail::sample_is_constant(sample))
    throw numeric_error("sample is degenerate: every point is identical");

  const Vec lf1 = detail::log_pdf_per_row(f1, sample);
  const Vec lf0 = detail::log_pdf_per_row(f0, sample);
  const auto objective = [&](double alpha) {
    return detail::mixture_loglik(alpha, lf1, lf0);
  };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = detail::kAlphaEps, b = 1.0 - detail::kAlphaEps;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = objective(c), fd = objective(d);
  std::vector<double> best_trace{std::max(fc, fd)};
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
    }
    best_trace.push_back(std::max(best_trace.back(), std::max(fc, fd)));
  }

  EstimationResult res;
  res.alpha_hat = 0.5 * (a + b);
  res.log_likelihood = objective(res.alpha_hat);
  res.trace = Eigen::Map<const Vec>(best_trace.data(),
                                    static_cast<int>(best_trace.size()));
  res.converged = true;
  res.identifiability_check = check_identifiable(f0, f1);
  return res;
}

inline EstimationResult estimate_alpha_unknown_f0(const Mat& sample,
                                                  const FamilyParams& f1,
                                                  Family family,
                                                  const FamilyParams& init,
                                                  const EmOptions& options = {}) {
  require(family == Family::Sn,
          "only the univariate skew-normal family is supported");
  require(std::holds_alternative<SnParams>(f1),
          "known component must be univariate skew-normal");
  require(std::holds_alternative<SnParams>(init),
          "initial component must be univariate skew-normal");
  validate(f1);
  validate(init);
  require(options.max_iterations >= 1, "iteration cap must be positive");
  require(std::isfinite(options.gain_tol) && options.gain_tol > 0.0,
          "gain tolerance must be positive");
  require(options.alpha_init > 0.0 && options.alpha_init < 1.0,
          "initial weight must lie strictly inside (0,1)");
  detail::check_sample(sample, 1);
  if (detail::sample_is_constant(sample))
    throw numeric_error("sample is degenerate: every point is identical");

  const Vec x = sample.col(0);
  const int n = static_cast<int>(x.size());
  const Vec lf1 = detail::log_pdf_per_row(f1, sample);

  const SnParams& start = std::get<SnParams>(init);
  Vec theta(3);
  theta << start.mu, std::log(start.omega), start.lambda;
  double alpha = options.alpha_init;

  const auto lf0_at = [&](const Vec& th) {
    Vec out(n);
    const double omega = std::exp(th(1));
    const double base = std::log(2.0) - th(1) - detail::kLogSqrt2Pi;
    for (int i = 0; i < n; ++i) {
      const double z = (x(i) - th(0)) / omega;
      out(i) = base - 0.5 * z * z + log_std_normal_cdf(th(2) * z);
    }
    return out;
  };

  Vec lf0 = lf0_at(theta);
  std::vector<double> trace{detail::mixture_loglik(alpha, lf1, lf0)};
  Vec resp(n);
  bool converged = false;
  double prev_gain = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double la = std::log(alpha);
    const double lb = std::log1p(-alpha);
    for (int i = 0; i < n; ++i) {
      const double t1 = la + lf1(i);
      const double t0 = lb + lf0(i);
      resp(i) = std::exp(t1 - detail::two_term_lse(t1, t0));
    }
    if (resp.minCoeff() < 0.0 || resp.maxCoeff() > 1.0)
      throw numeric_error("responsibilities left the unit interval");
    alpha = std::clamp(resp.mean(), detail::kAlphaEps,
                       1.0 - detail::kAlphaEps);

    const Vec w = Vec::Ones(n) - resp;
    const auto neg_q = [&](const Vec& th) {
      if (!th.allFinite() || std::abs(th(1)) > 50.0)
        return std::numeric_limits<double>::infinity();
      return -detail::weighted_sn_loglik(x, w, th(0), std::exp(th(1)),
                                         th(2));
    };
    // Once the outer gains are small the optimum barely moves between
    // iterations, so a tighter, cheaper simplex polish is enough; the start
    // point always sits in the simplex, keeping every step an improvement.
    const bool settling = prev_gain < 1e-3;
    const detail::SimplexResult step = detail::nelder_mead(
        neg_q, theta, settling ? 0.02 : 0.1, settling ? 36 : 90);
    theta = step.point;
    lf0 = lf0_at(theta);

    trace.push_back(detail::mixture_loglik(alpha, lf1, lf0));
    const double gain = trace.back() - trace[trace.size() - 2];
    prev_gain = gain;
    if (gain < options.gain_tol) {
      converged = true;
      break;
    }
  }

  EstimationResult res;
  res.alpha_hat = alpha;
  res.f0_hat = SnParams{theta(0), std::exp(theta(1)), theta(2)};
  res.log_likelihood = trace.back();
  res.trace = Eigen::Map<const Vec>(trace.data(),
                                    static_cast<int>(trace.size()));
  res.converged = converged;
  res.identifiability_check = check_identifiable(*res.f0_hat, f1);
  return res;
}

}  // namespace skewmix
