#pragma once

// Two-component mixtures with a distinguished known component. The weight
// alpha always multiplies the known density.

#include <cmath>
#include <vector>

#include "skewmix/density.hpp"
#include "skewmix/params.hpp"
#include "skewmix/sampling.hpp"
#include "skewmix/transform.hpp"

namespace skewmix {

struct MixtureModel {
  double alpha;
  FamilyParams known;
  FamilyParams unknown;
};

inline void validate(const MixtureModel& m) {
  require_finite(m.alpha, "alpha");
  require(m.alpha > 0.0 && m.alpha < 1.0,
          "alpha must lie strictly between zero and one");
  validate(m.known);
  validate(m.unknown);
  require(family_of(m.known) == family_of(m.unknown),
          "mixture components must come from the same family");
  require(dim_of(m.known) == dim_of(m.unknown),
          "mixture components must have the same dimension");
}

inline double mixture_log_pdf(const MixtureModel& m, const Vec& x,
                              double mvn_tol = 1e-8) {
  validate(m);
  const double l1 = std::log(m.alpha) + log_pdf(m.known, x, mvn_tol);
  const double l0 = std::log1p(-m.alpha) + log_pdf(m.unknown, x, mvn_tol);
  const double hi = std::max(l1, l0);
  if (!std::isfinite(hi)) return hi;
  return hi + std::log(std::exp(l1 - hi) + std::exp(l0 - hi));
}

inline double mixture_pdf(const MixtureModel& m, const Vec& x,
                          double mvn_tol = 1e-8) {
  return std::exp(mixture_log_pdf(m, x, mvn_tol));
}

inline Complex mixture_cf(const MixtureModel& m, const Vec& t) {
  validate(m);
  return m.alpha * cf(m.known, t) + (1.0 - m.alpha) * cf(m.unknown, t);
}

/// Prepared mixture sampler; one bernoulli label then one component draw.
class MixtureSampler {
 public:
  explicit MixtureSampler(const MixtureModel& m)
      : alpha_(m.alpha), known_(m.known), unknown_(m.unknown) {
    validate(m);
  }

  int dim() const { return known_.dim(); }

  Vec draw(RngStream& rng, int* label = nullptr) const {
    const bool from_known = rng.bernoulli(alpha_);
    if (label != nullptr) *label = from_known ? 1 : 0;
    return from_known ? known_.draw(rng) : unknown_.draw(rng);
  }

 private:
  double alpha_;
  Sampler known_;
  Sampler unknown_;
};

/// n draws as rows; labels (1 = known component) are appended per draw when
/// a vector is supplied.
inline Mat sample_n(const MixtureModel& m, int n, RngStream& rng,
                    std::vector<int>* labels = nullptr) {
  require(n >= 0, "sample count must be nonnegative");
  const MixtureSampler s(m);
  Mat out(n, s.dim());
  if (labels != nullptr) {
    labels->clear();
    labels->reserve(n);
  }
  for (int i = 0; i < n; ++i) {
    int lab = 0;
    out.row(i) = s.draw(rng, &lab).transpose();
    if (labels != nullptr) labels->push_back(lab);
  }
  return out;
}

}  // namespace skewmix
