#pragma once

// Exact draws through the convolution representations: a half normal (or a
// coordinatewise folded gaussian for the matrix-shape family) plus an
// independent gaussian remainder. The remainder root is precomputed, so
// repeated draws cost one matrix-vector product each.

#include <variant>

#include "skewmix/linalg.hpp"
#include "skewmix/params.hpp"
#include "skewmix/rng.hpp"

namespace skewmix {

inline double sample(const SnParams& p, RngStream& rng) {
  validate(p);
  const double delta = p.lambda / std::sqrt(1.0 + p.lambda * p.lambda);
  const double h = rng.half_normal();
  const double g = rng.normal();
  return p.mu + p.omega * (delta * h + std::sqrt(1.0 - delta * delta) * g);
}

/// Prepared sampler for any family. Draw order is fixed: the folded
/// component first, then the gaussian remainder, one call per coordinate.
class Sampler {
 public:
  explicit Sampler(const FamilyParams& p) {
    if (const auto* s = std::get_if<SnParams>(&p)) {
      validate(*s);
      const double ds = s->lambda / std::sqrt(1.0 + s->lambda * s->lambda);
      state_ = SnState{s->mu, s->omega, ds};
    } else if (const auto* m = std::get_if<MsnParams>(&p)) {
      const MsnAlternate alt = to_alternate_msn(*m);
      state_ = VecState{m->mu, alt.delta,
                        sym_matrix_sqrt(alt.gamma).mat(), false};
    } else {
      const auto& c = std::get<CfusnParams>(p);
      validate(c);
      const Mat gamma =
          c.omega_mat.mat() - c.lambda_mat * c.lambda_mat.transpose();
      state_ = VecState{c.mu, c.lambda_mat,
                        sym_matrix_sqrt(SymMatrix(gamma)).mat(), true};
    }
  }

  int dim() const {
    if (const auto* s = std::get_if<VecState>(&state_))
      return static_cast<int>(s->mu.size());
    return 1;
  }

  Vec draw(RngStream& rng) const {
    if (const auto* s = std::get_if<SnState>(&state_)) {
      const double h = rng.half_normal();
      const double g = rng.normal();
      return Vec::Constant(
          1, s->mu + s->omega *
                         (s->delta * h +
                          std::sqrt(1.0 - s->delta * s->delta) * g));
    }
    const auto& s = std::get<VecState>(state_);
    const int k = static_cast<int>(s.mu.size());
    Vec x = s.mu;
    if (s.folded_per_coordinate) {
      Vec h(k);
      for (int i = 0; i < k; ++i) h(i) = rng.half_normal();
      x += s.shape * h;
    } else {
      x += s.shape * rng.half_normal();
    }
    Vec z(k);
    for (int i = 0; i < k; ++i) z(i) = rng.normal();
    x += s.gamma_sqrt * z;
    return x;
  }

 private:
  struct SnState {
    double mu;
    double omega;
    double delta;
  };
  struct VecState {
    Vec mu;
    Mat shape;  // delta column for the vector family, lambda otherwise
    Mat gamma_sqrt;
    bool folded_per_coordinate;
  };
  std::variant<SnState, VecState> state_;
};

inline Vec sample(const FamilyParams& p, RngStream& rng) {
  return Sampler(p).draw(rng);
}

/// n draws as rows. Consumes the stream exactly like n single draws.
inline Mat sample_n(const FamilyParams& p, int n, RngStream& rng) {
  require(n >= 0, "sample count must be nonnegative");
  const Sampler s(p);
  Mat out(n, s.dim());
  for (int i = 0; i < n; ++i) out.row(i) = s.draw(rng).transpose();
  return out;
}

}  // namespace skewmix
