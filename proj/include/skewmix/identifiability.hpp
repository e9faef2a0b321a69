#pragma once

// Decision procedure for whether the unknown component of a two-component
// mixture can be recovered when the other component is fully known, plus the
// numerical machinery behind it: witness directions, tail ratios of
// transforms along rays, and explicit confusable constructions for the
// non-identifiable regime.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/density.hpp"
#include "skewmix/linalg.hpp"
#include "skewmix/mixture.hpp"
#include "skewmix/parallel.hpp"
#include "skewmix/params.hpp"
#include "skewmix/rng.hpp"
#include "skewmix/special.hpp"
#include "skewmix/transform.hpp"

namespace skewmix {

enum class IdVerdict { Identifiable, ConditionViolated, Degenerate };

inline std::string to_string(IdVerdict v) {
  switch (v) {
    case IdVerdict::Identifiable:
      return "identifiable";
    case IdVerdict::ConditionViolated:
      return "condition-violated";
    default:
      return "degenerate";
  }
}

enum class TransformKind { Cf, Mgf };

inline std::string to_string(TransformKind k) {
  return k == TransformKind::Cf ? "cf" : "mgf";
}

enum class LimitVerdict { TendsToZero, BoundedAway, Diverges };

inline std::string to_string(LimitVerdict v) {
  switch (v) {
    case LimitVerdict::TendsToZero:
      return "to-zero";
    case LimitVerdict::BoundedAway:
      return "bounded-away";
    default:
      return "to-infinity";
  }
}

struct IdentifiabilityReport {
  IdVerdict verdict = IdVerdict::Degenerate;
  Family theorem = Family::Sn;
  std::optional<std::string> violated_clause;
  std::optional<Vec> witness;
  PsdClass gamma_diff_class;
  double tolerance_used = 0.0;
};

namespace detail {

// Flip so the entry of largest magnitude is positive; makes eigenvector
// choices deterministic across platforms.
inline Vec canonical_sign(Vec v) {
  int arg = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      arg = i;
    }
  if (v(arg) < 0.0) v = -v;
  return v;
}

inline SymMatrix gamma_of(const FamilyParams& p) {
  if (const auto* sn = std::get_if<SnParams>(&p))
    return SymMatrix(to_alternate_sn(*sn).gamma);
  if (const auto* msn = std::get_if<MsnParams>(&p))
    return to_alternate_msn(*msn).gamma;
  const auto& cf = std::get<CfusnParams>(p);
  return SymMatrix(Mat(cf.omega_mat.mat() -
                       cf.lambda_mat * cf.lambda_mat.transpose()));
}

inline Vec flatten_params(const FamilyParams& p) {
  if (const auto* sn = std::get_if<SnParams>(&p)) {
    Vec out(3);
    out << sn->mu, sn->omega, sn->lambda;
    return out;
  }
  if (const auto* msn = std::get_if<MsnParams>(&p)) {
    const int k = static_cast<int>(msn->mu.size());
    Vec out(k + k * k + k);
    out.head(k) = msn->mu;
    out.segment(k, k * k) = msn->omega_mat.mat().reshaped();
    out.tail(k) = msn->lambda_vec;
    return out;
  }
  const auto& cf = std::get<CfusnParams>(p);
  const int k = static_cast<int>(cf.mu.size());
  Vec out(k + 2 * k * k);
  out.head(k) = cf.mu;
  out.segment(k, k * k) = cf.omega_mat.mat().reshaped();
  out.tail(k * k) = cf.lambda_mat.reshaped();
  return out;
}

}  // namespace detail

// Direction t with t'At > 0 and t'Bt != 0, built from the top eigenvector of
// A, perturbed along B's dominant eigenvector if B happens to vanish there.
inline Vec find_witness_vector(const SymMatrix& a, const SymMatrix& b) {
  require(a.dim() == b.dim(), "witness search needs matching dimensions");
  const double anorm = a.mat().cwiseAbs().maxCoeff();
  const double bnorm = b.mat().cwiseAbs().maxCoeff();
  require(anorm > 0.0, "witness search needs a nonzero first form");
  require(bnorm > 0.0, "witness search needs a nonzero second form");
  const double tol_a = 1e-10 * std::max(1.0, anorm);
  const double tol_b = 1e-10 * std::max(1.0, bnorm);

  const SymEigen ea = sym_eigen(a);
  const int k = a.dim();
  const double lmax = ea.values(k - 1);
  int top = k - 1;
  for (int i = 0; i < k; ++i)
    if (ea.values(i) >= lmax - 1e-12 * std::max(1.0, std::abs(lmax))) {
      top = i;
      break;
    }
  if (ea.values(top) <= tol_a)
    throw numeric_error(
        "witness search failed: no direction gives a positive first form");
  const Vec lead = detail::canonical_sign(ea.vectors.col(top));

  const auto admissible = [&](const Vec& t) {
    return t.dot(a.mat() * t) > tol_a && std::abs(t.dot(b.mat() * t)) > tol_b;
  };
  if (admissible(lead)) return lead;

  const SymEigen eb = sym_eigen(b);
  const int bi =
      std::abs(eb.values(0)) >= std::abs(eb.values(k - 1)) ? 0 : k - 1;
  if (std::abs(eb.values(bi)) <= tol_b)
    throw numeric_error(
        "witness search failed: second form vanishes everywhere");
  const Vec tilt = detail::canonical_sign(eb.vectors.col(bi));
  for (double eps : {1e-3, -1e-3, 1e-2, -1e-2, 0.1, -0.1, 0.5, -0.5}) {
    const Vec t = (lead + eps * tilt).normalized();
    if (admissible(t)) return t;
  }
  throw numeric_error(
      "witness search failed: perturbation could not separate the forms");
}

inline IdentifiabilityReport check_identifiable(const FamilyParams& f0,
                                                const FamilyParams& f1,
                                                double tol = 1e-9,
                                                double psd_tol = 1e-10) {
  require(std::isfinite(tol) && tol > 0.0, "tolerance must be positive");
  require(std::isfinite(psd_tol) && psd_tol > 0.0,
          "psd tolerance must be positive");
  require(family_of(f0) == family_of(f1),
          "components must come from the same family");
  require(dim_of(f0) == dim_of(f1), "components must share a dimension");
  validate(f0);
  validate(f1);

  const Family fam = family_of(f0);
  const SymMatrix g0 = detail::gamma_of(f0);
  const SymMatrix g1 = detail::gamma_of(f1);
  const Mat diff = g0.mat() - g1.mat();
  const double thr = tol * std::max(1.0, g1.mat().norm());

  IdentifiabilityReport rep;
  rep.theorem = fam;
  rep.gamma_diff_class = psd_classify(SymMatrix(diff), psd_tol);
  rep.tolerance_used = thr;

  {
    const Vec pa = detail::flatten_params(f0);
    const Vec pb = detail::flatten_params(f1);
    const double scale = std::max(1.0, pb.cwiseAbs().maxCoeff());
    if ((pa - pb).cwiseAbs().maxCoeff() <= tol * scale) {
      rep.verdict = IdVerdict::Degenerate;
      return rep;
    }
  }

  if (diff.norm() <= thr) {
    rep.verdict = IdVerdict::ConditionViolated;
    rep.violated_clause = "gamma parameter matches the known component";
    return rep;
  }

  if (fam == Family::Cfusn) {
    // A gap of the form k vv' with k > 0 and v along a shape column of the
    // unknown component defeats recovery even though the gammas differ.
    const SymEigen eg = sym_eigen(SymMatrix(Mat(-diff)));  // g1 - g0
    int big = 0, big_idx = -1;
    for (int i = 0; i < eg.values.size(); ++i)
      if (std::abs(eg.values(i)) > thr) {
        ++big;
        big_idx = i;
      }
    if (big == 1 && eg.values(big_idx) > 0.0) {
      const Vec v = eg.vectors.col(big_idx);
      const Mat& lam = std::get<CfusnParams>(f0).lambda_mat;
      for (int j = 0; j < lam.cols(); ++j) {
        const double nrm = lam.col(j).norm();
        if (nrm <= 1e-12) continue;
        const Vec u = lam.col(j) / nrm;
        if ((v - v.dot(u) * u).norm() <= 1e-6) {
          rep.verdict = IdVerdict::ConditionViolated;
          rep.violated_clause =
              "gamma gap is a positive rank-one update along a shape column "
              "of the unknown component";
          return rep;
        }
      }
    }
  }

  rep.verdict = IdVerdict::Identifiable;
  if (fam != Family::Sn) {
    const bool positive_side = rep.gamma_diff_class.max_eigenvalue > thr;
    const SymMatrix d = positive_side ? SymMatrix(diff) : SymMatrix(Mat(-diff));
    rep.witness = find_witness_vector(d, d);
  }
  return rep;
}

struct DirectionCell {
  std::vector<int> indices;
  std::vector<Vec> members;
  Vec direction;  // unit representative, zero vector for the zero cell
};

struct DirectionPartition {
  std::vector<DirectionCell> cells;
};

// Groups vectors by line through the origin. Vectors with every entry within
// 1e-12 of zero share a dedicated zero cell.
inline DirectionPartition direction_partition(const std::vector<Vec>& vectors,
                                              double angular_tol = 1e-9) {
  DirectionPartition out;
  if (vectors.empty()) return out;
  const auto dim = vectors.front().size();
  require(dim >= 1, "vectors must be nonempty");
  int zero_cell = -1;
  for (int idx = 0; idx < static_cast<int>(vectors.size()); ++idx) {
    const Vec& v = vectors[idx];
    require(v.size() == dim, "vectors must share a dimension");
    require_finite(v, "direction vector");
    if (v.cwiseAbs().maxCoeff() <= 1e-12) {
      if (zero_cell < 0) {
        zero_cell = static_cast<int>(out.cells.size());
        out.cells.push_back({{}, {}, Vec::Zero(dim)});
      }
      out.cells[zero_cell].indices.push_back(idx);
      out.cells[zero_cell].members.push_back(v);
      continue;
    }
    const double nrm = v.norm();
    bool placed = false;
    for (auto& cell : out.cells) {
      if (cell.direction.norm() == 0.0) continue;
      const double along = v.dot(cell.direction);
      if ((v - along * cell.direction).norm() <= angular_tol * nrm) {
        cell.indices.push_back(idx);
        cell.members.push_back(v);
        placed = true;
        break;
      }
    }
    if (!placed) out.cells.push_back({{idx}, {v}, Vec(v / nrm)});
  }
  return out;
}

// Limiting constant of the transform ratio along direction t for two shape
// matrices: a power of i*sqrt(2/pi) from the mismatch in active columns,
// times the ratio of the active inner products.
inline Complex xi_value(const Mat& u, const Mat& v, const Vec& t,
                        double nz_tol = 1e-12) {
  require(u.rows() == v.rows() && u.cols() == v.cols(),
          "shape matrices must match in size");
  require(t.size() == u.rows(), "direction dimension mismatch");
  require_finite(Mat(u), "u");
  require_finite(Mat(v), "v");
  require_finite(t, "t");

  const Vec ut = u.transpose() * t;
  const Vec vt = v.transpose() * t;
  int nu = 0, nv = 0;
  double pu = 1.0, pv = 1.0;
  for (int i = 0; i < ut.size(); ++i)
    if (std::abs(ut(i)) > nz_tol) {
      ++nu;
      pu *= ut(i);
    }
  for (int i = 0; i < vt.size(); ++i)
    if (std::abs(vt(i)) > nz_tol) {
      ++nv;
      pv *= vt(i);
    }

  const Complex base(0.0, detail::kSqrt2OverPi);
  Complex factor(1.0, 0.0);
  for (int i = 0; i < std::abs(nu - nv); ++i) factor *= base;
  if (nu < nv) factor = Complex(1.0, 0.0) / factor;
  return factor * (pv / pu);
}

// Normalizing rate for the transform ratio along c*t: a Gaussian envelope
// from the gamma gap, a location phase, and a power of c from the mismatch
// in active shape columns.
inline LogComplex v_rate(double c, const CfusnParams& th0,
                         const CfusnParams& th1, const Vec& t,
                         double nz_tol = 1e-12) {
  require(std::isfinite(c) && c > 0.0, "ray parameter must be positive");
  validate(th0);
  validate(th1);
  require(th0.mu.size() == th1.mu.size(),
          "parameter sets must share a dimension");
  require(t.size() == th0.mu.size(), "direction dimension mismatch");
  require_finite(t, "t");

  const Mat g0 =
      th0.omega_mat.mat() - th0.lambda_mat * th0.lambda_mat.transpose();
  const Mat g1 =
      th1.omega_mat.mat() - th1.lambda_mat * th1.lambda_mat.transpose();
  const double quad = t.dot((g0 - g1) * t);

  const auto active = [&](const Mat& lam) {
    const Vec a = lam.transpose() * t;
    int n = 0;
    for (int i = 0; i < a.size(); ++i)
      if (std::abs(a(i)) > nz_tol) ++n;
    return n;
  };
  const int nzdiff = active(th0.lambda_mat) - active(th1.lambda_mat);

  return {-0.5 * c * c * quad - nzdiff * std::log(c),
          c * (th0.mu - th1.mu).dot(t)};
}

struct RatioTrace {
  Vec c_grid;
  Vec log_abs_ratio;
  Vec phase;
  TransformKind transform = TransformKind::Cf;
  Vec direction;
};

struct RatioLimitResult {
  RatioTrace trace;
  LimitVerdict verdict = LimitVerdict::BoundedAway;
};

inline Vec default_c_grid() {
  Vec g(60);
  for (int i = 0; i < 60; ++i) g(i) = std::pow(10.0, 3.0 * i / 59.0);
  return g;
}

// Evaluates the transform ratio of f0 over f1 along c*t and classifies the
// tail from the last grid point against a 1e12 magnitude band.
inline RatioLimitResult verify_ratio_limit(const FamilyParams& f0,
                                           const FamilyParams& f1,
                                           const Vec& t, TransformKind kind,
                                           const Vec& c_grid = default_c_grid()) {
  validate(f0);
  validate(f1);
  require(family_of(f0) == family_of(f1),
          "components must come from the same family");
  require(dim_of(f0) == t.size() && dim_of(f1) == t.size(),
          "direction dimension mismatch");
  require_finite(t, "t");
  require(t.norm() > 0.0, "direction must be nonzero");
  const int n = static_cast<int>(c_grid.size());
  require(n >= 2, "ray grid needs at least two points");
  require_finite(c_grid, "c grid");
  require(c_grid(0) > 0.0, "ray grid must be positive");
  for (int i = 1; i < n; ++i)
    require(c_grid(i) > c_grid(i - 1), "ray grid must be strictly increasing");
  require(c_grid(n - 1) >= 100.0, "ray grid must reach 100");

  Vec la(n), ph(n);
  parallel_for(n, [&](int i) {
    const Vec arg = c_grid(i) * t;
    if (kind == TransformKind::Cf) {
      const LogComplex r = log_cf(f0, arg) / log_cf(f1, arg);
      la(i) = r.log_abs;
      ph(i) = r.phase;
    } else {
      la(i) = log_mgf(f0, arg) - log_mgf(f1, arg);
      ph(i) = 0.0;
    }
  });

  RatioLimitResult res;
  res.trace = {c_grid, la, ph, kind, t};
  const double last = la(n - 1);
  if (last < std::log(1e-12))
    res.verdict = LimitVerdict::TendsToZero;
  else if (last > std::log(1e12))
    res.verdict = LimitVerdict::Diverges;
  return res;
}

struct ConfusableCertificate {
  MixtureModel g0;
  double max_gap = 0.0;
  int points = 0;
  bool certified = false;
};

namespace detail {

inline Vec location_of(const FamilyParams& p) {
  if (const auto* sn = std::get_if<SnParams>(&p))
    return Vec::Constant(1, sn->mu);
  if (const auto* msn = std::get_if<MsnParams>(&p)) return msn->mu;
  return std::get<CfusnParams>(p).mu;
}

inline Vec scale_diag_of(const FamilyParams& p) {
  if (const auto* sn = std::get_if<SnParams>(&p))
    return Vec::Constant(1, sn->omega * sn->omega);
  if (const auto* msn = std::get_if<MsnParams>(&p))
    return msn->omega_mat.mat().diagonal();
  return std::get<CfusnParams>(p).omega_mat.mat().diagonal();
}

}  // namespace detail

// When two mixing weights b < a are proposed for the same known component,
// builds the compensating mixture g0 with weight (a-b)/(1-b) on the known
// component so that a*f1 + (1-a)*h0 == b*f1 + (1-b)*g0, then certifies the
// identity pointwise on an evaluation grid.
inline ConfusableCertificate construct_confusable_mixture(
    const FamilyParams& f1, const FamilyParams& h0, double a, double b,
    int grid_points = 1001, double mvn_tol = 1e-8) {
  require(std::isfinite(a) && std::isfinite(b), "weights must be finite");
  require(b > 0.0 && b < a && a < 1.0, "weights must satisfy 0 < b < a < 1");
  require(grid_points >= 2, "certificate grid needs at least two points");
  validate(f1);
  validate(h0);
  require(family_of(f1) == family_of(h0),
          "components must come from the same family");
  require(dim_of(f1) == dim_of(h0), "components must share a dimension");

  const double w = (a - b) / (1.0 - b);
  ConfusableCertificate cert;
  cert.g0 = MixtureModel{w, f1, h0};
  cert.points = grid_points;

  const int k = dim_of(f1);
  const Vec m1 = detail::location_of(f1);
  const Vec m0 = detail::location_of(h0);
  const Vec s1 = detail::scale_diag_of(f1).cwiseSqrt();
  const Vec s0 = detail::scale_diag_of(h0).cwiseSqrt();

  const auto gap_at = [&](const Vec& x) {
    const double lhs = a * pdf(f1, x, mvn_tol) + (1.0 - a) * pdf(h0, x, mvn_tol);
    const double rhs =
        b * pdf(f1, x, mvn_tol) + (1.0 - b) * mixture_pdf(cert.g0, x, mvn_tol);
    return std::abs(lhs - rhs);
  };

  double max_gap = 0.0;
  if (k == 1) {
    const double lo =
        std::min(m1(0) - 10.0 * s1(0), m0(0) - 10.0 * s0(0));
    const double hi =
        std::max(m1(0) + 10.0 * s1(0), m0(0) + 10.0 * s0(0));
    for (int i = 0; i < grid_points; ++i) {
      const double x = lo + (hi - lo) * i / (grid_points - 1);
      max_gap = std::max(max_gap, gap_at(Vec::Constant(1, x)));
    }
  } else {
    Vec lo(k), hi(k);
    for (int j = 0; j < k; ++j) {
      const double hw = 6.0 * std::max(s1(j), s0(j));
      lo(j) = std::min(m1(j), m0(j)) - hw;
      hi(j) = std::max(m1(j), m0(j)) + hw;
    }
    RngStream rng(0x636f6e6675736ULL, 0);
    for (int i = 0; i < grid_points; ++i) {
      Vec x(k);
      for (int j = 0; j < k; ++j)
        x(j) = lo(j) + (hi(j) - lo(j)) * rng.uniform01();
      max_gap = std::max(max_gap, gap_at(x));
    }
  }

  cert.max_gap = max_gap;
  cert.certified = max_gap <= 1e-12;
  return cert;
}

}  // namespace skewmix
