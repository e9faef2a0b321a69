#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "skewmix/density.hpp"
#include "skewmix/sampling.hpp"

using namespace skewmix;

namespace {

constexpr double kSqrtTwoOverPi = 0.79788456080286535588;

}  // namespace

TEST_CASE("sampling is deterministic per seed and stream", "[sampling]") {
  const FamilyParams p = CfusnParams{
      Vec::Zero(2), SymMatrix(Mat(2.0 * Mat::Identity(2, 2))),
      Mat::Identity(2, 2)};

  RngStream a(42, 0), b(42, 0), c(42, 1);
  const Mat xa = sample_n(p, 20, a);
  const Mat xb = sample_n(p, 20, b);
  const Mat xc = sample_n(p, 20, c);
  CHECK((xa - xb).cwiseAbs().maxCoeff() == 0.0);
  CHECK((xa - xc).cwiseAbs().maxCoeff() != 0.0);

  // A block draw consumes the stream exactly like repeated single draws.
  RngStream d(42, 0);
  Sampler s(p);
  for (int i = 0; i < 20; ++i) {
    const Vec row = s.draw(d);
    CHECK(row(0) == xa(i, 0));
    CHECK(row(1) == xa(i, 1));
  }
}

TEST_CASE("univariate sample mean matches the closed form", "[sampling]") {
  // E X = mu + omega delta sqrt(2/pi); for lambda = 1 that is sqrt(1/pi).
  const SnParams p{0.0, 1.0, 1.0};
  RngStream rng(7, 0);
  const int n = 200000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += sample(p, rng);
  const double expected = std::sqrt(1.0 / 3.141592653589793238);
  CHECK(acc / n == Catch::Approx(expected).margin(5e-3));
}

TEST_CASE("univariate samples match the density", "[sampling]") {
  const SnParams p{0.5, 1.2, -2.0};
  RngStream rng(101, 3);
  const int n = 2000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = sample(p, rng);
  std::sort(xs.begin(), xs.end());

  // Kolmogorov-Smirnov against the cdf obtained by quadrature, accumulated
  // piecewise between consecutive order statistics.
  double cdf = 0.0;
  double prev = p.mu - 14.0 * p.omega;
  double dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    cdf += oracle::integrate([&](double x) { return pdf(p, x); }, prev,
                             xs[i], 1e-10);
    prev = xs[i];
    dmax = std::max(dmax, std::abs(cdf - (i + 1.0) / n));
    dmax = std::max(dmax, std::abs(cdf - static_cast<double>(i) / n));
  }
  // sqrt(n) D_n below the 1% critical value of the Kolmogorov law.
  CHECK(std::sqrt(static_cast<double>(n)) * dmax < 1.63);
}

TEST_CASE("vector shape sample moments match the closed form", "[sampling]") {
  Vec mu(2), lam(2);
  mu << 0.5, -1.0;
  lam << 2.0, -1.0;
  Mat om(2, 2);
  om << 1.5, 0.3, 0.3, 1.0;
  const MsnParams p{mu, SymMatrix(om), lam};
  const MsnAlternate alt = to_alternate_msn(p);

  RngStream rng(11, 0);
  const int n = 100000;
  Vec mean = Vec::Zero(2);
  Mat second = Mat::Zero(2, 2);
  Sampler s(FamilyParams{p});
  for (int i = 0; i < n; ++i) {
    const Vec x = s.draw(rng);
    mean += x;
    second += x * x.transpose();
  }
  mean /= n;
  const Mat cov = second / n - mean * mean.transpose();

  const Vec mean_expected = mu + kSqrtTwoOverPi * alt.delta;
  const Mat cov_expected =
      om - (2.0 / 3.141592653589793238) * alt.delta * alt.delta.transpose();
  CHECK((mean - mean_expected).cwiseAbs().maxCoeff() < 2e-2);
  CHECK((cov - cov_expected).cwiseAbs().maxCoeff() < 3e-2);
}

TEST_CASE("matrix shape sample moments match the closed form", "[sampling]") {
  Mat lam(2, 2);
  lam << 0.8, 0.0, 0.3, 0.5;
  const Mat om = Mat::Identity(2, 2) + lam * lam.transpose();
  Vec mu(2);
  mu << -0.2, 0.4;
  const CfusnParams p{mu, SymMatrix(om), lam};

  RngStream rng(13, 0);
  const int n = 100000;
  Vec mean = Vec::Zero(2);
  Mat second = Mat::Zero(2, 2);
  Sampler s(FamilyParams{p});
  for (int i = 0; i < n; ++i) {
    const Vec x = s.draw(rng);
    mean += x;
    second += x * x.transpose();
  }
  mean /= n;
  const Mat cov = second / n - mean * mean.transpose();

  const Vec mean_expected = mu + kSqrtTwoOverPi * lam.rowwise().sum();
  const Mat cov_expected =
      om - (2.0 / 3.141592653589793238) * lam * lam.transpose();
  CHECK((mean - mean_expected).cwiseAbs().maxCoeff() < 2e-2);
  CHECK((cov - cov_expected).cwiseAbs().maxCoeff() < 3e-2);
}

TEST_CASE("degenerate residual covariance still samples", "[sampling]") {
  // omega = lambda lambda' makes the gaussian part identically zero, so the
  // draw is a pure folded gaussian shifted by mu.
  const CfusnParams p{Vec::Constant(1, 2.0), SymMatrix(1.0),
                      Mat::Constant(1, 1, 1.0)};
  RngStream rng(17, 0);
  const int n = 50000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec x = sample(FamilyParams{p}, rng);
    REQUIRE(x(0) >= 2.0);
    acc += x(0);
  }
  CHECK(acc / n == Catch::Approx(2.0 + kSqrtTwoOverPi).margin(1e-2));
}

TEST_CASE("sampling dispatch over the family variant", "[sampling]") {
  const FamilyParams p = SnParams{1.0, 2.0, 0.5};
  RngStream a(3, 0), b(3, 0);
  const Vec x = sample(p, a);
  REQUIRE(x.size() == 1);
  CHECK(x(0) == sample(std::get<SnParams>(p), b));

  RngStream c(3, 0);
  const Mat m = sample_n(p, 4, c);
  CHECK(m.rows() == 4);
  CHECK(m.cols() == 1);
  CHECK(m(0, 0) == x(0));
}
