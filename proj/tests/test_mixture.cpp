#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "skewmix/mixture.hpp"

using namespace skewmix;

TEST_CASE("mixture validation", "[mixture]") {
  const FamilyParams f1 = SnParams{0.0, 1.0, 2.0};
  const FamilyParams f0 = SnParams{1.0, 1.5, 0.0};
  CHECK_NOTHROW(validate(MixtureModel{0.3, f1, f0}));
  CHECK_THROWS_AS(validate(MixtureModel{0.0, f1, f0}), precondition_error);
  CHECK_THROWS_AS(validate(MixtureModel{1.0, f1, f0}), precondition_error);
  CHECK_THROWS_AS(validate(MixtureModel{1.2, f1, f0}), precondition_error);
  CHECK_THROWS_AS(validate(MixtureModel{std::nan(""), f1, f0}),
                  precondition_error);

  std::mt19937_64 g(31);
  const FamilyParams m2 = gen::random_msn(g, 2);
  const FamilyParams m3 = gen::random_msn(g, 3);
  const FamilyParams c2 = gen::random_cfusn(g, 2);
  CHECK_THROWS_AS(validate(MixtureModel{0.5, f1, m2}), precondition_error);
  CHECK_THROWS_AS(validate(MixtureModel{0.5, m2, m3}), precondition_error);
  CHECK_THROWS_AS(validate(MixtureModel{0.5, m2, c2}), precondition_error);
  CHECK_NOTHROW(validate(MixtureModel{0.5, m2, m2}));
}

TEST_CASE("mixture density is the convex combination", "[mixture]") {
  std::mt19937_64 g(32);
  const MixtureModel m{0.35, gen::random_sn(g), gen::random_sn(g)};
  for (double x = -5.0; x <= 5.0; x += 0.5) {
    const Vec xv = Vec::Constant(1, x);
    const double direct = 0.35 * pdf(m.known, xv) + 0.65 * pdf(m.unknown, xv);
    CHECK(mixture_pdf(m, xv) == Catch::Approx(direct).epsilon(1e-13));
  }

  const MixtureModel mm{0.8, gen::random_cfusn(g, 2), gen::random_cfusn(g, 2)};
  Vec x2(2);
  x2 << 0.3, -0.9;
  const double direct =
      0.8 * pdf(mm.known, x2) + 0.2 * pdf(mm.unknown, x2);
  CHECK(mixture_pdf(mm, x2) == Catch::Approx(direct).epsilon(1e-10));
}

TEST_CASE("mixture log density survives deep tails", "[mixture]") {
  const MixtureModel m{0.4, FamilyParams{SnParams{0.0, 1.0, 4.0}},
                       FamilyParams{SnParams{0.5, 0.8, 6.0}}};
  const Vec x = Vec::Constant(1, -35.0);
  const double l = mixture_log_pdf(m, x);
  CHECK(std::isfinite(l));
  const double l1 = std::log(0.4) + log_pdf(m.known, x);
  const double l0 = std::log(0.6) + log_pdf(m.unknown, x);
  CHECK(l >= std::max(l1, l0));
  CHECK(l <= std::max(l1, l0) + std::log(2.0));
}

TEST_CASE("mixture transform matches quadrature", "[mixture]") {
  const MixtureModel m{0.25, FamilyParams{SnParams{0.0, 1.0, 1.5}},
                       FamilyParams{SnParams{1.0, 2.0, -1.0}}};
  for (double t : {0.4, -1.3}) {
    const Complex expected = oracle::cf_quadrature(
        [&](double x) { return mixture_pdf(m, Vec::Constant(1, x)); }, t,
        -30.0, 30.0);
    const Complex got = mixture_cf(m, Vec::Constant(1, t));
    CHECK(std::abs(got - expected) < 1e-8);
  }
}

TEST_CASE("mixture sampling tracks the weight and the moments", "[mixture]") {
  const SnParams f1{0.0, 1.0, 2.0};
  const SnParams f0{3.0, 0.7, -1.0};
  const MixtureModel m{0.3, FamilyParams{f1}, FamilyParams{f0}};

  RngStream rng(55, 0);
  std::vector<int> labels;
  const int n = 100000;
  const Mat xs = sample_n(m, n, rng, &labels);
  REQUIRE(xs.rows() == n);
  REQUIRE(static_cast<int>(labels.size()) == n);

  double frac = 0.0;
  for (int lab : labels) frac += lab;
  frac /= n;
  CHECK(frac == Catch::Approx(0.3).margin(6e-3));

  auto sn_mean = [](const SnParams& p) {
    const double ds = p.lambda / std::sqrt(1.0 + p.lambda * p.lambda);
    return p.mu + p.omega * ds * 0.79788456080286535588;
  };
  const double expected = 0.3 * sn_mean(f1) + 0.7 * sn_mean(f0);
  CHECK(xs.col(0).mean() == Catch::Approx(expected).margin(1.5e-2));

  RngStream rng2(55, 0);
  const Mat again = sample_n(m, n, rng2, nullptr);
  CHECK((xs - again).cwiseAbs().maxCoeff() == 0.0);
}
