#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "skewmix/params.hpp"

using namespace skewmix;

TEST_CASE("sn alternate parameters from canonical", "[params]") {
  const auto a0 = to_alternate_sn({0.0, 1.0, 0.0});
  CHECK(a0.delta_small == 0.0);
  CHECK(a0.delta == 0.0);
  CHECK(a0.gamma == 1.0);

  const auto a1 = to_alternate_sn({0.0, 1.0, 1.0});
  CHECK(a1.delta_small == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(a1.delta == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(a1.gamma == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("sn canonical from alternate", "[params]") {
  const SnParams p0 = from_alternate_sn({0.0, 1.0, 0.0}, 0.0);
  CHECK(p0.omega == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(p0.lambda == 0.0);

  const SnParams p1 =
      from_alternate_sn({1.0 / std::sqrt(2.0), 0.5, 1.0 / std::sqrt(2.0)}, 0.0);
  CHECK(p1.omega == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(p1.lambda == Catch::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(from_alternate_sn({0.5, 0.0, 0.5}, 0.0), precondition_error);
  CHECK_THROWS_AS(from_alternate_sn({0.5, -1.0, 0.5}, 0.0),
                  precondition_error);
}

TEST_CASE("cfusn zero shape alternate", "[params]") {
  CfusnParams p{Vec::Zero(2), SymMatrix::identity(2), Mat::Zero(2, 2)};
  const auto alt = to_alternate_cfusn(p);
  CHECK((alt.gamma.mat() - Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK((alt.delta.mat() - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("parameter validation", "[params]") {
  CHECK_THROWS_AS(validate(SnParams{0.0, 0.0, 1.0}), precondition_error);
  CHECK_THROWS_AS(validate(SnParams{0.0, -1.0, 1.0}), precondition_error);
  CHECK_NOTHROW(validate(SnParams{0.0, 1.0, -50.0}));

  Mat notpd(2, 2);
  notpd << 1.0, 2.0, 2.0, 1.0;
  Vec z2 = Vec::Zero(2);
  CHECK_THROWS_AS(validate(MsnParams{z2, SymMatrix(notpd), z2}),
                  precondition_error);
  CHECK_THROWS_AS(validate(MsnParams{Vec::Zero(3), SymMatrix::identity(2), z2}),
                  precondition_error);

  // CFUSN needs Omega - Lambda Lambda' PSD
  Mat big = 2.0 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(
      validate(CfusnParams{z2, SymMatrix::identity(2), big}),
      precondition_error);
  Mat ok = 0.5 * Mat::Identity(2, 2);
  CHECK_NOTHROW(validate(CfusnParams{z2, SymMatrix::identity(2), ok}));
}

TEST_CASE("roundtrip canonical to alternate and back", "[params]") {
  std::mt19937_64 g(2024);

  for (int rep = 0; rep < 100; ++rep) {
    const SnParams p = gen::random_sn(g);
    const SnParams q = from_alternate_sn(to_alternate_sn(p), p.mu);
    CHECK(q.mu == p.mu);
    CHECK(q.omega == Catch::Approx(p.omega).epsilon(1e-10));
    CHECK(q.lambda == Catch::Approx(p.lambda).margin(1e-10));
  }

  for (int rep = 0; rep < 100; ++rep) {
    const int k = 1 + static_cast<int>(g() % 4);
    const MsnParams p = gen::random_msn(g, k);
    const MsnParams q = from_alternate_msn(to_alternate_msn(p), p.mu);
    CHECK((q.omega_mat.mat() - p.omega_mat.mat()).norm() <=
          1e-10 * std::max(1.0, p.omega_mat.mat().norm()));
    CHECK((q.lambda_vec - p.lambda_vec).norm() <=
          1e-10 * std::max(1.0, p.lambda_vec.norm()));
  }

  for (int rep = 0; rep < 100; ++rep) {
    const int k = 1 + static_cast<int>(g() % 4);
    const CfusnParams p = gen::random_cfusn(g, k);
    const CfusnParams q = from_alternate_cfusn(to_alternate_cfusn(p), p.mu);
    CHECK((q.omega_mat.mat() - p.omega_mat.mat()).norm() <=
          1e-10 * std::max(1.0, p.omega_mat.mat().norm()));
    CHECK((q.lambda_mat - p.lambda_mat).norm() <=
          1e-10 * std::max(1.0, p.lambda_mat.norm()));
  }
}

TEST_CASE("alternate roundtrip the other way", "[params]") {
  std::mt19937_64 g(77);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 1 + static_cast<int>(g() % 3);
    const MsnParams p = gen::random_msn(g, k);
    const MsnAlternate alt = to_alternate_msn(p);
    const MsnAlternate alt2 = to_alternate_msn(from_alternate_msn(alt, p.mu));
    CHECK((alt2.delta - alt.delta).norm() < 1e-10);
    CHECK((alt2.gamma.mat() - alt.gamma.mat()).norm() < 1e-10);
    CHECK((alt2.delta_small - alt.delta_small).norm() < 1e-10);
  }
}

TEST_CASE("msn from_alternate rejects infeasible shape", "[params]") {
  // delta' Omega^{-1} delta >= 1 corresponds to a singular or negative Gamma
  Vec delta(2);
  delta << 1.0, 0.0;
  Mat gamma = Mat::Zero(2, 2);
  gamma(1, 1) = 1.0;  // Gamma singular in the delta direction
  Vec ds(2);
  ds << 1.0, 0.0;
  CHECK_THROWS_AS(
      from_alternate_msn(MsnAlternate{delta, SymMatrix(gamma), ds},
                         Vec::Zero(2)),
      precondition_error);
}

TEST_CASE("family dispatch helpers", "[params]") {
  std::mt19937_64 g(1);
  const FamilyParams sn = SnParams{0.0, 1.0, 2.0};
  const FamilyParams msn = gen::random_msn(g, 3);
  CHECK(family_of(sn) == Family::Sn);
  CHECK(family_of(msn) == Family::Msn);
  CHECK(dim_of(sn) == 1);
  CHECK(dim_of(msn) == 3);
  CHECK(std::string(family_name(Family::Cfusn)) == "cfusn");

  const AlternateParams alt = to_alternate(sn);
  const FamilyParams back = from_alternate(alt, Vec::Constant(1, 0.0));
  CHECK(std::get<SnParams>(back).lambda ==
        Catch::Approx(2.0).epsilon(1e-12));
}
