#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "generators.hpp"
#include "skewmix/estimation.hpp"
#include "skewmix/io.hpp"

using namespace skewmix;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::current_path() / "io_test_tmp") {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

bool same_params(const FamilyParams& a, const FamilyParams& b) {
  if (family_of(a) != family_of(b) || dim_of(a) != dim_of(b)) return false;
  if (const auto* sa = std::get_if<SnParams>(&a)) {
    const auto& sb = std::get<SnParams>(b);
    return sa->mu == sb.mu && sa->omega == sb.omega && sa->lambda == sb.lambda;
  }
  if (const auto* ma = std::get_if<MsnParams>(&a)) {
    const auto& mb = std::get<MsnParams>(b);
    return ma->mu == mb.mu &&
           ma->omega_mat.mat() == mb.omega_mat.mat() &&
           ma->lambda_vec == mb.lambda_vec;
  }
  const auto& ca = std::get<CfusnParams>(a);
  const auto& cb = std::get<CfusnParams>(b);
  return ca.mu == cb.mu && ca.omega_mat.mat() == cb.omega_mat.mat() &&
         ca.lambda_mat == cb.lambda_mat;
}

}  // namespace

TEST_CASE("parameter json roundtrip preserves every bit", "[io]") {
  std::mt19937_64 g(71);
  for (int rep = 0; rep < 30; ++rep) {
    const FamilyParams sn = gen::random_sn(g);
    CHECK(same_params(sn, params_from_json(params_to_json(sn))));
    const FamilyParams msn = gen::random_msn(g, 2 + rep % 2);
    CHECK(same_params(msn, params_from_json(params_to_json(msn))));
    const FamilyParams cf = gen::random_cfusn(g, 2);
    CHECK(same_params(cf, params_from_json(params_to_json(cf))));
  }

  const Json j = params_to_json(FamilyParams{SnParams{0.5, 2.0, -1.0}});
  CHECK(j.at("family") == "sn");
  CHECK(j.at("mu") == 0.5);
  CHECK(j.at("omega") == 2.0);
  CHECK(j.at("lambda") == -1.0);
}

TEST_CASE("parameter json names the offending field", "[io]") {
  using Catch::Matchers::ContainsSubstring;

  Json j = params_to_json(FamilyParams{SnParams{0.0, 1.0, 1.0}});
  j.erase("omega");
  CHECK_THROWS_WITH(params_from_json(j), ContainsSubstring("omega"));

  j["omega"] = "wide";
  CHECK_THROWS_WITH(params_from_json(j), ContainsSubstring("omega"));

  j["omega"] = -1.0;
  CHECK_THROWS_WITH(params_from_json(j), ContainsSubstring("omega"));

  Json bad_family = params_to_json(FamilyParams{SnParams{0.0, 1.0, 1.0}});
  bad_family["family"] = "triangular";
  CHECK_THROWS_WITH(params_from_json(bad_family),
                    ContainsSubstring("family"));

  std::mt19937_64 g(72);
  Json msn = params_to_json(FamilyParams{gen::random_msn(g, 2)});
  msn["omega"] = Json::array({Json::array({1.0, 0.0}), Json::array({0.0})});
  CHECK_THROWS_WITH(params_from_json(msn), ContainsSubstring("omega"));

  CHECK_THROWS_AS(params_from_json(Json::array()), precondition_error);
}

TEST_CASE("mixture json roundtrip and validation", "[io]") {
  using Catch::Matchers::ContainsSubstring;
  std::mt19937_64 g(73);
  const MixtureModel m{0.35, FamilyParams{gen::random_msn(g, 2)},
                       FamilyParams{gen::random_msn(g, 2)}};
  const MixtureModel back = mixture_from_json(mixture_to_json(m));
  CHECK(back.alpha == m.alpha);
  CHECK(same_params(back.known, m.known));
  CHECK(same_params(back.unknown, m.unknown));

  Json j = mixture_to_json(m);
  j["alpha"] = 1.5;
  CHECK_THROWS_WITH(mixture_from_json(j), ContainsSubstring("alpha"));
  j = mixture_to_json(m);
  j.erase("known");
  CHECK_THROWS_WITH(mixture_from_json(j), ContainsSubstring("known"));
}

TEST_CASE("identifiability report json roundtrip", "[io]") {
  const auto check_roundtrip = [](const IdentifiabilityReport& rep) {
    const Json j = report_to_json(rep);
    const IdentifiabilityReport back = report_from_json(j);
    CHECK(report_to_json(back) == j);
    CHECK(back.verdict == rep.verdict);
    CHECK(back.theorem == rep.theorem);
    CHECK(back.violated_clause == rep.violated_clause);
    CHECK(back.witness.has_value() == rep.witness.has_value());
    CHECK(back.gamma_diff_class.label == rep.gamma_diff_class.label);
    CHECK(back.tolerance_used == rep.tolerance_used);
  };

  check_roundtrip(
      check_identifiable(SnParams{0.0, 1.0, 0.0}, SnParams{0.0, 1.0, 1.0}));
  check_roundtrip(
      check_identifiable(SnParams{2.0, 1.0, 1.0}, SnParams{0.0, 1.0, 1.0}));
  std::mt19937_64 g(74);
  check_roundtrip(check_identifiable(FamilyParams{gen::random_msn(g, 3)},
                                     FamilyParams{gen::random_msn(g, 3)}));
}

TEST_CASE("estimation result json roundtrip", "[io]") {
  const FamilyParams f1 = SnParams{3.0, 1.0, 0.0};
  const FamilyParams f0 = SnParams{0.0, 1.0, 2.0};
  RngStream rng(75, 0);
  const Mat x = sample_n(MixtureModel{0.4, f1, f0}, 500, rng);
  const EstimationResult res = estimate_alpha_known_both(x, f1, f0);

  const Json j = estimation_to_json(res);
  const EstimationResult back = estimation_from_json(j);
  CHECK(back.alpha_hat == res.alpha_hat);
  CHECK(back.log_likelihood == res.log_likelihood);
  CHECK(back.converged == res.converged);
  CHECK(back.trace.size() == res.trace.size());
  CHECK(back.f0_hat.has_value() == res.f0_hat.has_value());
  CHECK(back.identifiability_check.verdict == res.identifiability_check.verdict);
  CHECK(estimation_to_json(back) == j);
}

TEST_CASE("json files save and load", "[io]") {
  TempDir tmp;
  const FamilyParams p = FamilyParams{SnParams{1.0, 2.0, 3.0}};
  save_json_file(tmp.file("p.json"), params_to_json(p));
  CHECK(same_params(p, params_from_json(load_json_file(tmp.file("p.json")))));

  CHECK_THROWS_AS(load_json_file(tmp.file("absent.json")),
                  precondition_error);
  std::ofstream bad(tmp.file("bad.json"));
  bad << "{ not json";
  bad.close();
  CHECK_THROWS_AS(load_json_file(tmp.file("bad.json")), precondition_error);
}

TEST_CASE("matrix csv roundtrip is exact", "[io]") {
  TempDir tmp;
  std::mt19937_64 g(76);
  Mat m(20, 3);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      m(i, j) = gen::uniform(g, -1.0, 1.0) *
                std::pow(10.0, gen::uniform(g, -30.0, 30.0));

  write_matrix_csv(tmp.file("m.csv"), m, {"a", "b", "c"});
  std::vector<std::string> header;
  const Mat back = read_matrix_csv(tmp.file("m.csv"), &header);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(header == std::vector<std::string>{"a", "b", "c"});

  // headerless input is accepted
  std::ofstream raw(tmp.file("raw.csv"));
  raw << "1.5,2\n-3,4e-2\n";
  raw.close();
  const Mat plain = read_matrix_csv(tmp.file("raw.csv"));
  REQUIRE(plain.rows() == 2);
  CHECK(plain(1, 1) == 0.04);

  std::ofstream ragged(tmp.file("ragged.csv"));
  ragged << "x,y\n1,2\n3\n";
  ragged.close();
  CHECK_THROWS_AS(read_matrix_csv(tmp.file("ragged.csv")),
                  precondition_error);
  std::ofstream empty(tmp.file("empty.csv"));
  empty.close();
  CHECK_THROWS_AS(read_matrix_csv(tmp.file("empty.csv")),
                  precondition_error);
}

TEST_CASE("ratio trace csv roundtrip", "[io]") {
  TempDir tmp;
  Vec grid(12);
  for (int i = 0; i < 12; ++i) grid(i) = std::pow(100.0, i / 11.0);
  const auto res = verify_ratio_limit(FamilyParams{SnParams{0.0, 2.0, 0.0}},
                                      FamilyParams{SnParams{0.0, 1.0, 0.0}},
                                      Vec::Constant(1, 1.0),
                                      TransformKind::Cf, grid);

  write_ratio_trace_csv(tmp.file("trace.csv"), res.trace);
  const RatioTrace back = read_ratio_trace_csv(tmp.file("trace.csv"));
  CHECK((back.c_grid - res.trace.c_grid).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.log_abs_ratio - res.trace.log_abs_ratio).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((back.phase - res.trace.phase).cwiseAbs().maxCoeff() == 0.0);
}
