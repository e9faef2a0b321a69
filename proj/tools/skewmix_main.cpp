// Command-line front end: sampling, density and transform evaluation,
// identifiability checks, tail-ratio verification, estimation, and
// confusable-mixture construction as reproducible batch commands.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skewmix/estimation.hpp"
#include "skewmix/identifiability.hpp"
#include "skewmix/io.hpp"
#include "skewmix/mixture.hpp"
#include "skewmix/sampling.hpp"
#include "skewmix/transform.hpp"

using namespace skewmix;

namespace {

// Inclusive start:step:stop grid; a zero step yields the single point start.
Vec parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::string token;
  std::stringstream ss(spec);
  while (std::getline(ss, token, ':')) {
    try {
      parts.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw precondition_error("grid '" + spec +
                               "' must be start:step:stop with numbers");
    }
  }
  if (parts.size() != 3)
    throw precondition_error("grid '" + spec +
                             "' must be start:step:stop with numbers");
  const double start = parts[0], step = parts[1], stop = parts[2];
  if (step == 0.0) return Vec::Constant(1, start);
  const double span = (stop - start) / step;
  if (span < -1e-9)
    throw precondition_error("grid '" + spec +
                             "' never reaches its stop value");
  const auto n = static_cast<std::int64_t>(std::floor(span + 1e-9)) + 1;
  if (n > 10'000'000)
    throw precondition_error("grid '" + spec + "' has too many points");
  Vec g(n);
  for (std::int64_t i = 0; i < n; ++i) g(i) = start + i * step;
  return g;
}

Vec parse_vector(const std::string& spec) {
  std::vector<double> parts;
  std::string token;
  std::stringstream ss(spec);
  while (std::getline(ss, token, ',')) {
    try {
      parts.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw precondition_error("vector '" + spec +
                               "' must be comma-separated numbers");
    }
  }
  if (parts.empty())
    throw precondition_error("vector '" + spec + "' is empty");
  Vec v(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) v(i) = parts[i];
  return v;
}

// A model file holds either a single component or a mixture (keyed by the
// presence of "alpha").
struct ModelFile {
  std::optional<MixtureModel> mixture;
  std::optional<FamilyParams> component;

  int dim() const {
    return mixture ? dim_of(mixture->known) : dim_of(*component);
  }
};

ModelFile load_model(const std::string& path) {
  const Json j = load_json_file(path);
  ModelFile m;
  if (j.is_object() && j.contains("alpha"))
    m.mixture = mixture_from_json(j);
  else
    m.component = params_from_json(j);
  return m;
}

std::vector<std::string> point_header(int k, const std::string& prefix) {
  std::vector<std::string> h;
  if (k == 1) {
    h.push_back(prefix);
    return h;
  }
  for (int i = 1; i <= k; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

// Evaluation points: a 1-d grid spec or a CSV of points, one per row.
Mat gather_points(int dim, const std::string& grid_spec,
                  const std::string& points_path, const char* what) {
  if (!grid_spec.empty() && !points_path.empty())
    throw precondition_error(std::string("give either a ") + what +
                             " grid or a points file, not both");
  if (!grid_spec.empty()) {
    if (dim != 1)
      throw precondition_error(
          "grid specs cover one dimension; use a points file for "
          "multivariate models");
    return parse_grid(grid_spec);
  }
  if (!points_path.empty()) {
    const Mat pts = read_matrix_csv(points_path);
    if (pts.cols() != dim)
      throw precondition_error("points file '" + points_path +
                               "' does not match the model dimension");
    return pts;
  }
  throw precondition_error(std::string("a ") + what +
                           " grid or points file is required");
}

int run_sample(const std::string& params_path, std::int64_t n,
               std::uint64_t seed, const std::string& out) {
  const ModelFile model = load_model(params_path);
  RngStream rng(seed, 0);
  const Mat draws = model.mixture
                        ? sample_n(*model.mixture, static_cast<int>(n), rng)
                        : sample_n(*model.component, static_cast<int>(n), rng);
  write_matrix_csv(out, draws, point_header(model.dim(), "x"));
  std::printf("wrote %lld draws to %s\n", static_cast<long long>(n),
              out.c_str());
  return 0;
}

int run_eval(const std::string& params_path, const std::string& grid_spec,
             const std::string& points_path, double mvn_tol,
             const std::string& out) {
  const ModelFile model = load_model(params_path);
  const Mat pts = gather_points(model.dim(), grid_spec, points_path, "an x");
  Mat table(pts.rows(), pts.cols() + 1);
  table.leftCols(pts.cols()) = pts;
  for (int i = 0; i < pts.rows(); ++i) {
    const Vec x = pts.row(i).transpose();
    table(i, pts.cols()) = model.mixture
                               ? mixture_pdf(*model.mixture, x, mvn_tol)
                               : pdf(*model.component, x, mvn_tol);
  }
  std::vector<std::string> header = point_header(model.dim(), "x");
  header.push_back("pdf");
  write_matrix_csv(out, table, header);
  std::printf("wrote %d density values to %s\n",
              static_cast<int>(pts.rows()), out.c_str());
  return 0;
}

int run_cf(const std::string& params_path, const std::string& grid_spec,
           const std::string& points_path, const std::string& out) {
  const ModelFile model = load_model(params_path);
  const Mat pts = gather_points(model.dim(), grid_spec, points_path, "a t");
  Mat table(pts.rows(), pts.cols() + 3);
  table.leftCols(pts.cols()) = pts;
  for (int i = 0; i < pts.rows(); ++i) {
    const Vec t = pts.row(i).transpose();
    Complex value;
    double log_abs;
    if (model.mixture) {
      value = mixture_cf(*model.mixture, t);
      log_abs = std::log(std::abs(value));
    } else {
      const LogComplex lc = log_cf(*model.component, t);
      value = lc.value();
      log_abs = lc.log_abs;
    }
    table(i, pts.cols()) = value.real();
    table(i, pts.cols() + 1) = value.imag();
    table(i, pts.cols() + 2) = log_abs;
  }
  std::vector<std::string> header = point_header(model.dim(), "t");
  header.push_back("re");
  header.push_back("im");
  header.push_back("log_abs");
  write_matrix_csv(out, table, header);
  std::printf("wrote %d transform values to %s\n",
              static_cast<int>(pts.rows()), out.c_str());
  return 0;
}

int run_check(const std::string& f0_path, const std::string& f1_path,
              double gamma_tol, double psd_tol, const std::string& out) {
  const FamilyParams f0 = params_from_json(load_json_file(f0_path));
  const FamilyParams f1 = params_from_json(load_json_file(f1_path));
  const IdentifiabilityReport rep =
      check_identifiable(f0, f1, gamma_tol, psd_tol);
  save_json_file(out, report_to_json(rep));
  std::printf("verdict: %s\n", to_string(rep.verdict).c_str());
  return 0;
}

int run_verify_limits(const std::string& f0_path, const std::string& f1_path,
                      const std::string& direction_spec,
                      const std::string& transform_name,
                      const std::string& c_grid_spec,
                      const std::string& trace_out,
                      const std::string& report_out) {
  const FamilyParams f0 = params_from_json(load_json_file(f0_path));
  const FamilyParams f1 = params_from_json(load_json_file(f1_path));
  const Vec t = parse_vector(direction_spec);
  TransformKind kind;
  if (transform_name == "cf")
    kind = TransformKind::Cf;
  else if (transform_name == "mgf")
    kind = TransformKind::Mgf;
  else
    throw precondition_error("--transform must be cf or mgf");

  const Vec grid =
      c_grid_spec.empty() ? default_c_grid() : parse_grid(c_grid_spec);
  const RatioLimitResult res = verify_ratio_limit(f0, f1, t, kind, grid);
  write_ratio_trace_csv(trace_out, res.trace);
  if (!report_out.empty()) {
    Json j;
    j["verdict"] = to_string(res.verdict);
    j["transform"] = to_string(kind);
    j["direction"] = detail::vec_to_json(t);
    save_json_file(report_out, j);
  }
  std::printf("verdict: %s\n", to_string(res.verdict).c_str());
  return 0;
}

int run_estimate(const std::string& sample_path, const std::string& f1_path,
                 const std::string& f0_path, const std::string& init_path,
                 double alpha_init, int max_iter, double gain_tol,
                 const std::string& out) {
  if (f0_path.empty() == init_path.empty())
    throw precondition_error(
        "give --f0 for the known-both estimator or --init for the EM "
        "estimator, not both");
  const Mat sample = read_matrix_csv(sample_path);
  const FamilyParams f1 = params_from_json(load_json_file(f1_path));

  EstimationResult res;
  if (!f0_path.empty()) {
    const FamilyParams f0 = params_from_json(load_json_file(f0_path));
    res = estimate_alpha_known_both(sample, f1, f0);
  } else {
    const FamilyParams init = params_from_json(load_json_file(init_path));
    EmOptions opt;
    opt.alpha_init = alpha_init;
    opt.max_iterations = max_iter;
    opt.gain_tol = gain_tol;
    res = estimate_alpha_unknown_f0(sample, f1, Family::Sn, init, opt);
  }
  save_json_file(out, estimation_to_json(res));
  std::printf("alpha_hat: %.6f (%s)\n", res.alpha_hat,
              res.converged ? "converged" : "not converged");
  return 0;
}

int run_confuse(const std::string& f1_path, const std::string& h0_path,
                double a, double b, int points, double mvn_tol,
                const std::string& out) {
  const FamilyParams f1 = params_from_json(load_json_file(f1_path));
  const FamilyParams h0 = params_from_json(load_json_file(h0_path));
  const ConfusableCertificate cert =
      construct_confusable_mixture(f1, h0, a, b, points, mvn_tol);
  Json j;
  j["g0"] = mixture_to_json(cert.g0);
  j["max_gap"] = cert.max_gap;
  j["points"] = cert.points;
  j["certified"] = cert.certified;
  save_json_file(out, j);
  std::printf("max_gap: %.3e (%s)\n", cert.max_gap,
              cert.certified ? "certified" : "not certified");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "skewmix: two-component skew-normal mixtures with one known component"};
  app.require_subcommand(1);
  app.footer(
      "Environment: SKEWMIX_THREADS caps internal parallelism.\n"
      "Default tolerances: --gamma-tol 1e-9 (gamma gap in identifiability "
      "checks),\n--psd-tol 1e-10 (eigenvalue sign classification), --mvn-tol "
      "1e-8\n(multivariate normal cdf in matrix-shape densities).");

  std::string params_path, out_path, grid_spec, points_path;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  auto* sample = app.add_subcommand("sample", "Draw points, write CSV");
  sample->add_option("--params", params_path,
                     "component or mixture JSON file")->required();
  sample->add_option("--n", n, "number of draws")
      ->required()
      ->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "random stream seed")->required();
  sample->add_option("--out", out_path, "output CSV path")
      ->default_val("sample.csv");

  std::string eval_params, eval_out, eval_grid, eval_points;
  double mvn_tol = 1e-8;
  auto* eval = app.add_subcommand("eval", "Evaluate the density, write CSV");
  eval->add_option("--params", eval_params,
                   "component or mixture JSON file")->required();
  eval->add_option("--grid", eval_grid, "x grid start:step:stop (1-d)");
  eval->add_option("--points", eval_points, "CSV of evaluation points");
  eval->add_option("--mvn-tol", mvn_tol,
                   "multivariate normal cdf tolerance");
  eval->add_option("--out", eval_out, "output CSV path")
      ->default_val("eval.csv");

  std::string cf_params, cf_out, cf_grid, cf_points;
  auto* cf_cmd = app.add_subcommand(
      "cf", "Evaluate the characteristic function, write CSV");
  cf_cmd->add_option("--params", cf_params,
                     "component or mixture JSON file")->required();
  cf_cmd->add_option("--t-grid", cf_grid, "t grid start:step:stop (1-d)");
  cf_cmd->add_option("--t-points", cf_points, "CSV of t points");
  cf_cmd->add_option("--out", cf_out, "output CSV path")
      ->default_val("cf.csv");

  std::string check_f0, check_f1, check_out;
  double gamma_tol = 1e-9, psd_tol = 1e-10;
  auto* check = app.add_subcommand(
      "check", "Decide identifiability of (f0, f1), write a JSON report");
  check->add_option("--f0", check_f0, "unknown component JSON")->required();
  check->add_option("--f1", check_f1, "known component JSON")->required();
  check->add_option("--gamma-tol", gamma_tol, "gamma gap tolerance");
  check->add_option("--psd-tol", psd_tol, "eigenvalue sign tolerance");
  check->add_option("--out", check_out, "output JSON path")
      ->default_val("report.json");

  std::string vl_f0, vl_f1, vl_dir, vl_transform = "cf", vl_cgrid;
  std::string vl_trace_out, vl_report_out;
  auto* vl = app.add_subcommand(
      "verify-limits",
      "Trace the transform ratio along a ray, write CSV and verdict");
  vl->add_option("--f0", vl_f0, "numerator component JSON")->required();
  vl->add_option("--f1", vl_f1, "denominator component JSON")->required();
  vl->add_option("--direction", vl_dir,
                 "ray direction, comma-separated")->required();
  vl->add_option("--transform", vl_transform, "cf or mgf");
  vl->add_option("--c-grid", vl_cgrid,
                 "ray grid start:step:stop (default: geometric 1..1000)");
  vl->add_option("--trace-out", vl_trace_out, "trace CSV path")
      ->default_val("trace.csv");
  vl->add_option("--report-out", vl_report_out, "verdict JSON path");

  std::string est_sample, est_f1, est_f0, est_init, est_out;
  double alpha_init = 0.5, gain_tol = 1e-8;
  int max_iter = 500;
  auto* est = app.add_subcommand(
      "estimate", "Estimate the mixing proportion from a sample CSV");
  est->add_option("--sample", est_sample, "sample CSV path")->required();
  est->add_option("--f1", est_f1, "known component JSON")->required();
  est->add_option("--f0", est_f0,
                  "second component JSON (known-both estimator)");
  est->add_option("--init", est_init,
                  "initial second component JSON (EM estimator)");
  est->add_option("--alpha-init", alpha_init, "EM initial weight");
  est->add_option("--max-iter", max_iter, "EM iteration cap");
  est->add_option("--gain-tol", gain_tol, "EM stopping gain");
  est->add_option("--out", est_out, "output JSON path")
      ->default_val("estimate.json");

  std::string cm_f1, cm_h0, cm_out;
  double cm_a = 0.0, cm_b = 0.0;
  int cm_points = 1001;
  double cm_mvn_tol = 1e-8;
  auto* cm = app.add_subcommand(
      "confuse",
      "Build the compensating mixture for two weights, certify equality");
  cm->add_option("--f1", cm_f1, "known component JSON")->required();
  cm->add_option("--h0", cm_h0, "second component JSON")->required();
  cm->add_option("--a", cm_a, "larger mixing weight")->required();
  cm->add_option("--b", cm_b, "smaller mixing weight")->required();
  cm->add_option("--points", cm_points, "certificate grid size");
  cm->add_option("--mvn-tol", cm_mvn_tol,
                 "multivariate normal cdf tolerance");
  cm->add_option("--out", cm_out, "output JSON path")
      ->default_val("confuse.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) return run_sample(params_path, n, seed, out_path);
    if (eval->parsed())
      return run_eval(eval_params, eval_grid, eval_points, mvn_tol, eval_out);
    if (cf_cmd->parsed()) return run_cf(cf_params, cf_grid, cf_points, cf_out);
    if (check->parsed())
      return run_check(check_f0, check_f1, gamma_tol, psd_tol, check_out);
    if (vl->parsed())
      return run_verify_limits(vl_f0, vl_f1, vl_dir, vl_transform, vl_cgrid,
                               vl_trace_out, vl_report_out);
    if (est->parsed())
      return run_estimate(est_sample, est_f1, est_f0, est_init, alpha_init,
                          max_iter, gain_tol, est_out);
    if (cm->parsed())
      return run_confuse(cm_f1, cm_h0, cm_a, cm_b, cm_points, cm_mvn_tol,
                         cm_out);
  } catch (const precondition_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
