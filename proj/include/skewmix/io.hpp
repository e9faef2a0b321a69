#pragma once

// JSON and CSV serialization. JSON objects keep insertion order so emitted
// files diff cleanly; CSV cells use %.17g so every double survives a
// write/read cycle bit for bit.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skewmix/common.hpp"
#include "skewmix/estimation.hpp"
#include "skewmix/identifiability.hpp"
#include "skewmix/mixture.hpp"
#include "skewmix/params.hpp"

namespace skewmix {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& json_field(const Json& j, const char* name) {
  if (!j.is_object())
    throw precondition_error("expected a JSON object");
  if (!j.contains(name))
    throw precondition_error(std::string("missing field '") + name + "'");
  return j.at(name);
}

inline double json_number(const Json& j, const char* name) {
  const Json& f = json_field(j, name);
  if (!f.is_number())
    throw precondition_error(std::string("field '") + name +
                             "' must be a number");
  return f.get<double>();
}

inline std::string json_string(const Json& j, const char* name) {
  const Json& f = json_field(j, name);
  if (!f.is_string())
    throw precondition_error(std::string("field '") + name +
                             "' must be a string");
  return f.get<std::string>();
}

inline bool json_bool(const Json& j, const char* name) {
  const Json& f = json_field(j, name);
  if (!f.is_boolean())
    throw precondition_error(std::string("field '") + name +
                             "' must be a boolean");
  return f.get<bool>();
}

inline Vec json_vector(const Json& j, const char* name) {
  const Json& f = json_field(j, name);
  if (!f.is_array() || f.empty())
    throw precondition_error(std::string("field '") + name +
                             "' must be a nonempty array of numbers");
  Vec out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f[i].is_number())
      throw precondition_error(std::string("field '") + name +
                               "' must be a nonempty array of numbers");
    out(static_cast<int>(i)) = f[i].get<double>();
  }
  return out;
}

inline Mat json_matrix(const Json& j, const char* name) {
  const Json& f = json_field(j, name);
  if (!f.is_array() || f.empty())
    throw precondition_error(std::string("field '") + name +
                             "' must be an array of equally sized rows");
  const std::size_t cols = f[0].is_array() ? f[0].size() : 0;
  if (cols == 0)
    throw precondition_error(std::string("field '") + name +
                             "' must be an array of equally sized rows");
  Mat out(f.size(), cols);
  for (std::size_t r = 0; r < f.size(); ++r) {
    if (!f[r].is_array() || f[r].size() != cols)
      throw precondition_error(std::string("field '") + name +
                               "' must be an array of equally sized rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!f[r][c].is_number())
        throw precondition_error(std::string("field '") + name +
                                 "' must contain only numbers");
      out(static_cast<int>(r), static_cast<int>(c)) = f[r][c].get<double>();
    }
  }
  return out;
}

inline Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json mat_to_json(const Mat& m) {
  Json a = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

inline Family family_from_string(const std::string& s) {
  if (s == "sn") return Family::Sn;
  if (s == "msn") return Family::Msn;
  if (s == "cfusn") return Family::Cfusn;
  throw precondition_error("field 'family' must be one of sn, msn, cfusn");
}

inline IdVerdict verdict_from_string(const std::string& s) {
  if (s == "identifiable") return IdVerdict::Identifiable;
  if (s == "condition-violated") return IdVerdict::ConditionViolated;
  if (s == "degenerate") return IdVerdict::Degenerate;
  throw precondition_error("field 'verdict' has an unknown value");
}

inline PsdLabel psd_label_from_string(const std::string& s) {
  if (s == "positive-definite") return PsdLabel::PositiveDefinite;
  if (s == "positive-semidefinite-singular")
    return PsdLabel::PositiveSemidefiniteSingular;
  if (s == "indefinite") return PsdLabel::Indefinite;
  if (s == "negative-semidefinite") return PsdLabel::NegativeSemidefinite;
  if (s == "negative-definite") return PsdLabel::NegativeDefinite;
  throw precondition_error("field 'label' has an unknown value");
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline Json params_to_json(const FamilyParams& p) {
  Json j;
  j["family"] = family_name(family_of(p));
  if (const auto* sn = std::get_if<SnParams>(&p)) {
    j["mu"] = sn->mu;
    j["omega"] = sn->omega;
    j["lambda"] = sn->lambda;
  } else if (const auto* msn = std::get_if<MsnParams>(&p)) {
    j["mu"] = detail::vec_to_json(msn->mu);
    j["omega"] = detail::mat_to_json(msn->omega_mat.mat());
    j["lambda"] = detail::vec_to_json(msn->lambda_vec);
  } else {
    const auto& cf = std::get<CfusnParams>(p);
    j["mu"] = detail::vec_to_json(cf.mu);
    j["omega"] = detail::mat_to_json(cf.omega_mat.mat());
    j["lambda"] = detail::mat_to_json(cf.lambda_mat);
  }
  return j;
}

inline FamilyParams params_from_json(const Json& j) {
  const Family fam = detail::family_from_string(detail::json_string(j, "family"));
  FamilyParams out;
  if (fam == Family::Sn) {
    out = SnParams{detail::json_number(j, "mu"),
                   detail::json_number(j, "omega"),
                   detail::json_number(j, "lambda")};
  } else {
    const Vec mu = detail::json_vector(j, "mu");
    const Mat omega = detail::json_matrix(j, "omega");
    SymMatrix sym;
    try {
      sym = SymMatrix(omega);
    } catch (const precondition_error& e) {
      // the symmetric-matrix wrapper does not know which field it holds
      throw precondition_error(std::string("field 'omega': ") + e.what());
    }
    if (fam == Family::Msn)
      out = MsnParams{mu, sym, detail::json_vector(j, "lambda")};
    else
      out = CfusnParams{mu, sym, detail::json_matrix(j, "lambda")};
  }
  validate(out);
  return out;
}

inline Json mixture_to_json(const MixtureModel& m) {
  Json j;
  j["alpha"] = m.alpha;
  j["known"] = params_to_json(m.known);
  j["unknown"] = params_to_json(m.unknown);
  return j;
}

inline MixtureModel mixture_from_json(const Json& j) {
  const double alpha = detail::json_number(j, "alpha");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw precondition_error("field 'alpha' must lie strictly inside (0,1)");
  const MixtureModel m{alpha,
                       params_from_json(detail::json_field(j, "known")),
                       params_from_json(detail::json_field(j, "unknown"))};
  validate(m);
  return m;
}

inline Json report_to_json(const IdentifiabilityReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["theorem"] = family_name(r.theorem);
  j["violated_clause"] =
      r.violated_clause ? Json(*r.violated_clause) : Json(nullptr);
  j["witness"] = r.witness ? detail::vec_to_json(*r.witness) : Json(nullptr);
  Json cls;
  cls["label"] = to_string(r.gamma_diff_class.label);
  cls["min_eigenvalue"] = r.gamma_diff_class.min_eigenvalue;
  cls["max_eigenvalue"] = r.gamma_diff_class.max_eigenvalue;
  j["gamma_diff_class"] = cls;
  j["tolerance_used"] = r.tolerance_used;
  return j;
}

inline IdentifiabilityReport report_from_json(const Json& j) {
  IdentifiabilityReport r;
  r.verdict = detail::verdict_from_string(detail::json_string(j, "verdict"));
  r.theorem = detail::family_from_string(detail::json_string(j, "theorem"));
  const Json& clause = detail::json_field(j, "violated_clause");
  if (!clause.is_null()) r.violated_clause = clause.get<std::string>();
  const Json& wit = detail::json_field(j, "witness");
  if (!wit.is_null()) r.witness = detail::json_vector(j, "witness");
  const Json& cls = detail::json_field(j, "gamma_diff_class");
  r.gamma_diff_class.label =
      detail::psd_label_from_string(detail::json_string(cls, "label"));
  r.gamma_diff_class.min_eigenvalue = detail::json_number(cls, "min_eigenvalue");
  r.gamma_diff_class.max_eigenvalue = detail::json_number(cls, "max_eigenvalue");
  r.tolerance_used = detail::json_number(j, "tolerance_used");
  return r;
}

inline Json estimation_to_json(const EstimationResult& r) {
  Json j;
  j["alpha_hat"] = r.alpha_hat;
  j["f0_hat"] = r.f0_hat ? params_to_json(*r.f0_hat) : Json(nullptr);
  j["log_likelihood"] = r.log_likelihood;
  j["trace"] = detail::vec_to_json(r.trace);
  j["converged"] = r.converged;
  j["identifiability_check"] = report_to_json(r.identifiability_check);
  return j;
}

inline EstimationResult estimation_from_json(const Json& j) {
  EstimationResult r;
  r.alpha_hat = detail::json_number(j, "alpha_hat");
  const Json& f0 = detail::json_field(j, "f0_hat");
  if (!f0.is_null()) r.f0_hat = params_from_json(f0);
  r.log_likelihood = detail::json_number(j, "log_likelihood");
  r.trace = detail::json_vector(j, "trace");
  r.converged = detail::json_bool(j, "converged");
  r.identifiability_check =
      report_from_json(detail::json_field(j, "identifiability_check"));
  return r;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open())
    throw precondition_error("cannot open file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw precondition_error("file '" + path + "' is not valid JSON: " +
                             e.what());
  }
}

inline void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out.is_open())
    throw precondition_error("cannot write file '" + path + "'");
  out << j.dump(2) << '\n';
}

inline void write_matrix_csv(const std::string& path, const Mat& m,
                             const std::vector<std::string>& header) {
  require(static_cast<int>(header.size()) == m.cols(),
          "header size must match the column count");
  std::ofstream out(path);
  if (!out.is_open())
    throw precondition_error("cannot write file '" + path + "'");
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << header[c];
  out << '\n';
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c)
      out << (c ? "," : "") << detail::format_double(m(r, c));
    out << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string token;
  std::stringstream ss(line);
  while (std::getline(ss, token, ',')) {
    const auto first = token.find_first_not_of(" \t\r");
    const auto last = token.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos
                      ? std::string()
                      : token.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool parse_double(const std::string& s, double* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end && !s.empty();
}

}  // namespace detail

// Reads a numeric CSV table. A first row that fails to parse as numbers is
// treated as a header, matching the files this library writes.
inline Mat read_matrix_csv(const std::string& path,
                           std::vector<std::string>* header_out = nullptr) {
  std::ifstream in(path);
  if (!in.is_open())
    throw precondition_error("cannot open file '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  std::size_t cols = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> tokens = detail::split_csv_line(line);
    std::vector<double> values(tokens.size());
    bool numeric = true;
    for (std::size_t i = 0; i < tokens.size(); ++i)
      if (!detail::parse_double(tokens[i], &values[i])) {
        numeric = false;
        break;
      }
    if (first) {
      first = false;
      cols = tokens.size();
      if (!numeric) {
        header = tokens;
        continue;
      }
    }
    if (!numeric)
      throw precondition_error("file '" + path +
                               "' has a non-numeric data row");
    if (tokens.size() != cols)
      throw precondition_error("file '" + path +
                               "' has rows of differing width");
    rows.push_back(std::move(values));
  }
  if (rows.empty())
    throw precondition_error("file '" + path + "' contains no data rows");

  Mat m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
  if (header_out) *header_out = header;
  return m;
}

inline void write_ratio_trace_csv(const std::string& path,
                                  const RatioTrace& trace) {
  Mat m(trace.c_grid.size(), 3);
  m.col(0) = trace.c_grid;
  m.col(1) = trace.log_abs_ratio;
  m.col(2) = trace.phase;
  write_matrix_csv(path, m, {"c", "log_abs_ratio", "phase"});
}

inline RatioTrace read_ratio_trace_csv(const std::string& path) {
  std::vector<std::string> header;
  const Mat m = read_matrix_csv(path, &header);
  require(m.cols() == 3, "ratio trace files need exactly three columns");
  RatioTrace trace;
  trace.c_grid = m.col(0);
  trace.log_abs_ratio = m.col(1);
  trace.phase = m.col(2);
  return trace;
}

}  // namespace skewmix
