#include "cpm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "cpm/error.hpp"
#include "cpm/inference.hpp"

namespace cpm {
namespace {

using nlohmann::json;

Error parse_error(int line, int column, const std::string& what) {
  return Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_real(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return in;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

double number_or_nan(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
T require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(ErrorKind::SchemaError, std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

CensorCode parse_censor_code(std::string_view text) {
  if (text.empty() || text == "none") return CensorCode::Observed;
  if (text == "L" || text == "lower") return CensorCode::BelowDL;
  if (text == "U" || text == "upper") return CensorCode::AboveDL;
  throw Error(ErrorKind::UnknownCensorCode, "unknown censor code '" + std::string(text) + "'");
}

std::string_view censor_code_text(CensorCode code) {
  switch (code) {
    case CensorCode::Observed: return "";
    case CensorCode::BelowDL: return "L";
    case CensorCode::AboveDL: return "U";
  }
  return "";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::vector<std::string>> parse_csv_records(std::istream& in, std::vector<int>* line_numbers) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, was_quoted = false, any = false;
  int line = 1, rec_line = 1;
  auto end_field = [&] {
    rec.push_back(was_quoted ? field : trim(field));
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = rec.size() == 1 && rec[0].empty() && !any;
    if (!blank) {
      records.push_back(std::move(rec));
      if (line_numbers) line_numbers->push_back(rec_line);
    }
    rec.clear();
    any = false;
  };
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!trim(field).empty()) throw parse_error(line, int(rec.size()) + 1, "quote inside an unquoted field");
        field.clear();
        quoted = was_quoted = any = true;
        break;
      case ',':
        end_field();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        rec_line = ++line;
        break;
      default:
        if (was_quoted && c != ' ' && c != '\t')
          throw parse_error(line, int(rec.size()) + 1, "text after a closing quote");
        if (!was_quoted) field += c;
        any = any || c != ' ';
    }
  }
  if (quoted) throw parse_error(line, int(rec.size()) + 1, "unterminated quoted field");
  if (!field.empty() || !rec.empty() || was_quoted) end_record();
  return records;
}

InputTable parse_input_table(std::istream& in) {
  std::vector<int> lines;
  auto records = parse_csv_records(in, &lines);
  if (records.empty()) throw Error(ErrorKind::ParseError, "line 1, column 1: missing header row");
  InputTable t;
  t.header = records.front();
  if (t.header.size() < 2) throw parse_error(lines[0], 1, "need at least an outcome and a censor column");
  t.outcome_column = t.header[0];
  t.censor_column = t.header[1];
  t.covariate_columns.assign(t.header.begin() + 2, t.header.end());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const int line = lines[r];
    if (rec.size() != t.header.size())
      throw parse_error(line, int(std::min(rec.size(), t.header.size())) + 1,
                        "expected " + std::to_string(t.header.size()) + " fields, found " + std::to_string(rec.size()));
    CensoredObservation o;
    if (!parse_real(rec[0], o.z)) throw parse_error(line, 1, "outcome '" + rec[0] + "' is not a number");
    try {
      o.delta = parse_censor_code(rec[1]);
    } catch (const Error& e) {
      throw Error(ErrorKind::UnknownCensorCode, "line " + std::to_string(line) + ", column 2: " + e.what());
    }
    for (std::size_t k = 2; k < rec.size(); ++k) {
      double v;
      if (!parse_real(rec[k], v))
        throw parse_error(line, int(k) + 1, "covariate '" + rec[k] + "' is not a number");
      o.x.push_back(v);
    }
    t.rows.push_back(std::move(o));
    t.line_numbers.push_back(line);
  }
  return t;
}

InputTable read_csv(const std::string& path) {
  auto in = open_input(path);
  return parse_input_table(in);
}

Dataset InputTable::to_dataset() const { return validate_dataset(rows, covariate_columns); }

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << "y,censor";
  for (const auto& n : ds.covariate_names()) out << ',' << csv_field(n);
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << format_double(ds.z(i)) << ',' << censor_code_text(ds.delta(i));
    for (Eigen::Index k = 0; k < ds.covariates().cols(); ++k) out << ',' << format_double(ds.row(i)[k]);
    out << '\n';
  }
}

std::vector<Eigen::VectorXd> parse_profiles(std::istream& in, const std::vector<std::string>& model_covariates) {
  std::vector<int> lines;
  const auto records = parse_csv_records(in, &lines);
  if (records.empty()) throw Error(ErrorKind::ParseError, "line 1, column 1: missing header row");
  const auto& header = records.front();
  std::vector<int> position(header.size(), -1);
  std::vector<bool> seen(model_covariates.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto it = std::find(model_covariates.begin(), model_covariates.end(), header[c]);
    if (it == model_covariates.end())
      throw Error(ErrorKind::UnknownProfileColumn, "profile column '" + header[c] + "' is not a model covariate");
    position[c] = int(it - model_covariates.begin());
    if (seen[std::size_t(position[c])])
      throw Error(ErrorKind::UnknownProfileColumn, "profile column '" + header[c] + "' appears twice");
    seen[std::size_t(position[c])] = true;
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) throw Error(ErrorKind::UnknownProfileColumn, "profile lacks model covariate '" + model_covariates[k] + "'");
  std::vector<Eigen::VectorXd> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size())
      throw parse_error(lines[r], int(std::min(records[r].size(), header.size())) + 1, "wrong number of fields");
    Eigen::VectorXd x(Eigen::Index(model_covariates.size()));
    for (std::size_t c = 0; c < header.size(); ++c) {
      double v;
      if (!parse_real(records[r][c], v)) throw parse_error(lines[r], int(c) + 1, "'" + records[r][c] + "' is not a number");
      x[position[c]] = v;
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Eigen::VectorXd> read_profiles(const std::string& path, const std::vector<std::string>& model_covariates) {
  auto in = open_input(path);
  return parse_profiles(in, model_covariates);
}

void RunConfig::validate() const {
  fit.validate();
  for (double p : quantiles)
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidProbability, "quantile probabilities must lie in (0, 1)");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidProbability, "level must lie in (0, 1)");
}

RunConfig parse_run_config(const json& doc, RunConfig c) {
  if (!doc.is_object()) throw Error(ErrorKind::SchemaError, "config must be a JSON object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "link") c.link = parse_link(v.get<std::string>()).name();
      else if (key == "covariates") c.covariates = v.get<std::vector<std::string>>();
      else if (key == "quantiles") c.quantiles = v.get<std::vector<double>>();
      else if (key == "cdf_at") c.cdf_at = v.get<std::vector<double>>();
      else if (key == "level") c.level = v.get<double>();
      else if (key == "fit") {
        for (const auto& [k, o] : v.items()) {
          if (k == "max_iterations") c.fit.max_iterations = o.get<int>();
          else if (k == "gradient_tol") c.fit.gradient_tol = o.get<double>();
          else if (k == "loglik_rel_tol") c.fit.loglik_rel_tol = o.get<double>();
          else if (k == "max_step_halvings") c.fit.max_step_halvings = o.get<int>();
          else throw Error(ErrorKind::SchemaError, "unknown fit option '" + k + "'");
        }
      } else if (key != "schema_version") {
        throw Error(ErrorKind::SchemaError, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig read_run_config(const std::string& path, RunConfig base) {
  auto in = open_input(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
  return parse_run_config(doc, std::move(base));
}

json fit_to_json(const ModelFit& m, double level) {
  const AnchorSet& a = m.anchors;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "cpm_fit";
  doc["link"] = std::string(m.link.label());
  doc["n_obs"] = m.n_obs;
  doc["covariates"] = m.covariate_names;
  doc["anchors"] = {{"values", a.values},
                    {"lower_category", a.has_lower_cat},
                    {"upper_category", a.has_upper_cat},
                    {"lower_limit", a.lower_limit ? json(*a.lower_limit) : json(nullptr)},
                    {"upper_limit", a.upper_limit ? json(*a.upper_limit) : json(nullptr)},
                    {"lower_label", a.lower_label},
                    {"upper_label", a.upper_label},
                    {"n_alpha", a.n_alpha()},
                    {"diagnostics", a.diagnostics}};
  json alphas = json::array();
  for (Eigen::Index k = 0; k < m.n_alpha(); ++k) {
    const int j = a.anchor_index(int(k));
    alphas.push_back({{"index", j}, {"anchor", a.anchor_label(j)}, {"estimate", m.theta_hat.alphas[k]},
                      {"se", number_or_null(m.standard_error(k))}});
  }
  doc["alphas"] = alphas;
  json coefs = json::array();
  for (Eigen::Index k = 0; k < m.n_beta(); ++k) {
    const double est = m.theta_hat.betas[k];
    const double se = m.standard_error(m.n_alpha() + k);
    const auto [lo, hi] = wald_interval_beta(m, k, level);
    json c = {{"name", m.covariate_names[std::size_t(k)]},
              {"estimate", est},
              {"se", number_or_null(se)},
              {"z", number_or_null(est / se)},
              {"p_value", number_or_null(std::erfc(std::abs(est / se) / std::sqrt(2.0)))},
              {"ci_lo", number_or_null(lo)},
              {"ci_hi", number_or_null(hi)}};
    if (m.link.name() == LinkName::Logit) {
      c["odds_ratio"] = std::exp(est);
      c["odds_ratio_ci_lo"] = number_or_null(std::exp(lo));
      c["odds_ratio_ci_hi"] = number_or_null(std::exp(hi));
    }
    coefs.push_back(c);
  }
  doc["coefficients"] = coefs;
  doc["level"] = level;
  json vcov = json::array();
  for (Eigen::Index r = 0; r < m.vcov.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.vcov.cols(); ++c) row.push_back(m.vcov(r, c));
    vcov.push_back(row);
  }
  doc["vcov"] = vcov;
  doc["loglik"] = m.loglik;
  doc["convergence"] = {{"converged", m.converged},
                        {"iterations", m.n_iterations},
                        {"gradient_sup_norm", m.gradient_sup_norm},
                        {"loglik_history", m.loglik_history}};
  return doc;
}

ModelFit fit_from_json(const json& doc) {
  if (require<int>(doc, "schema_version") != kSchemaVersion)
    throw Error(ErrorKind::SchemaError, "unsupported schema_version");
  if (require<std::string>(doc, "kind") != "cpm_fit") throw Error(ErrorKind::SchemaError, "not a cpm_fit document");
  ModelFit m;
  m.link = parse_link(require<std::string>(doc, "link"));
  m.n_obs = require<std::size_t>(doc, "n_obs");
  m.covariate_names = require<std::vector<std::string>>(doc, "covariates");
  const json& a = doc.at("anchors");
  m.anchors.values = require<std::vector<double>>(a, "values");
  m.anchors.has_lower_cat = require<bool>(a, "lower_category");
  m.anchors.has_upper_cat = require<bool>(a, "upper_category");
  if (!a.at("lower_limit").is_null()) m.anchors.lower_limit = a.at("lower_limit").get<double>();
  if (!a.at("upper_limit").is_null()) m.anchors.upper_limit = a.at("upper_limit").get<double>();
  m.anchors.lower_label = require<std::string>(a, "lower_label");
  m.anchors.upper_label = require<std::string>(a, "upper_label");
  if (a.contains("diagnostics")) m.anchors.diagnostics = a.at("diagnostics").get<std::vector<std::string>>();
  if ((m.anchors.has_lower_cat && !m.anchors.lower_limit) || (m.anchors.has_upper_cat && !m.anchors.upper_limit))
    throw Error(ErrorKind::SchemaError, "tail category without its detection limit");

  const json& alphas = doc.at("alphas");
  const json& coefs = doc.at("coefficients");
  if (alphas.size() != std::size_t(m.anchors.n_alpha()))
    throw Error(ErrorKind::SchemaError, "alpha count does not match the anchor summary");
  if (coefs.size() != m.covariate_names.size())
    throw Error(ErrorKind::SchemaError, "coefficient count does not match the covariates");
  m.theta_hat.alphas.resize(Eigen::Index(alphas.size()));
  m.theta_hat.betas.resize(Eigen::Index(coefs.size()));
  for (std::size_t k = 0; k < alphas.size(); ++k) m.theta_hat.alphas[Eigen::Index(k)] = require<double>(alphas[k], "estimate");
  for (std::size_t k = 0; k < coefs.size(); ++k) m.theta_hat.betas[Eigen::Index(k)] = require<double>(coefs[k], "estimate");

  const json& vcov = doc.at("vcov");
  const auto dim = m.theta_hat.size();
  if (Eigen::Index(vcov.size()) != dim) throw Error(ErrorKind::SchemaError, "vcov has the wrong dimension");
  m.vcov.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (Eigen::Index(vcov[std::size_t(r)].size()) != dim) throw Error(ErrorKind::SchemaError, "vcov row has the wrong length");
    for (Eigen::Index c = 0; c < dim; ++c) m.vcov(r, c) = number_or_nan(vcov[std::size_t(r)][std::size_t(c)]);
  }
  m.loglik = require<double>(doc, "loglik");
  const json& conv = doc.at("convergence");
  m.converged = require<bool>(conv, "converged");
  m.n_iterations = require<int>(conv, "iterations");
  m.gradient_sup_norm = require<double>(conv, "gradient_sup_norm");
  if (conv.contains("loglik_history")) m.loglik_history = conv.at("loglik_history").get<std::vector<double>>();
  return m;
}

json quantile_to_json(const QuantileValue& q) {
  switch (q.kind) {
    case QuantileValue::Kind::Numeric: return q.value;
    case QuantileValue::Kind::BelowLowest: return {{"kind", "below_dl"}, {"label", q.label}, {"limit", q.value}};
    case QuantileValue::Kind::AboveHighest: return {{"kind", "above_dl"}, {"label", q.label}, {"limit", q.value}};
  }
  return nullptr;
}

json predict_to_json(const ModelFit& m, const PredictionRequest& req) {
  json rows = json::array();
  for (std::size_t i = 0; i < req.profiles.size(); ++i) {
    const Eigen::VectorXd& x = req.profiles[i];
    json cov = json::object();
    for (std::size_t k = 0; k < m.covariate_names.size(); ++k) cov[m.covariate_names[k]] = x[Eigen::Index(k)];
    for (double y : req.cdf_at) {
      const CdfEstimate c = conditional_cdf(m, x, y, req.level);
      rows.push_back({{"profile", i}, {"covariates", cov}, {"quantity", "cdf"}, {"at", y}, {"estimate", c.estimate},
                      {"se", c.se}, {"ci_lo", c.ci_lo}, {"ci_hi", c.ci_hi}});
    }
    for (double p : req.quantiles) {
      const QuantileValue q = conditional_quantile(m, x, p);
      const auto [lo, hi] = conditional_quantile_interval(m, x, p, req.level);
      rows.push_back({{"profile", i}, {"covariates", cov}, {"quantity", "quantile"}, {"at", p},
                      {"estimate", quantile_to_json(q)}, {"ci_lo", quantile_to_json(lo)},
                      {"ci_hi", quantile_to_json(hi)}});
    }
  }
  return {{"schema_version", kSchemaVersion}, {"kind", "cpm_prediction"}, {"level", req.level},
          {"covariates", m.covariate_names}, {"rows", rows}};
}

void write_predictions_csv(std::ostream& out, const json& pred) {
  const auto names = pred.at("covariates").get<std::vector<std::string>>();
  auto cell = [](const json& v) -> std::string {
    if (v.is_null()) return "";
    if (v.is_number()) return format_double(v.get<double>());
    return v.at("label").get<std::string>();
  };
  out << "profile";
  for (const auto& n : names) out << ',' << csv_field(n);
  out << ",quantity,at,estimate,se,ci_lo,ci_hi\n";
  for (const auto& r : pred.at("rows")) {
    out << r.at("profile").get<std::size_t>();
    for (const auto& n : names) out << ',' << format_double(r.at("covariates").at(n).get<double>());
    out << ',' << r.at("quantity").get<std::string>() << ',' << format_double(r.at("at").get<double>()) << ','
        << csv_field(cell(r.at("estimate"))) << ',' << (r.contains("se") ? cell(r.at("se")) : std::string()) << ','
        << csv_field(cell(r.at("ci_lo"))) << ',' << csv_field(cell(r.at("ci_hi"))) << '\n';
  }
}

json metrics_to_json(const StudyResult& res) {
  json rows = json::array();
  for (const auto& r : res.rows) {
    rows.push_back({{"estimator", r.estimator},
                    {"parameter", r.parameter},
                    {"truth", r.truth},
                    {"tabulated_truth", r.tabulated_truth ? json(*r.tabulated_truth) : json(nullptr)},
                    {"mean_estimate", number_or_null(r.mean_estimate)},
                    {"percent_bias", number_or_null(r.percent_bias)},
                    {"absolute_bias", number_or_null(r.absolute_bias)},
                    {"empirical_se", number_or_null(r.empirical_se)},
                    {"rmse", number_or_null(r.rmse)},
                    {"coverage", number_or_null(r.coverage)},
                    {"n_used", r.n_used},
                    {"n_excluded", r.n_excluded},
                    {"n_flagged", r.n_flagged}});
  }
  return {{"schema_version", kSchemaVersion}, {"kind", "cpm_metrics"}, {"rows", rows}};
}

void write_metrics_csv(std::ostream& out, const StudyResult& res) {
  out << "estimator,parameter,truth,tabulated_truth,mean_estimate,percent_bias,absolute_bias,empirical_se,rmse,"
         "coverage,n_used,n_excluded,n_flagged\n";
  auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
  for (const auto& r : res.rows) {
    out << csv_field(r.estimator) << ',' << csv_field(r.parameter) << ',' << num(r.truth) << ','
        << (r.tabulated_truth ? num(*r.tabulated_truth) : std::string()) << ',' << num(r.mean_estimate) << ','
        << num(r.percent_bias) << ',' << num(r.absolute_bias) << ',' << num(r.empirical_se) << ',' << num(r.rmse)
        << ',' << num(r.coverage) << ',' << r.n_used << ',' << r.n_excluded << ',' << r.n_flagged << '\n';
  }
}

json manifest_to_json(const StudyResult& res, std::string_view tool_version) {
  std::map<std::string, std::size_t> excluded;
  for (auto e : res.estimators) excluded[std::string(to_string(e))] = 0;
  for (const auto& e : res.exclusions) ++excluded[e.estimator];
  json reasons = json::array();
  for (std::size_t i = 0; i < res.exclusions.size() && i < 50; ++i)
    reasons.push_back({{"estimator", res.exclusions[i].estimator},
                       {"replicate", res.exclusions[i].replicate},
                       {"reason", res.exclusions[i].reason}});
  json estimators = json::array();
  for (auto e : res.estimators) estimators.push_back(std::string(to_string(e)));
  const auto& s = res.spec;
  return {{"schema_version", kSchemaVersion},
          {"kind", "cpm_simulation_manifest"},
          {"tool_version", tool_version},
          {"compiler", __VERSION__},
          {"rng", "philox4x32-10, key = seed, counter = (observation, 0, replicate)"},
          {"spec",
           {{"family", to_string(s.family)},
            {"scenario", s.scenario},
            {"n", s.n},
            {"total_n", s.total_n()},
            {"link", LinkFunction(s.link).label()},
            {"replicates", s.replicates},
            {"seed", s.seed}}},
          {"estimators", estimators},
          {"threads", res.threads},
          {"seconds", res.seconds},
          {"excluded_replicates", excluded},
          {"exclusions", reasons},
          {"exclusions_truncated", res.exclusions.size() > 50}};
}

}  // namespace cpm
