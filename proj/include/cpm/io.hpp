#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cpm/dataset.hpp"
#include "cpm/derived.hpp"
#include "cpm/simulation.hpp"
#include "cpm/solver.hpp"

namespace cpm {

inline constexpr int kSchemaVersion = 1;

// Column 1 is the outcome (value or DL), column 2 the censor code, the rest
// are covariates named by the header.
struct InputTable {
  std::vector<std::string> header;
  std::string outcome_column;
  std::string censor_column;
  std::vector<std::string> covariate_columns;
  std::vector<CensoredObservation> rows;
  std::vector<int> line_numbers;  // 1-based file line of each row

  Dataset to_dataset() const;
};

// "" / "none" -> Observed, "L" / "lower" -> BelowDL, "U" / "upper" -> AboveDL.
CensorCode parse_censor_code(std::string_view text);
std::string_view censor_code_text(CensorCode code);

// RFC-4180 fields (quotes, doubled quotes, CRLF). Blank lines are skipped.
std::vector<std::vector<std::string>> parse_csv_records(std::istream& in, std::vector<int>* line_numbers = nullptr);

InputTable parse_input_table(std::istream& in);
InputTable read_csv(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& dataset);

// Covariate profiles for prediction, reordered to the model's covariates.
std::vector<Eigen::VectorXd> parse_profiles(std::istream& in, const std::vector<std::string>& model_covariates);
std::vector<Eigen::VectorXd> read_profiles(const std::string& path, const std::vector<std::string>& model_covariates);

struct RunConfig {
  LinkName link = LinkName::Probit;
  FitOptions fit;
  std::vector<std::string> covariates;  // empty = all columns
  std::vector<double> quantiles;
  std::vector<double> cdf_at;
  double level = 0.95;

  void validate() const;
};

RunConfig parse_run_config(const nlohmann::json& doc, RunConfig base = {});
RunConfig read_run_config(const std::string& path, RunConfig base = {});

nlohmann::json fit_to_json(const ModelFit& fit, double level = 0.95);
ModelFit fit_from_json(const nlohmann::json& doc);

nlohmann::json quantile_to_json(const QuantileValue& q);

struct PredictionRequest {
  std::vector<Eigen::VectorXd> profiles;
  std::vector<double> cdf_at;
  std::vector<double> quantiles;
  double level = 0.95;
};

nlohmann::json predict_to_json(const ModelFit& fit, const PredictionRequest& request);
void write_predictions_csv(std::ostream& out, const nlohmann::json& predictions);

nlohmann::json metrics_to_json(const StudyResult& result);
void write_metrics_csv(std::ostream& out, const StudyResult& result);
nlohmann::json manifest_to_json(const StudyResult& result, std::string_view tool_version);

// %.17g, which reads back to the same double.
std::string format_double(double v);

}  // namespace cpm
