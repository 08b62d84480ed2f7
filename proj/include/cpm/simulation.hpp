#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cpm/dataset.hpp"
#include "cpm/link.hpp"

namespace cpm {

enum class StudyFamily { SingleDL, MultiDL, Misspec };

std::string_view to_string(StudyFamily family);
StudyFamily parse_family(std::string_view text);

struct ScenarioSpec {
  StudyFamily family = StudyFamily::SingleDL;
  int scenario = 1;      // 1..6 single DL, 1..5 multiple DLs, ignored for Misspec
  int n = 100;           // per site for MultiDL
  LinkName link = LinkName::Probit;
  int replicates = 1000;
  std::uint64_t seed = 20240101;

  void validate() const;  // throws UnknownScenario / InvalidArgument
  std::size_t total_n() const { return family == StudyFamily::MultiDL ? 3 * std::size_t(n) : std::size_t(n); }
};

// Observation i of replicate r draws (x, eps) from one Philox block with key
// = seed and counter (i, 0, r), so every family sees the same latent draws.
Dataset generate_single_dl(int scenario, int n, std::uint64_t seed, std::uint64_t replicate);

struct MultiSiteData {
  Dataset data;
  std::vector<int> site;  // 0, 1, 2
};
MultiSiteData generate_multi_dl(int scenario, int n_per_site, std::uint64_t seed, std::uint64_t replicate);

// X ~ N(5, 1), Y = (X + eps)^2, lower DL 13.12.
Dataset generate_misspec(int n, std::uint64_t seed, std::uint64_t replicate);

Dataset generate(const ScenarioSpec& spec, std::uint64_t replicate);

// Latent-to-outcome map of single-DL scenario 6.
double scenario6_transform(double latent);

enum class TargetKind { Beta, Quantile, Cdf };

struct Target {
  std::string name;
  TargetKind kind = TargetKind::Beta;
  double x = 0.0;
  double at = 0.0;  // p for quantiles, y for CDFs
  double truth = 0.0;
  std::optional<double> tabulated_truth;  // reference table value, reported only
};

std::vector<Target> study_targets(const ScenarioSpec& spec);

// Scenario-6 truths by Monte Carlo of the transform (4e6 draws, fixed stream).
double scenario6_quantile_truth(double x, double p);
double scenario6_cdf_truth(double x, double y);

enum class Estimator { Cpm, SubstituteDL, SubstituteHalfDL, SubstituteDLOverSqrt2, CensoredMle };

std::string_view to_string(Estimator estimator);
Estimator parse_estimator(std::string_view text);

// One replicate's contribution to one (estimator, target) cell.
struct Score {
  double estimate = 0.0;  // value entering bias/SE/RMSE
  bool covered = false;
  bool flagged = false;   // boundary or non-estimable value scored at a convention
};

struct MetricsRow {
  std::string estimator;
  std::string parameter;
  double truth = 0.0;
  std::optional<double> tabulated_truth;
  double mean_estimate = 0.0;
  double percent_bias = 0.0;
  double absolute_bias = 0.0;  // mean - truth
  double empirical_se = 0.0;   // 1/R denominator
  double rmse = 0.0;
  double coverage = 0.0;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;
  std::size_t n_flagged = 0;
};

MetricsRow aggregate(const std::string& estimator, const Target& target, const std::vector<Score>& scores,
                     std::size_t n_excluded);

struct Exclusion {
  std::string estimator;
  std::uint64_t replicate = 0;
  std::string reason;
};

struct StudyResult {
  ScenarioSpec spec;
  std::vector<Estimator> estimators;
  std::vector<Target> targets;
  std::vector<MetricsRow> rows;
  std::vector<Exclusion> exclusions;
  int threads = 1;
  double seconds = 0.0;
};

// CPM_THREADS when set to a positive integer, else hardware concurrency.
int default_thread_count();

// Replicates run on `threads` workers (0 = default_thread_count()); results
// are reduced in replicate order so output does not depend on scheduling.
StudyResult run_study(const ScenarioSpec& spec, const std::vector<Estimator>& estimators, int threads = 0);

// Scores of one replicate for every target, empty entries where the
// estimator does not provide the target. Throws on estimator failure.
std::vector<std::optional<Score>> score_replicate(const Dataset& data, const ScenarioSpec& spec,
                                                  const std::vector<Target>& targets, Estimator estimator);

}  // namespace cpm
