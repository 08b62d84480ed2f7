#pragma once

#include <utility>
#include <vector>

#include "cpm/dataset.hpp"
#include "cpm/solver.hpp"

namespace cpm {

struct WilcoxonStats {
  std::vector<double> midranks;
  double R1 = 0.0;  // midrank sum of group x = 1
  int n0 = 0;
  int n1 = 0;
  double numerator = 0.0;  // R1 - n1 (n + 1) / 2
};

// Midranks of y with ties averaged; x must be coded 0/1.
WilcoxonStats wilcoxon_stats(const std::vector<double>& y, const std::vector<double>& x);

struct TestResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Upper tail of the chi-square distribution.
double chi_square_upper(double statistic, int df);

// estimate +- z_{(1+level)/2} * se for stacked parameter `index`.
std::pair<double, double> wald_interval(const ModelFit& fit, Eigen::Index index, double level);
// Same, addressing beta number `k`.
std::pair<double, double> wald_interval_beta(const ModelFit& fit, Eigen::Index k, double level);

// 2 (logL_full - logL_reduced) against chi-square with the difference in beta
// counts. Nesting is checked by covariate name.
TestResult likelihood_ratio_test(const ModelFit& full, const ModelFit& reduced);

struct ScoreTestResult {
  double S = 0.0;  // d logL / d beta at (alpha-hat | beta = 0)
  WilcoxonStats wilcoxon;
};

// Score numerator for a single 0/1 covariate under the logit link, computed
// from the empirical CDF over the outcome categories, together with the
// midrank statistics of the same categories. Tail categories a_0 / a_{J+1}
// are treated as ordinary tied values; tails that straddle observed values
// (several DLs) are rejected.
ScoreTestResult score_test_binary(const Dataset& dataset);

}  // namespace cpm
