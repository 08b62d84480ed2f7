#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cpm/solver.hpp"

namespace cpm {

struct CdfEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// F_hat(y | x) = F(alpha_j - beta'x) with a_j = max{a in S : a <= y}, 0 when no
// anchor lies at or below y. The interval is Wald on the link scale.
CdfEstimate conditional_cdf(const ModelFit& fit, const Eigen::VectorXd& x, double y, double level = 0.95);

// P_j = F_hat(a_j | x) for j = first..J where first is 0 with a lower tail
// category and 1 otherwise. P_J is 1 without an upper tail category.
struct ConditionalCDF {
  Eigen::VectorXd x;
  std::vector<int> anchor_index;
  std::vector<double> eval_points;
  std::vector<double> P;
  std::vector<double> se;
  std::vector<double> ci_lo;  // nondecreasing
  std::vector<double> ci_hi;  // nondecreasing
};

ConditionalCDF conditional_cdf_curve(const ModelFit& fit, const Eigen::VectorXd& x, double level = 0.95);

struct QuantileValue {
  enum class Kind { BelowLowest, Numeric, AboveHighest };
  Kind kind = Kind::Numeric;
  double value = 0.0;  // the DL for boundary kinds
  std::string label;

  static QuantileValue numeric(double v) { return {Kind::Numeric, v, {}}; }
  bool is_numeric() const { return kind == Kind::Numeric; }
};

// Category order BelowLowest < Numeric < AboveHighest, numeric values by value.
bool operator<(const QuantileValue& a, const QuantileValue& b);
bool operator==(const QuantileValue& a, const QuantileValue& b);
inline bool operator<=(const QuantileValue& a, const QuantileValue& b) { return !(b < a); }

// Pieces of the weighted interpolation at one p. j is the index with
// P_{j-1} < p <= P_j; q0 = a_j is the plug-in quantile.
struct QuantileBreakdown {
  QuantileValue value;
  int j = 0;
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double w = 0.0;
  bool degenerate = false;  // P_J == P_0
};

// Weighted interpolation Q = (1 - w) Q1 + w Q2 over a CDF given on the anchor
// grid (P[k] belongs to anchor j = first + k, as in ConditionalCDF).
QuantileBreakdown interpolate_quantile(const AnchorSet& anchors, const std::vector<double>& P, double p);

QuantileValue conditional_quantile(const ModelFit& fit, const Eigen::VectorXd& x, double p);

// The construction applied to the upper CDF band gives the lower endpoint and
// to the lower band the upper endpoint.
std::pair<QuantileValue, QuantileValue> conditional_quantile_interval(const ModelFit& fit,
                                                                      const Eigen::VectorXd& x, double p,
                                                                      double level = 0.95);

// P(Y1 < Y2 | x1, x2) = 1 / (1 + exp(-(x2 - x1)' beta)), logit link only.
double probabilistic_index(const ModelFit& fit, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2);

}  // namespace cpm
