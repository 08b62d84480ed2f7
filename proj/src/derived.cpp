#include "cpm/derived.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/erf.hpp>

#include "cpm/error.hpp"

namespace cpm {
namespace {

void check_inputs(const ModelFit& fit, const Eigen::VectorXd& x) {
  if (!fit.converged) throw Error(ErrorKind::NotConverged, "fit did not converge");
  if (x.size() != fit.n_beta()) {
    throw Error(ErrorKind::InconsistentDimensions,
                "covariate profile has " + std::to_string(x.size()) + " entries, model has " +
                    std::to_string(fit.n_beta()));
  }
}

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidProbability, "p must lie in (0, 1)");
}

double z_for(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "level must lie in (0, 1)");
  return std::sqrt(2.0) * boost::math::erf_inv(level);
}

// Link-scale value alpha_k - beta'x and its delta-method standard deviation.
std::pair<double, double> linear_predictor_at(const ModelFit& fit, const Eigen::VectorXd& x, int k) {
  const Eigen::Index K = fit.n_alpha();
  const double t = fit.theta_hat.alphas[k] - fit.theta_hat.betas.dot(x);
  double var = fit.vcov(k, k);
  if (x.size() > 0) {
    var += x.dot(fit.vcov.block(K, K, x.size(), x.size()) * x) - 2.0 * x.dot(fit.vcov.block(K, k, x.size(), 1).col(0));
  }
  return {t, std::sqrt(std::max(0.0, var))};
}

CdfEstimate cdf_at_alpha(const ModelFit& fit, const Eigen::VectorXd& x, int k, double z) {
  const auto [t, sd] = linear_predictor_at(fit, x, k);
  CdfEstimate e;
  e.estimate = fit.link.cdf(t);
  e.se = fit.link.pdf(t) * sd;
  e.ci_lo = fit.link.cdf(t - z * sd);
  e.ci_hi = fit.link.cdf(t + z * sd);
  return e;
}

CdfEstimate constant_cdf(double v) { return {v, 0.0, v, v}; }

}  // namespace

CdfEstimate conditional_cdf(const ModelFit& fit, const Eigen::VectorXd& x, double y, double level) {
  check_inputs(fit, x);
  const double z = z_for(level);
  const AnchorSet& a = fit.anchors;
  // largest anchor index j with a_j <= y, in a_0..a_{J+1} numbering
  int j;
  // a_{J+1} stands for values above u, so it lies at or below y only once y > u.
  if (a.has_upper_cat && y > *a.upper_limit) {
    j = a.J() + 1;
  } else {
    j = static_cast<int>(std::upper_bound(a.values.begin(), a.values.end(), y) - a.values.begin());
    if (j == 0 && !(a.has_lower_cat && y >= *a.lower_limit)) return constant_cdf(0.0);
  }
  const int k = a.alpha_position(j);
  if (k == kNoAlpha) return constant_cdf(1.0);  // alpha_j = +inf
  return cdf_at_alpha(fit, x, k, z);
}

ConditionalCDF conditional_cdf_curve(const ModelFit& fit, const Eigen::VectorXd& x, double level) {
  check_inputs(fit, x);
  const double z = z_for(level);
  const AnchorSet& a = fit.anchors;
  ConditionalCDF c;
  c.x = x;
  for (int j = a.has_lower_cat ? 0 : 1; j <= a.J(); ++j) {
    const int k = a.alpha_position(j);
    const CdfEstimate e = k == kNoAlpha ? constant_cdf(1.0) : cdf_at_alpha(fit, x, k, z);
    c.anchor_index.push_back(j);
    c.eval_points.push_back(a.anchor_value(j));
    c.P.push_back(e.estimate);
    c.se.push_back(e.se);
    c.ci_lo.push_back(e.ci_lo);
    c.ci_hi.push_back(e.ci_hi);
  }
  // Pointwise link-scale bands need not be monotone across anchors; a
  // running max from the left and running min from the right fix that and
  // keep P inside the band because P itself is nondecreasing.
  for (std::size_t k = 1; k < c.ci_lo.size(); ++k) c.ci_lo[k] = std::max(c.ci_lo[k], c.ci_lo[k - 1]);
  for (std::size_t k = c.ci_hi.size(); k-- > 1;) c.ci_hi[k - 1] = std::min(c.ci_hi[k - 1], c.ci_hi[k]);
  return c;
}

bool operator<(const QuantileValue& a, const QuantileValue& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  return a.kind == QuantileValue::Kind::Numeric && a.value < b.value;
}

bool operator==(const QuantileValue& a, const QuantileValue& b) {
  return a.kind == b.kind && (a.kind != QuantileValue::Kind::Numeric || a.value == b.value);
}

QuantileBreakdown interpolate_quantile(const AnchorSet& anchors, const std::vector<double>& P, double p) {
  check_probability(p);
  const int J = anchors.J();
  const int first = anchors.has_lower_cat ? 0 : 1;
  if (P.size() != static_cast<std::size_t>(J - first + 1)) {
    throw Error(ErrorKind::InconsistentDimensions, "CDF vector does not match the anchor set");
  }
  // P_j with P_0 = 0 when there is no lower tail category.
  auto cdf = [&](int j) { return j < first ? 0.0 : P[static_cast<std::size_t>(j - first)]; };
  // interpolation nodes: a_0 -> l, a_{J+1} -> u; missing tail categories collapse onto a_1 / a_J
  auto node = [&](int j) { return anchors.anchor_value(j); };

  QuantileBreakdown b;
  const double p0 = cdf(0);
  const double pJ = cdf(J);
  if (anchors.has_lower_cat && p <= p0) {
    b.j = 0;
    b.value = {QuantileValue::Kind::BelowLowest, *anchors.lower_limit, anchors.lower_label};
    b.q0 = b.q1 = b.q2 = node(0);
    return b;
  }
  if (anchors.has_upper_cat && p >= pJ) {
    b.j = J + 1;
    b.w = 1.0;
    b.value = {QuantileValue::Kind::AboveHighest, *anchors.upper_limit, anchors.upper_label};
    b.q0 = b.q1 = b.q2 = node(J + 1);
    return b;
  }
  int j = 1;
  while (j < J && !(p <= cdf(j))) ++j;
  const double lo = cdf(j - 1);
  const double hi = cdf(j);
  const double frac = hi > lo ? (p - lo) / (hi - lo) : 1.0;
  b.j = j;
  b.q0 = node(j);
  // lerp is exact at both ends, so adjacent segments meet without a rounding step
  b.q1 = std::lerp(node(j - 1), node(j), frac);
  b.q2 = std::lerp(node(j), node(j + 1), frac);
  if (pJ > p0) {
    b.w = (p - p0) / (pJ - p0);
  } else {
    b.w = 0.5;
    b.degenerate = true;
  }
  b.value = QuantileValue::numeric(std::lerp(b.q1, b.q2, b.w));
  return b;
}

QuantileValue conditional_quantile(const ModelFit& fit, const Eigen::VectorXd& x, double p) {
  check_probability(p);
  const ConditionalCDF c = conditional_cdf_curve(fit, x);
  return interpolate_quantile(fit.anchors, c.P, p).value;
}

std::pair<QuantileValue, QuantileValue> conditional_quantile_interval(const ModelFit& fit,
                                                                      const Eigen::VectorXd& x, double p,
                                                                      double level) {
  check_probability(p);
  const ConditionalCDF c = conditional_cdf_curve(fit, x, level);
  return {interpolate_quantile(fit.anchors, c.ci_hi, p).value,
          interpolate_quantile(fit.anchors, c.ci_lo, p).value};
}

double probabilistic_index(const ModelFit& fit, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) {
  if (fit.link.name() != LinkName::Logit) {
    throw Error(ErrorKind::UnsupportedLink, "probabilistic index has a closed form only for the logit link");
  }
  check_inputs(fit, x1);
  check_inputs(fit, x2);
  const double d = (x2 - x1).dot(fit.theta_hat.betas);
  return 1.0 / (1.0 + std::exp(-d));
}

}  // namespace cpm
