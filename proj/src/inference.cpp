#include "cpm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cpm/anchors.hpp"
#include "cpm/error.hpp"

namespace cpm {
namespace {

double normal_quantile_upper(double level) {
  // z with P(|Z| <= z) = level
  return std::sqrt(2.0) * boost::math::erf_inv(level);
}

void require_converged(const ModelFit& fit) {
  if (!fit.converged) throw Error(ErrorKind::NotConverged, "fit did not converge");
}

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "level must lie in (0, 1)");
}

}  // namespace

WilcoxonStats wilcoxon_stats(const std::vector<double>& y, const std::vector<double>& x) {
  if (y.size() != x.size()) throw Error(ErrorKind::InconsistentDimensions, "y and x differ in length");
  if (y.empty()) throw Error(ErrorKind::EmptyData, "no observations");
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return y[a] < y[b]; });

  WilcoxonStats w;
  w.midranks.assign(n, 0.0);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && y[order[end]] == y[order[start]]) ++end;
    const double mid = 0.5 * static_cast<double>(start + 1 + end);  // mean of ranks start+1..end
    for (std::size_t k = start; k < end; ++k) w.midranks[order[k]] = mid;
    start = end;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 1.0) {
      ++w.n1;
      w.R1 += w.midranks[i];
    } else if (x[i] == 0.0) {
      ++w.n0;
    } else {
      throw Error(ErrorKind::NonBinaryCovariate, "covariate must be coded 0/1");
    }
  }
  w.numerator = w.R1 - w.n1 * (static_cast<double>(n) + 1.0) / 2.0;
  return w;
}

double chi_square_upper(double statistic, int df) {
  if (df < 1) throw Error(ErrorKind::InvalidArgument, "chi-square df must be >= 1");
  if (!(statistic > 0.0)) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

std::pair<double, double> wald_interval(const ModelFit& fit, Eigen::Index index, double level) {
  require_converged(fit);
  require_level(level);
  if (index < 0 || index >= fit.theta_hat.size()) {
    throw Error(ErrorKind::InvalidArgument, "coefficient index out of range");
  }
  const double est = fit.theta_hat.stacked()[index];
  const double half = normal_quantile_upper(level) * fit.standard_error(index);
  return {est - half, est + half};
}

std::pair<double, double> wald_interval_beta(const ModelFit& fit, Eigen::Index k, double level) {
  if (k < 0 || k >= fit.n_beta()) throw Error(ErrorKind::InvalidArgument, "beta index out of range");
  return wald_interval(fit, fit.n_alpha() + k, level);
}

TestResult likelihood_ratio_test(const ModelFit& full, const ModelFit& reduced) {
  require_converged(full);
  require_converged(reduced);
  if (full.n_obs != reduced.n_obs || !(full.link == reduced.link) ||
      !full.anchors.same_structure(reduced.anchors)) {
    throw Error(ErrorKind::MismatchedData, "models were fitted to different data, anchors or links");
  }
  for (const auto& name : reduced.covariate_names) {
    if (std::find(full.covariate_names.begin(), full.covariate_names.end(), name) ==
        full.covariate_names.end()) {
      throw Error(ErrorKind::NotNested, "covariate '" + name + "' is not in the full model");
    }
  }
  TestResult r;
  r.df = static_cast<int>(full.covariate_names.size() - reduced.covariate_names.size());
  const double stat = 2.0 * (full.loglik - reduced.loglik);
  const double slack = 1e-8 * std::max(1.0, std::abs(full.loglik));
  if (stat < -slack) {
    throw Error(ErrorKind::NotNested, "reduced model fits better than the full model");
  }
  r.statistic = std::max(0.0, stat);
  // Identical models: no restriction tested.
  r.p_value = r.df == 0 ? 1.0 : chi_square_upper(r.statistic, r.df);
  return r;
}

ScoreTestResult score_test_binary(const Dataset& dataset) {
  if (dataset.n_covariates() != 1) {
    throw Error(ErrorKind::InvalidArgument, "score test needs exactly one covariate");
  }
  const AnchorSet anchors = build_anchor_set(dataset);
  const int top = anchors.J() + 1;
  for (const auto& t : anchors.assignment) {
    if ((t.kind == TermKind::LowerTail && t.category != 0) ||
        (t.kind == TermKind::UpperTail && t.category != top)) {
      throw Error(ErrorKind::UnsupportedCensoring,
                  "censored value falls in a category shared with observed values");
    }
  }

  const std::size_t n = dataset.size();
  std::vector<double> counts(static_cast<std::size_t>(top + 1), 0.0);
  std::vector<double> category(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    category[i] = anchors.assignment[i].category;
    counts[static_cast<std::size_t>(anchors.assignment[i].category)] += 1.0;
    x[i] = dataset.row(i)[0];
  }
  // P_hat_j = empirical CDF at category j; P_hat_{-1} = 0.
  std::vector<double> cdf(counts.size());
  std::partial_sum(counts.begin(), counts.end(), cdf.begin());
  for (double& c : cdf) c /= static_cast<double>(n);

  ScoreTestResult out;
  out.wilcoxon = wilcoxon_stats(category, x);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] != 1.0) continue;
    const auto j = static_cast<std::size_t>(category[i]);
    out.S += cdf[j] + (j > 0 ? cdf[j - 1] : 0.0) - 1.0;
  }
  return out;
}

}  // namespace cpm
