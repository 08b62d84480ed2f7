#include "cpm/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "cpm/comparators.hpp"
#include "cpm/derived.hpp"
#include "cpm/error.hpp"
#include "cpm/inference.hpp"
#include "cpm/rng.hpp"
#include "cpm/solver.hpp"

namespace cpm {
namespace {

constexpr double kLevel = 0.95;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<double, double> latent_pair(std::uint64_t seed, std::uint64_t replicate, std::size_t i) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(std::uint64_t(i) >> 32),
                                static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return normal_pair(Philox4x32::block(ctr, key));
}

CensoredObservation censor(double y, double lower, double upper, double x) {
  if (y < lower) return {lower, CensorCode::BelowDL, {x}};
  if (y > upper) return {upper, CensorCode::AboveDL, {x}};
  return {y, CensorCode::Observed, {x}};
}

double normal_cdf(double v) { return 0.5 * std::erfc(-v / std::sqrt(2.0)); }
double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

struct Scenario6Truths {
  std::vector<double> sorted_x0, sorted_x1;
};

// Sorted Monte Carlo draws of Y | x for x = 0 and 1 (shared error draws).
const Scenario6Truths& scenario6_draws() {
  static const Scenario6Truths t = [] {
    constexpr std::size_t n = 4000000;
    PhiloxEngine g(0x6a09e667f3bcc908ULL, 6);
    Scenario6Truths r;
    r.sorted_x0.resize(n);
    r.sorted_x1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double e = g.normal();
      r.sorted_x0[i] = scenario6_transform(e);
      r.sorted_x1[i] = scenario6_transform(1.0 + e);
    }
    std::sort(r.sorted_x0.begin(), r.sorted_x0.end());
    std::sort(r.sorted_x1.begin(), r.sorted_x1.end());
    return r;
  }();
  return t;
}

const std::vector<double>& scenario6_sample(double x) {
  if (x == 0.0) return scenario6_draws().sorted_x0;
  if (x == 1.0) return scenario6_draws().sorted_x1;
  throw Error(ErrorKind::InvalidArgument, "scenario-6 truths are tabulated at x = 0 and 1 only");
}

Score score_beta(double est, std::pair<double, double> ci, double truth) {
  return {est, ci.first <= truth && truth <= ci.second, false};
}

bool lower_end_covers(const QuantileValue& lo, double t) {
  switch (lo.kind) {
    case QuantileValue::Kind::BelowLowest: return true;
    case QuantileValue::Kind::Numeric: return lo.value <= t;
    case QuantileValue::Kind::AboveHighest: return t > lo.value;
  }
  return false;
}

bool upper_end_covers(const QuantileValue& hi, double t) {
  switch (hi.kind) {
    case QuantileValue::Kind::BelowLowest: return t < hi.value;
    case QuantileValue::Kind::Numeric: return t <= hi.value;
    case QuantileValue::Kind::AboveHighest: return true;
  }
  return false;
}

Score score_quantile(const QuantileValue& est, const std::pair<QuantileValue, QuantileValue>& ci, double truth) {
  Score s;
  s.covered = lower_end_covers(ci.first, truth) && upper_end_covers(ci.second, truth);
  switch (est.kind) {
    case QuantileValue::Kind::Numeric: s.estimate = est.value; break;
    case QuantileValue::Kind::BelowLowest:
      if (truth < est.value) s.estimate = truth;
      else s.estimate = est.value, s.flagged = true;
      break;
    case QuantileValue::Kind::AboveHighest:
      if (truth > est.value) s.estimate = truth;
      else s.estimate = est.value, s.flagged = true;
      break;
  }
  return s;
}

Eigen::VectorXd profile(double x) { return Eigen::VectorXd::Constant(1, x); }

std::vector<std::optional<Score>> score_cpm(const Dataset& data, const ScenarioSpec& spec,
                                            const std::vector<Target>& targets) {
  const ModelFit m = fit(data, LinkFunction(spec.link));
  std::vector<std::optional<Score>> out;
  for (const Target& t : targets) {
    switch (t.kind) {
      case TargetKind::Beta:
        out.push_back(score_beta(m.theta_hat.betas[0], wald_interval_beta(m, 0, kLevel), t.truth));
        break;
      case TargetKind::Quantile: {
        const auto x = profile(t.x);
        out.push_back(score_quantile(conditional_quantile(m, x, t.at),
                                     conditional_quantile_interval(m, x, t.at, kLevel), t.truth));
        break;
      }
      case TargetKind::Cdf: {
        const CdfEstimate c = conditional_cdf(m, profile(t.x), t.at, kLevel);
        Score s{c.estimate, c.ci_lo <= t.truth && t.truth <= c.ci_hi, false};
        // outside [l, u] the value is fixed by convention, not estimated
        const auto& a = m.anchors;
        s.flagged = (a.has_lower_cat && t.at < *a.lower_limit) || (a.has_upper_cat && t.at > *a.upper_limit);
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

std::vector<std::optional<Score>> score_parametric(const ParametricFit& f, const std::vector<Target>& targets) {
  std::vector<std::optional<Score>> out;
  const double z = normal_quantile(0.5 + kLevel / 2);
  for (const Target& t : targets) {
    if (t.kind == TargetKind::Beta) {
      const double se = f.beta_se(0);
      out.push_back(score_beta(f.beta[0], {f.beta[0] - z * se, f.beta[0] + z * se}, t.truth));
    } else if (t.kind == TargetKind::Quantile && t.at == 0.5) {
      const auto x = profile(t.x);
      const auto [lo, hi] = f.median_interval(x, kLevel);
      out.push_back(Score{f.median(x), lo <= t.truth && t.truth <= hi, false});
    } else {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(StudyFamily family) {
  switch (family) {
    case StudyFamily::SingleDL: return "single";
    case StudyFamily::MultiDL: return "multi";
    case StudyFamily::Misspec: return "misspec";
  }
  return "?";
}

StudyFamily parse_family(std::string_view text) {
  if (text == "single") return StudyFamily::SingleDL;
  if (text == "multi") return StudyFamily::MultiDL;
  if (text == "misspec") return StudyFamily::Misspec;
  throw Error(ErrorKind::UnknownScenario, "unknown study family '" + std::string(text) + "'");
}

void ScenarioSpec::validate() const {
  const int max_id = family == StudyFamily::SingleDL ? 6 : family == StudyFamily::MultiDL ? 5 : 1;
  if (scenario < 1 || scenario > max_id)
    throw Error(ErrorKind::UnknownScenario, std::string(to_string(family)) + " scenario " + std::to_string(scenario) +
                                                " is outside 1.." + std::to_string(max_id));
  if (n < 10) throw Error(ErrorKind::InvalidArgument, "n must be at least 10");
  if (replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicate count must be positive");
}

double scenario6_transform(double latent) {
  if (latent < std::log(0.25)) return std::exp(2.0 * latent);
  if (latent < std::log(2.0)) return std::sqrt(std::exp(latent));
  return std::exp(latent);
}

Dataset generate_single_dl(int scenario, int n, std::uint64_t seed, std::uint64_t replicate) {
  ScenarioSpec{StudyFamily::SingleDL, scenario, n}.validate();
  double lower = -kInf, upper = kInf;
  switch (scenario) {
    case 2: lower = 0.25; break;
    case 3: upper = 4.0; break;
    case 4: lower = 0.25, upper = 4.0; break;
    case 5: lower = 4.0; break;
    case 6: lower = 0.0625; break;
    default: break;
  }
  std::vector<CensoredObservation> rows;
  rows.reserve(std::size_t(n));
  for (std::size_t i = 0; i < std::size_t(n); ++i) {
    const auto [x, e] = latent_pair(seed, replicate, i);
    const double latent = x + e;
    const double y = scenario == 6 ? scenario6_transform(latent) : std::exp(latent);
    rows.push_back(censor(y, lower, upper, x));
  }
  return validate_dataset(rows, {"x"});
}

MultiSiteData generate_multi_dl(int scenario, int n_per_site, std::uint64_t seed, std::uint64_t replicate) {
  ScenarioSpec{StudyFamily::MultiDL, scenario, n_per_site}.validate();
  const double dls[] = {0.16, 0.30, 0.50};
  const double shifted_mean[] = {-0.5, 0.0, 0.5};
  MultiSiteData out;
  std::vector<CensoredObservation> rows;
  for (int s = 0; s < 3; ++s) {
    double lower = -kInf, upper = kInf, mu = 0.0;
    switch (scenario) {
      case 1: lower = dls[s]; break;
      case 2: upper = dls[s]; break;
      case 3: lower = dls[s], mu = shifted_mean[s]; break;
      case 4: upper = dls[s], mu = shifted_mean[s]; break;
      case 5: {
        const double lo5[] = {0.2, 0.3, -kInf};
        const double hi5[] = {kInf, 3.5, 4.0};
        lower = lo5[s], upper = hi5[s];
        break;
      }
      default: break;
    }
    for (int k = 0; k < n_per_site; ++k) {
      const std::size_t i = std::size_t(s) * std::size_t(n_per_site) + std::size_t(k);
      const auto [z, e] = latent_pair(seed, replicate, i);
      const double x = mu + z;
      rows.push_back(censor(std::exp(x + e), lower, upper, x));
      out.site.push_back(s);
    }
  }
  out.data = validate_dataset(rows, {"x"});
  return out;
}

Dataset generate_misspec(int n, std::uint64_t seed, std::uint64_t replicate) {
  ScenarioSpec{StudyFamily::Misspec, 1, n}.validate();
  std::vector<CensoredObservation> rows;
  for (std::size_t i = 0; i < std::size_t(n); ++i) {
    const auto [z, e] = latent_pair(seed, replicate, i);
    const double x = 5.0 + z;
    const double latent = x + e;
    rows.push_back(censor(latent * latent, 13.12, kInf, x));
  }
  return validate_dataset(rows, {"x"});
}

Dataset generate(const ScenarioSpec& spec, std::uint64_t replicate) {
  switch (spec.family) {
    case StudyFamily::SingleDL: return generate_single_dl(spec.scenario, spec.n, spec.seed, replicate);
    case StudyFamily::MultiDL: return generate_multi_dl(spec.scenario, spec.n, spec.seed, replicate).data;
    case StudyFamily::Misspec: return generate_misspec(spec.n, spec.seed, replicate);
  }
  throw Error(ErrorKind::UnknownScenario, "unknown family");
}

double scenario6_quantile_truth(double x, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidProbability, "p must lie in (0, 1)");
  const auto& s = scenario6_sample(x);
  const double pos = p * double(s.size()) - 0.5;
  const auto k = std::size_t(std::clamp(pos, 0.0, double(s.size() - 2)));
  const double w = std::clamp(pos - double(k), 0.0, 1.0);
  return (1 - w) * s[k] + w * s[k + 1];
}

double scenario6_cdf_truth(double x, double y) {
  const auto& s = scenario6_sample(x);
  return double(std::upper_bound(s.begin(), s.end(), y) - s.begin()) / double(s.size());
}

std::vector<Target> study_targets(const ScenarioSpec& spec) {
  spec.validate();
  std::vector<Target> t;
  t.push_back({"beta", TargetKind::Beta, 0.0, 0.0, 1.0, std::nullopt});
  if (spec.family == StudyFamily::Misspec) {
    for (double x : {5.0, 6.0}) t.push_back({"Q(0.5|X=" + format_shortest(x) + ")", TargetKind::Quantile, x, 0.5, x * x, std::nullopt});
    return t;
  }
  const bool low_tail = spec.family == StudyFamily::MultiDL && (spec.scenario == 2 || spec.scenario == 4);
  const double p = low_tail ? 0.03 : 0.5;
  const double y = low_tail ? 0.05 : 1.5;
  const bool s6 = spec.family == StudyFamily::SingleDL && spec.scenario == 6;
  const double tabulated_q[] = {1.0, 0.368};
  const double tabulated_f[] = {0.654, 0.500};
  for (double x : {0.0, 1.0}) {
    Target q{"Q(" + format_shortest(p) + "|X=" + format_shortest(x) + ")", TargetKind::Quantile, x, p,
             std::exp(x + normal_quantile(p)), std::nullopt};
    if (s6) {
      q.truth = scenario6_quantile_truth(x, p);
      if (x == 1.0) q.tabulated_truth = tabulated_q[1];
    }
    t.push_back(q);
  }
  for (double x : {0.0, 1.0}) {
    Target f{"F(" + format_shortest(y) + "|X=" + format_shortest(x) + ")", TargetKind::Cdf, x, y,
             normal_cdf(std::log(y) - x), std::nullopt};
    if (s6) {
      f.truth = scenario6_cdf_truth(x, y);
      f.tabulated_truth = tabulated_f[x == 0.0 ? 0 : 1];
    }
    t.push_back(f);
  }
  return t;
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Cpm: return "cpm";
    case Estimator::SubstituteDL: return "impute_dl";
    case Estimator::SubstituteHalfDL: return "impute_half";
    case Estimator::SubstituteDLOverSqrt2: return "impute_sqrt2";
    case Estimator::CensoredMle: return "mle";
  }
  return "?";
}

Estimator parse_estimator(std::string_view text) {
  for (auto e : {Estimator::Cpm, Estimator::SubstituteDL, Estimator::SubstituteHalfDL,
                 Estimator::SubstituteDLOverSqrt2, Estimator::CensoredMle})
    if (text == to_string(e)) return e;
  throw Error(ErrorKind::InvalidArgument, "unknown estimator '" + std::string(text) + "'");
}

std::vector<std::optional<Score>> score_replicate(const Dataset& data, const ScenarioSpec& spec,
                                                  const std::vector<Target>& targets, Estimator estimator) {
  switch (estimator) {
    case Estimator::Cpm: return score_cpm(data, spec, targets);
    case Estimator::SubstituteDL: return score_parametric(substitute_and_fit(data, ImputationRule::DL), targets);
    case Estimator::SubstituteHalfDL:
      return score_parametric(substitute_and_fit(data, ImputationRule::HalfDL), targets);
    case Estimator::SubstituteDLOverSqrt2:
      return score_parametric(substitute_and_fit(data, ImputationRule::DLOverSqrt2), targets);
    case Estimator::CensoredMle: return score_parametric(censored_lognormal_mle(data), targets);
  }
  return {};
}

MetricsRow aggregate(const std::string& estimator, const Target& target, const std::vector<Score>& scores,
                     std::size_t n_excluded) {
  MetricsRow r;
  r.estimator = estimator;
  r.parameter = target.name;
  r.truth = target.truth;
  r.tabulated_truth = target.tabulated_truth;
  r.n_used = scores.size();
  r.n_excluded = n_excluded;
  if (scores.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.mean_estimate = r.percent_bias = r.absolute_bias = r.empirical_se = r.rmse = r.coverage = nan;
    return r;
  }
  const double n = double(scores.size());
  double sum = 0, covered = 0;
  for (const Score& s : scores) {
    sum += s.estimate;
    covered += s.covered;
    r.n_flagged += s.flagged;
  }
  r.mean_estimate = sum / n;
  double ss = 0, sq_err = 0;
  for (const Score& s : scores) {
    ss += (s.estimate - r.mean_estimate) * (s.estimate - r.mean_estimate);
    sq_err += (s.estimate - target.truth) * (s.estimate - target.truth);
  }
  r.absolute_bias = r.mean_estimate - target.truth;
  r.percent_bias = 100.0 * r.absolute_bias / target.truth;
  r.empirical_se = std::sqrt(ss / n);
  r.rmse = std::sqrt(sq_err / n);
  r.coverage = covered / n;
  return r;
}

int default_thread_count() {
  if (const char* env = std::getenv("CPM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return int(std::min<long>(v, 1024));
  }
  return int(std::max(1u, std::thread::hardware_concurrency()));
}

StudyResult run_study(const ScenarioSpec& spec, const std::vector<Estimator>& estimators, int threads) {
  spec.validate();
  if (estimators.empty()) throw Error(ErrorKind::InvalidArgument, "no estimators requested");
  const auto t0 = std::chrono::steady_clock::now();
  StudyResult res;
  res.spec = spec;
  res.estimators = estimators;
  res.targets = study_targets(spec);
  res.threads = threads > 0 ? threads : default_thread_count();
  res.threads = std::min(res.threads, spec.replicates);

  struct Cell {
    std::vector<std::optional<Score>> scores;
    std::string error;
  };
  const std::size_t reps = std::size_t(spec.replicates), ne = estimators.size();
  std::vector<Cell> cells(reps * ne);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < reps;) {
      Dataset data;
      std::string gen_error;
      try {
        data = generate(spec, r);
      } catch (const Error& e) {
        gen_error = e.what();
      }
      for (std::size_t k = 0; k < ne; ++k) {
        Cell& c = cells[r * ne + k];
        if (!gen_error.empty()) {
          c.error = "generation: " + gen_error;
          continue;
        }
        try {
          c.scores = score_replicate(data, spec, res.targets, estimators[k]);
        } catch (const Error& e) {
          c.error = std::string(to_string(e.kind())) + ": " + e.what();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < res.threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t k = 0; k < ne; ++k) {
    const std::string name(to_string(estimators[k]));
    std::size_t excluded = 0;
    for (std::size_t r = 0; r < reps; ++r)
      if (!cells[r * ne + k].error.empty()) {
        ++excluded;
        res.exclusions.push_back({name, r, cells[r * ne + k].error});
      }
    for (std::size_t t = 0; t < res.targets.size(); ++t) {
      std::vector<Score> scores;
      bool provided = false;
      for (std::size_t r = 0; r < reps; ++r) {
        const Cell& c = cells[r * ne + k];
        if (!c.error.empty()) continue;
        if (c.scores[t]) scores.push_back(*c.scores[t]), provided = true;
      }
      if (provided || excluded == reps) res.rows.push_back(aggregate(name, res.targets[t], scores, excluded));
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace cpm
