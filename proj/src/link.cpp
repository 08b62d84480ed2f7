#include "cpm/link.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "cpm/error.hpp"

namespace cpm {
namespace {

constexpr double kTail = 30.0;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// log Phi(x) for x far in the lower tail (Mills-ratio series).
double normal_log_cdf_lower(double x) {
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double logistic_log_cdf(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace

std::string_view LinkFunction::label() const {
  switch (name_) {
    case LinkName::Logit: return "logit";
    case LinkName::Probit: return "probit";
    case LinkName::LogLog: return "loglog";
    case LinkName::CLogLog: return "cloglog";
  }
  return "unknown";
}

double LinkFunction::cdf(double x) const {
  switch (name_) {
    case LinkName::Logit:
      if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
      return std::exp(x) / (1.0 + std::exp(x));
    case LinkName::Probit: return normal_cdf(x);
    case LinkName::LogLog: return std::exp(-std::exp(-x));
    case LinkName::CLogLog: return -std::expm1(-std::exp(x));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double LinkFunction::survival(double x) const {
  switch (name_) {
    case LinkName::Logit: return LinkFunction(LinkName::Logit).cdf(-x);
    case LinkName::Probit: return normal_cdf(-x);
    case LinkName::LogLog: return -std::expm1(-std::exp(-x));
    case LinkName::CLogLog: return std::exp(-std::exp(x));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double LinkFunction::log_pdf(double x) const {
  switch (name_) {
    case LinkName::Logit: {
      const double a = std::abs(x);
      return -a - 2.0 * std::log1p(std::exp(-a));
    }
    case LinkName::Probit: return -0.5 * x * x - kLogSqrt2Pi;
    case LinkName::LogLog: return -x - std::exp(-x);
    case LinkName::CLogLog: return x - std::exp(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double LinkFunction::pdf(double x) const { return std::exp(log_pdf(x)); }

double LinkFunction::dlog_pdf(double x) const {
  switch (name_) {
    case LinkName::Logit: return 1.0 - 2.0 * cdf(x);
    case LinkName::Probit: return -x;
    case LinkName::LogLog: return std::exp(-x) - 1.0;
    case LinkName::CLogLog: return 1.0 - std::exp(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double LinkFunction::pdf_derivative(double x) const { return pdf(x) * dlog_pdf(x); }

double LinkFunction::log_cdf(double x) const {
  switch (name_) {
    case LinkName::Logit: return logistic_log_cdf(x);
    case LinkName::Probit:
      if (x < -kTail) return normal_log_cdf_lower(x);
      if (x > kTail) return -normal_cdf(-x);
      return std::log(normal_cdf(x));
    case LinkName::LogLog: return -std::exp(-x);
    case LinkName::CLogLog: {
      if (x < -kTail) {
        const double t = std::exp(x);
        return x - 0.5 * t;
      }
      return std::log(-std::expm1(-std::exp(x)));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double LinkFunction::log_survival(double x) const {
  switch (name_) {
    case LinkName::Logit: return logistic_log_cdf(-x);
    case LinkName::Probit:
      if (x > kTail) return normal_log_cdf_lower(-x);
      if (x < -kTail) return -normal_cdf(x);
      return std::log(normal_cdf(-x));
    case LinkName::LogLog: {
      if (x > kTail) {
        const double t = std::exp(-x);
        return -x - 0.5 * t;
      }
      return std::log(-std::expm1(-std::exp(-x)));
    }
    case LinkName::CLogLog: return -std::exp(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double LinkFunction::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::InvalidProbability, "link quantile requires p in [0, 1]");
  }
  switch (name_) {
    case LinkName::Logit: return std::log(p) - std::log1p(-p);
    case LinkName::Probit: return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    case LinkName::LogLog: return -std::log(-std::log(p));
    case LinkName::CLogLog: return std::log(-std::log1p(-p));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

LinkFunction parse_link(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "logit") return LinkFunction(LinkName::Logit);
  if (lower == "probit") return LinkFunction(LinkName::Probit);
  if (lower == "loglog") return LinkFunction(LinkName::LogLog);
  if (lower == "cloglog") return LinkFunction(LinkName::CLogLog);
  throw Error(ErrorKind::UnsupportedLink, "unknown link '" + std::string(name) + "'");
}

}  // namespace cpm
