#pragma once

#include <string>
#include <string_view>

namespace cpm {

enum class LinkName { Logit, Probit, LogLog, CLogLog };

// Error distribution F_eps of the latent linear model; the link is G = F_eps^-1.
//
//   logit    F(x) = 1 / (1 + exp(-x))
//   probit   F(x) = Phi(x)
//   loglog   F(x) = exp(-exp(-x))
//   cloglog  F(x) = 1 - exp(-exp(x))
//
// Tail quantities (log_cdf, log_survival) stay finite far beyond the range in
// which cdf() itself rounds to 0 or 1.
class LinkFunction {
 public:
  explicit LinkFunction(LinkName name = LinkName::Logit) : name_(name) {}

  LinkName name() const { return name_; }
  std::string_view label() const;

  double cdf(double x) const;
  double survival(double x) const;  // 1 - cdf(x) without cancellation
  double pdf(double x) const;
  double pdf_derivative(double x) const;
  double log_cdf(double x) const;
  double log_survival(double x) const;
  double log_pdf(double x) const;
  // f'(x) / f(x)
  double dlog_pdf(double x) const;
  // G(p) = F^-1(p)
  double quantile(double p) const;

  friend bool operator==(const LinkFunction&, const LinkFunction&) = default;

 private:
  LinkName name_;
};

// Accepts "logit", "probit", "loglog", "cloglog" (case-insensitive).
LinkFunction parse_link(std::string_view name);

}  // namespace cpm
