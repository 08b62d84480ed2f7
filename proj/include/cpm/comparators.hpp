#pragma once

#include <utility>

#include <Eigen/Dense>

#include "cpm/dataset.hpp"

namespace cpm {

// Constant substituted for every value below the (single) lower DL l.
enum class ImputationRule { DL, HalfDL, DLOverSqrt2 };

double imputed_value(ImputationRule rule, double dl);

// Normal linear model on log(Y). vcov is ordered (intercept, betas, log sigma).
struct ParametricFit {
  double intercept = 0.0;
  Eigen::VectorXd beta;
  double sigma = 1.0;
  Eigen::MatrixXd vcov;
  double loglik = 0.0;
  int n_iterations = 0;

  double linear_predictor(const Eigen::VectorXd& x) const;
  // Conditional median exp(intercept + beta'x) and its Wald interval.
  double median(const Eigen::VectorXd& x) const;
  std::pair<double, double> median_interval(const Eigen::VectorXd& x, double level = 0.95) const;
  double beta_se(Eigen::Index k) const;
};

ParametricFit substitute_and_fit(const Dataset& dataset, ImputationRule rule);

// Censored normal log-likelihood of log(z); log sigma is the scale parameter.
double censored_lognormal_loglik(const Dataset& dataset, double intercept, const Eigen::VectorXd& beta,
                                 double log_sigma);

struct MleOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-9;
};

// Damped Newton (Levenberg-Marquardt) started from OLS on the log outcome with
// censored records held at their limits. Per-observation DLs are allowed.
ParametricFit censored_lognormal_mle(const Dataset& dataset, const MleOptions& options = {});

}  // namespace cpm
