#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpm/anchors.hpp"
#include "cpm/dataset.hpp"
#include "cpm/likelihood.hpp"
#include "cpm/link.hpp"

namespace cpm {

struct FitOptions {
  int max_iterations = 100;
  double gradient_tol = 1e-8;     // sup-norm
  double loglik_rel_tol = 1e-10;  // relative change on an accepted full step
  int max_step_halvings = 20;

  void validate() const;
};

struct ModelFit {
  AnchorSet anchors;
  LinkFunction link;
  std::vector<std::string> covariate_names;
  std::size_t n_obs = 0;
  ParameterVector theta_hat;
  double loglik = 0.0;
  Eigen::MatrixXd vcov;  // over (alphas, betas)
  int n_iterations = 0;
  bool converged = false;
  double gradient_sup_norm = 0.0;
  std::vector<double> loglik_history;  // one entry per accepted iterate, start included

  Eigen::Index n_alpha() const { return theta_hat.alphas.size(); }
  Eigen::Index n_beta() const { return theta_hat.betas.size(); }
  // Standard error of stacked parameter k.
  double standard_error(Eigen::Index k) const;
};

// Starting values: alpha_j = G(empirical CDF at category j, clamped to
// [1/(2n), 1 - 1/(2n)]) and beta = 0.
ParameterVector initial_parameters(const Dataset& dataset, const AnchorSet& anchors,
                                   const LinkFunction& link);

// Newton-Raphson on the nonparametric log-likelihood. Each step solves the
// banded system by eliminating the tridiagonal alpha block (Schur complement)
// and is halved until the log-likelihood does not decrease and the alphas stay
// ordered. vcov is the inverse negative Hessian at the optimum.
ModelFit fit(const Dataset& dataset, const AnchorSet& anchors, const LinkFunction& link,
             const FitOptions& options = {});

// Convenience: build the anchor set and fit.
ModelFit fit(const Dataset& dataset, const LinkFunction& link, const FitOptions& options = {});

}  // namespace cpm
