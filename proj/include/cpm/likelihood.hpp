#pragma once

#include <Eigen/Dense>

#include "cpm/anchors.hpp"
#include "cpm/dataset.hpp"
#include "cpm/link.hpp"

namespace cpm {

// theta = (alphas, betas). Alphas live on the link scale and must be strictly
// increasing.
struct ParameterVector {
  Eigen::VectorXd alphas;
  Eigen::VectorXd betas;

  Eigen::Index size() const { return alphas.size() + betas.size(); }
  Eigen::VectorXd stacked() const;
  static ParameterVector from_stacked(const Eigen::VectorXd& theta, Eigen::Index n_alpha);
};

// Symmetric matrix over (alphas, betas) whose alpha-alpha block is
// tridiagonal: alpha_offdiag[k] holds entry (k, k+1).
struct BandedHessian {
  Eigen::VectorXd alpha_diag;
  Eigen::VectorXd alpha_offdiag;
  Eigen::MatrixXd alpha_beta;  // n_alpha x p
  Eigen::MatrixXd beta_block;  // p x p

  Eigen::Index n_alpha() const { return alpha_diag.size(); }
  Eigen::Index n_beta() const { return beta_block.rows(); }
  Eigen::MatrixXd dense() const;
};

// Cell probabilities below this are floored inside the log.
inline constexpr double kProbabilityFloor = 1e-300;

double log_likelihood(const ParameterVector& theta, const Dataset& dataset,
                      const AnchorSet& anchors, const LinkFunction& link);

// Analytic gradient in (alphas, betas) order.
Eigen::VectorXd gradient(const ParameterVector& theta, const Dataset& dataset,
                         const AnchorSet& anchors, const LinkFunction& link);

BandedHessian hessian(const ParameterVector& theta, const Dataset& dataset,
                      const AnchorSet& anchors, const LinkFunction& link);

struct LikelihoodEvaluation {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  BandedHessian hessian;
};

enum class Derivatives { None, Gradient, Hessian };

// Single pass computing the log-likelihood and, on request, its derivatives.
LikelihoodEvaluation evaluate(const ParameterVector& theta, const Dataset& dataset,
                              const AnchorSet& anchors, const LinkFunction& link,
                              Derivatives order);

// Linear predictor eta_i = beta' x_i for every observation.
Eigen::VectorXd linear_predictor(const Eigen::VectorXd& betas, const Dataset& dataset);

}  // namespace cpm
