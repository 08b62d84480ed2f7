#include "cpm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cpm/banded.hpp"
#include "cpm/error.hpp"

namespace cpm {
namespace {

constexpr double kSeparationThreshold = 1e-6;

bool strictly_increasing(const Eigen::VectorXd& v) {
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return true;
}

std::string describe(int iteration, double loglik, double grad_norm) {
  std::ostringstream os;
  os << "iteration " << iteration << ", loglik " << loglik << ", |gradient|_inf " << grad_norm;
  return os.str();
}

}  // namespace

void FitOptions::validate() const {
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be >= 1");
  if (!(gradient_tol > 0.0) || !(loglik_rel_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
  }
  if (max_step_halvings < 0) throw Error(ErrorKind::InvalidArgument, "max_step_halvings must be >= 0");
}

double ModelFit::standard_error(Eigen::Index k) const {
  return std::sqrt(std::max(0.0, vcov(k, k)));
}

ParameterVector initial_parameters(const Dataset& dataset, const AnchorSet& anchors,
                                   const LinkFunction& link) {
  const int k = anchors.n_alpha();
  const double n = static_cast<double>(dataset.size());
  std::vector<double> counts(static_cast<std::size_t>(std::max(k, 0)), 0.0);
  for (const auto& term : anchors.assignment) {
    if (term.upper != kNoAlpha) counts[static_cast<std::size_t>(term.upper)] += 1.0;
  }
  ParameterVector theta;
  theta.alphas.resize(k);
  theta.betas = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dataset.n_covariates()));
  const double lo = 1.0 / (2.0 * n);
  double cumulative = 0.0;
  for (int j = 0; j < k; ++j) {
    cumulative += counts[static_cast<std::size_t>(j)];
    theta.alphas[j] = link.quantile(std::clamp(cumulative / n, lo, 1.0 - lo));
  }
  // Counts cannot tie for data built by build_anchor_set; keep the start feasible regardless.
  for (int j = 1; j < k; ++j) {
    if (!(theta.alphas[j] > theta.alphas[j - 1])) {
      theta.alphas[j] = theta.alphas[j - 1] + 1e-3;
    }
  }
  return theta;
}

ModelFit fit(const Dataset& dataset, const AnchorSet& anchors, const LinkFunction& link,
             const FitOptions& options) {
  options.validate();
  if (anchors.assignment.size() != dataset.size()) {
    throw Error(ErrorKind::MismatchedData, "anchor set was built from a different dataset");
  }
  if (anchors.n_alpha() < 1) {
    throw Error(ErrorKind::SingularInformation, "outcome has a single category; nothing to estimate");
  }

  ParameterVector theta = initial_parameters(dataset, anchors, link);
  LikelihoodEvaluation eval = evaluate(theta, dataset, anchors, link, Derivatives::Hessian);

  ModelFit out;
  out.loglik_history.push_back(eval.loglik);
  bool converged = false;
  int iteration = 0;
  double grad_norm = eval.gradient.size() ? eval.gradient.lpNorm<Eigen::Infinity>() : 0.0;

  while (true) {
    if (grad_norm <= options.gradient_tol) {
      converged = true;
      break;
    }
    if (iteration >= options.max_iterations) break;

    auto factor = SchurFactorization::factor(eval.hessian);
    if (!factor) {
      throw Error(ErrorKind::SingularInformation,
                  "information matrix is not positive definite (" +
                      describe(iteration, eval.loglik, grad_norm) + ")");
    }
    const Eigen::VectorXd delta = factor->solve(eval.gradient);
    const Eigen::VectorXd current = theta.stacked();
    const double slack = 1e-11 * std::max(1.0, std::abs(eval.loglik));

    double step = 1.0;
    bool accepted = false;
    ParameterVector candidate;
    double candidate_ll = 0.0;
    for (int h = 0; h <= options.max_step_halvings; ++h, step *= 0.5) {
      candidate = ParameterVector::from_stacked(current + step * delta, theta.alphas.size());
      if (!strictly_increasing(candidate.alphas)) continue;
      try {
        candidate_ll = log_likelihood(candidate, dataset, anchors, link);
      } catch (const Error&) {
        continue;
      }
      if (candidate_ll >= eval.loglik - slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorKind::NonIncreasingAlphasUnrecoverable,
                  "step halving exhausted (" + describe(iteration, eval.loglik, grad_norm) + ")");
    }

    const double previous = eval.loglik;
    theta = std::move(candidate);
    eval = evaluate(theta, dataset, anchors, link, Derivatives::Hessian);
    ++iteration;
    out.loglik_history.push_back(eval.loglik);
    grad_norm = eval.gradient.lpNorm<Eigen::Infinity>();

    const double rel_change = std::abs(eval.loglik - previous) / std::max(1.0, std::abs(previous));
    if (step == 1.0 && rel_change <= options.loglik_rel_tol) {
      converged = true;
      break;
    }
  }

  if (!converged) {
    throw Error(ErrorKind::NotConverged,
                "Newton iterations did not converge (" + describe(iteration, eval.loglik, grad_norm) + ")");
  }

  auto factor = SchurFactorization::factor(eval.hessian);
  if (!factor) {
    throw Error(ErrorKind::SingularInformation, "information matrix is singular at the optimum");
  }
  // The likelihood keeps rising along a direction mixing beta and the alphas:
  // the optimum is at infinity (complete or quasi-complete separation).
  if (factor->retained_information() < kSeparationThreshold) {
    throw Error(ErrorKind::SingularInformation,
                "covariate information vanishes at the optimum, likely separation (" +
                    describe(iteration, eval.loglik, grad_norm) + ")");
  }

  out.anchors = anchors;
  out.link = link;
  out.covariate_names = dataset.covariate_names();
  out.n_obs = dataset.size();
  out.theta_hat = std::move(theta);
  out.loglik = eval.loglik;
  out.vcov = factor->inverse();
  out.n_iterations = iteration;
  out.converged = true;
  out.gradient_sup_norm = grad_norm;
  return out;
}

ModelFit fit(const Dataset& dataset, const LinkFunction& link, const FitOptions& options) {
  return fit(dataset, build_anchor_set(dataset), link, options);
}

}  // namespace cpm
