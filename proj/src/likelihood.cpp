#include "cpm/likelihood.hpp"

#include <cmath>
#include <string>

#include "cpm/error.hpp"

namespace cpm {
namespace {

const double kLogFloor = std::log(kProbabilityFloor);

// Derivatives of log P for P = F(t_hi) - F(t_lo) with respect to t_hi and t_lo.
struct CellTerm {
  double log_p = 0.0;
  double g_hi = 0.0;
  double g_lo = 0.0;
  double h_hh = 0.0;
  double h_ll = 0.0;
  double h_hl = 0.0;
};

double log1mexp(double x) {
  // log(1 - exp(x)) for x <= 0
  return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

CellTerm cell_term(const LinkFunction& link, bool has_hi, double t_hi, bool has_lo, double t_lo,
                   Derivatives order) {
  CellTerm c;
  if (!has_hi && !has_lo) return c;

  if (has_hi && !has_lo) {
    c.log_p = link.log_cdf(t_hi);
  } else if (!has_hi) {
    c.log_p = link.log_survival(t_lo);
  } else if (t_hi <= 0.0) {
    const double a = link.log_cdf(t_hi);
    c.log_p = a + log1mexp(link.log_cdf(t_lo) - a);
  } else if (t_lo >= 0.0) {
    const double a = link.log_survival(t_lo);
    c.log_p = a + log1mexp(link.log_survival(t_hi) - a);
  } else {
    c.log_p = std::log(link.cdf(t_hi) - link.cdf(t_lo));
  }
  // Two-edge cells only; one-sided tails are exact through the log kernels.
  if (has_hi && has_lo && !(c.log_p >= kLogFloor)) c.log_p = kLogFloor;
  if (order == Derivatives::None) return c;

  if (has_hi) {
    c.g_hi = std::exp(link.log_pdf(t_hi) - c.log_p);
    c.h_hh = link.dlog_pdf(t_hi) * c.g_hi - c.g_hi * c.g_hi;
  }
  if (has_lo) {
    c.g_lo = -std::exp(link.log_pdf(t_lo) - c.log_p);
    c.h_ll = link.dlog_pdf(t_lo) * c.g_lo - c.g_lo * c.g_lo;
  }
  c.h_hl = -c.g_hi * c.g_lo;
  return c;
}

void check_theta(const ParameterVector& theta, const Dataset& dataset, const AnchorSet& anchors) {
  if (theta.alphas.size() != anchors.n_alpha()) {
    throw Error(ErrorKind::InconsistentDimensions,
                "expected " + std::to_string(anchors.n_alpha()) + " alphas, got " +
                    std::to_string(theta.alphas.size()));
  }
  if (static_cast<std::size_t>(theta.betas.size()) != dataset.n_covariates()) {
    throw Error(ErrorKind::InconsistentDimensions, "beta length differs from covariate dimension");
  }
  if (anchors.assignment.size() != dataset.size()) {
    throw Error(ErrorKind::MismatchedData, "anchor assignment does not match the dataset");
  }
  for (Eigen::Index k = 1; k < theta.alphas.size(); ++k) {
    if (!(theta.alphas[k] > theta.alphas[k - 1])) {
      throw Error(ErrorKind::NonIncreasingAlphas,
                  "alphas not strictly increasing at position " + std::to_string(k));
    }
  }
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double v = k < theta.alphas.size() ? theta.alphas[k] : theta.betas[k - theta.alphas.size()];
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "non-finite parameter");
  }
}

}  // namespace

Eigen::VectorXd ParameterVector::stacked() const {
  Eigen::VectorXd theta(size());
  theta << alphas, betas;
  return theta;
}

ParameterVector ParameterVector::from_stacked(const Eigen::VectorXd& theta, Eigen::Index n_alpha) {
  ParameterVector out;
  out.alphas = theta.head(n_alpha);
  out.betas = theta.tail(theta.size() - n_alpha);
  return out;
}

Eigen::MatrixXd BandedHessian::dense() const {
  const Eigen::Index k = n_alpha();
  const Eigen::Index p = n_beta();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k + p, k + p);
  for (Eigen::Index i = 0; i < k; ++i) {
    h(i, i) = alpha_diag[i];
    if (i + 1 < k) {
      h(i, i + 1) = alpha_offdiag[i];
      h(i + 1, i) = alpha_offdiag[i];
    }
  }
  h.topRightCorner(k, p) = alpha_beta;
  h.bottomLeftCorner(p, k) = alpha_beta.transpose();
  h.bottomRightCorner(p, p) = beta_block;
  return h;
}

Eigen::VectorXd linear_predictor(const Eigen::VectorXd& betas, const Dataset& dataset) {
  if (betas.size() == 0) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dataset.size()));
  return dataset.covariates() * betas;
}

LikelihoodEvaluation evaluate(const ParameterVector& theta, const Dataset& dataset,
                              const AnchorSet& anchors, const LinkFunction& link,
                              Derivatives order) {
  check_theta(theta, dataset, anchors);
  const Eigen::Index k = theta.alphas.size();
  const Eigen::Index p = theta.betas.size();
  const Eigen::VectorXd eta = linear_predictor(theta.betas, dataset);

  LikelihoodEvaluation out;
  if (order != Derivatives::None) out.gradient = Eigen::VectorXd::Zero(k + p);
  BandedHessian& h = out.hessian;
  if (order == Derivatives::Hessian) {
    h.alpha_diag = Eigen::VectorXd::Zero(k);
    h.alpha_offdiag = Eigen::VectorXd::Zero(std::max<Eigen::Index>(k - 1, 0));
    h.alpha_beta = Eigen::MatrixXd::Zero(k, p);
    h.beta_block = Eigen::MatrixXd::Zero(p, p);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const TermAssignment& term = anchors.assignment[i];
    const bool has_hi = term.upper != kNoAlpha;
    const bool has_lo = term.lower != kNoAlpha;
    const double e = eta[static_cast<Eigen::Index>(i)];
    const double t_hi = has_hi ? theta.alphas[term.upper] - e : 0.0;
    const double t_lo = has_lo ? theta.alphas[term.lower] - e : 0.0;
    const CellTerm c = cell_term(link, has_hi, t_hi, has_lo, t_lo, order);
    total += c.log_p;
    if (order == Derivatives::None || (!has_hi && !has_lo)) continue;

    const auto x = dataset.row(i);
    if (has_hi) out.gradient[term.upper] += c.g_hi;
    if (has_lo) out.gradient[term.lower] += c.g_lo;
    if (p > 0) out.gradient.tail(p).noalias() -= (c.g_hi + c.g_lo) * x.transpose();
    if (order != Derivatives::Hessian) continue;

    if (has_hi) h.alpha_diag[term.upper] += c.h_hh;
    if (has_lo) h.alpha_diag[term.lower] += c.h_ll;
    if (has_hi && has_lo) h.alpha_offdiag[term.lower] += c.h_hl;
    if (p > 0) {
      if (has_hi) h.alpha_beta.row(term.upper).noalias() -= (c.h_hh + c.h_hl) * x;
      if (has_lo) h.alpha_beta.row(term.lower).noalias() -= (c.h_hl + c.h_ll) * x;
      const double h_eta = c.h_hh + 2.0 * c.h_hl + c.h_ll;
      h.beta_block.noalias() += h_eta * (x.transpose() * x);
    }
  }
  if (!std::isfinite(total)) {
    throw Error(ErrorKind::NonFiniteLikelihood, "log-likelihood is not finite");
  }
  out.loglik = total;
  return out;
}

double log_likelihood(const ParameterVector& theta, const Dataset& dataset,
                      const AnchorSet& anchors, const LinkFunction& link) {
  return evaluate(theta, dataset, anchors, link, Derivatives::None).loglik;
}

Eigen::VectorXd gradient(const ParameterVector& theta, const Dataset& dataset,
                         const AnchorSet& anchors, const LinkFunction& link) {
  return evaluate(theta, dataset, anchors, link, Derivatives::Gradient).gradient;
}

BandedHessian hessian(const ParameterVector& theta, const Dataset& dataset,
                      const AnchorSet& anchors, const LinkFunction& link) {
  return evaluate(theta, dataset, anchors, link, Derivatives::Hessian).hessian;
}

}  // namespace cpm
