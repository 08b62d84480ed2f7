#include "cpm/comparators.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "cpm/error.hpp"
#include "cpm/link.hpp"

namespace cpm {
namespace {

double z_value(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidProbability, "level must lie in (0, 1)");
  return std::sqrt(2.0) * boost::math::erf_inv(level);
}

Eigen::MatrixXd design(const Dataset& ds) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(ds.size()), ds.covariates().cols() + 1);
  d.col(0).setOnes();
  d.rightCols(ds.covariates().cols()) = ds.covariates();
  return d;
}

void require_positive(const Dataset& ds) {
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!(ds.z(i) > 0.0))
      throw Error(ErrorKind::NonPositiveOutcome, "row " + std::to_string(i + 1) + ": outcome or DL must be > 0");
}

struct Ols {
  Eigen::VectorXd coef;
  double rss = 0.0;
  Eigen::MatrixXd xtx_inv;
};

Ols ols(const Eigen::MatrixXd& d, const Eigen::VectorXd& y) {
  Ols r;
  const Eigen::MatrixXd xtx = d.transpose() * d;
  Eigen::LLT<Eigen::MatrixXd> llt(xtx);
  if (llt.info() != Eigen::Success || d.rows() <= d.cols())
    throw Error(ErrorKind::SingularInformation, "design matrix is rank deficient");
  r.coef = llt.solve(d.transpose() * y);
  r.rss = (y - d * r.coef).squaredNorm();
  r.xtx_inv = llt.solve(Eigen::MatrixXd::Identity(d.cols(), d.cols()));
  return r;
}

// Derivatives of the per-observation log-likelihood in (eta, s = log sigma).
struct Term {
  double value, d_eta, d_s, d_eta2, d_eta_s, d_s2;
};

Term term(const LinkFunction& probit, double log_z, CensorCode code, double eta, double s) {
  const double sigma = std::exp(s);
  const double r = (log_z - eta) / sigma;
  double h, h1, h2;
  double extra = 0.0;
  switch (code) {
    case CensorCode::Observed:
      h = -0.5 * r * r - 0.5 * std::log(2.0 * M_PI);
      h1 = -r;
      h2 = -1.0;
      extra = -s;
      break;
    case CensorCode::BelowDL: {
      h = probit.log_cdf(r);
      const double lam = std::exp(probit.log_pdf(r) - h);
      h1 = lam;
      h2 = -lam * (r + lam);
      break;
    }
    default: {
      h = probit.log_survival(r);
      const double lam = std::exp(probit.log_pdf(r) - h);  // phi(-r)/Phi(-r)
      h1 = -lam;
      h2 = -lam * (lam - r);
      break;
    }
  }
  Term t;
  t.value = h + extra;
  t.d_eta = -h1 / sigma;
  t.d_s = -h1 * r + (code == CensorCode::Observed ? -1.0 : 0.0);
  t.d_eta2 = h2 / (sigma * sigma);
  t.d_eta_s = (h2 * r + h1) / sigma;
  t.d_s2 = h2 * r * r + h1 * r;
  return t;
}

struct Evaluation {
  double loglik = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

Evaluation evaluate(const Dataset& ds, const Eigen::MatrixXd& d, const Eigen::VectorXd& log_z,
                    const Eigen::VectorXd& theta, bool derivatives) {
  static const LinkFunction probit(LinkName::Probit);
  const Eigen::Index p = d.cols();
  const double s = theta[p];
  const Eigen::VectorXd eta = d * theta.head(p);
  Evaluation e;
  if (derivatives) {
    e.grad = Eigen::VectorXd::Zero(p + 1);
    e.hess = Eigen::MatrixXd::Zero(p + 1, p + 1);
  }
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const Term t = term(probit, log_z[i], ds.delta(std::size_t(i)), eta[i], s);
    e.loglik += t.value;
    if (!derivatives) continue;
    const auto row = d.row(i).transpose();
    e.grad.head(p) += t.d_eta * row;
    e.grad[p] += t.d_s;
    e.hess.topLeftCorner(p, p) += t.d_eta2 * row * row.transpose();
    e.hess.col(p).head(p) += t.d_eta_s * row;
    e.hess(p, p) += t.d_s2;
  }
  if (derivatives) e.hess.row(p).head(p) = e.hess.col(p).head(p).transpose();
  return e;
}

}  // namespace

double imputed_value(ImputationRule rule, double dl) {
  switch (rule) {
    case ImputationRule::DL: return dl;
    case ImputationRule::HalfDL: return dl / 2.0;
    case ImputationRule::DLOverSqrt2: return dl / std::sqrt(2.0);
  }
  return dl;
}

double ParametricFit::linear_predictor(const Eigen::VectorXd& x) const {
  if (x.size() != beta.size()) throw Error(ErrorKind::InconsistentDimensions, "covariate profile has the wrong length");
  return intercept + beta.dot(x);
}

double ParametricFit::median(const Eigen::VectorXd& x) const { return std::exp(linear_predictor(x)); }

std::pair<double, double> ParametricFit::median_interval(const Eigen::VectorXd& x, double level) const {
  const double eta = linear_predictor(x);
  Eigen::VectorXd g(beta.size() + 1);
  g[0] = 1.0;
  g.tail(beta.size()) = x;
  const Eigen::Index p = g.size();
  const double se = std::sqrt(std::max(0.0, g.dot(vcov.topLeftCorner(p, p) * g)));
  const double z = z_value(level);
  return {std::exp(eta - z * se), std::exp(eta + z * se)};
}

double ParametricFit::beta_se(Eigen::Index k) const { return std::sqrt(std::max(0.0, vcov(k + 1, k + 1))); }

ParametricFit substitute_and_fit(const Dataset& ds, ImputationRule rule) {
  double dl = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.delta(i) == CensorCode::AboveDL)
      throw Error(ErrorKind::MultipleDLsUnsupported, "substitution handles a single lower DL only");
    if (ds.delta(i) != CensorCode::BelowDL) continue;
    if (std::isnan(dl)) dl = ds.z(i);
    else if (ds.z(i) != dl) throw Error(ErrorKind::MultipleDLsUnsupported, "more than one lower DL");
  }
  require_positive(ds);
  const Eigen::MatrixXd d = design(ds);
  Eigen::VectorXd y(d.rows());
  for (std::size_t i = 0; i < ds.size(); ++i)
    y[Eigen::Index(i)] = std::log(ds.delta(i) == CensorCode::BelowDL ? imputed_value(rule, ds.z(i)) : ds.z(i));
  const Ols r = ols(d, y);
  const double n = double(d.rows()), k = double(d.cols());
  const double s2 = r.rss / (n - k);

  ParametricFit f;
  f.intercept = r.coef[0];
  f.beta = r.coef.tail(d.cols() - 1);
  f.sigma = std::sqrt(s2);
  f.vcov = Eigen::MatrixXd::Zero(d.cols() + 1, d.cols() + 1);
  f.vcov.topLeftCorner(d.cols(), d.cols()) = s2 * r.xtx_inv;
  f.vcov(d.cols(), d.cols()) = 1.0 / (2.0 * (n - k));
  f.loglik = -0.5 * n * std::log(2.0 * M_PI * s2) - 0.5 * r.rss / s2;
  return f;
}

double censored_lognormal_loglik(const Dataset& ds, double intercept, const Eigen::VectorXd& beta, double log_sigma) {
  require_positive(ds);
  const Eigen::MatrixXd d = design(ds);
  Eigen::VectorXd log_z(d.rows());
  for (std::size_t i = 0; i < ds.size(); ++i) log_z[Eigen::Index(i)] = std::log(ds.z(i));
  Eigen::VectorXd theta(d.cols() + 1);
  theta[0] = intercept;
  theta.segment(1, beta.size()) = beta;
  theta[d.cols()] = log_sigma;
  return evaluate(ds, d, log_z, theta, false).loglik;
}

ParametricFit censored_lognormal_mle(const Dataset& ds, const MleOptions& options) {
  require_positive(ds);
  const Eigen::MatrixXd d = design(ds);
  const Eigen::Index p = d.cols();
  Eigen::VectorXd log_z(d.rows());
  for (std::size_t i = 0; i < ds.size(); ++i) log_z[Eigen::Index(i)] = std::log(ds.z(i));

  const Ols start = ols(d, log_z);
  Eigen::VectorXd theta(p + 1);
  theta.head(p) = start.coef;
  theta[p] = 0.5 * std::log(std::max(start.rss / double(d.rows()), 1e-8));

  Evaluation cur = evaluate(ds, d, log_z, theta, true);
  double mu = 0.0;
  int it = 0;
  bool converged = false;
  for (; it < options.max_iterations; ++it) {
    if (cur.grad.lpNorm<Eigen::Infinity>() <= options.gradient_tol * std::max(1.0, std::abs(cur.loglik))) {
      converged = true;
      break;
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      Eigen::MatrixXd a = -cur.hess;
      a.diagonal().array() += mu;
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() == Eigen::Success) {
        const Eigen::VectorXd cand = theta + llt.solve(cur.grad);
        Evaluation next = evaluate(ds, d, log_z, cand, true);
        if (std::isfinite(next.loglik) && next.loglik >= cur.loglik) {
          theta = cand;
          cur = std::move(next);
          mu = mu > 0.0 ? mu / 10.0 : 0.0;
          if (mu < 1e-12) mu = 0.0;
          accepted = true;
          break;
        }
      }
      mu = mu == 0.0 ? 1e-6 * std::max(1.0, a.diagonal().cwiseAbs().maxCoeff()) : mu * 10.0;
    }
    if (!accepted) break;
  }
  // stalled line search at a numerically flat optimum
  if (!converged && cur.grad.lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, std::abs(cur.loglik)))
    converged = true;
  if (!converged) throw Error(ErrorKind::NotConverged, "censored lognormal MLE did not converge");

  Eigen::LLT<Eigen::MatrixXd> info(-cur.hess);
  if (info.info() != Eigen::Success)
    throw Error(ErrorKind::SingularInformation, "observed information is not positive definite");

  ParametricFit f;
  f.intercept = theta[0];
  f.beta = theta.segment(1, p - 1);
  f.sigma = std::exp(theta[p]);
  f.vcov = info.solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
  f.loglik = cur.loglik;
  f.n_iterations = it;
  return f;
}

}  // namespace cpm
