#include "cpm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cpm/error.hpp"

namespace cpm {

std::size_t Dataset::count(CensorCode code) const {
  return static_cast<std::size_t>(std::count(delta_.begin(), delta_.end(), code));
}

Dataset Dataset::select_covariates(const std::vector<std::string>& names) const {
  Dataset out;
  out.z_ = z_;
  out.delta_ = delta_;
  out.names_ = names;
  out.x_.resize(x_.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t k = 0; k < names.size(); ++k) {
    auto it = std::find(names_.begin(), names_.end(), names[k]);
    if (it == names_.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown covariate '" + names[k] + "'");
    }
    out.x_.col(static_cast<Eigen::Index>(k)) = x_.col(it - names_.begin());
  }
  return out;
}

Dataset Dataset::with_outcomes(std::vector<double> z) const {
  if (z.size() != z_.size()) {
    throw Error(ErrorKind::InconsistentDimensions, "outcome vector length differs from dataset size");
  }
  for (double v : z) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "non-finite outcome");
  }
  Dataset out = *this;
  out.z_ = std::move(z);
  return out;
}

Dataset validate_dataset(std::span<const CensoredObservation> observations,
                         std::vector<std::string> covariate_names) {
  if (observations.empty()) throw Error(ErrorKind::EmptyData, "dataset has no observations");

  const std::size_t p = observations.front().x.size();
  const auto n = observations.size();
  Dataset ds;
  ds.z_.reserve(n);
  ds.delta_.reserve(n);
  ds.x_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));

  bool any_observed = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& obs = observations[i];
    if (obs.x.size() != p) {
      throw Error(ErrorKind::InconsistentDimensions,
                  "observation " + std::to_string(i) + " has " + std::to_string(obs.x.size()) +
                      " covariates, expected " + std::to_string(p));
    }
    if (!std::isfinite(obs.z)) {
      throw Error(ErrorKind::NonFiniteValue, "non-finite outcome at observation " + std::to_string(i));
    }
    for (std::size_t k = 0; k < p; ++k) {
      if (!std::isfinite(obs.x[k])) {
        throw Error(ErrorKind::NonFiniteValue, "non-finite covariate at observation " + std::to_string(i));
      }
      ds.x_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = obs.x[k];
    }
    ds.z_.push_back(obs.z);
    ds.delta_.push_back(obs.delta);
    any_observed = any_observed || obs.delta == CensorCode::Observed;
  }
  if (!any_observed) {
    throw Error(ErrorKind::NoUncensoredValues, "no uncensored outcomes: the likelihood has no anchor points");
  }

  if (covariate_names.empty()) {
    for (std::size_t k = 0; k < p; ++k) covariate_names.push_back("x" + std::to_string(k + 1));
  }
  if (covariate_names.size() != p) {
    throw Error(ErrorKind::InconsistentDimensions, "covariate name count differs from covariate dimension");
  }
  if (std::set<std::string>(covariate_names.begin(), covariate_names.end()).size() != p) {
    throw Error(ErrorKind::InvalidArgument, "covariate names must be unique");
  }
  ds.names_ = std::move(covariate_names);
  return ds;
}

}  // namespace cpm
