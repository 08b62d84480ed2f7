#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cpm {

enum class CensorCode { Observed, BelowDL, AboveDL };

// One record (z, delta, x). For censored records z holds the detection limit.
struct CensoredObservation {
  double z = 0.0;
  CensorCode delta = CensorCode::Observed;
  std::vector<double> x;
};

// Immutable, validated column store. Construct through validate_dataset().
class Dataset {
 public:
  Dataset() = default;

  std::size_t size() const { return z_.size(); }
  std::size_t n_covariates() const { return static_cast<std::size_t>(x_.cols()); }

  double z(std::size_t i) const { return z_[i]; }
  CensorCode delta(std::size_t i) const { return delta_[i]; }
  const std::vector<double>& outcomes() const { return z_; }
  const std::vector<CensorCode>& codes() const { return delta_; }
  const Eigen::MatrixXd& covariates() const { return x_; }
  auto row(std::size_t i) const { return x_.row(static_cast<Eigen::Index>(i)); }
  const std::vector<std::string>& covariate_names() const { return names_; }

  std::size_t count(CensorCode code) const;

  // Keeps only the named covariate columns, in the order given.
  Dataset select_covariates(const std::vector<std::string>& names) const;

  // Same covariates and censoring codes, new outcome column.
  Dataset with_outcomes(std::vector<double> z) const;

 private:
  friend Dataset validate_dataset(std::span<const CensoredObservation>,
                                  std::vector<std::string>);
  std::vector<double> z_;
  std::vector<CensorCode> delta_;
  Eigen::MatrixXd x_;
  std::vector<std::string> names_;
};

// Rejects empty input, ragged covariate vectors, non-finite entries and data
// without a single uncensored outcome. Covariate names default to x1..xp.
Dataset validate_dataset(std::span<const CensoredObservation> observations,
                         std::vector<std::string> covariate_names = {});

}  // namespace cpm
