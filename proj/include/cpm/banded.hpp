#pragma once

#include <optional>

#include <Eigen/Dense>

#include "cpm/likelihood.hpp"

namespace cpm {

// Cholesky factor L of a symmetric positive definite tridiagonal matrix.
// L is lower bidiagonal: diagonal `diag`, subdiagonal `sub` (sub[k] = L(k+1, k)).
class TridiagonalCholesky {
 public:
  // Returns nullopt when a pivot is not strictly positive.
  static std::optional<TridiagonalCholesky> factor(const Eigen::VectorXd& diag,
                                                   const Eigen::VectorXd& offdiag);

  Eigen::Index size() const { return diag_.size(); }
  const Eigen::VectorXd& diag() const { return diag_; }
  const Eigen::VectorXd& sub() const { return sub_; }

  // Solves A x = b in place; the matrix form works column by column.
  void solve_in_place(Eigen::Ref<Eigen::VectorXd> b) const;
  void solve_columns_in_place(Eigen::Ref<Eigen::MatrixXd> b) const;
  Eigen::MatrixXd inverse() const;
  double log_determinant() const;

 private:
  Eigen::VectorXd diag_;
  Eigen::VectorXd sub_;
};

// Factorization of the negative Hessian [[A, B], [B', C]] with tridiagonal A:
// A is factored with a banded Cholesky, the alphas are eliminated through the
// p x p Schur complement S = C - B' A^-1 B.
class SchurFactorization {
 public:
  // Returns nullopt if the negative Hessian is not positive definite.
  static std::optional<SchurFactorization> factor(const BandedHessian& hessian);

  // Solves (-H) delta = rhs.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  // (-H)^-1 as a dense matrix; the alpha block is assembled from tridiagonal
  // solves, never from a dense inversion.
  Eigen::MatrixXd inverse() const;

  // min_k S_kk / C_kk: share of each beta's information left after the alphas
  // are profiled out. Near zero under separation. 1 when there are no betas.
  double retained_information() const { return retained_; }

 private:
  double retained_ = 1.0;
  TridiagonalCholesky alpha_chol_;
  Eigen::MatrixXd b_;         // -alpha_beta
  Eigen::MatrixXd a_inv_b_;   // A^-1 B
  Eigen::LLT<Eigen::MatrixXd> schur_;
};

}  // namespace cpm
