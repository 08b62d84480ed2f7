#include "cpm/banded.hpp"

#include <cmath>

namespace cpm {

std::optional<TridiagonalCholesky> TridiagonalCholesky::factor(const Eigen::VectorXd& diag,
                                                               const Eigen::VectorXd& offdiag) {
  const Eigen::Index n = diag.size();
  TridiagonalCholesky c;
  c.diag_.resize(n);
  c.sub_.resize(std::max<Eigen::Index>(n - 1, 0));
  double carry = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double pivot = diag[k] - carry;
    if (!(pivot > 0.0) || !std::isfinite(pivot)) return std::nullopt;
    c.diag_[k] = std::sqrt(pivot);
    if (k + 1 < n) {
      c.sub_[k] = offdiag[k] / c.diag_[k];
      carry = c.sub_[k] * c.sub_[k];
    }
  }
  return c;
}

void TridiagonalCholesky::solve_in_place(Eigen::Ref<Eigen::VectorXd> b) const {
  const Eigen::Index n = size();
  if (n == 0) return;
  b[0] /= diag_[0];
  for (Eigen::Index k = 1; k < n; ++k) b[k] = (b[k] - sub_[k - 1] * b[k - 1]) / diag_[k];
  b[n - 1] /= diag_[n - 1];
  for (Eigen::Index k = n - 2; k >= 0; --k) b[k] = (b[k] - sub_[k] * b[k + 1]) / diag_[k];
}

void TridiagonalCholesky::solve_columns_in_place(Eigen::Ref<Eigen::MatrixXd> b) const {
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    Eigen::VectorXd col = b.col(j);
    solve_in_place(col);
    b.col(j) = col;
  }
}

Eigen::MatrixXd TridiagonalCholesky::inverse() const {
  const Eigen::Index n = size();
  Eigen::MatrixXd inv(n, n);
  Eigen::VectorXd y(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    // Forward substitution of e_j starts at row j.
    y.head(j).setZero();
    y[j] = 1.0 / diag_[j];
    for (Eigen::Index k = j + 1; k < n; ++k) y[k] = -sub_[k - 1] * y[k - 1] / diag_[k];
    // Only rows >= j are needed; symmetry fills the rest.
    y[n - 1] /= diag_[n - 1];
    for (Eigen::Index k = n - 2; k >= j; --k) y[k] = (y[k] - sub_[k] * y[k + 1]) / diag_[k];
    for (Eigen::Index k = j; k < n; ++k) {
      inv(k, j) = y[k];
      inv(j, k) = y[k];
    }
  }
  return inv;
}

double TridiagonalCholesky::log_determinant() const {
  return 2.0 * diag_.array().log().sum();
}

std::optional<SchurFactorization> SchurFactorization::factor(const BandedHessian& hessian) {
  auto chol = TridiagonalCholesky::factor(-hessian.alpha_diag, -hessian.alpha_offdiag);
  if (!chol) return std::nullopt;

  SchurFactorization f;
  f.alpha_chol_ = std::move(*chol);
  f.b_ = -hessian.alpha_beta;
  f.a_inv_b_ = f.b_;
  f.alpha_chol_.solve_columns_in_place(f.a_inv_b_);

  const Eigen::Index p = hessian.n_beta();
  if (p > 0) {
    Eigen::MatrixXd s = -hessian.beta_block - f.b_.transpose() * f.a_inv_b_;
    s = 0.5 * (s + s.transpose());
    f.retained_ = (s.diagonal().array() / (-hessian.beta_block.diagonal().array())).minCoeff();
    f.schur_.compute(s);
    if (f.schur_.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd d = f.schur_.matrixLLT().diagonal();
    if (!(d.minCoeff() > 0.0) || !d.allFinite()) return std::nullopt;
    // Reject numerically singular Schur complements (collinear covariates).
    // Pivots of the unit-diagonal rescaling make the check unit-free.
    const Eigen::VectorXd inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd r = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> rl(r);
    if (rl.info() != Eigen::Success || !(rl.matrixLLT().diagonal().minCoeff() > 1e-6)) return std::nullopt;
  }
  return f;
}

Eigen::VectorXd SchurFactorization::solve(const Eigen::VectorXd& rhs) const {
  const Eigen::Index k = alpha_chol_.size();
  const Eigen::Index p = b_.cols();
  Eigen::VectorXd ga = rhs.head(k);
  alpha_chol_.solve_in_place(ga);  // A^-1 g_alpha
  Eigen::VectorXd out(k + p);
  if (p > 0) {
    const Eigen::VectorXd d_beta = schur_.solve(rhs.tail(p) - b_.transpose() * ga);
    out.tail(p) = d_beta;
    out.head(k) = ga - a_inv_b_ * d_beta;
  } else {
    out = ga;
  }
  return out;
}

Eigen::MatrixXd SchurFactorization::inverse() const {
  const Eigen::Index k = alpha_chol_.size();
  const Eigen::Index p = b_.cols();
  Eigen::MatrixXd v(k + p, k + p);
  v.topLeftCorner(k, k) = alpha_chol_.inverse();
  if (p > 0) {
    const Eigen::MatrixXd s_inv = schur_.solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd w_s = a_inv_b_ * s_inv;  // A^-1 B S^-1
    v.topLeftCorner(k, k).noalias() += w_s * a_inv_b_.transpose();
    v.topRightCorner(k, p) = -w_s;
    v.bottomLeftCorner(p, k) = -w_s.transpose();
    v.bottomRightCorner(p, p) = s_inv;
  }
  return v;
}

}  // namespace cpm
