#pragma once

// Constructive maps between the state-space and extended-AR descriptions,
// and between solutions of the SID problem and the rank-constrained
// regression. Used mainly as test oracles.

#include <string>

#include "siddmd/baselines.hpp"

namespace siddmd {

// Theta = Gamma_s A Gamma_s^+. Requires Gamma_s to have full column rank.
template <typename Scalar>
Matrix<Scalar> ar_from_ss(const StateSpaceModel<Scalar>& model, Index s) {
  const Matrix<Scalar> gamma = observability_matrix(model, s);
  if (matrix_rank(gamma) != model.n)
    throw ObservabilityError("ar_from_ss: observability index exceeds s = " + std::to_string(s));
  return gamma * model.a * pinv(gamma);
}

// Orthonormal basis of span{windows}, from a rank-truncated SVD.
template <typename Derived>
Matrix<typename Derived::Scalar> window_basis(const Eigen::MatrixBase<Derived>& windows) {
  const auto svd = svd_econ(windows);
  return svd.u.leftCols(svd.rank);
}

// Realize a rank <= n extended-AR map as an order-n state-space model:
// project Theta onto the window space, factor Theta = P Q^T with r = rank,
// take A~ = Q^T P, C~ = P[1:m, :], then pad to order n with zero dynamics and
// output columns orthogonal to C~.
template <typename D1, typename D2>
StateSpaceModel<typename D1::Scalar> ss_from_ar(const Eigen::MatrixBase<D1>& theta,
                                                const Eigen::MatrixBase<D2>& window_basis_g,
                                                Index n, Index m) {
  using Scalar = typename D1::Scalar;
  const Index ms = theta.rows();
  if (theta.cols() != ms) throw DimensionMismatch("ss_from_ar: theta must be square");
  if (window_basis_g.rows() != ms) throw DimensionMismatch("ss_from_ar: basis has wrong rows");
  if (m < 1 || ms % m != 0) throw DimensionMismatch("ss_from_ar: m must divide ms");
  if (n < 1) throw InvalidInput("ss_from_ar: n must be >= 1");

  const Matrix<Scalar> projected = window_basis_g * (window_basis_g.transpose() * theta);
  const SvdResult<Scalar> svd = svd_econ(projected);
  const Index r = svd.rank;
  if (r > n)
    throw InvalidInput("ss_from_ar: rank(theta) = " + std::to_string(r) + " exceeds n = " +
                       std::to_string(n));
  const Matrix<Scalar> p = svd.u.leftCols(r) * svd.s.head(r).asDiagonal();
  const Matrix<Scalar> q = svd.v.leftCols(r);
  const Matrix<Scalar> c_tilde = p.topRows(m);

  Matrix<Scalar> a = Matrix<Scalar>::Zero(n, n);
  a.topLeftCorner(r, r) = q.transpose() * p;
  Matrix<Scalar> c(m, n);
  c.leftCols(r) = c_tilde;
  if (n > r) {
    Index c_rank = 0;
    Matrix<Scalar> complement;
    if (r > 0) {
      Eigen::JacobiSVD<Matrix<Scalar>> full(c_tilde, Eigen::ComputeFullU);
      c_rank = numerical_rank<Scalar>(full.singularValues(), c_tilde.rows(), c_tilde.cols());
      complement = full.matrixU();
    } else {
      complement = Matrix<Scalar>::Identity(m, m);
    }
    if (m < n - r + c_rank)
      throw InvalidInput("ss_from_ar: cannot complete C with " + std::to_string(n - r) +
                         " orthogonal columns when m = " + std::to_string(m));
    c.rightCols(n - r) = complement.middleCols(c_rank, n - r);
  }
  return StateSpaceModel<Scalar>(std::move(a), std::move(c), ms / m);
}

// Theta = Gamma X_p Y_p^+.
template <typename D1, typename D2, typename Scalar>
Matrix<Scalar> map_sid_to_dmd(const Eigen::MatrixBase<D1>& gamma, const Eigen::MatrixBase<D2>& x,
                              const HankelPair<Scalar>& h) {
  if (x.cols() != h.ell + 1) throw DimensionMismatch("map_sid_to_dmd: x must have ell+1 columns");
  if (gamma.cols() != x.rows()) throw DimensionMismatch("map_sid_to_dmd: gamma/x mismatch");
  return (gamma * x.leftCols(h.ell)) * pinv(h.y_past);
}

// (Gamma, X) = (P, Q^T Y).
template <typename Scalar>
SidSolution<Scalar> map_dmd_to_sid(const LowRankMap<Scalar>& map, const HankelPair<Scalar>& h) {
  return {map.p, estimate_states(map, h)};
}

}  // namespace siddmd
