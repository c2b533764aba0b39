#pragma once

// Rank-constrained matrix regression
//
//     minimize ||Y_f - Theta Y_p||_F   subject to rank(Theta) <= n
//
// solved in closed form. With the economic SVD Y_p = U2 S2 V2^T (restricted
// to numerically nonzero singular values), Z = Y_f V2 and the n-truncated SVD
// Z_(n) = U1 S1 V1^T, the minimizer is Theta* = Z_(n) S2^{-1} U2^T, kept in
// factored form Theta* = P Q^T with P = U1 and Q = U2 S2^{-1} V1 S1.
//
// Squared objective splits as ||Z - Theta U2 S2||^2 + ||Y_f V2perp||^2, so the
// optimum is sqrt(||Y_f V2perp||^2 + sum_{k>n} sigma_k(Z)^2).

#include <cmath>
#include <string>

#include "siddmd/embedding.hpp"

namespace siddmd {

template <typename Scalar = double>
struct LowRankMap {
  Matrix<Scalar> p;  // ms x r
  Matrix<Scalar> q;  // ms x r
  Index r = 0;
  Index requested_n = 0;
  Scalar residual_frobenius = Scalar(0);
  bool degenerate_truncation = false;
  Index m = 0;
  Index s = 0;

  Matrix<Scalar> theta() const { return p * q.transpose(); }

  template <typename Derived>
  Matrix<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const {
    return p * (q.transpose() * x);
  }
};

namespace detail {

template <typename Scalar>
struct PastFactors {
  Matrix<Scalar> u;  // U2, ms x rank
  Vector<Scalar> s;  // S2
  Matrix<Scalar> v;  // V2, ell x rank
};

template <typename Derived>
PastFactors<typename Derived::Scalar> past_factors(const Eigen::MatrixBase<Derived>& y_past) {
  const auto svd = svd_econ(y_past);
  return {svd.u.leftCols(svd.rank), svd.s.head(svd.rank), svd.v.leftCols(svd.rank)};
}

template <typename D1, typename D2>
void check_pair(const Eigen::MatrixBase<D1>& y_past, const Eigen::MatrixBase<D2>& y_future,
                const char* where) {
  if (y_past.rows() != y_future.rows() || y_past.cols() != y_future.cols())
    throw DimensionMismatch(std::string(where) + ": y_past and y_future shapes differ");
  require_finite(y_past, where);
  require_finite(y_future, where);
}

}  // namespace detail

// ||Y_f - Theta Y_p||_F for a dense Theta.
template <typename D0, typename D1, typename D2>
typename D0::Scalar regression_objective(const Eigen::MatrixBase<D0>& theta,
                                         const Eigen::MatrixBase<D1>& y_past,
                                         const Eigen::MatrixBase<D2>& y_future) {
  if (theta.rows() != y_future.rows() || theta.cols() != y_past.rows())
    throw DimensionMismatch("regression_objective: theta has wrong shape");
  return (y_future - theta * y_past).norm();
}

template <typename D1, typename D2>
LowRankMap<typename D1::Scalar> solve_rank_constrained(const Eigen::MatrixBase<D1>& y_past,
                                                       const Eigen::MatrixBase<D2>& y_future,
                                                       Index n, Index m = -1, Index s = 1) {
  using Scalar = typename D1::Scalar;
  if (n < 1) throw InvalidInput("solve_rank_constrained: n must be >= 1");
  detail::check_pair(y_past, y_future, "solve_rank_constrained");

  LowRankMap<Scalar> out;
  out.requested_n = n;
  out.m = m < 0 ? y_past.rows() : m;
  out.s = s;

  const auto past = detail::past_factors(y_past);
  const Index ms = y_past.rows();
  if (past.s.size() == 0) {
    out.p.setZero(ms, 0);
    out.q.setZero(ms, 0);
    out.residual_frobenius = y_future.norm();
    return out;
  }

  const Matrix<Scalar> z = y_future * past.v;
  const SvdResult<Scalar> zt = svd_truncated(z, n);
  out.r = zt.rank;
  out.degenerate_truncation = zt.degenerate_truncation;
  out.p = zt.u;
  out.q = past.u * past.s.cwiseInverse().asDiagonal() * zt.v * zt.s.asDiagonal();
  out.residual_frobenius = (y_future - out.apply(y_past)).norm();
  return out;
}

template <typename Scalar>
LowRankMap<Scalar> solve_rank_constrained(const HankelPair<Scalar>& h, Index n) {
  return solve_rank_constrained(h.y_past, h.y_future, n, h.m, h.s);
}

// Optimal objective value computed from the orthogonal split, independently
// of the factored solution.
template <typename D1, typename D2>
typename D1::Scalar optimal_objective(const Eigen::MatrixBase<D1>& y_past,
                                      const Eigen::MatrixBase<D2>& y_future, Index n) {
  using Scalar = typename D1::Scalar;
  if (n < 1) throw InvalidInput("optimal_objective: n must be >= 1");
  detail::check_pair(y_past, y_future, "optimal_objective");
  const auto past = detail::past_factors(y_past);
  if (past.s.size() == 0) return y_future.norm();
  const Matrix<Scalar> z = y_future * past.v;
  const Scalar outside = (y_future - z * past.v.transpose()).squaredNorm();
  const Vector<Scalar> sz = svd_econ(z).s;
  Scalar tail = Scalar(0);
  for (Index k = n; k < sz.size(); ++k) tail += sz(k) * sz(k);
  return std::sqrt(outside + tail);
}

template <typename Scalar>
Scalar optimal_objective(const HankelPair<Scalar>& h, Index n) {
  return optimal_objective(h.y_past, h.y_future, n);
}

// Unconstrained least-squares map Z S2^{-1} U2^T (minimum-norm).
template <typename D1, typename D2>
Matrix<typename D1::Scalar> solve_full_rank(const Eigen::MatrixBase<D1>& y_past,
                                            const Eigen::MatrixBase<D2>& y_future) {
  using Scalar = typename D1::Scalar;
  detail::check_pair(y_past, y_future, "solve_full_rank");
  const auto past = detail::past_factors(y_past);
  if (past.s.size() == 0) return Matrix<Scalar>::Zero(y_future.rows(), y_past.rows());
  const Matrix<Scalar> z = y_future * past.v;
  return z * past.s.cwiseInverse().asDiagonal() * past.u.transpose();
}

template <typename Scalar>
Matrix<Scalar> solve_full_rank(const HankelPair<Scalar>& h) {
  return solve_full_rank(h.y_past, h.y_future);
}

template <typename Scalar>
struct ResidualGap {
  Scalar direct = Scalar(0);    // ||Theta_full Y_p - Theta* Y_p||_F from products
  Scalar spectral = Scalar(0);  // sqrt(sum_{k>n} sigma_k(Z)^2)
  bool consistent = false;      // agree within 1e-8 relative
};

template <typename D1, typename D2>
ResidualGap<typename D1::Scalar> residual_gap(const Eigen::MatrixBase<D1>& y_past,
                                              const Eigen::MatrixBase<D2>& y_future, Index n) {
  using Scalar = typename D1::Scalar;
  const LowRankMap<Scalar> map = solve_rank_constrained(y_past, y_future, n);
  const auto past = detail::past_factors(y_past);
  ResidualGap<Scalar> gap;
  if (past.s.size() == 0) {
    gap.consistent = true;
    return gap;
  }
  const Matrix<Scalar> z = y_future * past.v;
  // Theta_full Y_p evaluated as Z S2^{-1} (U2^T Y_p).
  const Matrix<Scalar> full_pred =
      z * past.s.cwiseInverse().asDiagonal() * (past.u.transpose() * y_past);
  gap.direct = (full_pred - map.apply(y_past)).norm();

  const Vector<Scalar> sz = svd_econ(z).s;
  Scalar tail = Scalar(0);
  for (Index k = n; k < sz.size(); ++k) tail += sz(k) * sz(k);
  gap.spectral = std::sqrt(tail);

  const Scalar scale = std::max({gap.direct, gap.spectral, Scalar(1e-300)});
  const Scalar floor = Eigen::NumTraits<Scalar>::epsilon() * Scalar(100) * z.norm();
  gap.consistent = std::abs(gap.direct - gap.spectral) <= Scalar(1e-8) * scale + floor;
  return gap;
}

template <typename Scalar>
ResidualGap<Scalar> residual_gap(const HankelPair<Scalar>& h, Index n) {
  return residual_gap(h.y_past, h.y_future, n);
}

template <typename Scalar>
struct SolutionCheck {
  bool is_solution = false;
  Scalar objective_gap = Scalar(0);  // objective(candidate) - optimum
  Index rank = 0;
};

// Candidate is optimal iff rank <= n and Theta U2 U2^T reaches the optimum
// (Theta Y_p depends on Theta only through Theta U2 U2^T).
template <typename D0, typename D1, typename D2>
SolutionCheck<typename D0::Scalar> is_solution(const Eigen::MatrixBase<D0>& candidate,
                                               const Eigen::MatrixBase<D1>& y_past,
                                               const Eigen::MatrixBase<D2>& y_future, Index n) {
  using Scalar = typename D0::Scalar;
  const Index ms = y_past.rows();
  if (candidate.rows() != ms || candidate.cols() != ms)
    throw DimensionMismatch("is_solution: candidate must be ms x ms");
  detail::require_finite(candidate, "is_solution");
  const auto past = detail::past_factors(y_past);
  const Matrix<Scalar> projected = candidate * past.u * past.u.transpose();

  SolutionCheck<Scalar> out;
  out.rank = matrix_rank(candidate);
  const Scalar best = optimal_objective(y_past, y_future, n);
  out.objective_gap = regression_objective(projected, y_past, y_future) - best;
  const Scalar tol = Scalar(1e-8) * std::max(best, y_future.norm());
  out.is_solution = out.rank <= n && out.objective_gap <= tol;
  return out;
}

template <typename Derived, typename Scalar>
SolutionCheck<Scalar> is_solution(const Eigen::MatrixBase<Derived>& candidate,
                                  const HankelPair<Scalar>& h, Index n) {
  return is_solution(candidate, h.y_past, h.y_future, n);
}

// Theta* is unique iff Y_p has full row rank and the truncation of Z is not tied.
template <typename Scalar>
bool is_unique(const HankelPair<Scalar>& h, Index n) {
  if (matrix_rank(h.y_past) != h.y_past.rows()) return false;
  return !solve_rank_constrained(h, n).degenerate_truncation;
}

// SID objective ||Y_f - Gamma X_p||_F, X_p = first ell columns of x, subject to
// row(X) within row(Y_full).
template <typename D1, typename D2, typename Scalar>
Scalar sid_objective(const Eigen::MatrixBase<D1>& gamma, const Eigen::MatrixBase<D2>& x,
                     const HankelPair<Scalar>& h) {
  if (x.cols() != h.ell + 1)
    throw DimensionMismatch("sid_objective: x must have ell+1 = " + std::to_string(h.ell + 1) +
                            " columns");
  if (gamma.rows() != h.y_future.rows() || gamma.cols() != x.rows())
    throw DimensionMismatch("sid_objective: gamma has wrong shape");
  if (x.rows() > 0) {
    const Matrix<Scalar> y_pinv = pinv(h.y_full);
    const Matrix<Scalar> projected = (x * y_pinv) * h.y_full;
    const Scalar violation = (projected - x).norm();
    if (violation > Scalar(1e-8) * x.norm())
      throw Infeasible("sid_objective: row(X) is not contained in row(Y) (violation " +
                       std::to_string(static_cast<double>(violation)) + ")");
  }
  return (h.y_future - gamma * x.leftCols(h.ell)).norm();
}

}  // namespace siddmd
