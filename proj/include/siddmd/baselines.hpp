#pragma once

// Reference methods: the UPC subspace method and truncated-SVD DMD, plus the
// row-space projections A/B = A B^+ B and A/B^perp = A (I - B^+ B).

#include "siddmd/sysid.hpp"

namespace siddmd {

template <typename D1, typename D2>
Matrix<typename D1::Scalar> project_rows(const Eigen::MatrixBase<D1>& a,
                                         const Eigen::MatrixBase<D2>& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("project_rows: column counts differ");
  return (a * pinv(b)) * b;
}

template <typename D1, typename D2>
Matrix<typename D1::Scalar> project_complement(const Eigen::MatrixBase<D1>& a,
                                               const Eigen::MatrixBase<D2>& b) {
  using Scalar = typename D1::Scalar;
  if (a.cols() != b.cols()) throw DimensionMismatch("project_complement: column counts differ");
  const Matrix<Scalar> proj =
      Matrix<Scalar>::Identity(b.cols(), b.cols()) - pinv(b) * b;
  return a * proj;
}

template <typename Scalar = double>
struct SidSolution {
  Matrix<Scalar> gamma;  // ms x n
  Matrix<Scalar> x;      // n x (ell+1)
};

// Gamma = U S^{1/2} from the n-truncated SVD of Y_f / Y_p, and
// X = S^{-1/2} U^T Y_f Y_p^+ Y.
template <typename Scalar>
SidSolution<Scalar> upc_identify(const HankelPair<Scalar>& h, Index n) {
  if (n < 1) throw InvalidInput("upc_identify: n must be >= 1");
  const Matrix<Scalar> past_pinv = pinv(h.y_past);
  const Matrix<Scalar> oblique = h.y_future * (past_pinv * h.y_past);
  const SvdResult<Scalar> svd = svd_truncated(oblique, n);

  Vector<Scalar> root = svd.s.cwiseSqrt();
  Vector<Scalar> inv_root(root.size());
  for (Index k = 0; k < root.size(); ++k)
    inv_root(k) = root(k) > Scalar(0) ? Scalar(1) / root(k) : Scalar(0);

  SidSolution<Scalar> out;
  out.gamma = svd.u * root.asDiagonal();
  out.x = inv_root.asDiagonal() * (svd.u.transpose() * h.y_future) * (past_pinv * h.y_full);
  return out;
}

// Classic DMD: truncate Y_p first, Y_p ~ U S V^T, then Theta = Y_f V S^{-1} U^T.
// Kept factored as left * basis^T so that large ms never materializes ms x ms.
template <typename Scalar = double>
struct TruncatedDmd {
  Matrix<Scalar> left;   // Y_f V S^{-1}, ms x k
  Matrix<Scalar> basis;  // U, ms x k

  Matrix<Scalar> theta() const { return left * basis.transpose(); }
  // U^T Theta U, the k x k reduced operator.
  Matrix<Scalar> projected() const { return basis.transpose() * left; }

  template <typename Derived>
  Matrix<Scalar> apply(const Eigen::MatrixBase<Derived>& y) const {
    return left * (basis.transpose() * y);
  }
  Scalar objective(const HankelPair<Scalar>& h) const {
    return (h.y_future - apply(h.y_past)).norm();
  }
};

template <typename Scalar>
TruncatedDmd<Scalar> truncated_dmd(const HankelPair<Scalar>& h, Index n) {
  const SvdResult<Scalar> svd = svd_truncated(h.y_past, n);
  TruncatedDmd<Scalar> out;
  out.basis = svd.u;
  out.left = h.y_future * svd.v * svd.s.cwiseInverse().asDiagonal();
  return out;
}

}  // namespace siddmd
