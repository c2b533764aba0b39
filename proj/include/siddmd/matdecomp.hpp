#pragma once

// Dense decomposition primitives with fixed sign and ordering conventions.
//
// Every routine here is a pure function of its input. Results are
// canonicalized so that repeated calls (and golden files built from them)
// are reproducible:
//  * SVD: singular values nonincreasing; in each left singular vector the
//    entry of largest magnitude is nonnegative (lowest row index wins ties),
//    and the matching right singular vector is flipped along with it.
//  * eig: eigenvalues ordered by nonincreasing modulus, then nonincreasing
//    real part; conjugate pairs adjacent with the positive-imaginary member
//    first; eigenvectors have unit norm and their largest entry real positive.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "siddmd/errors.hpp"

namespace siddmd {

using Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMatrix = Matrix<std::complex<Scalar>>;
template <typename Scalar>
using ComplexVector = Vector<std::complex<Scalar>>;

// Relative gap below which sigma_n and sigma_{n+1} are treated as tied.
inline constexpr double kDegenerateGap = 1e-10;

// Eigenvector-matrix condition number above which A is reported defective.
inline constexpr double kDefectiveCondition = 1e8;

template <typename Scalar>
struct SvdResult {
  Matrix<Scalar> u;
  Vector<Scalar> s;
  Matrix<Scalar> v;
  Index rank = 0;
  // sigma_n and sigma_{n+1} nearly equal: the truncation is not unique.
  bool degenerate_truncation = false;

  Matrix<Scalar> reconstruct() const { return u * s.asDiagonal() * v.transpose(); }
};

enum class EigenKind { Real, PairFirst, PairSecond };

template <typename Scalar>
struct EigResult {
  ComplexVector<Scalar> eigenvalues;
  ComplexMatrix<Scalar> eigenvectors;  // columns are Phi
  std::vector<EigenKind> pairing;
  Scalar eigenvector_condition = Scalar(1);
  bool defective = false;

  Index size() const { return eigenvalues.size(); }
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* where) {
  if (m.rows() == 0 || m.cols() == 0)
    throw InvalidInput(std::string(where) + ": empty matrix");
  if (!m.allFinite()) throw InvalidInput(std::string(where) + ": non-finite entry");
}

template <typename Scalar>
void canonicalize_signs(Matrix<Scalar>& u, Matrix<Scalar>& v) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index best = 0;
    Scalar best_abs = Scalar(-1);
    for (Index i = 0; i < u.rows(); ++i) {
      const Scalar a = std::abs(u(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (u(best, j) < Scalar(0)) {
      u.col(j) *= Scalar(-1);
      v.col(j) *= Scalar(-1);
    }
  }
}

// Unit norm, largest entry rotated onto the positive real axis.
template <typename Scalar>
void canonicalize_phase(Eigen::Ref<ComplexVector<Scalar>> x) {
  const Scalar nrm = x.norm();
  if (nrm == Scalar(0)) return;
  x /= nrm;
  Index best = 0;
  Scalar best_abs = Scalar(-1);
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar a = std::abs(x(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  x *= std::conj(x(best)) / best_abs;
  x(best) = std::complex<Scalar>(best_abs, Scalar(0));
}

}  // namespace detail

template <typename Scalar>
Scalar rank_tolerance(Index rows, Index cols, Scalar sigma_max) {
  return Scalar(std::max(rows, cols)) * sigma_max * Eigen::NumTraits<Scalar>::epsilon();
}

// Number of singular values above the LAPACK-style cutoff.
template <typename Scalar>
Index numerical_rank(const Vector<Scalar>& s, Index rows, Index cols) {
  if (s.size() == 0 || s(0) <= Scalar(0)) return 0;
  const Scalar tol = rank_tolerance(rows, cols, s(0));
  Index r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  return r;
}

template <typename Derived>
SvdResult<typename Derived::Scalar> svd_econ(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m, "svd_econ");
  const Matrix<Scalar> a = m;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult<Scalar> out;
  out.u = svd.matrixU();
  out.s = svd.singularValues();
  out.v = svd.matrixV();
  detail::canonicalize_signs(out.u, out.v);
  out.rank = numerical_rank(out.s, a.rows(), a.cols());
  return out;
}

// Best rank-n approximation (Eckart-Young). Keeps min(n, rank(M)) triplets;
// `rank` of the result is the number kept.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd_truncated(const Eigen::MatrixBase<Derived>& m, Index n) {
  using Scalar = typename Derived::Scalar;
  if (n < 1) throw InvalidInput("svd_truncated: n must be >= 1");
  SvdResult<Scalar> full = svd_econ(m);
  const Index p = full.s.size();
  const Index keep = std::min(n, full.rank);
  SvdResult<Scalar> out;
  out.u = full.u.leftCols(keep);
  out.s = full.s.head(keep);
  out.v = full.v.leftCols(keep);
  out.rank = keep;
  if (n < p && n <= full.rank)
    out.degenerate_truncation = (full.s(n - 1) - full.s(n)) < Scalar(kDegenerateGap) * full.s(0);
  return out;
}

template <typename Derived>
Matrix<typename Derived::Scalar> pinv(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const SvdResult<Scalar> svd = svd_econ(m);
  const Index r = svd.rank;
  if (r == 0) return Matrix<Scalar>::Zero(m.cols(), m.rows());
  return svd.v.leftCols(r) * svd.s.head(r).cwiseInverse().asDiagonal() *
         svd.u.leftCols(r).transpose();
}

template <typename Derived>
Index matrix_rank(const Eigen::MatrixBase<Derived>& m) {
  return svd_econ(m).rank;
}

template <typename Derived>
EigResult<typename Derived::Scalar> eig(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  if (a.rows() != a.cols()) throw DimensionMismatch("eig: matrix is not square");
  EigResult<Scalar> out;
  if (a.rows() == 0) return out;
  detail::require_finite(a, "eig");

  const Index n = a.rows();
  Eigen::EigenSolver<Matrix<Scalar>> solver(Matrix<Scalar>(a), true);
  if (solver.info() != Eigen::Success) throw NumericalError("eig: eigensolver did not converge");
  const ComplexVector<Scalar> values = solver.eigenvalues();
  const ComplexMatrix<Scalar> vectors = solver.eigenvectors();

  // The real Schur form yields exact conjugate pairs in adjacent slots and an
  // exactly zero imaginary part for real eigenvalues.
  struct Item {
    Scalar modulus;
    Scalar real;
    Index index;  // positive-imaginary member for pairs
    bool pair;
  };
  std::vector<Item> items;
  for (Index j = 0; j < n; ++j) {
    if (values(j).imag() == Scalar(0)) {
      items.push_back({std::abs(values(j)), values(j).real(), j, false});
    } else {
      const Index pos = values(j).imag() > Scalar(0) ? j : j + 1;
      items.push_back({std::abs(values(pos)), values(pos).real(), pos, true});
      ++j;
    }
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
    if (x.modulus != y.modulus) return x.modulus > y.modulus;
    return x.real > y.real;
  });

  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  Index k = 0;
  for (const Item& it : items) {
    ComplexVector<Scalar> phi = vectors.col(it.index);
    detail::canonicalize_phase<Scalar>(phi);
    if (!it.pair) {
      out.eigenvalues(k) = Complex(values(it.index).real(), Scalar(0));
      out.eigenvectors.col(k) = phi;
      out.pairing.push_back(EigenKind::Real);
      ++k;
    } else {
      out.eigenvalues(k) = values(it.index);
      out.eigenvalues(k + 1) = std::conj(values(it.index));
      out.eigenvectors.col(k) = phi;
      out.eigenvectors.col(k + 1) = phi.conjugate();
      out.pairing.push_back(EigenKind::PairFirst);
      out.pairing.push_back(EigenKind::PairSecond);
      k += 2;
    }
  }

  const Vector<Scalar> sv =
      Eigen::JacobiSVD<ComplexMatrix<Scalar>>(out.eigenvectors).singularValues();
  const Scalar smin = sv(sv.size() - 1);
  out.eigenvector_condition =
      smin > Scalar(0) ? sv(0) / smin : std::numeric_limits<Scalar>::infinity();
  out.defective = !(out.eigenvector_condition <= Scalar(kDefectiveCondition));
  return out;
}

}  // namespace siddmd
