#pragma once

// Block-Hankel delay embedding of an output sequence.

#include <optional>
#include <string>

#include "siddmd/matdecomp.hpp"

namespace siddmd {

// Ordered samples y_0..y_{N-1}, stored as the columns of an m x N matrix.
template <typename Scalar = double>
class OutputSequence {
 public:
  OutputSequence() = default;

  explicit OutputSequence(Matrix<Scalar> samples, std::optional<Scalar> dt = std::nullopt)
      : samples_(std::move(samples)), dt_(dt) {
    if (samples_.rows() < 1 || samples_.cols() < 1)
      throw InvalidInput("OutputSequence: need m >= 1 and N >= 1");
    if (!samples_.allFinite()) throw InvalidInput("OutputSequence: non-finite sample");
    if (dt_ && !(*dt_ > Scalar(0) && std::isfinite(*dt_)))
      throw InvalidInput("OutputSequence: dt must be positive and finite");
  }

  Index dim() const { return samples_.rows(); }
  Index size() const { return samples_.cols(); }
  const Matrix<Scalar>& samples() const { return samples_; }
  auto sample(Index k) const { return samples_.col(k); }
  std::optional<Scalar> dt() const { return dt_; }

 private:
  Matrix<Scalar> samples_;
  std::optional<Scalar> dt_;
};

template <typename Scalar = double>
struct HankelPair {
  Matrix<Scalar> y_full;    // ms x (ell+1)
  Matrix<Scalar> y_past;    // columns 1..ell of y_full
  Matrix<Scalar> y_future;  // columns 2..ell+1 of y_full
  Index s = 0;
  Index m = 0;
  Index ell = 0;

  // Wraps an arbitrary regression pair (y_past, y_future) with s = 1.
  // y_full is taken as [y_past, last column of y_future]; it only matches a
  // true Hankel matrix when y_future is the one-column shift of y_past.
  template <typename D1, typename D2>
  static HankelPair from_regression(const Eigen::MatrixBase<D1>& past,
                                    const Eigen::MatrixBase<D2>& future) {
    if (past.rows() != future.rows() || past.cols() != future.cols())
      throw DimensionMismatch("HankelPair: y_past and y_future must have equal shape");
    detail::require_finite(past, "HankelPair");
    detail::require_finite(future, "HankelPair");
    HankelPair h;
    h.m = past.rows();
    h.s = 1;
    h.ell = past.cols();
    h.y_past = past;
    h.y_future = future;
    h.y_full.resize(h.m, h.ell + 1);
    h.y_full << h.y_past, h.y_future.col(h.ell - 1);
    return h;
  }
};

// Stacked window [y_k; y_{k+1}; ...; y_{k+s-1}] with k zero-based.
template <typename Scalar>
Vector<Scalar> stacked_window(const OutputSequence<Scalar>& seq, Index k, Index s) {
  if (s < 1) throw InvalidInput("stacked_window: s must be >= 1");
  if (k < 0 || k + s > seq.size())
    throw InvalidInput("stacked_window: samples " + std::to_string(k) + ".." +
                       std::to_string(k + s - 1) + " out of range for N = " +
                       std::to_string(seq.size()));
  const Index m = seq.dim();
  Vector<Scalar> w(m * s);
  for (Index r = 0; r < s; ++r) w.segment(r * m, m) = seq.sample(k + r);
  return w;
}

template <typename Scalar>
HankelPair<Scalar> hankel_embed(const OutputSequence<Scalar>& seq, Index s) {
  if (s < 1) throw InvalidInput("hankel_embed: delay order s must be >= 1");
  const Index n_samples = seq.size();
  if (n_samples < s + 1)
    throw InsufficientData("hankel_embed: need at least s+1 = " + std::to_string(s + 1) +
                           " samples, got " + std::to_string(n_samples));
  const Index m = seq.dim();
  HankelPair<Scalar> h;
  h.s = s;
  h.m = m;
  h.ell = n_samples - s;
  h.y_full.resize(m * s, h.ell + 1);
  for (Index c = 0; c <= h.ell; ++c)
    for (Index r = 0; r < s; ++r) h.y_full.block(r * m, c, m, 1) = seq.sample(c + r);
  h.y_past = h.y_full.leftCols(h.ell);
  h.y_future = h.y_full.rightCols(h.ell);
  return h;
}

}  // namespace siddmd
