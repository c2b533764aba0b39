#pragma once

// System matrices, state estimates, spatiotemporal modes and predictions
// derived from the factored low-rank map Theta* = P Q^T.

#include <complex>
#include <string>
#include <vector>

#include "siddmd/lowrank.hpp"

namespace siddmd {

// x_{k+1} = A x_k, y_k = C x_k. Identified only up to a similarity transform.
template <typename Scalar = double>
struct StateSpaceModel {
  Matrix<Scalar> a;  // n x n
  Matrix<Scalar> c;  // m x n
  Index n = 0;
  Index s = 0;
  Index m = 0;

  StateSpaceModel() = default;
  StateSpaceModel(Matrix<Scalar> a_, Matrix<Scalar> c_, Index s_ = 1)
      : a(std::move(a_)), c(std::move(c_)), n(a.rows()), s(s_), m(c.rows()) {
    if (a.rows() != a.cols()) throw DimensionMismatch("StateSpaceModel: A must be square");
    if (c.cols() != a.rows()) throw DimensionMismatch("StateSpaceModel: C must have n columns");
    if (!a.allFinite() || !c.allFinite()) throw InvalidInput("StateSpaceModel: non-finite entry");
  }
};

// Gamma_s = [C; CA; ...; CA^{s-1}].
template <typename Scalar>
Matrix<Scalar> observability_matrix(const StateSpaceModel<Scalar>& model, Index s) {
  if (s < 1) throw InvalidInput("observability_matrix: s must be >= 1");
  Matrix<Scalar> gamma(model.m * s, model.n);
  Matrix<Scalar> block = model.c;
  for (Index k = 0; k < s; ++k) {
    gamma.middleRows(k * model.m, model.m) = block;
    block = block * model.a;
  }
  return gamma;
}

enum class ExtractionMethod {
  Factored,         // A = Q^T P, C = P[1:m, :]
  ShiftInvariance,  // A = Gamma[1:m(s-1), :]^+ Gamma[m+1:ms, :] with Gamma = P
};

template <typename Scalar>
StateSpaceModel<Scalar> extract_system(const LowRankMap<Scalar>& map,
                                       ExtractionMethod method = ExtractionMethod::Factored) {
  if (map.m < 1 || map.p.rows() != map.m * map.s)
    throw DimensionMismatch("extract_system: map has inconsistent m, s");
  const Matrix<Scalar> c = map.p.topRows(map.m);
  if (method == ExtractionMethod::Factored)
    return StateSpaceModel<Scalar>(map.q.transpose() * map.p, c, map.s);

  if (map.s < 2) throw InvalidInput("extract_system: shift invariance needs s >= 2");
  const Index rows = map.m * (map.s - 1);
  const Matrix<Scalar> upper = map.p.topRows(rows);
  const Matrix<Scalar> lower = map.p.bottomRows(rows);
  if (map.r == 0) return StateSpaceModel<Scalar>(Matrix<Scalar>(0, 0), c, map.s);
  if (matrix_rank(upper) < map.r)
    throw ObservabilityError("extract_system: Gamma[1:m(s-1), :] lacks full column rank");
  return StateSpaceModel<Scalar>(pinv(upper) * lower, c, map.s);
}

// X = Q^T Y_full: column k is the state estimate Q^T y_k.
template <typename Scalar>
Matrix<Scalar> estimate_states(const LowRankMap<Scalar>& map, const HankelPair<Scalar>& h) {
  if (map.q.rows() != h.y_full.rows())
    throw DimensionMismatch("estimate_states: map and Hankel data disagree on ms");
  return map.q.transpose() * h.y_full;
}

template <typename Scalar = double>
struct ModeSet {
  ComplexMatrix<Scalar> spatial;       // Psi = C Phi, m x n
  ComplexVector<Scalar> temporal;      // diag(Lambda)
  ComplexMatrix<Scalar> eigenvectors;  // Phi
  std::vector<EigenKind> pairing;
  Scalar eigenvector_condition = Scalar(1);
  Scalar dt = Scalar(1);

  Index size() const { return temporal.size(); }

  // lambda_k^{t/dt}
  std::complex<Scalar> trend(Index k, Scalar t) const {
    const Scalar e = t / dt;
    const std::complex<Scalar> lambda = temporal(k);
    if (e == Scalar(0)) return {Scalar(1), Scalar(0)};
    if (lambda == std::complex<Scalar>(0)) return {Scalar(0), Scalar(0)};
    return std::pow(lambda, e);
  }

  Index real_count() const {
    Index k = 0;
    for (EigenKind kind : pairing) k += kind == EigenKind::Real;
    return k;
  }
  Index pair_count() const {
    Index k = 0;
    for (EigenKind kind : pairing) k += kind == EigenKind::PairFirst;
    return k;
  }
};

template <typename Scalar>
ModeSet<Scalar> modes(const StateSpaceModel<Scalar>& model, Scalar dt = Scalar(1)) {
  if (!(dt > Scalar(0))) throw InvalidInput("modes: dt must be positive");
  const EigResult<Scalar> e = eig(model.a);
  if (e.defective)
    throw NotDiagonalizable("modes: A is not diagonalizable (eigenvector condition " +
                            std::to_string(static_cast<double>(e.eigenvector_condition)) + ")");
  ModeSet<Scalar> out;
  out.temporal = e.eigenvalues;
  out.eigenvectors = e.eigenvectors;
  out.pairing = e.pairing;
  out.eigenvector_condition = e.eigenvector_condition;
  out.dt = dt;
  out.spatial = model.c.template cast<std::complex<Scalar>>() * e.eigenvectors;
  return out;
}

enum class PredictionMethod { StateSpace, ExtendedAR, Modal };

template <typename Scalar = double>
struct Prediction {
  Index horizon = 0;
  Matrix<Scalar> outputs;  // m x horizon, column t is the step-(t+1) prediction
  PredictionMethod method = PredictionMethod::StateSpace;
};

// Initial state estimate Q^T y_ell for a stacked window y_ell.
template <typename Scalar, typename Derived>
Vector<Scalar> initial_state(const LowRankMap<Scalar>& map, const Eigen::MatrixBase<Derived>& window) {
  if (window.size() != map.q.rows())
    throw DimensionMismatch("initial_state: window must have ms = " +
                            std::to_string(map.q.rows()) + " entries");
  return map.q.transpose() * window;
}

template <typename Scalar, typename Derived>
Prediction<Scalar> predict(const StateSpaceModel<Scalar>& model, const LowRankMap<Scalar>& map,
                           const Eigen::MatrixBase<Derived>& window, Index horizon,
                           PredictionMethod method) {
  if (horizon < 1) throw InvalidInput("predict: horizon must be >= 1");
  if (window.size() != map.p.rows())
    throw DimensionMismatch("predict: window must have ms = " + std::to_string(map.p.rows()) +
                            " entries");
  if (model.m != map.m || model.n != map.r)
    throw DimensionMismatch("predict: model and map disagree on dimensions");

  Prediction<Scalar> out;
  out.horizon = horizon;
  out.method = method;
  out.outputs.resize(model.m, horizon);
  switch (method) {
    case PredictionMethod::ExtendedAR: {
      Vector<Scalar> y = window;
      for (Index t = 0; t < horizon; ++t) {
        y = map.apply(y);
        out.outputs.col(t) = y.head(model.m);
      }
      break;
    }
    case PredictionMethod::StateSpace: {
      Vector<Scalar> x = initial_state(map, window);
      for (Index t = 0; t < horizon; ++t) {
        out.outputs.col(t) = model.c * x;
        x = model.a * x;
      }
      break;
    }
    case PredictionMethod::Modal:
      throw InvalidInput("predict: use predict_modal for the modal form");
  }
  return out;
}

// Limit on cond(Phi) when solving Phi b = x.
inline constexpr double kModalCondition = 1e10;

// y_hat(j) = Psi Lambda^j b_hat with Phi b_hat = x_hat.
template <typename Scalar, typename Derived>
Prediction<Scalar> predict_modal(const ModeSet<Scalar>& set, const Eigen::MatrixBase<Derived>& x_hat,
                                 Index horizon) {
  using Complex = std::complex<Scalar>;
  if (horizon < 1) throw InvalidInput("predict_modal: horizon must be >= 1");
  if (x_hat.size() != set.size()) throw DimensionMismatch("predict_modal: state has wrong size");
  if (!(set.eigenvector_condition <= Scalar(kModalCondition)))
    throw NotDiagonalizable("predict_modal: eigenvector matrix too ill-conditioned");
  ComplexVector<Scalar> b =
      set.eigenvectors.colPivHouseholderQr().solve(x_hat.template cast<Complex>());
  Prediction<Scalar> out;
  out.horizon = horizon;
  out.method = PredictionMethod::Modal;
  out.outputs.resize(set.spatial.rows(), horizon);
  for (Index t = 0; t < horizon; ++t) {
    out.outputs.col(t) = (set.spatial * b).real();
    b = set.temporal.cwiseProduct(b);
  }
  return out;
}

template <typename Scalar = double>
struct IdentifyResult {
  StateSpaceModel<Scalar> model;
  ModeSet<Scalar> modes;
  LowRankMap<Scalar> map;
  Scalar relative_residual = Scalar(0);
};

template <typename Scalar>
Scalar relative_residual(const LowRankMap<Scalar>& map, const HankelPair<Scalar>& h) {
  const Scalar denom = h.y_future.norm();
  return denom > Scalar(0) ? map.residual_frobenius / denom : Scalar(0);
}

// Hankel embedding, rank-constrained regression, system extraction and mode
// decomposition in one pass.
template <typename Scalar>
IdentifyResult<Scalar> identify(const OutputSequence<Scalar>& seq, Index n, Index s) {
  if (n < 1) throw InvalidInput("identify: order n must be >= 1");
  const HankelPair<Scalar> h = hankel_embed(seq, s);
  IdentifyResult<Scalar> out;
  out.map = solve_rank_constrained(h, n);
  out.model = extract_system(out.map);
  out.modes = modes(out.model, seq.dt().value_or(Scalar(1)));
  out.relative_residual = relative_residual(out.map, h);
  return out;
}

}  // namespace siddmd
