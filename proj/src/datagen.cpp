#include "siddmd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace siddmd::datagen {
namespace {

Matrix<double> gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<double> out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

Matrix<double> random_orthogonal(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix<double>> qr(gaussian(n, n, rng));
  return qr.householderQ() * Matrix<double>::Identity(n, n);
}

// Real block-diagonal matrix with the given conjugate-closed spectrum.
Matrix<double> real_block_diagonal(std::span<const std::complex<double>> spectrum) {
  const Index n = static_cast<Index>(spectrum.size());
  std::vector<bool> used(spectrum.size(), false);
  Matrix<double> d = Matrix<double>::Zero(n, n);
  Index k = 0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (used[i]) continue;
    const auto lambda = spectrum[i];
    used[i] = true;
    if (lambda.imag() == 0.0) {
      d(k, k) = lambda.real();
      ++k;
      continue;
    }
    std::size_t partner = spectrum.size();
    for (std::size_t j = i + 1; j < spectrum.size(); ++j) {
      if (!used[j] && std::abs(spectrum[j] - std::conj(lambda)) <= 1e-12 * (1 + std::abs(lambda))) {
        partner = j;
        break;
      }
    }
    if (partner == spectrum.size())
      throw InvalidInput("random_observable_system: spectrum is not closed under conjugation");
    used[partner] = true;
    const double a = lambda.real();
    const double b = std::abs(lambda.imag());
    d(k, k) = a;
    d(k, k + 1) = -b;
    d(k + 1, k) = b;
    d(k + 1, k + 1) = a;
    k += 2;
  }
  return d;
}

}  // namespace

StateSpaceModel<double> random_observable_system(Index n, Index m,
                                                 std::span<const std::complex<double>> spectrum,
                                                 std::uint64_t seed, Index s) {
  if (n < 1 || m < 1) throw InvalidInput("random_observable_system: need n >= 1 and m >= 1");
  if (static_cast<Index>(spectrum.size()) != n)
    throw InvalidInput("random_observable_system: spectrum must have n entries");
  if (s < 0) s = n;
  if (m * s < n)
    throw ObservabilityError("random_observable_system: m*s = " + std::to_string(m * s) +
                             " < n = " + std::to_string(n));

  std::mt19937_64 rng(seed);
  const Matrix<double> d = real_block_diagonal(spectrum);
  std::uniform_real_distribution<double> scale(1.0, 5.0);
  Vector<double> sv(n);
  for (Index i = 0; i < n; ++i) sv(i) = scale(rng);
  const Matrix<double> t = random_orthogonal(n, rng) * sv.asDiagonal() *
                           random_orthogonal(n, rng).transpose();
  const Matrix<double> a = t * d * t.inverse();

  for (int attempt = 0; attempt < 100; ++attempt) {
    StateSpaceModel<double> model(a, gaussian(m, n, rng), s);
    const Vector<double> g = svd_econ(observability_matrix(model, s)).s;
    if (g(n - 1) > 1e-6 * g(0)) return model;
  }
  throw ObservabilityError("random_observable_system: no observable C found in 100 attempts");
}

std::vector<std::complex<double>> random_spectrum(Index n, std::uint64_t seed, double min_modulus,
                                                  double max_modulus, double min_separation) {
  if (n < 1) throw InvalidInput("random_spectrum: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> modulus(min_modulus, max_modulus);
  std::uniform_real_distribution<double> angle(0.2, std::numbers::pi - 0.2);
  std::bernoulli_distribution flip(0.5);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::complex<double>> out;
    std::uniform_int_distribution<Index> pairs_dist(0, n / 2);
    const Index pairs = pairs_dist(rng);
    for (Index p = 0; p < pairs; ++p) {
      const auto z = std::polar(modulus(rng), angle(rng));
      out.push_back(z);
      out.push_back(std::conj(z));
    }
    while (static_cast<Index>(out.size()) < n) out.emplace_back(modulus(rng) * (flip(rng) ? -1 : 1));
    bool separated = true;
    for (std::size_t i = 0; i < out.size() && separated; ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j)
        if (std::abs(out[i] - out[j]) < min_separation) {
          separated = false;
          break;
        }
    if (separated) return out;
  }
  throw InvalidInput("random_spectrum: could not satisfy the separation constraint");
}

OutputSequence<double> simulate(const StateSpaceModel<double>& model, const Vector<double>& x0,
                                Index steps, double noise_std, std::uint64_t seed,
                                std::optional<double> dt) {
  if (steps < 1) throw InvalidInput("simulate: steps must be >= 1");
  if (x0.size() != model.n) throw DimensionMismatch("simulate: x0 must have n entries");
  if (!(noise_std >= 0.0)) throw InvalidInput("simulate: noise_std must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto noise = [&](Index size) {
    Vector<double> v(size);
    for (Index i = 0; i < size; ++i) v(i) = noise_std > 0.0 ? noise_std * normal(rng) : 0.0;
    return v;
  };
  Matrix<double> y(model.m, steps);
  Vector<double> x = x0;
  for (Index k = 0; k < steps; ++k) {
    y.col(k) = model.c * x + noise(model.m);
    x = model.a * x + noise(model.n);
  }
  return OutputSequence<double>(std::move(y), dt);
}

SurrogateParameters lc_surrogate_parameters(double speed) {
  if (!(speed > 0.0)) throw InvalidInput("lc_surrogate: speed must be positive");
  return {1.0 + 0.04 * speed, 0.98, 0.15 * speed};
}

OutputSequence<double> lc_surrogate(Index width, Index height, Index frames, double speed,
                                    std::uint64_t seed) {
  if (width < 2 || height < 2) throw InvalidInput("lc_surrogate: width and height must be >= 2");
  if (frames < 2) throw InvalidInput("lc_surrogate: need at least 2 frames");
  const SurrogateParameters par = lc_surrogate_parameters(speed);

  // Spatial patterns indexed by normalized distance to the nearest boundary.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index m = width * height;
  const double half = 0.5 * static_cast<double>(std::min(width, height));
  Matrix<double> c(m, 3);
  for (Index row = 0; row < height; ++row) {
    for (Index col = 0; col < width; ++col) {
      const double edge = static_cast<double>(std::min({row, col, height - 1 - row, width - 1 - col}));
      const double d = edge / half;
      const double g = std::exp(-3.0 * d);
      const double phase = 4.0 * std::numbers::pi * d;
      const Index idx = row * width + col;
      c(idx, 0) = g * (1.0 + 0.05 * normal(rng));
      c(idx, 1) = g * std::cos(phase) * (1.0 + 0.05 * normal(rng));
      c(idx, 2) = g * std::sin(phase) * (1.0 + 0.05 * normal(rng));
    }
  }

  Matrix<double> a = Matrix<double>::Zero(3, 3);
  a(0, 0) = par.growth;
  a(1, 1) = a(2, 2) = par.radius * std::cos(par.frequency);
  a(1, 2) = -par.radius * std::sin(par.frequency);
  a(2, 1) = par.radius * std::sin(par.frequency);
  const StateSpaceModel<double> model(a, c, 1);

  Vector<double> x0(3);
  x0 << 0.04, 0.02, 0.0;
  return simulate(model, x0, frames, 0.0, seed, 1.0 / 30.0);
}

TdmdGapInstance find_tdmd_gap_instance(int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("find_tdmd_gap_instance: trials must be >= 1");
  TdmdGapInstance best;
  best.gap = -1.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index steps = 30;
    const double theta = 0.3 + 0.05 * trial;
    Matrix<double> y(2, steps);
    for (Index k = 0; k < steps; ++k) {
      y(0, k) = 5.0 * normal(rng);
      y(1, k) = 0.5 * std::cos(theta * static_cast<double>(k));
    }
    HankelPair<double> h = hankel_embed(OutputSequence<double>(y), 2);
    const Index n = 2;
    const double optimum = solve_rank_constrained(h, n).residual_frobenius;
    const double gap = truncated_dmd(h, n).objective(h) - optimum;
    if (gap > best.gap) {
      best.h = std::move(h);
      best.n = n;
      best.gap = gap;
    }
  }
  return best;
}

}  // namespace siddmd::datagen
