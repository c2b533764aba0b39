#pragma once

// Synthetic data: random observable LTI systems with prescribed spectra,
// forward simulation, and an exactly linear video-like surrogate.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "siddmd/baselines.hpp"

namespace siddmd::datagen {

// A = T blockdiag(spectrum) T^{-1} with cond(T) <= 5; C resampled (up to 100
// times) until Gamma_s has full column rank. s defaults to n.
StateSpaceModel<double> random_observable_system(Index n, Index m,
                                                 std::span<const std::complex<double>> spectrum,
                                                 std::uint64_t seed, Index s = -1);

// Conjugate-closed spectrum with moduli in [min_modulus, max_modulus] and
// pairwise eigenvalue distance at least min_separation.
std::vector<std::complex<double>> random_spectrum(Index n, std::uint64_t seed,
                                                  double min_modulus = 0.6,
                                                  double max_modulus = 1.0,
                                                  double min_separation = 0.1);

// steps samples y_0..y_{steps-1}; x_{k+1} = A x_k + w_k, y_k = C x_k + v_k with
// i.i.d. N(0, noise_std^2) noise.
OutputSequence<double> simulate(const StateSpaceModel<double>& model, const Vector<double>& x0,
                                Index steps, double noise_std, std::uint64_t seed,
                                std::optional<double> dt = std::nullopt);

struct SurrogateParameters {
  double growth;     // real eigenvalue
  double radius;     // modulus of the oscillatory pair
  double frequency;  // argument of the oscillatory pair, radians per frame
};

SurrogateParameters lc_surrogate_parameters(double speed);

// Frames of a boundary-inward brightening field driven by a hidden 3-state
// linear system (one real growth mode, one oscillatory pair). Frames are
// flattened row-major to m = width * height; dt = 1/30 s.
OutputSequence<double> lc_surrogate(Index width, Index height, Index frames, double speed,
                                    std::uint64_t seed);

struct TdmdGapInstance {
  HankelPair<double> h;
  Index n = 0;
  double gap = 0.0;  // objective(truncated DMD) - objective(Theta*)
};

// Seeded search over sequences mixing a large unpredictable component with a
// small predictable one; returns the instance with the largest objective gap
// between truncated DMD and the closed-form optimum.
TdmdGapInstance find_tdmd_gap_instance(int trials, std::uint64_t seed);

}  // namespace siddmd::datagen
