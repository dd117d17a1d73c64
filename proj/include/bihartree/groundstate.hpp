#pragma once

#include <optional>
#include <vector>

#include "bihartree/exponents.hpp"
#include "bihartree/spectral.hpp"

namespace bihartree {

struct GroundStateResult {
  explicit GroundStateResult(ComplexField f) : phi(std::move(f)) {}

  ComplexField phi;
  double mass = 0.0;
  double deltaSq = 0.0;  ///< ‖Δφ‖²
  double energy = 0.0;
  double residual = 0.0;  ///< ‖φ + Δ²φ − K(φ)‖ / ‖φ‖
  double S_final = 0.0;
  int iterations = 0;
  std::vector<double> S_history;
  std::vector<double> residual_history;
};

struct PetviashviliOptions {
  double tol = 1e-8;
  int max_iter = 500;
  /// Defaults to (2p−1)/(2p−2).
  std::optional<double> gamma;
  /// Consecutive residual increases treated as divergence.
  int divergence_window = 20;
};

/// Solves φ + Δ²φ = K(φ), K(φ) = (I_α ∗ w_b|φ|^p) w_b |φ|^{p−2} φ, by
/// spectral renormalization starting from `seed`. The iterate is kept real.
/// The returned φ is sign-aligned so its largest-magnitude sample is
/// positive.
GroundStateResult petviashvili(const SpectralCache& cache, const ComplexField& seed,
                               const PetviashviliOptions& options = {});

/// Relative residual of the stationary equation, evaluated term by term in
/// real space.
double groundstate_residual(const ComplexField& phi, const SpectralCache& cache);

struct ThresholdReport {
  double ME = 0.0;
  double MG = 0.0;
  bool below = false;
};

/// ME = (E[u]/E[φ])(M[u]/M[φ])^{(2−s_c)/s_c},
/// MG = (‖Δu‖/‖Δφ‖)(‖u‖/‖φ‖)^{(2−s_c)/s_c}.
ThresholdReport thresholds(const ComplexField& u, const GroundStateResult& gs,
                           const CriticalExponents& exps, const SpectralCache& cache);

}  // namespace bihartree
