#pragma once

#include <memory>
#include <vector>

#include "bihartree/exponents.hpp"
#include "bihartree/grid.hpp"

namespace bihartree {

/// Smooth step S(t) = e(t)/(e(t)+e(1−t)), e(t) = exp(−1/t) for t > 0.
/// S = 0 for t <= 0 and S = 1 for t >= 1; C^∞ everywhere.
double smooth_step(double t);
double smooth_step_d1(double t);
double smooth_step_d2(double t);

/// ∫_0^τ S(t) dt and ∫_0^τ t S(t) dt for τ in [0, 1].
double smooth_step_integral(double tau);
double smooth_step_moment(double tau);

/// Radial bump ψ: 1 on [0, 1/2], S(2(1−t)) on (1/2, 1), 0 beyond.
double bump_profile(double t);

/// Radial virial profile with f″ = 1 on [0,1], 1 − S(r−1) on [1,2], 0 beyond,
/// integrated with f(0) = f′(0) = 0. Slope tends to 3/2.
struct RadialProfile {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};
RadialProfile virial_profile(double r);

/// |k|^{−α} in spectral layout with the zero mode set to 0.
RealArray riesz_multiplier(const TorusGrid& grid, double alpha);

/// I_α g as the multiplier |k|^{−α}. Throws ParameterError for α <= 0.
ComplexField riesz_apply(const ComplexField& g, double alpha);

/// (|x|² + (σh)²)^{b/2}. b = 0 gives the constant 1.
RealArray weight_b(const TorusGrid& grid, double b, double sigma);

/// 2/3-rule mask: 1 where 3|m| < M on every axis, 0 elsewhere.
RealArray dealias_mask(const TorusGrid& grid);

struct CutoffResult {
  RealArray values;
  /// R exceeds the inscribed half box, so periodicity clips the support.
  bool truncated = false;
};

/// ψ_R(x) = ψ(|x|/R).
CutoffResult cutoff_psi(const TorusGrid& grid, double R);

/// Virial weight a and its derivative tensors on the grid. Tensor arrays
/// are indexed j*d + k.
///
/// The radial weight R² f(|x|/R) is blended to its value at |x| = L/2 over
/// the shell [2R, L/2] so the sampled function is smooth and periodic. All
/// derivatives are spectral derivatives of those samples.
struct VirialBundle {
  double R = 0.0;
  int d = 0;
  RealArray a;
  std::vector<RealArray> grad;      ///< ∂_j a
  std::vector<RealArray> hess;      ///< ∂_jk a
  RealArray lap;                    ///< Δa
  RealArray bilap;                  ///< Δ²a
  RealArray trilap;                 ///< Δ³a
  std::vector<RealArray> hess_lap;  ///< ∂_jk Δa
};

/// Throws DomainError unless 0 < R < L/4.
VirialBundle virial_weight(const TorusGrid& grid, double R);

/// Closed-form ∂_jk a from the radial derivatives of the blended weight,
/// (δ_jk/r − x_j x_k/r³) g′ + (x_j x_k/r²) g″, for cross-checking.
std::vector<RealArray> virial_hessian_analytic(const TorusGrid& grid, double R);

struct CacheOptions {
  double sigma = 0.5;
  bool dealias = true;
  /// +1 for the focusing equation, −1 for the defocusing sign.
  double coupling = 1.0;
  /// Radius for ψ_R and the virial bundle; 0 skips both. The virial bundle
  /// is built only when R_diag < L/4.
  double R_diag = 0.0;
};

/// Precomputed multipliers and weights for one grid and parameter tuple.
/// Immutable after construction.
struct SpectralCache {
  GridPtr grid;
  ModelParams params;
  CacheOptions options;
  RealArray k2;
  RealArray k4;
  RealArray riesz;
  RealArray mask;  ///< dealias mask, all ones when dealiasing is off
  RealArray w_b;
  RealArray psiR;  ///< empty when R_diag = 0
  bool psi_truncated = false;
  std::shared_ptr<const VirialBundle> virial;

  const TorusGrid& g() const { return *grid; }
};

using CachePtr = std::shared_ptr<const SpectralCache>;

/// Checks alpha > 0, b <= 0, p > 1, sigma > 0 and builds the cache.
CachePtr make_cache(GridPtr grid, const ModelParams& params, const CacheOptions& options = {});

}  // namespace bihartree
