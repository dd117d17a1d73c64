#pragma once

#include <cstddef>
#include <functional>

#include "bihartree/error.hpp"
#include "bihartree/spectral.hpp"

namespace bihartree {

/// |u|^{p−2} u with |u| floored at 1e−300 inside the logarithm.
cplx power_nonlinearity(cplx u, double p);

/// V = I_α(w_b |u|^p), real part. The 2/3 mask is applied to the density
/// spectrum when the cache enables dealiasing.
RealArray hartree_potential(const ComplexField& u, const SpectralCache& cache);

/// 𝒩(u) = V w_b |u|^{p−2} u (sign coupling not included).
ComplexField nonlinearity(const ComplexField& u, const SpectralCache& cache);

/// e^{iτΔ²} u, the multiplier e^{iτ|k|⁴}.
ComplexField linear_propagator(const ComplexField& u, double tau, const SpectralCache& cache);

/// One Strang step of u_t = iΔ²u − i·coupling·𝒩(u): half nonlinear phase,
/// full linear flow, half nonlinear phase. `nonlinear = false` keeps only
/// the linear flow.
void strang_step(ComplexField& u, double dt, const SpectralCache& cache, bool nonlinear = true);

double mass(const ComplexField& u);
/// ‖Δu‖².
double kinetic(const ComplexField& u, const SpectralCache& cache);
/// ∫ V w_b |u|^p.
double potential_term(const ComplexField& u, const SpectralCache& cache);
/// ‖Δu‖² − (coupling/p) ∫ V w_b |u|^p.
double energy(const ComplexField& u, const SpectralCache& cache);

struct EvolveConfig {
  double dt = 1e-3;
  double T = 1.0;
  int cadence = 10;
  bool nonlinear = true;
  /// Global index of the first step; times are (start_step + n)·dt so a
  /// resumed run lands on the same time grid.
  long start_step = 0;
};

/// Validates dt > 0, T >= 0, cadence >= 1 and that T is a whole number of
/// steps. Returns the step count.
long step_count(const EvolveConfig& cfg);

/// Called at the first step, every `cadence` global steps and at the final
/// step with the global step index, its time and the current state.
using Observer = std::function<void(long step, double t, const ComplexField& u)>;

struct EvolveResult {
  ComplexField state;
  double t = 0.0;
  long last_step = 0;
};

/// State went non-finite. Carries the last finite state.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, ComplexField last_good, long step, double t)
      : NumericalError(what), last_good_(std::move(last_good)), step_(step), t_(t) {}
  const ComplexField& last_good() const { return last_good_; }
  long step() const { return step_; }
  double time() const { return t_; }

 private:
  ComplexField last_good_;
  long step_;
  double t_;
};

EvolveResult evolve(const ComplexField& u0, const EvolveConfig& cfg, const SpectralCache& cache,
                    const Observer& observer = {});

}  // namespace bihartree
