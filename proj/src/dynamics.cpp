#include "bihartree/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bihartree {

namespace {

std::vector<cplx> propagator_phase(const SpectralCache& cache, double tau) {
  std::vector<cplx> ph(cache.k4.size());
  for (std::size_t i = 0; i < ph.size(); ++i) ph[i] = std::polar(1.0, tau * cache.k4[i]);
  return ph;
}

void apply_phase_spectrum(ComplexField& u, const std::vector<cplx>& phase) {
  const auto& g = u.grid();
  auto v = u.values();
  g.transform_in_place(v, Direction::forward);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= phase[i];
  g.transform_in_place(v, Direction::inverse);
}

// u ← u·exp(−iτ·coupling·V·w_b·|u|^{p−2}); |u| is invariant so V is exact.
void nonlinear_phase(ComplexField& u, double tau, const SpectralCache& cache) {
  const auto V = hartree_potential(u, cache);
  const double p = cache.params.p;
  const double c = cache.options.coupling;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double amp = std::exp((p - 2.0) * std::log(std::max(std::abs(u[i]), 1e-300)));
    u[i] *= std::polar(1.0, -tau * c * V[i] * cache.w_b[i] * amp);
  }
}

void strang_with(ComplexField& u, double dt, const SpectralCache& cache, bool nonlinear,
                 const std::vector<cplx>& phase) {
  if (nonlinear) nonlinear_phase(u, 0.5 * dt, cache);
  apply_phase_spectrum(u, phase);
  if (nonlinear) nonlinear_phase(u, 0.5 * dt, cache);
}

}  // namespace

cplx power_nonlinearity(cplx u, double p) {
  return u * std::exp((p - 2.0) * std::log(std::max(std::abs(u), 1e-300)));
}

RealArray hartree_potential(const ComplexField& u, const SpectralCache& cache) {
  require_same_grid(cache.g(), u);
  const double p = cache.params.p;
  ComplexField rho(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) rho[i] = cache.w_b[i] * std::pow(std::abs(u[i]), p);
  auto v = rho.values();
  const auto& g = u.grid();
  g.transform_in_place(v, Direction::forward);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= cache.riesz[i] * cache.mask[i];
  g.transform_in_place(v, Direction::inverse);
  RealArray V(u.size());
  for (std::size_t i = 0; i < V.size(); ++i) V[i] = v[i].real();
  return V;
}

ComplexField nonlinearity(const ComplexField& u, const SpectralCache& cache) {
  const auto V = hartree_potential(u, cache);
  ComplexField out(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = V[i] * cache.w_b[i] * power_nonlinearity(u[i], cache.params.p);
  return out;
}

ComplexField linear_propagator(const ComplexField& u, double tau, const SpectralCache& cache) {
  require_same_grid(cache.g(), u);
  ComplexField out = u;
  apply_phase_spectrum(out, propagator_phase(cache, tau));
  return out;
}

void strang_step(ComplexField& u, double dt, const SpectralCache& cache, bool nonlinear) {
  require_same_grid(cache.g(), u);
  strang_with(u, dt, cache, nonlinear, propagator_phase(cache, dt));
}

double mass(const ComplexField& u) { return norm_squared(u); }

double kinetic(const ComplexField& u, const SpectralCache& cache) {
  require_same_grid(cache.g(), u);
  const auto uhat = transform(u, Direction::forward);
  double acc = 0.0;
  for (std::size_t i = 0; i < uhat.size(); ++i) acc += cache.k4[i] * std::norm(uhat[i]);
  return acc * u.grid().cell_volume();
}

double potential_term(const ComplexField& u, const SpectralCache& cache) {
  const auto V = hartree_potential(u, cache);
  const double p = cache.params.p;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += V[i] * cache.w_b[i] * std::pow(std::abs(u[i]), p);
  return acc * u.grid().cell_volume();
}

double energy(const ComplexField& u, const SpectralCache& cache) {
  return kinetic(u, cache) - cache.options.coupling / cache.params.p * potential_term(u, cache);
}

long step_count(const EvolveConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ParameterError("dt must be positive");
  if (!(cfg.T >= 0.0)) throw ParameterError("T must be nonnegative");
  if (cfg.cadence < 1) throw ParameterError("cadence must be >= 1");
  const double ratio = cfg.T / cfg.dt;
  const long n = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw ParameterError("T must be a whole number of steps dt");
  return n;
}

EvolveResult evolve(const ComplexField& u0, const EvolveConfig& cfg, const SpectralCache& cache,
                    const Observer& observer) {
  require_same_grid(cache.g(), u0);
  if (cfg.nonlinear && cache.params.p < 2.0) throw ParameterError("time stepping requires p >= 2");
  const long steps = step_count(cfg);
  const auto phase = propagator_phase(cache, cfg.dt);
  EvolveResult res{u0, cfg.start_step * cfg.dt, cfg.start_step};
  if (observer) observer(res.last_step, res.t, res.state);
  ComplexField prev = u0;
  for (long n = 1; n <= steps; ++n) {
    prev.data() = res.state.data();
    strang_with(res.state, cfg.dt, cache, cfg.nonlinear, phase);
    const long global = cfg.start_step + n;
    if (!res.state.is_finite())
      throw BlowUpError("non-finite state at step " + std::to_string(global) + " (t=" +
                            std::to_string(global * cfg.dt) + ")",
                        prev, global - 1, (global - 1) * cfg.dt);
    res.last_step = global;
    res.t = global * cfg.dt;
    if (observer && (global % cfg.cadence == 0 || n == steps)) observer(global, res.t, res.state);
  }
  return res;
}

}  // namespace bihartree
