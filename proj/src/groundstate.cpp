#include "bihartree/groundstate.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "bihartree/dynamics.hpp"
#include "bihartree/error.hpp"

namespace bihartree {

GroundStateResult petviashvili(const SpectralCache& cache, const ComplexField& seed,
                               const PetviashviliOptions& options) {
  require_same_grid(cache.g(), seed);
  const double p = cache.params.p;
  if (p < 2.0) throw ParameterError("ground state solver requires p >= 2");
  if (norm(seed) == 0.0) throw ParameterError("seed must be nonzero");
  const double gamma = options.gamma.value_or((2.0 * p - 1.0) / (2.0 * p - 2.0));
  const auto& g = cache.g();

  GroundStateResult res(ComplexField(seed.grid_ptr()));
  ComplexField phi(seed.grid_ptr());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = seed[i].real();

  double prev_residual = std::numeric_limits<double>::infinity();
  int rising = 0;
  for (int it = 0; it <= options.max_iter; ++it) {
    auto K = nonlinearity(phi, cache);
    ComplexField phat_f = phi;
    const auto phat = phat_f.values();
    const auto khat = K.values();
    g.transform_in_place(phat, Direction::forward);
    g.transform_in_place(khat, Direction::forward);

    double num = 0.0, den = 0.0, rnum = 0.0, pnorm = 0.0;
    for (std::size_t i = 0; i < phat.size(); ++i) {
      const double lin = 1.0 + cache.k4[i];
      num += lin * std::norm(phat[i]);
      den += (std::conj(phat[i]) * khat[i]).real();
      rnum += std::norm(lin * phat[i] - khat[i]);
      pnorm += std::norm(phat[i]);
    }
    const double S = num / den;
    const double residual = std::sqrt(rnum / pnorm);
    if (!(S > 0.0) || !std::isfinite(S)) {
      std::ostringstream os;
      os << "stabilization factor S=" << S << " at iteration " << it << "; seed incompatible";
      throw NumericalError(os.str());
    }
    res.S_history.push_back(S);
    res.residual_history.push_back(residual);
    if (residual <= options.tol && std::abs(S - 1.0) <= options.tol) {
      res.phi = phi;
      res.residual = residual;
      res.S_final = S;
      res.iterations = it;
      break;
    }
    rising = residual > prev_residual ? rising + 1 : 0;
    prev_residual = residual;
    if (rising >= options.divergence_window || it == options.max_iter) {
      std::ostringstream os;
      os << (it == options.max_iter ? "no convergence within " : "residual grew for ")
         << (it == options.max_iter ? options.max_iter : options.divergence_window)
         << " iterations; residual trace (last 5):";
      const std::size_t n = res.residual_history.size();
      for (std::size_t k = n > 5 ? n - 5 : 0; k < n; ++k) os << ' ' << res.residual_history[k];
      throw NumericalError(os.str());
    }
    const double scale = std::pow(S, gamma);
    for (std::size_t i = 0; i < khat.size(); ++i) khat[i] *= scale / (1.0 + cache.k4[i]);
    g.transform_in_place(khat, Direction::inverse);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = khat[i].real();
  }

  std::size_t imax = 0;
  for (std::size_t i = 1; i < res.phi.size(); ++i)
    if (std::abs(res.phi[i]) > std::abs(res.phi[imax])) imax = i;
  if (res.phi[imax].real() < 0.0)
    for (auto& z : res.phi.values()) z = -z;

  res.mass = mass(res.phi);
  res.deltaSq = kinetic(res.phi, cache);
  res.energy = energy(res.phi, cache);
  return res;
}

double groundstate_residual(const ComplexField& phi, const SpectralCache& cache) {
  const auto bilap = apply_multiplier(phi, cache.k4);
  const auto K = nonlinearity(phi, cache);
  ComplexField r(phi.grid_ptr());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = phi[i] + bilap[i] - K[i];
  return norm(r) / norm(phi);
}

ThresholdReport thresholds(const ComplexField& u, const GroundStateResult& gs,
                           const CriticalExponents& exps, const SpectralCache& cache) {
  if (!(exps.s_c > 0.0 && exps.s_c < 2.0))
    throw DomainError("thresholds need 0 < s_c < 2 (s_c=" + std::to_string(exps.s_c) + ")");
  if (gs.mass == 0.0 || gs.energy == 0.0 || gs.deltaSq == 0.0)
    throw DomainError("degenerate ground state (zero mass, energy or ‖Δφ‖)");
  const double e = (2.0 - exps.s_c) / exps.s_c;
  const double m = mass(u);
  ThresholdReport rep;
  rep.ME = energy(u, cache) / gs.energy * std::pow(m / gs.mass, e);
  rep.MG = std::sqrt(kinetic(u, cache) / gs.deltaSq) * std::pow(std::sqrt(m / gs.mass), e);
  rep.below = rep.ME < 1.0 && rep.MG < 1.0;
  return rep;
}

}  // namespace bihartree
