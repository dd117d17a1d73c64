#include "bihartree/spectral.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "bihartree/error.hpp"

namespace bihartree {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 30>;

// e(t) = exp(−1/t) and its first two derivatives. Below t = 0.01 all three
// are under 1e−35 and are returned as 0 to avoid inf·0.
struct EDerivs {
  double e = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

EDerivs edecay(double t) {
  if (t <= 0.01) return {};
  const double e = std::exp(-1.0 / t);
  const double t2 = t * t;
  return {e, e / t2, e * (1.0 / (t2 * t2) - 2.0 / (t2 * t))};
}

struct Blended {
  double g = 0.0;
  double dg = 0.0;
  double d2g = 0.0;
};

// R² f(r/R) blended to the constant C = R² f(L/(2R)) across [2R, L/2].
Blended blended_weight(double r, double R, double L) {
  const double half = 0.5 * L;
  const auto inner = virial_profile(r / R);
  const double fr = R * R * inner.f;
  const double dfr = R * inner.df;
  const double d2fr = inner.d2f;
  if (r <= 2.0 * R) return {fr, dfr, d2fr};
  const double C = R * R * virial_profile(half / R).f;
  if (r >= half) return {C, 0.0, 0.0};
  const double width = half - 2.0 * R;
  const double s = (r - 2.0 * R) / width;
  const double T = 1.0 - smooth_step(s);
  const double dT = -smooth_step_d1(s) / width;
  const double d2T = -smooth_step_d2(s) / (width * width);
  return {fr * T + C * (1.0 - T), dfr * T + (fr - C) * dT,
          d2fr * T + 2.0 * dfr * dT + (fr - C) * d2T};
}

RealArray real_part(const ComplexField& u) {
  RealArray out(u.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u[i].real();
  return out;
}

ComplexField complexify(const GridPtr& grid, const RealArray& values) {
  std::vector<cplx> v(values.begin(), values.end());
  return ComplexField(grid, std::move(v));
}

std::array<int, 3> pair_orders(int j, int k) {
  std::array<int, 3> o{0, 0, 0};
  ++o[j];
  ++o[k];
  return o;
}

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double smooth_step_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const auto A = edecay(t);
  const auto B = edecay(1.0 - t);
  const double D = A.e + B.e;
  // d/dt e(1−t) = −e′(1−t)
  const double dD = A.d1 - B.d1;
  return (A.d1 * D - A.e * dD) / (D * D);
}

double smooth_step_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const auto A = edecay(t);
  const auto B = edecay(1.0 - t);
  const double D = A.e + B.e;
  const double dD = A.d1 - B.d1;
  const double d2D = A.d2 + B.d2;
  const double num = A.d1 * D - A.e * dD;
  return (A.d2 * D - A.e * d2D) / (D * D) - 2.0 * dD * num / (D * D * D);
}

double smooth_step_integral(double tau) {
  if (tau <= 0.0) return 0.0;
  if (tau >= 1.0) return 0.5 + (tau - 1.0);
  return Gauss::integrate([](double t) { return smooth_step(t); }, 0.0, tau);
}

double smooth_step_moment(double tau) {
  if (tau <= 0.0) return 0.0;
  const double upto = std::min(tau, 1.0);
  double v = Gauss::integrate([](double t) { return t * smooth_step(t); }, 0.0, upto);
  if (tau > 1.0) v += 0.5 * (tau * tau - 1.0);
  return v;
}

double bump_profile(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  return smooth_step(2.0 * (1.0 - t));
}

RadialProfile virial_profile(double r) {
  if (r <= 1.0) return {0.5 * r * r, r, 1.0};
  if (r <= 2.0) {
    const double tau = r - 1.0;
    const double I = smooth_step_integral(tau);
    const double J = tau * I - smooth_step_moment(tau);
    return {0.5 + 0.5 * (r * r - 1.0) - J, r - I, 1.0 - smooth_step(tau)};
  }
  const auto at2 = virial_profile(2.0);
  return {at2.f + at2.df * (r - 2.0), at2.df, 0.0};
}

RealArray riesz_multiplier(const TorusGrid& grid, double alpha) {
  auto m = wavenumber_squared(grid);
  for (auto& v : m) v = v > 0.0 ? std::pow(v, -0.5 * alpha) : 0.0;
  return m;
}

ComplexField riesz_apply(const ComplexField& g, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("Riesz order alpha must be positive");
  return apply_multiplier(g, riesz_multiplier(g.grid(), alpha));
}

RealArray weight_b(const TorusGrid& grid, double b, double sigma) {
  RealArray w = radius(grid);
  const double eps2 = (sigma * grid.spacing()) * (sigma * grid.spacing());
  for (auto& v : w) v = b == 0.0 ? 1.0 : std::pow(v * v + eps2, 0.5 * b);
  return w;
}

RealArray dealias_mask(const TorusGrid& grid) {
  RealArray m(grid.size(), 1.0);
  const int M = grid.points();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto idx = grid.unravel(i);
    for (int a = 0; a < grid.dim(); ++a)
      if (3 * std::abs(grid.axis_mode(idx[a])) >= M) m[i] = 0.0;
  }
  return m;
}

CutoffResult cutoff_psi(const TorusGrid& grid, double R) {
  if (!(R > 0.0)) throw ParameterError("cutoff radius R must be positive");
  CutoffResult out;
  out.values = radius(grid);
  for (auto& v : out.values) v = bump_profile(v / R);
  out.truncated = R > 0.5 * grid.length();
  return out;
}

VirialBundle virial_weight(const TorusGrid& grid_ref, double R) {
  const double L = grid_ref.length();
  if (!(R > 0.0) || R >= 0.25 * L)
    throw DomainError("virial radius R must satisfy 0 < R < L/4 (R=" + std::to_string(R) +
                      ", L=" + std::to_string(L) + ")");
  // Spectral helpers need shared ownership; a fresh grid of the same shape
  // keeps the caller's reference usable.
  const auto grid = make_grid(grid_ref.dim(), L, grid_ref.points());
  const int d = grid->dim();
  VirialBundle vb;
  vb.R = R;
  vb.d = d;
  vb.a = radius(*grid);
  for (auto& r : vb.a) r = blended_weight(r, R, L).g;

  const auto ahat = transform(complexify(grid, vb.a), Direction::forward);
  const auto k2 = wavenumber_squared(*grid);
  ComplexField lap_hat = ahat;
  for (std::size_t i = 0; i < k2.size(); ++i) lap_hat[i] *= -k2[i];

  vb.grad.resize(d);
  for (int j = 0; j < d; ++j) {
    std::array<int, 3> o{0, 0, 0};
    o[j] = 1;
    vb.grad[j] = real_part(differentiate_spectrum(ahat, o));
  }
  vb.hess.assign(d * d, {});
  vb.hess_lap.assign(d * d, {});
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      vb.hess[j * d + k] = real_part(differentiate_spectrum(ahat, pair_orders(j, k)));
      vb.hess_lap[j * d + k] = real_part(differentiate_spectrum(lap_hat, pair_orders(j, k)));
      if (k != j) {
        vb.hess[k * d + j] = vb.hess[j * d + k];
        vb.hess_lap[k * d + j] = vb.hess_lap[j * d + k];
      }
    }
  auto power = [&](int n) {
    RealArray m(k2.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::pow(-k2[i], n);
    return real_part(multiply_spectrum(ahat, m));
  };
  vb.lap = power(1);
  vb.bilap = power(2);
  vb.trilap = power(3);
  return vb;
}

std::vector<RealArray> virial_hessian_analytic(const TorusGrid& grid, double R) {
  const double L = grid.length();
  if (!(R > 0.0) || R >= 0.25 * L) throw DomainError("virial radius R must satisfy 0 < R < L/4");
  const int d = grid.dim();
  std::vector<RealArray> hess(d * d, RealArray(grid.size()));
  const auto x = grid.axis_coords();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += x[idx[a]] * x[idx[a]];
    const double r = std::sqrt(r2);
    const auto w = blended_weight(r, R, L);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double v;
        if (r == 0.0) {
          v = j == k ? 1.0 : 0.0;
        } else {
          const double xx = x[idx[j]] * x[idx[k]];
          v = ((j == k ? 1.0 / r : 0.0) - xx / (r2 * r)) * w.dg + xx / r2 * w.d2g;
        }
        hess[j * d + k][i] = v;
      }
  }
  return hess;
}

CachePtr make_cache(GridPtr grid, const ModelParams& params, const CacheOptions& options) {
  if (!(params.alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (params.b > 0.0) throw ParameterError("b must be negative (or 0 for the homogeneous case)");
  if (!(params.p > 1.0)) throw ParameterError("p must exceed 1");
  if (!(options.sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (options.R_diag < 0.0) throw ParameterError("R_diag must be nonnegative");
  auto cache = std::make_shared<SpectralCache>();
  const auto& g = *grid;
  cache->params = params;
  cache->options = options;
  cache->k2 = wavenumber_squared(g);
  cache->k4 = cache->k2;
  for (auto& v : cache->k4) v *= v;
  cache->riesz = riesz_multiplier(g, params.alpha);
  cache->mask = options.dealias ? dealias_mask(g) : RealArray(g.size(), 1.0);
  cache->w_b = weight_b(g, params.b, options.sigma);
  if (options.R_diag > 0.0) {
    auto psi = cutoff_psi(g, options.R_diag);
    cache->psiR = std::move(psi.values);
    cache->psi_truncated = psi.truncated;
    if (options.R_diag < 0.25 * g.length())
      cache->virial = std::make_shared<const VirialBundle>(virial_weight(g, options.R_diag));
  }
  cache->grid = std::move(grid);
  return cache;
}

}  // namespace bihartree
