#include "bihartree/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "bihartree/dynamics.hpp"
#include "bihartree/error.hpp"

namespace bihartree {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::array<int, 3> unit(int j) {
  std::array<int, 3> o{0, 0, 0};
  o[j] = 1;
  return o;
}

std::vector<ComplexField> gradient(const ComplexField& uhat) {
  std::vector<ComplexField> out;
  for (int j = 0; j < uhat.grid().dim(); ++j) out.push_back(differentiate_spectrum(uhat, unit(j)));
  return out;
}

// Least-squares slope and intercept of y against x.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

}  // namespace

double h2_norm(const ComplexField& u, const SpectralCache& cache) {
  return std::sqrt(mass(u) + kinetic(u, cache));
}

double morawetz_action(const ComplexField& u, const VirialBundle& vb) {
  if (vb.a.size() != u.size() || vb.d != u.grid().dim())
    throw ParameterError("virial bundle does not match the field's grid");
  const auto grad = gradient(transform(u, Direction::forward));
  double acc = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x)
    for (int j = 0; j < vb.d; ++j) acc += vb.grad[j][x] * (grad[j][x] * std::conj(u[x])).imag();
  return 2.0 * acc * u.grid().cell_volume();
}

double MorawetzTerms::sum() const { return std::accumulate(term.begin(), term.end(), 0.0); }

MorawetzTerms morawetz_rhs(const ComplexField& u, const SpectralCache& cache, const VirialBundle& vb) {
  require_same_grid(cache.g(), u);
  if (vb.a.size() != u.size() || vb.d != u.grid().dim())
    throw ParameterError("virial bundle does not match the field's grid");
  const int d = vb.d;
  const double p = cache.params.p;
  const auto uhat = transform(u, Direction::forward);
  const auto D1 = gradient(uhat);
  std::vector<std::optional<ComplexField>> D2(d * d);
  for (int i = 0; i < d; ++i)
    for (int k = i; k < d; ++k) {
      auto o = unit(i);
      ++o[k];
      D2[i * d + k] = differentiate_spectrum(uhat, o);
      if (k != i) D2[k * d + i] = D2[i * d + k];
    }

  const auto V = hartree_potential(u, cache);
  ComplexField Q(u.grid_ptr());
  for (std::size_t x = 0; x < u.size(); ++x) Q[x] = cache.options.coupling * cache.w_b[x] * V[x];
  const auto dQ = gradient(transform(Q, Direction::forward));

  MorawetzTerms out;
  auto& t = out.term;
  double total = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x) {
    double s1 = 0.0, s3 = 0.0, grad2 = 0.0, s6 = 0.0;
    for (int j = 0; j < d; ++j) {
      grad2 += std::norm(D1[j][x]);
      s6 += vb.grad[j][x] * dQ[j][x].real();
      for (int k = 0; k < d; ++k) {
        s1 += vb.hess_lap[j * d + k][x] * (D1[j][x] * std::conj(D1[k][x])).real();
        double inner = 0.0;
        for (int i = 0; i < d; ++i)
          inner += ((*D2[i * d + k])[x] * std::conj((*D2[i * d + j])[x])).real();
        s3 += vb.hess[j * d + k][x] * inner;
      }
    }
    const double up = std::pow(std::abs(u[x]), p);
    const double v1 = 4.0 * s1;
    const double v2 = -vb.trilap[x] * std::norm(u[x]);
    const double v3 = -8.0 * s3;
    const double v4 = 2.0 * vb.bilap[x] * grad2;
    const double v5 = 2.0 * (1.0 - 2.0 / p) * vb.lap[x] * Q[x].real() * up;
    const double v6 = -(4.0 / p) * s6 * up;
    t[0] += v1;
    t[1] += v2;
    t[2] += v3;
    t[3] += v4;
    t[4] += v5;
    t[5] += v6;
    total += v1 + v2 + v3 + v4 + v5 + v6;
  }
  const double h = u.grid().cell_volume();
  for (auto& v : t) v *= h;
  out.total = total * h;
  return out;
}

double local_mass(const ComplexField& u, double R, LocalMassMode mode) {
  const auto r = radius(u.grid());
  double acc = 0.0;
  if (mode == LocalMassMode::sharp) {
    for (std::size_t x = 0; x < u.size(); ++x)
      if (r[x] < R) acc += std::norm(u[x]);
  } else {
    for (std::size_t x = 0; x < u.size(); ++x) acc += bump_profile(r[x] / R) * std::norm(u[x]);
  }
  return acc * u.grid().cell_volume();
}

double local_lebesgue_norm(const ComplexField& u, double R, double rexp) {
  const auto r = radius(u.grid());
  double acc = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x)
    if (r[x] < R) acc += std::pow(std::abs(u[x]), rexp);
  return std::pow(acc * u.grid().cell_volume(), 1.0 / rexp);
}

SpacetimeReport spacetime_accumulate(const std::vector<double>& times, const std::vector<double>& norms,
                                     double p, double b) {
  if (times.size() != norms.size()) throw ParameterError("times and norms differ in length");
  SpacetimeReport rep;
  rep.envelope_exponent = 1.0 / (1.0 - b);
  double acc = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0)
      acc += 0.5 * (times[i] - times[i - 1]) *
             (std::pow(norms[i - 1], 2.0 * p) + std::pow(norms[i], 2.0 * p));
    rep.running.push_back(acc);
  }
  std::vector<double> lx, ly;
  double resid = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] > 0.0 && rep.running[i] > 0.0) {
      lx.push_back(std::log(times[i]));
      ly.push_back(std::log(rep.running[i]));
      resid += ly.back() - rep.envelope_exponent * lx.back();
    }
  if (lx.size() >= 2) {
    const auto [slope, icpt] = line_fit(lx, ly);
    rep.slope = slope;
    rep.C_free = std::exp(icpt);
  }
  if (!lx.empty()) rep.C_envelope = std::exp(resid / static_cast<double>(lx.size()));
  return rep;
}

EvacuationReport evacuation_scan(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw ParameterError("times and values differ in length");
  if (values.size() < 3) throw ParameterError("evacuation scan needs at least three samples");
  EvacuationReport rep;
  const std::size_t n = values.size();
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (values[i] < values[i - 1] && values[i] < values[i + 1]) {
      rep.minima_times.push_back(times[i]);
      rep.minima_values.push_back(values[i]);
    }
  if (values[n - 1] < values[n - 2]) {
    rep.minima_times.push_back(times[n - 1]);
    rep.minima_values.push_back(values[n - 1]);
  }
  std::vector<double> logs;
  if (rep.minima_values.size() >= 2) {
    for (double v : rep.minima_values) logs.push_back(std::log(std::max(v, 1e-300)));
    rep.slope = line_fit(rep.minima_times, logs).first;
  } else {
    double run = values[0];
    for (double v : values) {
      run = std::min(run, v);
      logs.push_back(std::log(std::max(run, 1e-300)));
    }
    rep.slope = line_fit(times, logs).first;
  }
  return rep;
}

CoercivityResult coercivity_check(const ComplexField& u, double R, const CriticalExponents& exps,
                                  const SpectralCache& cache) {
  if (!std::isfinite(exps.B)) throw DomainError("coercivity needs a finite B");
  const auto psi = cutoff_psi(u.grid(), R);
  ComplexField v(u.grid_ptr());
  for (std::size_t x = 0; x < u.size(); ++x) v[x] = psi.values[x] * u[x];
  const double p = cache.params.p;
  CoercivityResult res;
  res.lhs = kinetic(v, cache) - exps.B / (2.0 * p) * potential_term(v, cache);
  double acc = 0.0;
  for (const auto& z : v.values()) acc += std::pow(std::abs(z), exps.r_star);
  const double nrm = std::pow(acc * u.grid().cell_volume(), 1.0 / exps.r_star);
  res.rhs_norm = std::pow(nrm, 2.0 * p);
  if (res.rhs_norm > 0.0) res.ratio = res.lhs / res.rhs_norm;
  return res;
}

std::string to_string(ScatterVerdict v) {
  switch (v) {
    case ScatterVerdict::scattering_consistent:
      return "scattering-consistent";
    case ScatterVerdict::non_scattering_trend:
      return "non-scattering-trend";
    default:
      return "inconclusive";
  }
}

ScatterReport scatter_detect(const std::vector<double>& times, const std::vector<ComplexField>& states,
                             const SpectralCache& cache, const ScatterOptions& options) {
  if (times.size() != states.size()) throw ParameterError("times and states differ in length");
  if (states.size() < 3) throw ParameterError("scatter detection needs at least three stored states");
  const std::size_t n = states.size();
  std::vector<ComplexField> pull;
  for (std::size_t i = 0; i < n; ++i) pull.push_back(linear_propagator(states[i], -times[i], cache));

  auto distance = [&](const ComplexField& a, const ComplexField& b) {
    ComplexField diff = a;
    for (std::size_t x = 0; x < diff.size(); ++x) diff[x] -= b[x];
    return h2_norm(diff, cache);
  };

  ScatterReport rep(pull.back());
  rep.sample_times = times;
  rep.pullbacks_cauchy.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      rep.pullbacks_cauchy[i][j] = rep.pullbacks_cauchy[j][i] = distance(pull[i], pull[j]);
  for (std::size_t i = 0; i + 1 < n; ++i) rep.consecutive.push_back(rep.pullbacks_cauchy[i][i + 1]);
  for (std::size_t i = 0; i < n; ++i)
    rep.residuals.push_back(distance(states[i], linear_propagator(rep.u_plus, times[i], cache)));
  rep.final_residual = rep.residuals.back();

  const double scale = h2_norm(states.front(), cache);
  rep.threshold = options.threshold.value_or(1e-3 * scale);
  // Differences below this are rounding, not a trend.
  const double floor = 1e-10 * scale;
  const std::size_t m = rep.consecutive.size();
  const std::size_t first = m > static_cast<std::size_t>(options.tail) ? m - options.tail : 0;
  bool non_increasing = true;
  bool increasing = m - first >= 2;
  for (std::size_t i = first + 1; i < m; ++i) {
    if (rep.consecutive[i] > rep.consecutive[i - 1] + floor) non_increasing = false;
    if (!(rep.consecutive[i] > rep.consecutive[i - 1] + floor)) increasing = false;
  }
  if (rep.consecutive.back() < rep.threshold && non_increasing)
    rep.verdict = ScatterVerdict::scattering_consistent;
  else if (increasing)
    rep.verdict = ScatterVerdict::non_scattering_trend;
  else
    rep.verdict = ScatterVerdict::inconclusive;
  return rep;
}

CriticalExponents simulation_exponents(const SpectralCache& cache) {
  ModelParams sim = cache.params;
  sim.N = cache.g().dim();
  return compute_exponents(sim);
}

DiagnosticsTracker::DiagnosticsTracker(CachePtr cache, std::optional<GroundStateResult> gs)
    : cache_(std::move(cache)), gs_(std::move(gs)), exps_(simulation_exponents(*cache_)) {
  R_ = cache_->options.R_diag > 0.0 ? cache_->options.R_diag : cache_->g().length() / 8.0;
}

DiagnosticsSample DiagnosticsTracker::observe(double t, const ComplexField& u) {
  const auto& c = *cache_;
  DiagnosticsSample s;
  s.t = t;
  s.mass = mass(u);
  s.energy = energy(u, c);
  s.ME = s.MG = kNaN;
  if (gs_ && exps_.s_c > 0.0 && exps_.s_c < 2.0) {
    const auto th = thresholds(u, *gs_, exps_, c);
    s.ME = th.ME;
    s.MG = th.MG;
  }
  s.M_R = s.rhs_R = kNaN;
  if (c.virial) {
    s.M_R = morawetz_action(u, *c.virial);
    s.rhs_R = morawetz_rhs(u, c, *c.virial).total;
  }
  s.local_mass = local_mass(u, R_);
  const bool have_r = std::isfinite(exps_.r_star) && exps_.r_star >= 1.0;
  s.lrstar_local = have_r ? local_lebesgue_norm(u, R_, exps_.r_star) : kNaN;
  const double integrand = have_r ? std::pow(s.lrstar_local, 2.0 * c.params.p) : kNaN;
  s.spacetime_acc = 0.0;
  if (!samples_.empty())
    s.spacetime_acc = samples_.back().spacetime_acc + 0.5 * (t - samples_.back().t) * (last_integrand_ + integrand);
  last_integrand_ = integrand;

  auto pull = linear_propagator(u, -t, c);
  s.cauchy_h2 = 0.0;
  if (last_pullback_) {
    ComplexField diff = pull;
    for (std::size_t x = 0; x < diff.size(); ++x) diff[x] -= (*last_pullback_)[x];
    s.cauchy_h2 = h2_norm(diff, c);
  }
  last_pullback_ = std::move(pull);
  samples_.push_back(s);
  return s;
}

}  // namespace bihartree
