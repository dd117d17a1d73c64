// Desk-scale acceptance run: one PASS/FAIL line per criterion.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "bihartree/checkpoint.hpp"
#include "bihartree/config.hpp"
#include "bihartree/diagnostics.hpp"
#include "bihartree/dynamics.hpp"
#include "bihartree/exponents.hpp"
#include "bihartree/groundstate.hpp"
#include "bihartree/runner.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace bihartree;
namespace fs = std::filesystem;

namespace {

// Sub-threshold fixture values from the first validated run, enforced within 10%.
constexpr double kPinnedEvacRatio = 0.0883;
constexpr double kPinnedSpacetimeSlope = 0.0786;
constexpr double kPinTolerance = 0.10;

const char* kFixtureParams = "N = 3\nalpha = 2\nb = -1\np = 2.5\n";

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int n, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s [%s]\n", pass ? "PASS" : "FAIL", n, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

void info(const std::string& msg) {
  std::printf("     info: %s\n", msg.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bihartree_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig config(const std::string& body, const fs::path& out = {}) {
  auto cfg = parse_config(std::string(kFixtureParams) + body, "<acceptance>");
  if (!out.empty()) apply_overrides(cfg, {"output.dir=" + out.string()});
  validate_config(cfg, ConfigScope::run);
  return cfg;
}

double rel_l2(const ComplexField& a, const ComplexField& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

void criterion1() {
  Timer clock;
  gen::Source src(2024);
  double sc_lo = 0, sc_hi = 0, xres = 0, ident = 0;
  int fn1 = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = src.params(true);
    validate(m);
    const auto e = compute_exponents(m);
    auto at = m;
    at.p = e.p_star;
    sc_lo = std::max(sc_lo, std::abs(compute_exponents(at).s_c));
    at.p = e.p_upper;
    sc_hi = std::max(sc_hi, std::abs(compute_exponents(at).s_c - 2.0));
    const double c = scaling_sum(m) / (m.N - 4.0);
    const double x = x_alpha(m);
    xres = std::max(xres, std::abs((x - 1.0) * (2.0 * x - 1.0) - c) / std::max(1.0, c));
    const double theta = src.uniform(1e-6, 2.0 * m.p - 1.0 - 1e-6);
    try {
      const auto f = fn1_exponents(m, e, theta);
      ident = std::max(ident, std::abs(f.identity_residual) / std::max(1.0, std::abs(f.a)));
      ++fn1;
    } catch (const DomainError&) {
    }
  }
  const double secs = clock.seconds();
  const bool ok = sc_lo < 1e-12 && sc_hi < 1e-12 && xres < 1e-12 && ident < 1e-9 && fn1 > 500 && secs < 5.0;
  report(1, "exponent algebra", ok,
         fmt("|s_c(p_*)| %.2e, |s_c(p^*)-2| %.2e, x_alpha residual %.2e, identity %.2e over %d tuples, %.2f s",
             sc_lo, sc_hi, xres, ident, fn1, secs));
}

void criterion2() {
  Timer clock;
  const double L = 40.0, alpha = 0.5;
  const int M = 256;
  auto g = make_grid(1, L, M);
  auto gauss = [](double x) { return std::exp(-x * x); };
  auto u = gen::sample(g, [&](const std::array<double, 3>& x) { return gauss(x[0]); });
  const auto V = riesz_apply(u, alpha);

  oracle::PeriodicRiesz1D ref(alpha, L, M);
  const auto W = ref.apply(gauss);
  double num = 0, den = 0;
  for (int i = 0; i < M; ++i) {
    num += std::norm(V[i].real() - W[i]);
    den += W[i] * W[i];
  }
  const double err = std::sqrt(num / den);

  // Minimum-image truncated kernel, punctured at the origin.
  const auto x = g->axis_coords();
  const double h = g->spacing(), c = ref.constant();
  double num_mi = 0, den_mi = 0;
  for (int i = 0; i < M; ++i) {
    double s = 0.0;
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      double z = std::abs(x[i] - x[j]);
      z = std::min(z, L - z);
      s += c * std::pow(z, alpha - 1.0) * gauss(x[j]) * h;
    }
    num_mi += std::norm(V[i].real() - s);
    den_mi += s * s;
  }
  const double secs = clock.seconds();
  report(2, "Riesz convolution vs periodized kernel quadrature", err < 1e-4 && secs < 10.0,
         fmt("relative L2 %.3e, %.2f s", err, secs));
  info(fmt("min-image truncated kernel quadrature differs by relative L2 %.3e", std::sqrt(num_mi / den_mi)));
}

double max_energy_drift(const ComplexField& u0, double dt, const SpectralCache& cache) {
  EvolveConfig cfg;
  cfg.dt = dt;
  cfg.T = 1.0;
  cfg.cadence = 1;
  const double E0 = energy(u0, cache);
  double drift = 0.0;
  evolve(u0, cfg, cache, [&](long, double, const ComplexField& u) {
    drift = std::max(drift, std::abs(energy(u, cache) - E0) / std::abs(E0));
  });
  return drift;
}

void criterion3() {
  auto cfg = config("d = 2\nL = 40\nM = 64\n");
  const auto ctx = prepare_run(cfg);
  const auto& cache = *ctx.cache;

  auto w = gen::Source(31).field(ctx.grid);
  double lin = 0.0;
  for (double t : {0.1, 1.0, 10.0}) {
    const auto wt = linear_propagator(w, t, cache);
    lin = std::max(lin, std::abs(mass(wt) - mass(w)) / mass(w));
    lin = std::max(lin, std::abs(h2_norm(wt, cache) - h2_norm(w, cache)) / h2_norm(w, cache));
  }

  const auto u0 = gaussian(ctx.grid, 0.5, 1.5, {0.0, 0.0, 0.0});
  EvolveConfig ecfg;
  ecfg.dt = 1e-3;
  ecfg.T = 1.0;
  const auto r = evolve(u0, ecfg, cache);
  const double mdrift = std::abs(mass(r.state) - mass(u0)) / mass(u0);
  const double e1 = max_energy_drift(u0, 1e-3, cache);
  const double e2 = max_energy_drift(u0, 5e-4, cache);
  const double ratio = e1 / e2;
  report(3, "unitarity and conservation", lin < 1e-12 && mdrift < 1e-10 && e1 < 1e-5 && ratio >= 3.0 && ratio <= 5.0,
         fmt("linear %.2e, mass drift %.2e, energy drift %.2e (dt) / %.2e (dt/2), ratio %.2f", lin, mdrift, e1, e2,
             ratio));
}

struct OrderResult {
  double err[3];
  double o1, o2;
};

OrderResult splitting_order(double L) {
  auto cfg = config(fmt("d = 1\nL = %g\nM = 128\n", L));
  const auto ctx = prepare_run(cfg);
  const auto u0 = gaussian(ctx.grid, 1.0, 2.0, {0.5, 0.0, 0.0});
  auto run = [&](double dt) {
    EvolveConfig e;
    e.dt = dt;
    e.T = 0.1;
    return evolve(u0, e, *ctx.cache).state;
  };
  const double dts[] = {4e-3, 2e-3, 1e-3};
  const auto ref = run(dts[2] / 16.0);
  OrderResult r{};
  for (int i = 0; i < 3; ++i) r.err[i] = rel_l2(run(dts[i]), ref);
  r.o1 = std::log2(r.err[0] / r.err[1]);
  r.o2 = std::log2(r.err[1] / r.err[2]);
  return r;
}

void criterion4() {
  // L = 100 keeps dt·k_max⁴ near 1 at M = 128.
  const auto r = splitting_order(100.0);
  const bool ok = std::abs(r.o1 - 2.0) <= 0.2 && std::abs(r.o2 - 2.0) <= 0.2;
  report(4, "splitting order", ok,
         fmt("L 100, errors %.3e %.3e %.3e, observed orders %.3f %.3f", r.err[0], r.err[1], r.err[2], r.o1, r.o2));
  const auto stiff = splitting_order(40.0);
  info(fmt("L 40 (dt·k_max⁴ up to 40): observed orders %.3f %.3f", stiff.o1, stiff.o2));
}

void criterion5() {
  Timer clock;
  auto cfg = config(
      "d = 2\nL = 40\nM = 128\nR_diag = 8\ndt = 1e-4\nT = 0.1\n"
      "initial.amplitude = 1\ninitial.width = 2\ninitial.velocity = 0.5, 0.3\n");
  const auto ctx = prepare_run(cfg);
  const auto rep = morawetz_verify(ctx, initial_state(ctx), 20);
  const double secs = clock.seconds();
  const bool ok = rep.times.size() == 20 && rep.max_rel_err <= 1e-3 && rep.assembly_err <= 1e-12 && secs < 300.0;
  report(5, "Morawetz identity", ok,
         fmt("max relative error %.3e over %zu samples, assembly %.2e, %.1f s", rep.max_rel_err, rep.times.size(),
             rep.assembly_err, secs));
}

void criterion6() {
  auto cfg = config("d = 3\nL = 40\nM = 128\n");
  const auto ctx = prepare_run(cfg);
  const auto& cache = *ctx.cache;
  const auto gs = compute_groundstate(cfg, cache);
  const auto exps = simulation_exponents(cache);
  const auto self = thresholds(gs.phi, gs, exps, cache);

  auto seed = gen::sample(ctx.grid, [](const std::array<double, 3>& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return cplx(0.5 * std::exp(-r2 / 9.0) + 0.3 * std::exp(-r2), 0.0);
  });
  const auto other = petviashvili(cache, seed);
  const double seed_diff = rel_l2(other.phi, gs.phi);

  const bool ok = gs.residual < 1e-8 && gs.iterations <= 500 && std::abs(gs.S_final - 1.0) < 1e-8 &&
                  std::abs(self.ME - 1.0) < 1e-10 && std::abs(self.MG - 1.0) < 1e-10 && seed_diff < 1e-6;
  report(6, "Petviashvili ground state", ok,
         fmt("%d iterations, residual %.2e, |S-1| %.2e, thresholds (%.12f, %.12f), seed difference %.2e",
             gs.iterations, gs.residual, std::abs(gs.S_final - 1.0), self.ME, self.MG, seed_diff));
}

bool within_pin(double value, double pinned) { return std::abs(value - pinned) <= kPinTolerance * pinned; }

void criteria7and8() {
  Timer clock;
  const auto dir = scratch("subthreshold");
  auto cfg = config(
      "d = 3\nL = 40\nM = 64\ndt = 0.02\nT = 20\ncadence = 25\n"
      "initial.kind = groundstate\ninitial.lambda = 0.5\ninitial.perturbation = 0.01\nseed = 7\n"
      "output.checkpoint_every = 200\n",
      dir);
  const auto ctx = prepare_run(cfg);
  const auto run = run_evolution(ctx, initial_state(ctx));
  info(fmt("sub-threshold run: %zu samples, %zu checkpoints, %.1f s", run.samples.size(), run.checkpoints.size(),
           clock.seconds()));

  std::vector<double> t, lm, norms;
  for (const auto& s : run.samples) {
    t.push_back(s.t);
    lm.push_back(s.local_mass);
    norms.push_back(s.lrstar_local);
  }
  const auto evac = evacuation_scan(t, lm);
  const double ratio = evac.minima_values.empty() ? lm.back() / lm.front() : evac.minima_values.back() / lm.front();
  const auto st = spacetime_accumulate(t, norms, cfg.params.p, cfg.params.b);
  const double bound = 1.0 / (1.0 - cfg.params.b) + 0.3;
  const bool ok7 = ratio < 0.5 && st.slope < bound && within_pin(ratio, kPinnedEvacRatio) &&
                   within_pin(st.slope, kPinnedSpacetimeSlope);
  report(7, "evacuation and spacetime growth", ok7,
         fmt("final-minimum local mass ratio %.4f (pinned %.4f), spacetime slope %.4f (pinned %.4f, bound %.2f), "
             "%zu minima, evacuation slope %.4f",
             ratio, kPinnedEvacRatio, st.slope, kPinnedSpacetimeSlope, bound, evac.minima_times.size(), evac.slope));

  // Free flow: the pullback is the initial datum.
  auto lin_cfg = config("d = 2\nL = 40\nM = 64\n");
  const auto lin_ctx = prepare_run(lin_cfg);
  const auto w0 = gaussian(lin_ctx.grid, 1.0, 2.0, {0.5, 0.3, 0.0});
  EvolveConfig free;
  free.dt = 0.01;
  free.T = 1.0;
  free.cadence = 10;
  free.nonlinear = false;
  std::vector<double> ft;
  std::vector<ComplexField> fs_states;
  evolve(w0, free, *lin_ctx.cache, [&](long, double time, const ComplexField& u) {
    ft.push_back(time);
    fs_states.push_back(u);
  });
  const auto free_rep = scatter_detect(ft, fs_states, *lin_ctx.cache);
  double free_max = 0.0;
  for (double d : free_rep.consecutive) free_max = std::max(free_max, d);

  std::vector<double> ct;
  std::vector<ComplexField> states;
  for (const auto& path : run.checkpoints) {
    auto ck = read_checkpoint(path, ctx.grid);
    ct.push_back(ck.t);
    states.push_back(std::move(ck.field));
  }
  const auto rep = scatter_detect(ct, states, *ctx.cache);
  const auto& c = rep.consecutive;
  bool monotone = c.size() >= 5;
  for (std::size_t i = c.size() >= 5 ? c.size() - 4 : 1; i < c.size(); ++i) monotone = monotone && c[i] < c[i - 1];
  std::string tail;
  for (std::size_t i = c.size() >= 5 ? c.size() - 5 : 0; i < c.size(); ++i) tail += fmt("%s%.3e", tail.empty() ? "" : " ", c[i]);

  const bool ok8 = free_max < 1e-10 && free_rep.verdict == ScatterVerdict::scattering_consistent && monotone &&
                   rep.verdict == ScatterVerdict::scattering_consistent;
  report(8, "scattering detector", ok8,
         fmt("free-flow max distance %.2e (%s); fixture tail %s, threshold %.3e, verdict %s", free_max,
             to_string(free_rep.verdict).c_str(), tail.c_str(), rep.threshold, to_string(rep.verdict).c_str()));
}

void criterion9() {
  const auto ck_dir = scratch("roundtrip");
  gen::Source src(99);
  bool bitwise = true;
  for (int d = 1; d <= 3; ++d) {
    auto g = make_grid(d, 20.0, 16);
    ComplexField u(g);
    for (auto& v : u.values()) v = {src.uniform(-10, 10), src.uniform(-1e-8, 1e-8)};
    const auto path = (ck_dir / fmt("u%d.bin", d)).string();
    write_checkpoint(path, u, 0.125 * d, ModelParams{3, 2.0, -1.0, 2.5});
    const auto back = read_checkpoint(path);
    for (std::size_t i = 0; i < u.size(); ++i) bitwise = bitwise && back.field[i] == u[i];
    bitwise = bitwise && back.t == 0.125 * d;
  }

  const char* body =
      "d = 2\nL = 20\nM = 32\ndt = 0.01\nT = 0.4\ncadence = 5\n"
      "initial.amplitude = 1\ninitial.width = 2\ninitial.velocity = 0.5, 0.2\noutput.checkpoint_every = 10\n";
  const auto a = scratch("run_a"), b = scratch("run_b"), part = scratch("run_part");
  const auto ca = prepare_run(config(body, a));
  const auto ra = run_evolution(ca, initial_state(ca));
  const auto cb = prepare_run(config(body, b));
  const auto rb = run_evolution(cb, initial_state(cb));
  const bool identical = slurp(ra.timeseries) == slurp(rb.timeseries);

  auto half = config(body, part);
  half.evolve.T = 0.2;
  const auto ch = prepare_run(half);
  run_evolution(ch, initial_state(ch));
  const auto cr = prepare_run(config(body, part));
  const auto rr = resume_evolution(cr, (part / checkpoint_name(20)).string());
  double diff = 0.0;
  for (std::size_t i = 0; i < ra.result.state.size(); ++i)
    diff = std::max(diff, std::abs(ra.result.state[i] - rr.result.state[i]));

  report(9, "persistence and determinism", bitwise && diff <= 1e-12 && identical,
         fmt("checkpoint round trip %s, resume max difference %.2e, double-run CSV %s", bitwise ? "bitwise" : "MISMATCH",
             diff, identical ? "byte-identical" : "DIFFERS"));
}

void guarded(const std::string& label, const std::function<void()>& body, std::initializer_list<int> ids) {
  try {
    body();
  } catch (const std::exception& e) {
    for (int id : ids) report(id, label, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  if (const char* env = std::getenv("BIHARTREE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) set_thread_count(n);
  }
  guarded("exponent algebra", criterion1, {1});
  guarded("Riesz convolution", criterion2, {2});
  guarded("unitarity and conservation", criterion3, {3});
  guarded("splitting order", criterion4, {4});
  guarded("Morawetz identity", criterion5, {5});
  guarded("Petviashvili ground state", criterion6, {6});
  guarded("sub-threshold fixture", criteria7and8, {7, 8});
  guarded("persistence and determinism", criterion9, {9});
  fs::remove_all(fs::temp_directory_path() / ("bihartree_acceptance_" + std::to_string(::getpid())));
  std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
