#include "bihartree/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "bihartree/checkpoint.hpp"
#include "bihartree/timeseries.hpp"

namespace bihartree {

namespace fs = std::filesystem;

namespace {

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

GroundStateResult compute_groundstate(const RunConfig& cfg, const SpectralCache& cache) {
  const auto seed = gaussian(cache.grid, cfg.gs.seed_amplitude, cfg.gs.seed_width, {0.0, 0.0, 0.0});
  PetviashviliOptions opt;
  opt.tol = cfg.gs.tol;
  opt.max_iter = cfg.gs.max_iter;
  return petviashvili(cache, seed, opt);
}

RunContext prepare_run(const RunConfig& cfg) {
  RunContext ctx;
  ctx.cfg = cfg;
  ctx.grid = make_grid(cfg.d, cfg.L, cfg.M);
  ctx.cache = make_cache(ctx.grid, cfg.params, cfg.cache_options());
  if (cfg.initial.kind == "groundstate" || cfg.gs.compute) {
    // The ground state solves the focusing equation regardless of the run's sign.
    auto opts = cfg.cache_options();
    opts.coupling = 1.0;
    opts.R_diag = 0.0;
    const auto gs_cache = make_cache(ctx.grid, cfg.params, opts);
    ctx.gs = compute_groundstate(cfg, *gs_cache);
  }
  return ctx;
}

ComplexField gaussian(const GridPtr& grid, double amplitude, double width, const std::array<double, 3>& velocity) {
  ComplexField u(grid);
  const auto x = grid->axis_coords();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto idx = grid->unravel(i);
    double r2 = 0.0, phase = 0.0;
    for (int a = 0; a < grid->dim(); ++a) {
      r2 += x[idx[a]] * x[idx[a]];
      phase += velocity[a] * x[idx[a]];
    }
    u[i] = amplitude * std::exp(-r2 / (width * width)) * std::polar(1.0, phase);
  }
  return u;
}

ComplexField seeded_perturbation(const GridPtr& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexField u(grid);
  const auto x = grid->axis_coords();
  for (int bump = 0; bump < 4; ++bump) {
    const cplx w(2.0 * unit_double(rng) - 1.0, 2.0 * unit_double(rng) - 1.0);
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int a = 0; a < grid->dim(); ++a) c[a] = 2.0 * unit_double(rng) - 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto idx = grid->unravel(i);
      double r2 = 0.0;
      for (int a = 0; a < grid->dim(); ++a) r2 += (x[idx[a]] - c[a]) * (x[idx[a]] - c[a]);
      u[i] += w * std::exp(-r2);
    }
  }
  return u;
}

ComplexField initial_state(const RunContext& ctx) {
  const auto& in = ctx.cfg.initial;
  if (in.kind == "gaussian") return gaussian(ctx.grid, in.amplitude, in.width, in.velocity);
  if (in.kind == "file") return read_checkpoint(in.path, ctx.grid).field;
  if (!ctx.gs) throw ParameterError("groundstate initial datum requested without a ground state");
  ComplexField u = ctx.gs->phi;
  for (auto& z : u.values()) z *= in.lambda;
  if (in.perturbation != 0.0) {
    const auto noise = seeded_perturbation(ctx.grid, ctx.cfg.seed);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += in.perturbation * noise[i];
  }
  return u;
}

std::string checkpoint_name(long step) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "ckpt_%010ld.bin", step);
  return buf;
}

RunSummary run_evolution(const RunContext& ctx, const ComplexField& u0, long start_step, bool write_outputs) {
  const auto& cfg = ctx.cfg;
  EvolveConfig ecfg = cfg.evolve;
  const long total = step_count(ecfg);
  if (start_step < 0 || start_step > total) throw ParameterError("start step lies outside [0, T/dt]");
  ecfg.start_step = start_step;
  ecfg.T = (total - start_step) * ecfg.dt;

  RunSummary summary{{u0, 0.0, 0}, {}, {}, {}};
  const fs::path dir(cfg.output.dir);
  if (write_outputs) {
    fs::create_directories(dir);
    summary.timeseries = (dir / "timeseries.csv").string();
    if (start_step == 0) fs::remove(summary.timeseries);
  }

  DiagnosticsTracker tracker(ctx.cache, ctx.gs);
  auto observer = [&](long step, double t, const ComplexField& u) {
    const auto s = tracker.observe(t, u);
    // The resume point is already in the CSV and on disk.
    const bool repeat = start_step > 0 && step == start_step;
    if (write_outputs && !repeat) {
      append_timeseries(s, summary.timeseries);
      const long every = cfg.output.checkpoint_every;
      if ((every > 0 && step % every == 0) || step == total) {
        const auto path = (dir / checkpoint_name(step)).string();
        write_checkpoint(path, u, t, cfg.params);
        summary.checkpoints.push_back(path);
      }
    }
  };
  try {
    summary.result = evolve(u0, ecfg, *ctx.cache, observer);
  } catch (const BlowUpError& e) {
    if (write_outputs) write_checkpoint((dir / "blowup_last_good.bin").string(), e.last_good(), e.time(), cfg.params);
    throw;
  }
  summary.samples = tracker.samples();
  return summary;
}

RunSummary resume_evolution(const RunContext& ctx, const std::string& checkpoint_path, bool write_outputs) {
  auto ck = read_checkpoint(checkpoint_path, ctx.grid);
  const double ratio = ck.t / ctx.cfg.evolve.dt;
  const long step = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(step)) > 1e-9 * std::max(1.0, ratio))
    throw ParameterError("checkpoint time is not on the configured dt grid");
  return run_evolution(ctx, ck.field, step, write_outputs);
}

MorawetzVerifyReport morawetz_verify(const RunContext& ctx, const ComplexField& u0, int samples) {
  const auto& cache = *ctx.cache;
  if (!cache.virial) throw DomainError("Morawetz verification needs R_diag < L/4");
  EvolveConfig ecfg = ctx.cfg.evolve;
  ecfg.cadence = 1;
  ecfg.start_step = 0;
  const long n = step_count(ecfg);
  if (samples < 1 || n < 2 * static_cast<long>(samples) + 2)
    throw ParameterError("T/dt too small for the requested number of Morawetz samples");

  std::vector<long> centres;
  for (int k = 1; k <= samples; ++k) centres.push_back(std::lround(static_cast<double>(k) * n / (samples + 1)));
  std::set<long> action_steps;
  for (long c : centres) {
    action_steps.insert(c - 1);
    action_steps.insert(c + 1);
  }
  std::map<long, double> action;
  std::map<long, MorawetzTerms> rhs;
  const std::set<long> centre_set(centres.begin(), centres.end());
  evolve(u0, ecfg, cache, [&](long step, double, const ComplexField& u) {
    if (action_steps.count(step)) action[step] = morawetz_action(u, *cache.virial);
    if (centre_set.count(step)) rhs[step] = morawetz_rhs(u, cache, *cache.virial);
  });

  MorawetzVerifyReport rep;
  double max_total = 0.0, max_gap = 0.0;
  for (long c : centres) {
    const double fd = (action.at(c + 1) - action.at(c - 1)) / (2.0 * ecfg.dt);
    const auto& terms = rhs.at(c);
    rep.times.push_back(c * ecfg.dt);
    rep.fd.push_back(fd);
    rep.rhs.push_back(terms.total);
    rep.rel_err.push_back(std::abs(fd - terms.total) / std::abs(terms.total));
    max_total = std::max(max_total, std::abs(terms.total));
    max_gap = std::max(max_gap, std::abs(terms.sum() - terms.total));
  }
  rep.max_rel_err = *std::max_element(rep.rel_err.begin(), rep.rel_err.end());
  rep.assembly_err = max_total > 0.0 ? max_gap / max_total : max_gap;
  return rep;
}

}  // namespace bihartree
