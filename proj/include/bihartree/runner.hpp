#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bihartree/config.hpp"
#include "bihartree/diagnostics.hpp"
#include "bihartree/dynamics.hpp"
#include "bihartree/groundstate.hpp"

namespace bihartree {

/// Grid, cache and (when required) ground state for one configuration.
struct RunContext {
  RunConfig cfg;
  GridPtr grid;
  CachePtr cache;
  std::optional<GroundStateResult> gs;
};

/// Builds the context. The ground state is computed when the initial datum
/// needs it or gs.compute is set.
RunContext prepare_run(const RunConfig& cfg);

GroundStateResult compute_groundstate(const RunConfig& cfg, const SpectralCache& cache);

/// amplitude · exp(−|x|²/width²) · e^{i v·x}.
ComplexField gaussian(const GridPtr& grid, double amplitude, double width, const std::array<double, 3>& velocity);

/// Sum of four unit-width Gaussian bumps with complex weights and centres in
/// [−1, 1]^d, drawn from a 64-bit Mersenne Twister. Raw generator words
/// are mapped to doubles directly so the field is identical across
/// standard libraries.
ComplexField seeded_perturbation(const GridPtr& grid, std::uint64_t seed);

ComplexField initial_state(const RunContext& ctx);

struct RunSummary {
  EvolveResult result;
  std::vector<DiagnosticsSample> samples;
  std::vector<std::string> checkpoints;
  std::string timeseries;
};

/// Evolves `u0` from global step `start_step`, tracks diagnostics at the
/// cadence and writes the CSV and checkpoints under output.dir when
/// `write_outputs` is set. A fresh run (start_step 0) replaces an existing
/// CSV; a resumed run appends. On blow-up the last finite state is written
/// to blowup_last_good.bin before the error propagates.
RunSummary run_evolution(const RunContext& ctx, const ComplexField& u0, long start_step = 0,
                         bool write_outputs = true);

/// Continues a run from a checkpoint on the configured time grid.
RunSummary resume_evolution(const RunContext& ctx, const std::string& checkpoint_path, bool write_outputs = true);

/// Checkpoint file name for a global step.
std::string checkpoint_name(long step);

struct MorawetzVerifyReport {
  std::vector<double> times;
  std::vector<double> fd;    ///< (M_a(t+dt) − M_a(t−dt)) / 2dt
  std::vector<double> rhs;   ///< assembled right-hand side at t
  std::vector<double> rel_err;
  double max_rel_err = 0.0;
  double assembly_err = 0.0;  ///< max |Σ terms − total| / max |total|
};

/// Steps through [0, T] at the configured dt and compares both sides of the
/// Morawetz identity at `samples` interior times spaced evenly in steps.
MorawetzVerifyReport morawetz_verify(const RunContext& ctx, const ComplexField& u0, int samples = 20);

}  // namespace bihartree
