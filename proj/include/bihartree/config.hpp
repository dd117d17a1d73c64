#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bihartree/dynamics.hpp"
#include "bihartree/exponents.hpp"
#include "bihartree/spectral.hpp"

namespace bihartree {

/// Initial datum family.
///   gaussian:    amplitude · exp(−|x|²/width²) · e^{i velocity·x}
///   groundstate: lambda · φ + perturbation · (seeded smooth bumps)
///   file:        state read from a checkpoint
struct InitialSpec {
  std::string kind = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
  std::array<double, 3> velocity{0.0, 0.0, 0.0};
  double lambda = 0.5;
  double perturbation = 0.0;
  std::string path;
};

struct GroundStateSpec {
  bool compute = false;  ///< forced on for the groundstate initial datum
  double tol = 1e-8;
  int max_iter = 500;
  double seed_amplitude = 1.0;
  double seed_width = 2.0;
};

struct OutputSpec {
  std::string dir = "out";
  /// Steps between checkpoints; must be a multiple of the cadence. 0 writes
  /// only the final state.
  long checkpoint_every = 0;
};

struct RunConfig {
  ModelParams params;
  int d = 0;
  double L = 0.0;
  int M = 0;
  EvolveConfig evolve;
  double sigma = 0.5;
  bool dealias = true;
  std::optional<double> R_diag;  ///< defaults to L/8
  bool defocusing = false;
  InitialSpec initial;
  GroundStateSpec gs;
  OutputSpec output;
  std::optional<double> scatter_threshold;
  std::uint64_t seed = 0;
  /// Keys that were set explicitly by the file or an override.
  std::set<std::string> given;

  double diag_radius() const { return R_diag.value_or(L / 8.0); }
  CacheOptions cache_options() const;
};

/// Which keys must be present and valid.
enum class ConfigScope { params, run };

/// Parses `key = value` lines; `#` starts a comment. Unknown or repeated
/// keys and malformed values raise ParameterError prefixed with the line.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");

/// Applies `key=value` overrides on top of `cfg`.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments);

/// Checks required keys and every invariant for `scope`.
void validate_config(const RunConfig& cfg, ConfigScope scope);

/// Reads, parses and validates a run configuration.
RunConfig load_config(const std::string& path);

/// Canonical text form: keys in a fixed order, numbers in shortest
/// round-trip form. Unset optional keys are omitted.
std::string dump_config(const RunConfig& cfg);

}  // namespace bihartree
