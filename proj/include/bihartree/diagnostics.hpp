#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bihartree/exponents.hpp"
#include "bihartree/groundstate.hpp"
#include "bihartree/spectral.hpp"

namespace bihartree {

/// (‖u‖² + ‖Δu‖²)^{1/2}.
double h2_norm(const ComplexField& u, const SpectralCache& cache);

/// M_a = 2 ∫ ∇a · Im(∇u ū).
double morawetz_action(const ComplexField& u, const VirialBundle& vb);

/// Right-hand side of the Morawetz identity, term by term:
///   t1 = 4 ∫ ∂_jkΔa Re(∂_j u ∂_k ū)
///   t2 = −∫ Δ³a |u|²
///   t3 = −8 ∫ ∂_jk a Re(∂_ik u ∂_ij ū)
///   t4 = 2 ∫ Δ²a |∇u|²
///   t5 = 2(1 − 2/p) ∫ Δa Q |u|^p
///   t6 = −(4/p) ∫ ∂_k a ∂_k Q |u|^p
/// with Q = coupling · w_b · I_α(w_b|u|^p). ∂_k Q is the spectral gradient
/// of the sampled product.
struct MorawetzTerms {
  std::array<double, 6> term{};
  double total = 0.0;  ///< single-pass accumulation over all six integrands
  double sum() const;
};

MorawetzTerms morawetz_rhs(const ComplexField& u, const SpectralCache& cache, const VirialBundle& vb);

enum class LocalMassMode { sharp, psi };

/// ∫_{|x|<R} |u|² (cell-centre membership) or ∫ ψ_R |u|².
double local_mass(const ComplexField& u, double R, LocalMassMode mode = LocalMassMode::sharp);

/// (∫_{|x|<R} |u|^r)^{1/r}.
double local_lebesgue_norm(const ComplexField& u, double R, double r);

struct SpacetimeReport {
  std::vector<double> running;  ///< trapezoidal ∫_0^{t_i} ‖u‖^{2p} dt
  double slope = 0.0;           ///< least-squares slope of log(acc) vs log(t)
  double C_free = 0.0;          ///< intercept of that fit, exponentiated
  double envelope_exponent = 0.0;  ///< 1/(1−b)
  double C_envelope = 0.0;      ///< fitted C for acc ≈ C t^{1/(1−b)}
};

/// `norms` holds ‖u(t_i)‖_{L^{r*}(|x|<R)}. The fit uses samples with t > 0
/// and a positive accumulator.
SpacetimeReport spacetime_accumulate(const std::vector<double>& times,
                                     const std::vector<double>& norms, double p, double b);

struct EvacuationReport {
  std::vector<double> minima_times;
  std::vector<double> minima_values;
  /// Least-squares slope of log(min) vs t. With fewer than two minima the
  /// running minimum over all samples is fitted instead.
  double slope = 0.0;
};

/// Strict interior local minima of the series, plus the last sample when it
/// is below its predecessor. Needs at least three samples.
EvacuationReport evacuation_scan(const std::vector<double>& times, const std::vector<double>& values);

struct CoercivityResult {
  double lhs = 0.0;
  double rhs_norm = 0.0;
  std::optional<double> ratio;  ///< empty when rhs_norm = 0
};

/// For v = ψ_R u: ‖Δv‖² − (B/2p) ∫ I_α(w_b|v|^p) w_b|v|^p against ‖v‖_{r*}^{2p}.
CoercivityResult coercivity_check(const ComplexField& u, double R, const CriticalExponents& exps,
                                  const SpectralCache& cache);

enum class ScatterVerdict { scattering_consistent, inconclusive, non_scattering_trend };
std::string to_string(ScatterVerdict v);

struct ScatterReport {
  explicit ScatterReport(ComplexField up) : u_plus(std::move(up)) {}

  std::vector<double> sample_times;
  std::vector<std::vector<double>> pullbacks_cauchy;
  std::vector<double> consecutive;  ///< distance between pullbacks i and i+1
  ComplexField u_plus;
  double final_residual = 0.0;
  std::vector<double> residuals;  ///< ‖u(t_i) − e^{it_iΔ²}u_plus‖_{H²}
  double threshold = 0.0;
  ScatterVerdict verdict = ScatterVerdict::inconclusive;
};

struct ScatterOptions {
  /// Final consecutive distance must fall below this; defaults to
  /// 1e−3·‖u(t_0)‖_{H²}.
  std::optional<double> threshold;
  /// Tail length inspected for monotone decay.
  int tail = 5;
};

/// Pulls back v_i = e^{−it_iΔ²}u(t_i) and tests Cauchy behaviour.
/// Throws ParameterError with fewer than three states.
ScatterReport scatter_detect(const std::vector<double>& times, const std::vector<ComplexField>& states,
                             const SpectralCache& cache, const ScatterOptions& options = {});

struct DiagnosticsSample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double ME = 0.0;
  double MG = 0.0;
  double M_R = 0.0;
  double rhs_R = 0.0;
  double local_mass = 0.0;
  double lrstar_local = 0.0;
  double spacetime_acc = 0.0;
  double cauchy_h2 = 0.0;
};

/// Builds one DiagnosticsSample per observed state. Quantities without
/// their prerequisite (no ground state, no virial bundle) are NaN.
class DiagnosticsTracker {
 public:
  DiagnosticsTracker(CachePtr cache, std::optional<GroundStateResult> gs = std::nullopt);

  DiagnosticsSample observe(double t, const ComplexField& u);

  const std::vector<DiagnosticsSample>& samples() const { return samples_; }
  const CriticalExponents& exponents() const { return exps_; }
  double radius() const { return R_; }

 private:
  CachePtr cache_;
  std::optional<GroundStateResult> gs_;
  CriticalExponents exps_;
  double R_;
  std::vector<DiagnosticsSample> samples_;
  std::optional<ComplexField> last_pullback_;
  double last_integrand_ = 0.0;
};

/// Exponents of the simulated problem, with the grid dimension as N.
CriticalExponents simulation_exponents(const SpectralCache& cache);

}  // namespace bihartree
