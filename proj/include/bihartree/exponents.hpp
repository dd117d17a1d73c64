#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bihartree/error.hpp"

namespace bihartree {

/// Dedicated value for an infinite Lebesgue/time exponent (q = inf, energy
/// critical power in low dimension). Compares above every finite exponent.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Analytic parameter tuple of the inhomogeneous biharmonic Hartree equation
///   i u_t + Δ²u − (I_α ∗ |·|^b |u|^p) |x|^b |u|^{p−2} u = 0   on R^N.
struct ModelParams {
  int N = 5;
  double alpha = 2.0;
  double b = -0.5;
  double p = 3.0;
};

/// Throws ParameterError naming the first violated invariant
/// (N >= 1, 0 < alpha < N, b < 0, p > 1).
void validate(const ModelParams& params);

/// Scaling sum 4 + 2b + alpha, which sets every critical index.
double scaling_sum(const ModelParams& params);

struct CriticalExponents {
  double s_c = 0.0;      ///< critical Sobolev index
  double p_star = 0.0;   ///< mass-critical power (s_c = 0)
  double p_upper = 0.0;  ///< energy-critical power (s_c = 2), kInfinity for N <= 4
  std::optional<double> x_alpha;  ///< lower threshold of the radial theory, N >= 5 only
  double B = 0.0;       ///< coercivity power 2 + (p−1) s_c
  double r1 = 0.0;      ///< profile exponent 2N(p−1)/(4+2b+α)
  double r_star = 0.0;  ///< Morawetz exponent 2Np/(N+α+2b)
};

/// Derived indices for `params`. Rejects a nonpositive scaling sum.
CriticalExponents compute_exponents(const ModelParams& params);

/// Larger root of (X−1)(2X−1) − (4+2b+α)/(N−4). Requires N >= 5.
double x_alpha(const ModelParams& params);

struct ConditionReport {
  bool valid = false;
  std::vector<std::string> violations;
};

/// Evaluates condition (C) on (N, alpha, b); p is ignored.
ConditionReport check_condition_C(const ModelParams& params);

struct RangeReport {
  bool non_radial = false;  ///< hypotheses of the non-radial scattering theorem
  bool radial = false;      ///< hypotheses of the radial scattering theorem
  std::vector<std::string> non_radial_failures;
  std::vector<std::string> radial_failures;
};

RangeReport in_intercritical_range(const ModelParams& params, const CriticalExponents& exps);

/// A pair (q, r) with N(1/2 − 1/r) = 4/q + s.
struct AdmissiblePair {
  double q = 0.0;
  double r = 0.0;
  double s = 0.0;
};

/// Which edge of the admissible window a request fell outside of.
enum class WindowBound { lower_r, upper_r, q_below_two, empty_window };

class WindowError : public DomainError {
 public:
  WindowError(WindowBound bound, const std::string& what) : DomainError(what), bound_(bound) {}
  WindowBound bound() const { return bound_; }

 private:
  WindowBound bound_;
};

/// Solves the admissibility balance for q. Negative s (dual pairs) is
/// accepted; the lower window edge is then max{2, 2N/(N−2s)}.
AdmissiblePair admissible_q(int N, double s, double r);

/// Residual N(1/2 − 1/r) − 4/q − s, with 1/inf = 0.
double admissibility_residual(int N, const AdmissiblePair& pair);

/// True when (q, r) is s-admissible including every window clause.
bool is_admissible(int N, const AdmissiblePair& pair);

/// Weighted Hardy–Littlewood–Sobolev balance
///   1 + (α − γ − μ)/N = 1/q + 1/r + 1/s.
/// Unknown exponents are left empty. Exactly one may be missing, or q and r
/// together (then solved with q = r).
struct HlsProblem {
  int N = 5;
  double alpha = 2.0;
  double gamma = 0.0;
  double mu = 0.0;
  std::optional<double> q;
  std::optional<double> r;
  std::optional<double> s;
};

struct HlsTriple {
  double q = 0.0;
  double r = 0.0;
  double s = 0.0;
};

HlsTriple hls_solve(const HlsProblem& problem);

double hls_residual(int N, double alpha, double gamma, double mu, const HlsTriple& t);

/// Exponents of the long-time Strichartz argument for interpolation
/// parameter theta in (0, 2p−1).
struct Fn1Exponents {
  double theta = 0.0;
  double a = 0.0;
  double d = 0.0;
  double r = 0.0;
  double d_prime = 0.0;
  double identity_residual = 0.0;    ///< (2p−1−θ) d′ − a
  double ar_balance_residual = 0.0;  ///< balance of (a, r) at level s_c
  double dr_balance_residual = 0.0;  ///< balance of (d, r) at level −s_c
  bool ar_admissible = false;        ///< (a, r) in Γ_{s_c}, all window clauses
  bool dr_admissible = false;        ///< (d, r) in Γ_{−s_c}, all window clauses
};

Fn1Exponents fn1_exponents(const ModelParams& params, const CriticalExponents& exps, double theta);

struct BootstrapReport {
  bool ok = false;
  bool hypothesis_a = false;   ///< a < (1 − 1/θ)(θb)^{1/(1−θ)}
  bool hypothesis_x0 = false;  ///< X0 <= (θb)^{1/(1−θ)}
  bool samples_bounded = false;
  double bound = 0.0;  ///< θa/(θ−1)
  std::optional<std::size_t> first_violation;
  std::string failure;
};

/// Checks the continuity-argument lemma X <= a + b X^θ on sampled data.
BootstrapReport bootstrap_check(double a, double bcoef, double theta, double X0,
                                std::span<const double> samples);

}  // namespace bihartree
