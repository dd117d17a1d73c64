#include "bihartree/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bihartree {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

}  // namespace

void validate(const ModelParams& params) {
  if (params.N < 1) throw ParameterError("N must be a positive integer (got " + std::to_string(params.N) + ")");
  if (!(params.alpha > 0.0) || !(params.alpha < params.N))
    throw ParameterError("alpha must satisfy 0 < alpha < N (got alpha=" + fmt(params.alpha) + ", N=" +
                         std::to_string(params.N) + ")");
  if (!(params.b < 0.0)) throw ParameterError("b must be negative (got b=" + fmt(params.b) + ")");
  if (!(params.p > 1.0)) throw ParameterError("p must exceed 1 (got p=" + fmt(params.p) + ")");
}

double scaling_sum(const ModelParams& params) { return 4.0 + 2.0 * params.b + params.alpha; }

CriticalExponents compute_exponents(const ModelParams& params) {
  if (params.N < 1) throw ParameterError("N must be a positive integer");
  if (!(params.p > 1.0)) throw ParameterError("p must exceed 1 (got p=" + fmt(params.p) + ")");
  const double S = scaling_sum(params);
  if (!(S > 0.0))
    throw ParameterError("degenerate scaling: 4+2b+alpha = " + fmt(S) + " must be positive");

  const double N = params.N;
  const double p = params.p;
  CriticalExponents e;
  e.s_c = N / 2.0 - S / (2.0 * (p - 1.0));
  e.p_star = 1.0 + S / N;
  e.p_upper = params.N > 4 ? 1.0 + S / (N - 4.0) : kInfinity;
  if (params.N >= 5) e.x_alpha = x_alpha(params);
  e.B = 2.0 + (p - 1.0) * e.s_c;
  e.r1 = 2.0 * N * (p - 1.0) / S;
  const double denom = N + params.alpha + 2.0 * params.b;
  e.r_star = denom > 0.0 ? 2.0 * N * p / denom : std::numeric_limits<double>::quiet_NaN();
  return e;
}

double x_alpha(const ModelParams& params) {
  if (params.N <= 4)
    throw DomainError("x_alpha is undefined for N <= 4 (polynomial coefficient divides by N-4)");
  const double c = scaling_sum(params) / (params.N - 4.0);
  const double disc = 1.0 + 8.0 * c;
  if (disc < 0.0) throw DomainError("x_alpha: polynomial has no real root (c = " + fmt(c) + ")");
  double x = (3.0 + std::sqrt(disc)) / 4.0;
  // One Newton polish on 2X^2 - 3X + 1 - c.
  const double f = (x - 1.0) * (2.0 * x - 1.0) - c;
  const double df = 4.0 * x - 3.0;
  if (df != 0.0) x -= f / df;
  return x;
}

ConditionReport check_condition_C(const ModelParams& params) {
  ConditionReport rep;
  const double N = params.N;
  const double a = params.alpha;
  const double two_b = 2.0 * params.b;
  auto fail = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

  if (!(a > 0.0 && a < N)) fail("0 < alpha < N violated (alpha=" + fmt(a) + ", N=" + fmt(N) + ")");
  if (!(two_b > -(N + a))) fail("2b > -(N+alpha) violated (2b=" + fmt(two_b) + " <= " + fmt(-(N + a)) + ")");
  const double hls = -4.0 * (1.0 + a / N);
  if (!(two_b > hls)) fail("2b > -4(1+alpha/N) violated (2b=" + fmt(two_b) + " <= " + fmt(hls) + ")");
  if (!(two_b > N - 8.0 - a))
    fail("2b > N-8-alpha violated (2b=" + fmt(two_b) + " <= " + fmt(N - 8.0 - a) + ")");
  if (!(two_b < 0.0)) fail("2b < 0 violated (2b=" + fmt(two_b) + ")");

  const bool high_dim = params.N >= 5;
  const bool low_dim = params.N >= 3 && params.N <= 4 && (2.0 * a + 4.0 * params.b + N > 0.0);
  if (!(high_dim || low_dim)) {
    if (params.N >= 3 && params.N <= 4)
      fail("2alpha+4b+N > 0 violated for 3 <= N <= 4 (value " + fmt(2.0 * a + 4.0 * params.b + N) + ")");
    else
      fail("dimension clause violated: need N >= 5 or 3 <= N <= 4 (N=" + fmt(N) + ")");
  }
  rep.valid = rep.violations.empty();
  return rep;
}

RangeReport in_intercritical_range(const ModelParams& params, const CriticalExponents& exps) {
  RangeReport rep;
  const double p = params.p;
  const auto cond = check_condition_C(params);

  auto& nr = rep.non_radial_failures;
  if (!cond.valid) nr.push_back("condition (C) fails");
  if (!(p > exps.p_star)) nr.push_back("p > p_* fails");
  if (!(p < exps.p_upper)) nr.push_back("p < p^* fails");
  if (!(p >= 2.0)) nr.push_back("p >= 2 fails");
  if (params.N < 5) nr.push_back("N >= 5 fails");
  rep.non_radial = nr.empty();

  auto& rr = rep.radial_failures;
  if (!cond.valid) rr.push_back("condition (C) fails");
  if (!exps.x_alpha) {
    rr.push_back("x_alpha undefined for N <= 4");
  } else if (!(p > std::max(exps.p_star, *exps.x_alpha))) {
    rr.push_back("p > max{p_*, x_alpha} fails");
  }
  if (!(p < exps.p_upper)) rr.push_back("p < p^* fails");
  if (!(p >= std::max(2.0, 1.5 + params.alpha / params.N))) rr.push_back("p >= max{2, 3/2+alpha/N} fails");
  rep.radial = rr.empty();
  return rep;
}

AdmissiblePair admissible_q(int N, double s, double r) {
  const double n = N;
  if (!(n - 2.0 * s > 0.0))
    throw WindowError(WindowBound::empty_window, "admissible window empty: N - 2s <= 0 (N=" + fmt(n) +
                                                     ", s=" + fmt(s) + ")");
  const double lower = std::max(2.0, 2.0 * n / (n - 2.0 * s));
  if (r < lower)
    throw WindowError(WindowBound::lower_r,
                      "r=" + fmt(r) + " below lower window bound max{2, 2N/(N-2s)}=" + fmt(lower));
  if (N > 4) {
    const double upper = 2.0 * n / (n - 4.0);
    if (!(r < upper))
      throw WindowError(WindowBound::upper_r,
                        "r=" + fmt(r) + " at or above excluded endpoint 2N/(N-4)=" + fmt(upper));
  }
  const double four_over_q = n * (0.5 - inv(r)) - s;
  const double q = four_over_q > 0.0 ? 4.0 / four_over_q : kInfinity;
  if (q < 2.0) throw WindowError(WindowBound::q_below_two, "solved q=" + fmt(q) + " is below 2");
  return {q, r, s};
}

double admissibility_residual(int N, const AdmissiblePair& pair) {
  return N * (0.5 - inv(pair.r)) - 4.0 * inv(pair.q) - pair.s;
}

bool is_admissible(int N, const AdmissiblePair& pair) {
  const double n = N;
  if (!(n - 2.0 * pair.s > 0.0)) return false;
  const double lower = std::max(2.0, 2.0 * n / (n - 2.0 * pair.s));
  if (pair.r < lower * (1.0 - 1e-14)) return false;
  if (N > 4 && !(pair.r < 2.0 * n / (n - 4.0))) return false;
  if (pair.q < 2.0) return false;
  return std::abs(admissibility_residual(N, pair)) < 1e-9;
}

double hls_residual(int N, double alpha, double gamma, double mu, const HlsTriple& t) {
  return 1.0 + (alpha - gamma - mu) / N - 1.0 / t.q - 1.0 / t.r - 1.0 / t.s;
}

HlsTriple hls_solve(const HlsProblem& pb) {
  const double n = pb.N;
  const double total = 1.0 + (pb.alpha - pb.gamma - pb.mu) / n;
  const int missing = !pb.q + !pb.r + !pb.s;

  HlsTriple t;
  auto solve_one = [&](double known_a, double known_b) {
    const double rem = total - 1.0 / known_a - 1.0 / known_b;
    if (!(rem > 0.0)) throw DomainError("HLS infeasible: remaining balance " + fmt(rem) + " is not positive");
    return 1.0 / rem;
  };

  if (missing == 1) {
    if (!pb.q) {
      t = {solve_one(*pb.r, *pb.s), *pb.r, *pb.s};
    } else if (!pb.r) {
      t = {*pb.q, solve_one(*pb.q, *pb.s), *pb.s};
    } else {
      t = {*pb.q, *pb.r, solve_one(*pb.q, *pb.r)};
    }
  } else if (missing == 2 && !pb.q && !pb.r) {
    const double rem = total - 1.0 / *pb.s;
    if (!(rem > 0.0)) throw DomainError("HLS infeasible: remaining balance " + fmt(rem) + " is not positive");
    t = {2.0 / rem, 2.0 / rem, *pb.s};
  } else {
    throw ParameterError("hls_solve needs exactly one unknown exponent, or q and r tied together");
  }

  for (auto [name, v] : {std::pair{"q", t.q}, std::pair{"r", t.r}, std::pair{"s", t.s}}) {
    if (!(v > 1.0) || std::isinf(v))
      throw DomainError(std::string("HLS infeasible: ") + name + "=" + fmt(v) + " outside (1, inf)");
  }
  // Weight windows only bind when the corresponding weight is present.
  if (pb.gamma != 0.0) {
    const double bound = n * (1.0 - 1.0 / t.s);
    if (!(0.0 < -pb.gamma && -pb.gamma < bound))
      throw DomainError("HLS constraint 0 < -gamma < N/s' violated (-gamma=" + fmt(-pb.gamma) +
                        ", N/s'=" + fmt(bound) + ")");
  }
  if (pb.mu != 0.0) {
    const double bound = n * (1.0 - 1.0 / t.q);
    if (!(0.0 < -pb.mu && -pb.mu < bound))
      throw DomainError("HLS constraint 0 < -mu < N/q' violated (-mu=" + fmt(-pb.mu) + ", N/q'=" + fmt(bound) +
                        ")");
  }
  return t;
}

Fn1Exponents fn1_exponents(const ModelParams& params, const CriticalExponents& exps, double theta) {
  const double p = params.p;
  const double sc = exps.s_c;
  const double n = params.N;
  if (!(theta > 0.0 && theta < 2.0 * p - 1.0))
    throw ParameterError("theta must lie in (0, 2p-1) (got " + fmt(theta) + ")");
  if (!(sc > 0.0 && sc < 2.0)) throw DomainError("fn1 exponents need 0 < s_c < 2 (s_c=" + fmt(sc) + ")");

  const double m = 2.0 * p - theta;
  const double rden = (n - 2.0 * sc) * m - 4.0 * (2.0 - sc);
  if (!(rden > 0.0))
    throw DomainError("infeasible theta=" + fmt(theta) + ": denominator of r is " + fmt(rden));

  Fn1Exponents f;
  f.theta = theta;
  f.a = 2.0 * m / (2.0 - sc);
  f.d = 2.0 * m / (2.0 + (2.0 * p - 1.0 - theta) * sc);
  f.r = 2.0 * n * m / rden;
  f.d_prime = f.d / (f.d - 1.0);
  f.identity_residual = (2.0 * p - 1.0 - theta) * f.d_prime - f.a;

  const AdmissiblePair ar{f.a, f.r, sc};
  const AdmissiblePair dr{f.d, f.r, -sc};
  f.ar_balance_residual = admissibility_residual(params.N, ar);
  f.dr_balance_residual = admissibility_residual(params.N, dr);
  f.ar_admissible = is_admissible(params.N, ar);
  f.dr_admissible = is_admissible(params.N, dr);
  return f;
}

BootstrapReport bootstrap_check(double a, double bcoef, double theta, double X0, std::span<const double> samples) {
  BootstrapReport rep;
  if (!(a > 0.0 && bcoef > 0.0 && theta > 1.0)) {
    rep.failure = "precondition a > 0, b > 0, theta > 1 violated";
    return rep;
  }
  const double threshold = std::pow(theta * bcoef, 1.0 / (1.0 - theta));
  rep.bound = theta * a / (theta - 1.0);
  rep.hypothesis_a = a < (1.0 - 1.0 / theta) * threshold;
  rep.hypothesis_x0 = X0 <= threshold;
  rep.samples_bounded = true;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i] <= rep.bound)) {
      rep.samples_bounded = false;
      rep.first_violation = i;
      break;
    }
  }
  if (!rep.hypothesis_a)
    rep.failure = "hypothesis a < (1-1/theta)(theta b)^{1/(1-theta)} fails";
  else if (!rep.hypothesis_x0)
    rep.failure = "hypothesis X(0) <= (theta b)^{1/(1-theta)} fails";
  else if (!rep.samples_bounded)
    rep.failure = "sample " + std::to_string(*rep.first_violation) + " exceeds theta a/(theta-1)";
  rep.ok = rep.failure.empty();
  return rep;
}

}  // namespace bihartree
