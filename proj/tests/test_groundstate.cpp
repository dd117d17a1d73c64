#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bihartree/diagnostics.hpp"
#include "bihartree/dynamics.hpp"
#include "bihartree/groundstate.hpp"
#include "generators.hpp"

using namespace bihartree;

namespace {

ComplexField gaussian(const GridPtr& g, double A, double w) {
  return gen::sample(g, [&](const std::array<double, 3>& x) {
    return cplx(A * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (w * w)), 0.0);
  });
}

ComplexField scaled(const ComplexField& u, double s) {
  ComplexField v = u;
  for (auto& x : v.values()) x *= s;
  return v;
}

// Reduced fixture: same parameters, coarser box.
struct Fixture {
  CachePtr cache = make_cache(make_grid(3, 24.0, 40), ModelParams{3, 2.0, -1.0, 2.5});
  GroundStateResult gs = petviashvili(*cache, gaussian(cache->grid, 1.0, 2.0));
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("Petviashvili converges on the reduced fixture") {
  const auto& f = fixture();
  const auto& gs = f.gs;
  CHECK(gs.residual < 1e-8);
  CHECK(std::abs(gs.S_final - 1.0) < 1e-8);
  CHECK(gs.iterations <= 500);
  CHECK(groundstate_residual(gs.phi, *f.cache) < 1e-7);
  CHECK(gs.mass == doctest::Approx(mass(gs.phi)).epsilon(1e-14));
  CHECK(gs.deltaSq == doctest::Approx(kinetic(gs.phi, *f.cache)).epsilon(1e-14));
  CHECK(gs.energy == doctest::Approx(energy(gs.phi, *f.cache)).epsilon(1e-14));

  double re = 0, im = 0, mx = 0;
  for (const auto& v : gs.phi.values()) {
    re = std::max(re, std::abs(v.real()));
    im = std::max(im, std::abs(v.imag()));
    if (std::abs(v.real()) > std::abs(mx)) mx = v.real();
  }
  CHECK(im <= 1e-10 * re);
  CHECK(mx > 0.0);
}

TEST_CASE("Petviashvili residual decreases after burn-in") {
  const auto& h = fixture().gs.residual_history;
  REQUIRE(h.size() >= 2);
  const std::size_t start = h.size() > 60 ? 50 : 0;
  for (std::size_t i = start + 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1]);
}

TEST_CASE("ground state does not depend on the seed") {
  const auto& f = fixture();
  auto seed = gen::sample(f.cache->grid, [](const std::array<double, 3>& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return cplx(0.5 * std::exp(-r2 / 9.0) + 0.3 * std::exp(-r2), 0.0);
  });
  const auto other = petviashvili(*f.cache, seed);
  ComplexField diff = other.phi;
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= f.gs.phi[i];
  CHECK(norm(diff) < 1e-6 * norm(f.gs.phi));
}

TEST_CASE("thresholds") {
  const auto& f = fixture();
  const auto exps = simulation_exponents(*f.cache);
  CHECK(exps.s_c == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  const auto self = thresholds(f.gs.phi, f.gs, exps, *f.cache);
  CHECK(std::abs(self.ME - 1.0) < 1e-10);
  CHECK(std::abs(self.MG - 1.0) < 1e-10);
  CHECK_FALSE(self.below);

  ComplexField zero(f.cache->grid);
  const auto z = thresholds(zero, f.gs, exps, *f.cache);
  CHECK(z.ME == 0.0);
  CHECK(z.MG == 0.0);
  CHECK(z.below);

  const auto half = thresholds(scaled(f.gs.phi, 0.5), f.gs, exps, *f.cache);
  CHECK(half.MG == doctest::Approx(std::pow(0.5, 12.0)).epsilon(1e-10));
  CHECK(half.below);

  auto bad = exps;
  bad.s_c = 2.5;
  CHECK_THROWS_AS(thresholds(f.gs.phi, f.gs, bad, *f.cache), DomainError);
}

TEST_CASE("property: MG scales as |lambda|^{2/s_c}") {
  const auto& f = fixture();
  const auto exps = simulation_exponents(*f.cache);
  gen::Source src(8);
  for (int trial = 0; trial < 4; ++trial) {
    auto u = src.field(f.cache->grid, 0.3);
    const double base = thresholds(u, f.gs, exps, *f.cache).MG;
    for (double lam : {0.5, 2.0}) {
      const double mg = thresholds(scaled(u, lam), f.gs, exps, *f.cache).MG;
      CHECK(mg / base == doctest::Approx(std::pow(lam, 2.0 / exps.s_c)).epsilon(1e-10));
    }
  }
}

TEST_CASE("Petviashvili failures are reported") {
  const auto& f = fixture();
  ComplexField zero(f.cache->grid);
  CHECK_THROWS_AS(petviashvili(*f.cache, zero), ParameterError);

  PetviashviliOptions opt;
  opt.max_iter = 2;
  CHECK_THROWS_WITH_AS(petviashvili(*f.cache, gaussian(f.cache->grid, 1.0, 2.0), opt),
                       doctest::Contains("no convergence"), NumericalError);

  auto low = make_cache(f.cache->grid, ModelParams{3, 2.0, -1.0, 1.5});
  CHECK_THROWS_AS(petviashvili(*low, gaussian(f.cache->grid, 1.0, 2.0)), ParameterError);
}

TEST_CASE("coercivity is positive below the ground state") {
  const auto& f = fixture();
  const auto exps = simulation_exponents(*f.cache);
  const auto r = coercivity_check(scaled(f.gs.phi, 0.8), f.cache->g().length() / 4.0, exps, *f.cache);
  CHECK(r.lhs > 0.0);
  REQUIRE(r.ratio.has_value());
  CHECK(*r.ratio > 0.0);
}
