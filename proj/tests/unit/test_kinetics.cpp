#include <doctest.h>

#include <cmath>
#include <vector>

#include "biofilm/errors.hpp"
#include "biofilm/kinetics.hpp"

using namespace biofilm;

namespace {
KineticsSpec two_species() {
  KineticsSpec k;
  k.n = 2;
  k.m = 1;
  MonodSpecies a;
  a.rho = 1.0;
  a.mu_max = 1.0;
  a.K_S = {1.0};
  a.yield = {0.5};
  a.substrates = {0};
  MonodSpecies b = a;
  b.mu_max = 0.0;
  k.species = {a, b};
  return k;
}
}  // namespace

TEST_CASE("two-species monod example") {
  const auto k = two_species();
  const std::vector<double> X{0.5, 0.5}, C{1.0};
  const auto g = eval_growth_terms(k, X, C);
  CHECK(g.Htilde[0] == doctest::Approx(0.25));
  CHECK(g.Htilde[1] == doctest::Approx(0.0));
  CHECK(g.R == doctest::Approx(0.25));
  CHECK(g.H[0] == doctest::Approx(0.125));
  CHECK(g.H[1] == doctest::Approx(-0.125));
  const auto F = eval_substrate_sources(k, X, C);
  CHECK(F[0] == doctest::Approx(-0.5));
}

TEST_CASE("substrate source examples") {
  const auto k = monod_single(1.0, 1.0, 0.5, 1.0);
  const std::vector<double> X{1.0}, C{1.0};
  CHECK(eval_growth_terms(k, X, C).Htilde[0] == doctest::Approx(0.5));
  CHECK(eval_substrate_sources(k, X, C)[0] == doctest::Approx(-1.0));
  const std::vector<double> X0{0.0};
  CHECK(eval_substrate_sources(k, X0, C)[0] == 0.0);
  for (double x = 0; x <= 1; x += 0.1)
    for (double c = 0; c <= 3; c += 0.3) {
      const std::vector<double> Xv{x}, Cv{c};
      CHECK(eval_substrate_sources(k, Xv, Cv)[0] <= 0.0);
    }
}

TEST_CASE("no substrate no growth") {
  const auto k = two_species();
  const std::vector<double> X{0.5, 0.5}, C{0.0};
  const auto g = eval_growth_terms(k, X, C);
  CHECK(g.Htilde[0] == 0.0);
  CHECK(g.R == 0.0);
  CHECK(g.H[1] == 0.0);
}

TEST_CASE("volume fractions are conserved by H") {
  auto k = two_species();
  k.species[1].mu_max = 0.7;
  k.species[1].rho = 2.0;
  k.species[0].decay = 0.1;
  for (double x0 = 0.0; x0 <= 1.0; x0 += 0.125) {
    for (double c = 0.0; c <= 2.0; c += 0.25) {
      const std::vector<double> X{x0, 2.0 * (1 - x0)}, C{c};
      const auto g = eval_growth_terms(k, X, C);
      CHECK(std::abs(g.H[0] / 1.0 + g.H[1] / 2.0) < 1e-14);
    }
  }
}

TEST_CASE("negative state") {
  const auto k = two_species();
  std::vector<double> X{-1e-3, 0.5}, C{1.0};
  try {
    eval_growth_terms(k, X, C);
    FAIL("expected throw");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::NegativeState);
  }
  X = {-1e-14, 0.5};
  CHECK_NOTHROW(eval_growth_terms(k, X, C));
}

TEST_CASE("lipschitz of a linear field") {
  StateBox box{{0.0}, {1.0}};
  auto est = estimate_lipschitz([](std::span<const double> v) { return std::vector<double>{2 * v[0]}; },
                                box);
  CHECK(est.raw == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(est.reported == doctest::Approx(2.2).epsilon(1e-6));
}

TEST_CASE("lipschitz of single monod") {
  const auto k = monod_single(1.0, 1.0, 1.0, 1.0);
  StateBox box{{0.0, 0.0}, {1.0, 10.0}};
  const auto est = estimate_lipschitz(k, box);
  // gradient of X C/(1+C) and of its negative is largest at X=1, C=0: |(0, 1)| = 1
  CHECK(est.raw == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sup_velocity_source(k, box) == doctest::Approx(10.0 / 11.0).epsilon(1e-9));
}

TEST_CASE("lipschitz refinement is monotone") {
  const auto k = monod_single(2.0, 0.3, 0.5, 1.0);
  StateBox box{{0.0, 0.0}, {1.0, 1.0}};
  LipschitzOptions coarse, fine;
  coarse.step = 0.25;
  fine.step = 0.125;
  CHECK(estimate_lipschitz(k, box, fine).raw >= estimate_lipschitz(k, box, coarse).raw);
}
