#include <doctest.h>

#include <cmath>

#include "biofilm/errors.hpp"
#include "biofilm/free_boundary.hpp"

using namespace biofilm;

namespace {

KineticsSpec linear_growth(double c) {
  KineticsSpec k;
  k.n = 1;
  k.m = 1;
  k.species.resize(1);
  k.species[0].rho = 1.0;
  k.custom = [c](std::span<const double> X, std::span<const double>, std::span<double> Ht,
                 std::span<double> F) {
    Ht[0] = c * X[0];
    F[0] = 0.0;
  };
  return k;
}

struct Run {
  BiomassState b;
  FreeBoundaryState fb;
  double z0_star = 0.0;
};

Run run(double c, SigmaSpec sigma, double T, double dt, double L0 = 1.0) {
  const auto spec = linear_growth(c);
  const auto grid = MaterialGrid::uniform(L0, 16);
  auto C = [](std::size_t n) { return NodeValues(n, std::vector<double>{0.0}); };
  Run r{make_initial_biomass(grid, 0.0, [](double) { return std::vector<double>{1.0}; }, C(17), spec),
        make_free_boundary(L0, 0.0, sigma), L0};
  const int steps = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i < steps; ++i) {
    auto nb = step_characteristics(r.b, C(r.b.size()), spec, dt);
    r.fb = step_boundary(r.fb, r.b, nb);
    r.b = std::move(nb);
    if (sigma.mode != SigmaMode::none) {
      r.z0_star = trim_domain(r.fb, r.b, L0 / 16);
      refresh_rates(r.b, C(r.b.size()), spec);
    }
  }
  return r;
}

SigmaSpec sigma(SigmaMode m, SigmaForm f, double c) {
  SigmaSpec s;
  s.mode = m;
  s.form = f;
  s.coeff = c;
  s.attach_X = {1.0};
  return s;
}

}  // namespace

TEST_CASE("static film keeps its thickness") {
  const auto r = run(0.0, {}, 1.0, 0.1);
  CHECK(r.fb.L == 1.0);
}

TEST_CASE("constant detachment") {
  const auto r = run(0.0, sigma(SigmaMode::detach, SigmaForm::constant, 0.05), 2.0, 0.01);
  CHECK(r.fb.L == doctest::Approx(1.0 - 0.05 * 2.0).epsilon(1e-13));
  CHECK(r.z0_star == doctest::Approx(r.fb.L).epsilon(1e-12));
  CHECK(r.b.top() == r.fb.L);
}

TEST_CASE("exponential growth of the top characteristic") {
  const auto r = run(0.1, {}, 1.0, 1e-3);
  CHECK(std::abs(r.fb.L - std::exp(0.1)) < 1e-6);
  CHECK(std::abs(r.fb.L - 1.1051709) < 1e-6);
  CHECK(std::abs(r.fb.L - r.b.eta.back()) <= 1e-10);
  const auto heun = run(0.1, sigma(SigmaMode::attach, SigmaForm::constant, 0.0), 1.0, 1e-3);
  CHECK(std::abs(heun.fb.L - std::exp(0.1)) < 1e-6);
}

TEST_CASE("balanced detachment holds the thickness") {
  const double c = 0.2;
  const auto r = run(c, sigma(SigmaMode::detach, SigmaForm::linear, c), 1.0, 0.01);
  CHECK(r.fb.L == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.z0_star * std::exp(c * 1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("attachment extends the material grid") {
  const auto r = run(0.0, sigma(SigmaMode::attach, SigmaForm::constant, 0.05), 2.0, 0.01);
  CHECK(r.fb.L == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(r.b.top() == r.fb.L);
  CHECK(r.b.size() > 17);
  CHECK_NOTHROW(check_biomass_invariants(r.b));
}

TEST_CASE("boundary errors") {
  auto spec = linear_growth(0.0);
  const auto grid = MaterialGrid::uniform(1.0, 16);
  auto b = make_initial_biomass(grid, 0.0, [](double) { return std::vector<double>{1.0}; },
                                NodeValues(17, std::vector<double>{0.0}), spec);
  auto fb = make_free_boundary(1.0, 0.0, sigma(SigmaMode::detach, SigmaForm::constant, 0.1));
  fb.L = 1.2;
  try {
    trim_domain(fb, b, 1.0 / 16);
    FAIL("expected throw");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::BoundaryOutsideDomain);
  }
  try {
    run(0.0, sigma(SigmaMode::detach, SigmaForm::constant, 2.0), 1.0, 0.01);
    FAIL("expected throw");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::ExtinctionReached);
  }
}

TEST_CASE("trajectory bounds") {
  const auto r = run(0.1, {}, 1.0, 0.01);
  const auto ok = check_trajectory_bounds(r.fb, 0.2, 1.0);
  CHECK(ok.lipschitz_ok);
  CHECK(ok.band_ok);
  CHECK(ok.max_rate == doctest::Approx(0.1 * std::exp(0.1)).epsilon(1e-2));
  CHECK_FALSE(check_trajectory_bounds(r.fb, 0.05, 1.0).lipschitz_ok);
}
