#include <chrono>
#include <cmath>

#include "doctest.h"

#include "biofilm/driver.hpp"
#include "biofilm/errors.hpp"

using namespace biofilm;

namespace {

Problem monod_problem() {
  Problem p;
  p.L0 = 0.1;
  p.N_z = 32;
  p.kinetics = monod_single(4.0, 0.5, 0.5, 1.0);
  p.X0 = {PiecewisePoly::constant(1.0)};
  p.D = {0.1};
  p.C0 = {PiecewisePoly::constant(1.0)};
  p.psi = {PiecewisePoly::constant(1.0)};
  return p;
}

// Htilde = c X, F = 0: R = c for rho = 1
Problem constant_growth(double c) {
  auto p = monod_problem();
  p.L0 = 1.0;
  p.kinetics.custom = [c](std::span<const double> X, std::span<const double>, std::span<double> H,
                          std::span<double> F) {
    H[0] = c * X[0];
    F[0] = 0.0;
  };
  return p;
}

Problem inert(bool constant_data) {
  auto p = monod_problem();
  p.kinetics.custom = [](std::span<const double>, std::span<const double>, std::span<double> H,
                         std::span<double> F) {
    H[0] = 0.0;
    F[0] = 0.0;
  };
  if (!constant_data) {
    p.C0 = {PiecewisePoly::clamped_spline(std::vector<double>{0.0, 0.05, 0.1}, std::vector<double>{0.5, 0.7, 1.0}, 0.0, 4.0)};
  }
  return p;
}

}  // namespace

TEST_CASE("inert constant problem is a fixed point") {
  auto st = init_driver(inert(true));
  MarchConfig cfg;
  cfg.dt = 1e-2;
  const auto first = picard_step(st, cfg.dt, cfg);
  CHECK(first.accepted);
  CHECK(first.iterations <= 2);
  CHECK(first.residuals.front() < 1e-9);
  if (first.residuals.size() > 1) CHECK(first.residuals.back() == 0.0);
  for (int k = 0; k < 4; ++k) {
    const auto rep = picard_step(st, cfg.dt, cfg);
    CHECK(rep.accepted);
    CHECK(rep.iterations <= 2);
  }
  CHECK(st.fb.L == 0.1);
  for (const auto& c : st.C) CHECK(std::abs(c[0] - 1.0) < 1e-6);
}

TEST_CASE("state-independent map settles after one sweep") {
  auto st = init_driver(inert(false));
  MarchConfig cfg;
  cfg.dt = 1e-2;
  const auto rep = picard_step(st, cfg.dt, cfg);
  REQUIRE(rep.residuals.size() == 2);
  CHECK(rep.residuals[1] == 0.0);
}

TEST_CASE("single sweep on a nonlinear problem does not contract") {
  auto st = init_driver(monod_problem());
  MarchConfig cfg;
  cfg.dt = 1e-2;
  cfg.picard_max_iter = 1;
  CHECK_THROWS_AS(picard_step(st, cfg.dt, cfg), SolverError);
  try {
    picard_step(st, cfg.dt, cfg);
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::NonContraction);
  }
  CHECK(st.step == 0);
}

TEST_CASE("constant growth rate gives exponential thickness") {
  MarchConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.output_stride = 1000;
  const auto out = run_simulation(constant_growth(0.1), cfg);
  CHECK(std::abs(out.frames.back().L - std::exp(0.1)) < 1e-6);
  CHECK(out.frames.size() == 2);
}

TEST_CASE("zero-kinetics run keeps data and thickness") {
  MarchConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 0.2;
  const auto out = run_simulation(inert(true), cfg);
  for (const auto& f : out.frames) {
    CHECK(f.L == 0.1);
    for (double c : f.C[0]) CHECK(std::abs(c - 1.0) < 1e-6);
  }
}

TEST_CASE("Monod run is deterministic and contracting") {
  MarchConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_end = 0.1;
  cfg.output_stride = 10;
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = run_simulation(monod_problem(), cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto b = run_simulation(monod_problem(), cfg);
  MESSAGE("Monod 50 steps: " << secs << " s, L = " << a.frames.back().L);
  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    CHECK(a.frames[k].L == b.frames[k].L);
    CHECK(a.frames[k].C == b.frames[k].C);
    CHECK(a.frames[k].X == b.frames[k].X);
  }
  double qmax = 0.0, bres = 0.0;
  int iters = 0;
  for (const auto& s : a.steps) {
    qmax = std::max(qmax, s.max_ratio);
    bres = std::max(bres, s.boundary_residual);
    iters = std::max(iters, s.iterations);
  }
  MESSAGE("max q " << qmax << " max iterations " << iters << " boundary residual " << bres);
  CHECK(qmax < 1.0);
  CHECK(a.frames.back().L > 0.1);
  for (double c : a.frames.back().C[0]) {
    CHECK(c > 0.0);
    CHECK(c <= 1.0 + 1e-6);
  }
}

TEST_CASE("rebaseline") {
  SUBCASE("at the origin it is the identity") {
    auto st = init_driver(monod_problem());
    const auto before = st.sub.levels;
    rebaseline(st);
    CHECK(st.sub.levels.size() == before.size());
    CHECK(st.sub.initial[0] == init_driver(monod_problem()).sub.initial[0]);
  }
  SUBCASE("constant steady state is unchanged") {
    MarchConfig cfg;
    cfg.dt = 1e-2;
    auto st = init_driver(inert(true));
    for (int k = 0; k < 10; ++k) REQUIRE(picard_step(st, cfg.dt, cfg).accepted);
    const auto before = current_concentrations(st);
    rebaseline(st);
    CHECK(st.sub.levels.size() == 1);
    CHECK(current_concentrations(st) == before);
    MarchConfig a, b;
    a.dt = b.dt = 1e-2;
    a.t_end = b.t_end = 0.2;
    b.rebaseline_at = {0.1};
    const auto ra = run_simulation(inert(true), a);
    const auto rb = run_simulation(inert(true), b);
    CHECK(rb.steps[9].rebaselined);
    for (std::size_t k = 0; k < ra.frames.back().C[0].size(); ++k)
      CHECK(std::abs(ra.frames.back().C[0][k] - rb.frames.back().C[0][k]) <= 1e-6);
  }
  SUBCASE("Monod history restart converges to transparency") {
    auto diff = [](double dt) {
      MarchConfig a, b;
      a.dt = b.dt = dt;
      a.t_end = b.t_end = 0.06;
      b.rebaseline_at = {0.04};
      const auto ra = run_simulation(monod_problem(), a);
      const auto rb = run_simulation(monod_problem(), b);
      double d = 0.0;
      for (std::size_t k = 0; k < ra.frames.back().C[0].size(); ++k)
        d = std::max(d, std::abs(ra.frames.back().C[0][k] - rb.frames.back().C[0][k]));
      return d;
    };
    const double coarse = diff(2e-3);
    const double fine = diff(1e-3);
    MESSAGE("rebaseline difference " << coarse << " -> " << fine);
    CHECK(coarse <= 1e-5);
    CHECK(fine * 3.0 < coarse);
  }
}
