#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"

#include "biofilm/errors.hpp"
#include "biofilm/parametrix.hpp"
#include "biofilm/substrate.hpp"

using namespace biofilm;

namespace {

struct FixedSlab {
  std::vector<double> x;
  SubstrateState st;
};

std::vector<double> grid(int n, double L) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = L * i / (n - 1);
  return x;
}

FixedSlab setup(int nz, double L, const std::function<double(double)>& phi, double slope_top, BoundarySpec bc,
                RepresentationMode mode = RepresentationMode::image_corrected,
                std::shared_ptr<const KernelProvider> kp = nullptr) {
  FixedSlab f;
  f.x = grid(nz, L);
  std::vector<double> y;
  for (double xi : f.x) y.push_back(phi(xi));
  if (!kp) kp = std::make_shared<ConstantKernelProvider>(1.0);
  TimeSlice o;
  o.L = L;
  o.x = f.x;
  o.F.assign(1, std::vector<double>(nz, 0.0));
  SubstrateSettings s;
  s.mode = mode;
  f.st = make_substrate_state(1, std::move(bc), s, {kp}, 0.0, {profile_spline(f.x, y, slope_top)}, o);
  return f;
}

void advance(FixedSlab& f, double dt, int steps) {
  for (int k = 0; k < steps; ++k) {
    TimeSlice lv = f.st.levels.back();
    lv.t += dt;
    f.st.levels.push_back(lv);
    solve_boundary_level(f.st, 1);
  }
}

BoundarySpec dirichlet(Signal psi) {
  BoundarySpec b;
  b.psi = {std::move(psi)};
  b.Dstar = {1.0};
  return b;
}

Signal decaying_cos1() {
  return {[](double t) { return std::exp(-t) * std::cos(1.0); }, [](double t) { return -std::exp(-t) * std::cos(1.0); }};
}

FixedSlab manufactured(double dt, int nz = 64, RepresentationMode mode = RepresentationMode::image_corrected,
                       std::shared_ptr<const KernelProvider> kp = nullptr) {
  auto f = setup(nz, 1.0, [](double z) { return std::cos(z); }, -std::sin(1.0), dirichlet(decaying_cos1()), mode, kp);
  advance(f, dt, static_cast<int>(std::lround(0.1 / dt)));
  return f;
}

}  // namespace

TEST_CASE("zero data gives zero flux") {
  auto f = setup(32, 1.0, [](double) { return 0.0; }, 0.0, dirichlet(Signal::constant(0.0)));
  advance(f, 1e-2, 10);
  for (const auto& lv : f.st.levels) {
    CHECK(lv.theta[0] == 0.0);
    CHECK(lv.phi[0] == 0.0);
  }
}

TEST_CASE("constant data is a steady state") {
  const double s = 2.5;
  auto f = setup(32, 1.0, [&](double) { return s; }, 0.0, dirichlet(Signal::constant(s)));
  advance(f, 1e-2, 20);
  CHECK(std::abs(f.st.current().theta[0]) < 1e-6);
  CHECK(std::abs(eval_phi(f.st, 0) - s) < 1e-6);
  for (double v : eval_substrate_profile(f.st, 0, f.x)) CHECK(std::abs(v - s) < 1e-6);
}

TEST_CASE("manufactured heat solution") {
  auto f = manufactured(1e-3);
  const auto& c = f.st.current();
  CHECK(c.t == doctest::Approx(0.1));
  CHECK(std::abs(c.theta[0] - (-0.761397)) < 1e-3);
  CHECK(std::abs(c.phi[0] - 0.904837) < 1e-3);
  CHECK(std::abs(eval_substrate_profile(f.st, 0, {0.5})[0] - 0.794069) < 1e-3);
  CHECK(c.residual < 1e-3);
}

TEST_CASE("manufactured error halves with the step") {
  const double exact = -std::exp(-0.1) * std::sin(1.0);
  const double e1 = std::abs(manufactured(4e-3).st.current().theta[0] - exact);
  const double e2 = std::abs(manufactured(2e-3).st.current().theta[0] - exact);
  const double e3 = std::abs(manufactured(1e-3).st.current().theta[0] - exact);
  MESSAGE("theta errors " << e1 << " " << e2 << " " << e3);
  CHECK(e1 / e2 >= 1.8);
  CHECK(e2 / e3 >= 1.8);
}

namespace {

BoundarySpec robin(double h, double k, double Dstar, Signal psi) {
  BoundarySpec b;
  b.kind = BoundaryKind::robin;
  b.h = h;
  b.k = k;
  b.psi = {std::move(psi)};
  b.Dstar = {Dstar};
  return b;
}

Signal scaled(Signal s, double k) {
  return {[s, k](double t) { return k * s.value(t); }, [s, k](double t) { return k * s.rate(t); }};
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("Robin coefficients") {
  const auto b = robin(0.1, 1.0, 2.0, Signal::constant(1.0));
  CHECK(b.alpha1(0, 1.0) == doctest::Approx(20.0));
  CHECK(b.alpha2(0, 1.0) == doctest::Approx(20.0));
}

TEST_CASE("Robin constant state") {
  // the constant state is reproduced up to the second-order time quadrature
  const double s = 1.5, k = 2.0;
  auto error = [&](double dt) {
    auto f = setup(32, 1.0, [&](double) { return s; }, 0.0, robin(0.1, k, 2.0, Signal::constant(k * s)));
    advance(f, dt, static_cast<int>(std::lround(0.2 / dt)));
    double e = std::abs(f.st.current().trace[0] - s);
    for (double v : eval_substrate_profile(f.st, 0, f.x)) e = std::max(e, std::abs(v - s));
    return e;
  };
  const double e1 = error(1e-2), e2 = error(5e-3);
  MESSAGE("Robin constant-state errors " << e1 << " " << e2);
  CHECK(e1 < 1e-5);
  CHECK(e1 / e2 > 3.5);
}

TEST_CASE("Robin with h = 0 is the Dirichlet path with psi / k") {
  const double k = 2.0;
  auto cosz = [](double z) { return std::cos(z); };
  auto fr = setup(32, 1.0, cosz, -std::sin(1.0), robin(0.0, k, 1.0, scaled(decaying_cos1(), k)));
  auto fd = setup(32, 1.0, cosz, -std::sin(1.0), dirichlet(decaying_cos1()));
  advance(fr, 1e-2, 10);
  advance(fd, 1e-2, 10);
  CHECK(fr.st.current().theta[0] == fd.st.current().theta[0]);
  CHECK(fr.st.current().phi[0] == fd.st.current().phi[0]);
}

TEST_CASE("Robin converges to Dirichlet as h shrinks") {
  auto cosz = [](double z) { return std::cos(z); };
  auto fd = setup(32, 1.0, cosz, -std::sin(1.0), dirichlet(decaying_cos1()));
  advance(fd, 2e-3, 50);
  const auto ref = eval_substrate_profile(fd.st, 0, fd.x);
  std::vector<double> diffs;
  for (double h : {0.02, 0.01}) {
    auto fr = setup(32, 1.0, cosz, -std::sin(1.0), robin(h, 1.0, 1.0, decaying_cos1()));
    advance(fr, 2e-3, 50);
    diffs.push_back(sup_diff(eval_substrate_profile(fr.st, 0, fr.x), ref));
  }
  MESSAGE("sup differences " << diffs[0] << " " << diffs[1]);
  CHECK(diffs[0] / diffs[1] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("literal mode") {
  auto f = manufactured(1e-2, 32, RepresentationMode::paper_literal);
  CHECK(f.st.current().phi[0] == 0.0);
  CHECK(std::isfinite(f.st.current().theta[0]));
  CHECK_THROWS_AS(setup(16, 1.0, [](double) { return 1.0; }, 0.0, robin(0.1, 1.0, 1.0, Signal::constant(1.0)),
                        RepresentationMode::paper_literal),
                  SolverError);
}

TEST_CASE("flux at the inner wall") {
  const auto x = grid(64, 1.0);
  std::vector<double> c(64, 3.0), m;
  for (double xi : x) m.push_back(std::exp(-0.1) * std::cos(xi));
  CHECK(verify_flux_zero(x, c) < 1e-10);
  const double h = x[1];
  CHECK(verify_flux_zero(x, m) < h * h);
  auto f = manufactured(1e-3);
  CHECK(verify_flux_zero(f.x, eval_substrate_profile(f.st, 0, f.x)) < 1e-3);
}

TEST_CASE("general kernel provider reproduces the constant solver") {
  const double L = 1.0;
  auto run = [&](std::shared_ptr<const KernelProvider> kp) {
    auto f = manufactured(1e-2, 32, RepresentationMode::image_corrected, kp);
    return std::pair{f.st.current().theta[0], eval_substrate_profile(f.st, 0, f.x)};
  };
  ParametrixConfig cfg;
  SUBCASE("constant field through the general quadrature") {
    auto field = DiffusivityField::constant(1.0);
    const auto g = run(std::make_shared<GammaKernelProvider>(build_gamma(field, cfg, L)));
    const auto c = run(std::make_shared<ConstantKernelProvider>(1.0));
    CHECK(std::abs(g.first - c.first) < 1e-6);
    CHECK(sup_diff(g.second, c.second) < 1e-6);
  }
  SUBCASE("p = 0 rescales D") {
    auto field = DiffusivityField::uniform_porosity(1.0, 0.0);
    const auto g = run(std::make_shared<GammaKernelProvider>(build_gamma(field, cfg, L)));
    const auto c = run(std::make_shared<ConstantKernelProvider>(std::exp(-1.0)));
    CHECK(std::abs(g.first - c.first) < 1e-6);
    CHECK(sup_diff(g.second, c.second) < 1e-6);
  }
}

TEST_CASE("p = 1 field has a vanishing Levi density") {
  auto field = DiffusivityField::variable(1.0, [](double, double) { return 1.0; });
  const auto g = build_gamma(field, ParametrixConfig{}, 1.0);
  const kernels::KernelPoint p{0.6, 0.05, 0.5, 0.0};
  CHECK(std::abs(g.density(p, 1)) < 1e-14);
  CHECK(std::abs(g(p) - kernels::eval_K(p, 1.0)) < 1e-14);
}

TEST_CASE("node antiderivatives match segment integrals") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ConstantKernelProvider P(0.1 + u(rng));
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 40;
    std::vector<double> x(n), f(n);
    double at = 0.0;
    for (int k = 0; k < n; ++k) {
      at += k == 0 ? 0.0 : 0.001 + 0.05 * u(rng);
      x[k] = at;
      f[k] = 2.0 * u(rng) - 1.0;
    }
    const double z = (2.0 * u(rng) - 0.5) * at;
    const double t = 1.0, tau = 1.0 - std::pow(10.0, -6.0 * u(rng));
    double steep = 1.0;
    for (int k = 0; k + 1 < n; ++k) steep = std::max(steep, std::abs(f[k + 1] - f[k]) / (x[k + 1] - x[k]));
    for (bool slope : {false, true}) {
      const double fast = P.linear_integral(z, t, tau, x, f, slope);
      const double ref = P.KernelProvider::linear_integral(z, t, tau, x, f, slope);
      CHECK(std::abs(fast - ref) <= 1e-12 * (slope ? steep : 1.0));
    }
  }
}
