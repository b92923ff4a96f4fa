#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "biofilm/kernels.hpp"
#include "biofilm/numerics.hpp"

using namespace biofilm;

namespace {

// brute-force composite Gauss on many panels
template <class F>
double brute(F f, double a, double b, int panels = 4000) {
  const auto& r = gauss_legendre(10);
  const double h = (b - a) / panels;
  double acc = 0;
  for (int k = 0; k < panels; ++k) {
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      const double x = a + h * (k + 0.5 * (r.nodes[q] + 1));
      acc += 0.5 * h * r.weights[q] * f(x);
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("gauss legendre integrates polynomials") {
  const auto& r = gauss_legendre(5);
  double s0 = 0, s8 = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    s0 += r.weights[i];
    s8 += r.weights[i] * std::pow(r.nodes[i], 8);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s8 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("singular product weights") {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i * i / 10.0);
  const double T = grid.back();
  const auto w = quad_weights_singular(grid, T);
  double s = 0, lin = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    s += w[k];
    lin += w[k] * grid[k];
  }
  CHECK(s == doctest::Approx(2 * std::sqrt(T)).epsilon(1e-13));
  // int_0^T tau (T - tau)^{-1/2} = 4/3 T^{3/2}
  CHECK(lin == doctest::Approx(4.0 / 3.0 * std::pow(T, 1.5)).epsilon(1e-13));
}

TEST_CASE("clamped spline reproduces cubics") {
  auto f = [](double x) { return 1 - 2 * x + 0.5 * x * x - 0.3 * x * x * x; };
  auto df = [](double x) { return -2 + x - 0.9 * x * x; };
  std::vector<double> x{0, 0.3, 0.5, 1.1, 1.2, 2.0}, y;
  for (double v : x) y.push_back(f(v));
  auto p = PiecewisePoly::clamped_spline(x, y, df(0), df(2));
  for (double v = 0; v <= 2; v += 0.037) {
    CHECK(p(v) == doctest::Approx(f(v)).epsilon(1e-12));
    CHECK(p.derivative(v) == doctest::Approx(df(v)).epsilon(1e-11));
  }
  CHECK(p.sup_abs(0, 2) == doctest::Approx(std::abs(f(2.0))).epsilon(1e-12));
}

TEST_CASE("linear interpolant and constant") {
  std::vector<double> x{0, 1, 3}, y{1, 3, -1};
  auto p = PiecewisePoly::linear_interpolant(x, y);
  CHECK(p(0.5) == doctest::Approx(2.0));
  CHECK(p(2.0) == doctest::Approx(1.0));
  CHECK(p.degree() == 1);
  auto c = PiecewisePoly::constant(4.5);
  CHECK(c(-10) == 4.5);
  CHECK(c(1e6) == 4.5);
  CHECK(c.derivative(3.0) == 0.0);
}

TEST_CASE("gaussian polynomial integral against brute force") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const double a = u(rng), b = a + 0.05 + std::abs(u(rng));
    const double z = 1.5 * u(rng);
    const double s = std::pow(10.0, -4 + 4 * std::abs(u(rng)));
    PiecewisePoly::Coeffs c{u(rng), u(rng), u(rng), u(rng)};
    auto p = [&](double xi) {
      const double d = xi - a;
      return c[0] + d * (c[1] + d * (c[2] + d * c[3]));
    };
    const double ref = brute([&](double xi) { return p(xi) * kernels::gaussian(z - xi, s); }, a, b);
    const double got = gaussian_poly_integral(z, s, a, b, c);
    CHECK(got == doctest::Approx(ref).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("gaussian integral limit at zero time") {
  PiecewisePoly::Coeffs c{2, 1, 0, 0};
  CHECK(gaussian_poly_integral(0.5, 0.0, 0, 1, c) == doctest::Approx(2.5));
  CHECK(gaussian_poly_integral(0.0, 0.0, 0, 1, c) == doctest::Approx(1.0));
  CHECK(gaussian_poly_integral(2.0, 0.0, 0, 1, c) == 0.0);
}

TEST_CASE("piecewise gaussian integral") {
  std::vector<double> x{0, 0.25, 0.6, 1.0}, y{1, 0.5, 0.8, 0.2};
  auto p = PiecewisePoly::clamped_spline(x, y, 0.0, -1.0);
  for (double z : {0.0, 0.3, 0.9}) {
    for (double s : {1e-3, 0.05, 2.0}) {
      const double ref = brute([&](double xi) { return p(xi) * kernels::gaussian(z - xi, s); }, 0, 1);
      CHECK(gaussian_pp_integral(p, z, s, 0, 1) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("Gaussian integral of a single global piece") {
  const auto c = PiecewisePoly::constant(2.0);
  const double direct = gaussian_poly_integral(0.3, 0.01, 0.0, 1.0, {2.0, 0, 0, 0});
  CHECK(gaussian_pp_integral(c, 0.3, 0.01, 0.0, 1.0) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("sqrt-weighted product weights") {
  const std::vector<double> grid{0.0, 0.1, 0.25, 0.3, 0.5};
  const auto w = quad_weights_sqrt(grid, 0.5);
  double sum = 0.0, lin = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    sum += w[k];
    lin += w[k] * grid[k];
  }
  // int_0^T sqrt(tau)/sqrt(T - tau) = pi T / 2, int_0^T tau^{3/2}/sqrt(T - tau) = 3 pi T^2 / 8
  CHECK(sum == doctest::Approx(std::numbers::pi * 0.25).epsilon(1e-13));
  CHECK(lin == doctest::Approx(3.0 * std::numbers::pi * 0.25 / 8.0).epsilon(1e-13));
}
