#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace biofilm {

/// Gauss-Legendre rule on [-1, 1]. Results for a given n are cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Product-integration weights: sum_k w[k] g(grid[k]) equals
/// int_{grid[0]}^{target} g(tau) (target - tau)^{-1/2} dtau exactly when g is
/// piecewise linear on the grid. `target` must equal the last grid node.
std::vector<double> quad_weights_singular(std::span<const double> grid, double target);

/// Weights for int_{grid[0]}^{target} g(tau) sqrt(tau - grid[0]) (target - tau)^{-1/2} dtau
/// with g piecewise linear on the grid (Gauss-Legendre after tau = t0 + T sin^2 phi).
std::vector<double> quad_weights_sqrt(std::span<const double> grid, double target);

/// Piecewise polynomial of degree <= 3 with explicit breakpoints. Piece i
/// covers [breaks[i], breaks[i+1]] and is written in powers of (x - breaks[i]).
/// Outside the breakpoints the first/last piece is extended.
class PiecewisePoly {
 public:
  using Coeffs = std::array<double, 4>;

  PiecewisePoly() = default;
  PiecewisePoly(std::vector<double> breaks, std::vector<Coeffs> pieces);

  static PiecewisePoly constant(double value);
  static PiecewisePoly linear_interpolant(std::span<const double> x, std::span<const double> y);
  /// Cubic spline through (x, y) with prescribed end slopes.
  static PiecewisePoly clamped_spline(std::span<const double> x, std::span<const double> y,
                                      double slope_left, double slope_right);

  double operator()(double x) const;
  double derivative(double x) const;
  PiecewisePoly derivative() const;

  /// Exact sup of |p| over [lo, hi] (critical points of cubics are solved in closed form).
  double sup_abs(double lo, double hi) const;

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<Coeffs>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  /// Extent of piece i including the extension of the end pieces.
  double piece_lo(std::size_t i) const;
  double piece_hi(std::size_t i) const;
  bool empty() const { return pieces_.empty(); }
  int degree() const;

  bool operator==(const PiecewisePoly&) const = default;

 private:
  std::size_t locate(double x) const;

  // breaks_.size() == pieces_.size() + 1, except for a single global piece
  // where breaks_ = {x0} and the piece extends in both directions.
  std::vector<double> breaks_;
  std::vector<Coeffs> pieces_;
};

/// int_a^b p(xi) gaussian(z - xi, s) dxi where p(xi) = sum_k c[k] (xi - a)^k.
/// s = 0 is the distributional limit (p(z), halved at the segment ends).
double gaussian_poly_integral(double z, double s, double a, double b,
                              const PiecewisePoly::Coeffs& c);

/// Sum of gaussian_poly_integral over the pieces of `p` restricted to [lo, hi].
double gaussian_pp_integral(const PiecewisePoly& p, double z, double s, double lo, double hi);

/// Time-dependent scalar signal with its derivative (boundary data psi(t)).
struct Signal {
  std::function<double(double)> value;
  std::function<double(double)> rate;

  static Signal from_pp(const PiecewisePoly& p);
  static Signal constant(double v);
};

}  // namespace biofilm
