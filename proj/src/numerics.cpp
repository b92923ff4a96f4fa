#include "biofilm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "biofilm/kernels.hpp"

namespace biofilm {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double horner(const PiecewisePoly::Coeffs& c, double u) {
  return ((c[3] * u + c[2]) * u + c[1]) * u + c[0];
}

double horner_d(const PiecewisePoly::Coeffs& c, double u) {
  return (3.0 * c[3] * u + 2.0 * c[2]) * u + c[1];
}

// 0.5 * (erf(hi) - erf(lo)) without cancellation in the tails.
double half_erf_difference(double lo, double hi) {
  if (lo >= 0.0) return 0.5 * (std::erfc(lo) - std::erfc(hi));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi) - std::erfc(-lo));
  return 0.5 * (std::erf(hi) - std::erf(lo));
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

std::vector<double> quad_weights_singular(std::span<const double> grid, double target) {
  std::vector<double> w(grid.size(), 0.0);
  if (grid.size() < 2) return w;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid[k];
    const double b = grid[k + 1];
    const double h = b - a;
    if (!(h > 0.0)) throw std::invalid_argument("quad_weights_singular: grid not increasing");
    const double ra = std::sqrt(std::max(0.0, target - a));
    const double rb = std::sqrt(std::max(0.0, target - b));
    const double sum = ra + rb;
    // I0 = int_a^b (target-tau)^{-1/2}, J = int_a^b (tau-a)(target-tau)^{-1/2},
    // both in a cancellation-free form.
    const double i0 = 2.0 * h / sum;
    const double j = (2.0 * h / 3.0) * (h / sum) * (2.0 * ra + rb) / sum;
    w[k] += i0 - j / h;
    w[k + 1] += j / h;
  }
  return w;
}

std::vector<double> quad_weights_sqrt(std::span<const double> grid, double target) {
  std::vector<double> w(grid.size(), 0.0);
  if (grid.size() < 2) return w;
  const double t0 = grid.front();
  const double T = target - t0;
  if (!(T > 0.0)) throw std::invalid_argument("quad_weights_sqrt: target must exceed grid start");
  const auto& rule = gauss_legendre(8);
  auto angle = [&](double tau) { return std::asin(std::sqrt(std::clamp((tau - t0) / T, 0.0, 1.0))); };
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid[k];
    const double b = grid[k + 1];
    const double h = b - a;
    if (!(h > 0.0)) throw std::invalid_argument("quad_weights_sqrt: grid not increasing");
    const double pa = angle(a), pb = angle(b);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double ph = pa + 0.5 * (pb - pa) * (rule.nodes[q] + 1.0);
      const double s = std::sin(ph);
      const double tau = t0 + T * s * s;
      const double wt = 0.5 * (pb - pa) * rule.weights[q] * 2.0 * T * s * s;
      w[k] += wt * (b - tau) / h;
      w[k + 1] += wt * (tau - a) / h;
    }
  }
  return w;
}

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<Coeffs> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
  if (pieces_.empty() || breaks_.size() != pieces_.size() + 1) {
    throw std::invalid_argument("PiecewisePoly: need breaks.size() == pieces.size() + 1");
  }
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_[i + 1] > breaks_[i])) {
      throw std::invalid_argument("PiecewisePoly: breakpoints must be strictly increasing");
    }
  }
}

PiecewisePoly PiecewisePoly::constant(double value) {
  return PiecewisePoly({0.0, std::numeric_limits<double>::infinity()}, {Coeffs{value, 0, 0, 0}});
}

PiecewisePoly PiecewisePoly::linear_interpolant(std::span<const double> x,
                                                std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_interpolant: need >= 2 matching samples");
  }
  std::vector<Coeffs> pieces;
  pieces.reserve(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    pieces.push_back({y[i], (y[i + 1] - y[i]) / (x[i + 1] - x[i]), 0.0, 0.0});
  }
  return PiecewisePoly(std::vector<double>(x.begin(), x.end()), std::move(pieces));
}

PiecewisePoly PiecewisePoly::clamped_spline(std::span<const double> x, std::span<const double> y,
                                            double slope_left, double slope_right) {
  const std::size_t n = x.size();
  if (y.size() != n || n < 2) throw std::invalid_argument("clamped_spline: need >= 2 samples");
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  std::vector<double> m(n, 0.0);
  m[0] = slope_left;
  m[n - 1] = slope_right;
  if (n > 2) {
    // Thomas algorithm on the interior slope equations
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    std::vector<double> lower(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = r + 1;
      lower[r] = h[i];
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      upper[r] = h[i - 1];
      rhs[r] = 3.0 * (h[i] * delta[i - 1] + h[i - 1] * delta[i]);
    }
    rhs[0] -= lower[0] * m[0];
    rhs[k - 1] -= upper[k - 1] * m[n - 1];
    for (std::size_t r = 1; r < k; ++r) {
      const double f = lower[r] / diag[r - 1];
      diag[r] -= f * upper[r - 1];
      rhs[r] -= f * rhs[r - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) {
      m[r + 1] = (rhs[r] - upper[r] * m[r + 2]) / diag[r];
    }
  }
  std::vector<Coeffs> pieces(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pieces[i] = {y[i], m[i], (3.0 * delta[i] - 2.0 * m[i] - m[i + 1]) / h[i],
                 (m[i] + m[i + 1] - 2.0 * delta[i]) / (h[i] * h[i])};
  }
  return PiecewisePoly(std::vector<double>(x.begin(), x.end()), std::move(pieces));
}

std::size_t PiecewisePoly::locate(double x) const {
  if (pieces_.empty()) throw std::logic_error("PiecewisePoly: empty");
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end() - 1, x);
  if (it == breaks_.begin()) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(it - breaks_.begin()) - 1,
                               pieces_.size() - 1);
}

double PiecewisePoly::operator()(double x) const {
  const std::size_t i = locate(x);
  return horner(pieces_[i], x - breaks_[i]);
}

double PiecewisePoly::derivative(double x) const {
  const std::size_t i = locate(x);
  return horner_d(pieces_[i], x - breaks_[i]);
}

PiecewisePoly PiecewisePoly::derivative() const {
  std::vector<Coeffs> d(pieces_.size());
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& c = pieces_[i];
    d[i] = {c[1], 2.0 * c[2], 3.0 * c[3], 0.0};
  }
  return PiecewisePoly(breaks_, std::move(d));
}

int PiecewisePoly::degree() const {
  int deg = 0;
  for (const auto& c : pieces_) {
    for (int k = 3; k > deg; --k) {
      if (c[k] != 0.0) {
        deg = k;
        break;
      }
    }
  }
  return deg;
}

double PiecewisePoly::sup_abs(double lo, double hi) const {
  double best = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    double a = i == 0 ? lo : std::max(lo, breaks_[i]);
    double b = i + 1 == pieces_.size() ? hi : std::min(hi, breaks_[i + 1]);
    if (b < a) continue;
    const auto& c = pieces_[i];
    const double u0 = a - breaks_[i];
    const double u1 = b - breaks_[i];
    std::vector<double> cand{u0, u1};
    // roots of c1 + 2 c2 u + 3 c3 u^2
    const double qa = 3.0 * c[3], qb = 2.0 * c[2], qc = c[1];
    if (qa != 0.0) {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        cand.push_back((-qb + r) / (2.0 * qa));
        cand.push_back((-qb - r) / (2.0 * qa));
      }
    } else if (qb != 0.0) {
      cand.push_back(-qc / qb);
    }
    for (double u : cand) {
      if (u >= u0 && u <= u1) best = std::max(best, std::abs(horner(c, u)));
    }
  }
  return best;
}

double gaussian_poly_integral(double z, double s, double a, double b,
                              const PiecewisePoly::Coeffs& c) {
  if (!(b > a)) return 0.0;
  if (s == 0.0) {
    if (z < a || z > b) return 0.0;
    const double weight = (z == a || z == b) ? 0.5 : 1.0;
    return weight * horner(c, z - a);
  }
  const double w = b - a;
  if (w * w <= s) {
    // segment narrow against the kernel width: Gauss in xi, 4 points once w^2 <= s/16
    static const GaussRule& g4 = gauss_legendre(4);
    static const GaussRule& g8 = gauss_legendre(8);
    const GaussRule& rule = 16.0 * w * w <= s ? g4 : g8;
    const double inv4s = 0.25 / s;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double u = 0.5 * w * (rule.nodes[k] + 1.0);
      const double y = z - (a + u);
      acc += rule.weights[k] * horner(c, u) * std::exp(-y * y * inv4s);
    }
    return 0.5 * w * acc * kernels::kInvSqrt4Pi / std::sqrt(s);
  }
  const double ya = a - z;
  const double yb = b - z;
  const double r = 2.0 * std::sqrt(s);
  const double ga = kernels::gaussian(ya, s);
  const double gb = kernels::gaussian(yb, s);
  std::array<double, 4> mom{};
  mom[0] = half_erf_difference(ya / r, yb / r);
  mom[1] = -2.0 * s * (gb - ga);
  mom[2] = 2.0 * s * mom[0] - 2.0 * s * (yb * gb - ya * ga);
  mom[3] = 4.0 * s * mom[1] - 2.0 * s * (yb * yb * gb - ya * ya * ga);
  // p(xi) = sum_k c_k (y - ya)^k with y = xi - z
  const double q = -ya;
  const double d0 = c[0] + q * (c[1] + q * (c[2] + q * c[3]));
  const double d1 = c[1] + q * (2.0 * c[2] + 3.0 * q * c[3]);
  const double d2 = c[2] + 3.0 * q * c[3];
  const double d3 = c[3];
  return d0 * mom[0] + d1 * mom[1] + d2 * mom[2] + d3 * mom[3];
}

double gaussian_pp_integral(const PiecewisePoly& p, double z, double s, double lo, double hi) {
  double acc = 0.0;
  const auto& br = p.breaks();
  const auto& pc = p.pieces();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const double a = std::max(lo, p.piece_lo(i));
    const double b = std::min(hi, p.piece_hi(i));
    if (!(b > a)) continue;
    // skip pieces where the Gaussian is negligible (>= 38 standard widths away)
    if (s > 0.0) {
      const double dist = z < a ? a - z : (z > b ? z - b : 0.0);
      if (dist * dist > 600.0 * s) continue;
    }
    // re-express the piece in powers of (xi - a)
    const auto& c = pc[i];
    const double o = a - br[i];
    PiecewisePoly::Coeffs shifted{c[0] + o * (c[1] + o * (c[2] + o * c[3])),
                                  c[1] + o * (2.0 * c[2] + 3.0 * o * c[3]),
                                  c[2] + 3.0 * o * c[3], c[3]};
    acc += gaussian_poly_integral(z, s, a, b, shifted);
  }
  return acc;
}

double PiecewisePoly::piece_lo(std::size_t i) const {
  return i == 0 ? -std::numeric_limits<double>::infinity() : breaks_[i];
}

double PiecewisePoly::piece_hi(std::size_t i) const {
  return i + 1 >= pieces_.size() ? std::numeric_limits<double>::infinity() : breaks_[i + 1];
}

Signal Signal::from_pp(const PiecewisePoly& p) {
  return Signal{[p](double t) { return p(t); }, [p](double t) { return p.derivative(t); }};
}

Signal Signal::constant(double v) {
  return Signal{[v](double) { return v; }, [](double) { return 0.0; }};
}

}  // namespace biofilm
