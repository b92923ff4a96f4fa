#include "biofilm/kernel_provider.hpp"

#include <algorithm>
#include <cmath>

#include "biofilm/errors.hpp"
#include "biofilm/kernels.hpp"

namespace biofilm {

namespace {

double elapsed(double t, double tau) {
  if (!(t > tau)) throw SolverError(ErrorCode::DegenerateTime, "kernel evaluated with t <= tau");
  return t - tau;
}

double horner(const PiecewisePoly::Coeffs& c, double u) {
  return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
}

}  // namespace

double KernelProvider::linear_integral(double z, double t, double tau, std::span<const double> x,
                                       std::span<const double> f, bool slope) const {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    if (!(h > 0.0)) continue;
    const double m = (f[i + 1] - f[i]) / h;
    const PiecewisePoly::Coeffs c = slope ? PiecewisePoly::Coeffs{m, 0, 0, 0} : PiecewisePoly::Coeffs{f[i], m, 0, 0};
    if (c[0] == 0.0 && c[1] == 0.0) continue;
    acc += space_integral(z, t, tau, x[i], x[i + 1], c);
  }
  return acc;
}

ConstantKernelProvider::ConstantKernelProvider(double D) : D_(D) {
  if (!(D > 0.0)) throw SolverError(ErrorCode::NonParabolic, "diffusivity must be positive");
}

double ConstantKernelProvider::gamma(double z, double t, double xi, double tau) const {
  return kernels::gaussian(z - xi, D_ * elapsed(t, tau));
}

double ConstantKernelProvider::gamma_dz(double z, double t, double xi, double tau) const {
  return kernels::gaussian_dx(z - xi, D_ * elapsed(t, tau));
}

double ConstantKernelProvider::gamma_dxi(double z, double t, double xi, double tau) const {
  return -kernels::gaussian_dx(z - xi, D_ * elapsed(t, tau));
}

double ConstantKernelProvider::space_integral(double z, double t, double tau, double a, double b,
                                              const PiecewisePoly::Coeffs& c) const {
  const double s = t > tau ? D_ * (t - tau) : 0.0;
  if (s > 0.0) {
    const double dist = z < a ? a - z : (z > b ? z - b : 0.0);
    if (dist * dist > 600.0 * s) return 0.0;
  }
  return gaussian_poly_integral(z, s, a, b, c);
}

double ConstantKernelProvider::linear_integral(double z, double t, double tau, std::span<const double> x,
                                               std::span<const double> f, bool slope) const {
  if (!(t > tau) || x.size() < 2) return KernelProvider::linear_integral(z, t, tau, x, f, slope);
  const double s = D_ * (t - tau);
  const double r = 2.0 * std::sqrt(s);
  const double g0 = kernels::kInvSqrt4Pi / std::sqrt(s);
  const double inv4s = 0.25 / s;
  // cumulative Gaussian and first moment -2 s g at each node, y = xi - z
  auto node = [&](std::size_t k, double& Phi, double& M1) {
    const double y = x[k] - z;
    Phi = 0.5 * std::erfc(-y / r);
    M1 = -2.0 * s * g0 * std::exp(-y * y * inv4s);
  };
  double acc = 0.0;
  double Pa, Ma;
  node(0, Pa, Ma);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double Pb, Mb;
    node(i + 1, Pb, Mb);
    const double h = x[i + 1] - x[i];
    if (h > 0.0) {
      const double m = (f[i + 1] - f[i]) / h;
      if (slope) {
        acc += m * (Pb - Pa);
      } else {
        acc += (f[i] - m * (x[i] - z)) * (Pb - Pa) + m * (Mb - Ma);
      }
    }
    Pa = Pb;
    Ma = Mb;
  }
  return acc;
}

GammaKernelProvider::GammaKernelProvider(GammaEvaluator gamma, int panel_nodes)
    : gamma_(std::move(gamma)), panel_nodes_(panel_nodes) {}

double GammaKernelProvider::diffusivity(double z, double t) const { return gamma_.field().a(z, t); }

double GammaKernelProvider::gamma(double z, double t, double xi, double tau) const {
  return gamma_(kernels::KernelPoint{z, t, xi, tau});
}

double GammaKernelProvider::gamma_dz(double z, double t, double xi, double tau) const {
  return gamma_.dz(kernels::KernelPoint{z, t, xi, tau});
}

double GammaKernelProvider::gamma_dxi(double z, double t, double xi, double tau) const {
  const double s = elapsed(t, tau);
  const double h = 1e-4 * std::sqrt(diffusivity(xi, tau) * s);
  return (gamma(z, t, xi + h, tau) - gamma(z, t, xi - h, tau)) / (2.0 * h);
}

double GammaKernelProvider::space_integral(double z, double t, double tau, double a, double b,
                                           const PiecewisePoly::Coeffs& c) const {
  if (!(b > a)) return 0.0;
  if (!(t > tau)) {
    if (z < a || z > b) return 0.0;
    return ((z == a || z == b) ? 0.5 : 1.0) * horner(c, z - a);
  }
  const double s = t - tau;
  const double width = std::sqrt(std::max(diffusivity(z, t), diffusivity(a, tau)) * s);
  // restrict to the window where the kernel is non-negligible
  const double lo = std::max(a, z - 40.0 * width);
  const double hi = std::min(b, z + 40.0 * width);
  if (!(hi > lo)) return 0.0;
  const auto& rule = gauss_legendre(panel_nodes_);
  const int panels = std::clamp(static_cast<int>(std::ceil((hi - lo) / width)), 1, 400);
  const double h = (hi - lo) / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double xi = lo + h * (k + 0.5 * (rule.nodes[q] + 1.0));
      acc += 0.5 * h * rule.weights[q] * horner(c, xi - a) * gamma(z, t, xi, tau);
    }
  }
  return acc;
}

}  // namespace biofilm
