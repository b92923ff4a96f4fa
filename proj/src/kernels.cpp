#include "biofilm/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "biofilm/errors.hpp"

namespace biofilm::kernels {

namespace {

double elapsed(const KernelPoint& p, double D) {
  if (!(p.t > p.tau)) {
    throw SolverError(ErrorCode::DegenerateTime, "kernel evaluated with t <= tau");
  }
  if (!(D > 0.0)) {
    throw SolverError(ErrorCode::NonParabolic, "diffusivity must be positive");
  }
  return D * (p.t - p.tau);
}

}  // namespace

double guarded_exp_ratio(double x, double delta, double alpha, int n) {
  if (!(alpha > 0.0) || n < 1 || delta < 0.0) {
    throw std::invalid_argument("guarded_exp_ratio: need alpha > 0, n >= 1, delta >= 0");
  }
  const double x2 = x * x;
  if (delta == 0.0) {
    if (x2 == 0.0) {
      throw SolverError(ErrorCode::SingularAtOrigin, "guarded_exp_ratio at x = 0, delta = 0");
    }
    return 0.0;
  }
  // log form keeps the ratio finite when both numerator and denominator underflow
  const double log_value = -x2 / (alpha * delta) - 0.5 * n * std::log(delta);
  if (log_value < -745.0) return 0.0;
  return std::exp(log_value);
}

double gaussian(double x, double s) {
  return kInvSqrt4Pi * guarded_exp_ratio(x, s, 4.0, 1);
}

double gaussian_dx(double x, double s) {
  if (x == 0.0) return 0.0;
  return -0.5 * x * kInvSqrt4Pi * guarded_exp_ratio(x, s, 4.0, 3);
}

double gaussian_scaled(double x, double s) {
  if (s < 0.0) throw std::invalid_argument("gaussian_scaled: s < 0");
  if (s == 0.0) return x == 0.0 ? kInvSqrt4Pi : 0.0;
  return kInvSqrt4Pi * std::exp(-x * x / (4.0 * s));
}

double eval_K(const KernelPoint& p, double D) {
  const double s = elapsed(p, D);
  return gaussian(p.z - p.xi, s);
}

double eval_image_kernel(ImageKind kind, const KernelPoint& p, double D) {
  const double s = elapsed(p, D);
  const double direct = gaussian(p.z - p.xi, s);
  const double image = gaussian(p.z + p.xi, s);
  const double v = kind == ImageKind::Dirichlet ? direct - image : direct + image;
  return v;
}

double eval_kernel(KernelKind kind, const KernelPoint& p, double D) {
  switch (kind) {
    case KernelKind::K: return eval_K(p, D);
    case KernelKind::G: return eval_image_kernel(ImageKind::Dirichlet, p, D);
    case KernelKind::N: return eval_image_kernel(ImageKind::Neumann, p, D);
  }
  return 0.0;
}

double eval_kernel_derivative(KernelKind kind, Wrt wrt, const KernelPoint& p, double D) {
  const double s = elapsed(p, D);
  // d/dz K(z - xi) = K'(z - xi); d/dxi K(z - xi) = -K'(z - xi);
  // d/dz K(z + xi) = d/dxi K(z + xi) = K'(z + xi).
  const double direct = gaussian_dx(p.z - p.xi, s);
  const double image = gaussian_dx(p.z + p.xi, s);
  const double sign_direct = wrt == Wrt::z ? 1.0 : -1.0;
  double v = sign_direct * direct;
  if (kind == KernelKind::G) v -= image;
  if (kind == KernelKind::N) v += image;
  return v;
}

}  // namespace biofilm::kernels
