#pragma once

// Constant-coefficient heat kernel on the half line and its reflections.
//
// All kernels take an optional diffusivity `D`; the time argument that enters
// the Gaussian is D*(t - tau). With D = 1 these are the textbook kernels
//   K(z,t;xi,tau) = (4 pi (t-tau))^{-1/2} exp(-(z-xi)^2 / (4 (t-tau)))
//   G = K(z,...) - K(-z,...)   (Dirichlet image, vanishes at z = 0)
//   N = K(z,...) + K(-z,...)   (Neumann image, zero z-flux at z = 0)

namespace biofilm::kernels {

struct KernelPoint {
  double z = 0.0;
  double t = 0.0;
  double xi = 0.0;
  double tau = 0.0;
};

enum class ImageKind { Dirichlet, Neumann };
enum class KernelKind { K, G, N };
enum class Wrt { z, xi };

inline constexpr double kInvSqrt4Pi = 0.28209479177387814;  // 1/sqrt(4 pi)

/// exp(-x^2 / (alpha delta)) / delta^(n/2), defined as 0 at delta = 0 when x != 0.
/// Throws SolverError(SingularAtOrigin) for x = 0, delta = 0.
double guarded_exp_ratio(double x, double delta, double alpha, int n);

// Raw one-dimensional Gaussian in distance x and (already scaled) time s >= 0.
// s = 0 is the explicit limit mode: 0 for x != 0, SingularAtOrigin for x == 0.
double gaussian(double x, double s);
/// d/dx of gaussian(x, s) = -x/(2s) * gaussian(x, s).
double gaussian_dx(double x, double s);
/// sqrt(s) * gaussian(x, s); finite at s = 0 (value 1/sqrt(4 pi) when x == 0).
double gaussian_scaled(double x, double s);

double eval_K(const KernelPoint& p, double D = 1.0);
double eval_image_kernel(ImageKind kind, const KernelPoint& p, double D = 1.0);
double eval_kernel(KernelKind kind, const KernelPoint& p, double D = 1.0);
double eval_kernel_derivative(KernelKind kind, Wrt wrt, const KernelPoint& p,
                              double D = 1.0);

}  // namespace biofilm::kernels
