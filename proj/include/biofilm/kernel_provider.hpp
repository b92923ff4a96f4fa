#pragma once

#include <memory>
#include <span>

#include "biofilm/numerics.hpp"
#include "biofilm/parametrix.hpp"

namespace biofilm {

/// Source of the fundamental solution used by the substrate representation.
/// Image combinations Gamma(z; xi) +- Gamma(-z; xi) are formed by the caller.
class KernelProvider {
 public:
  virtual ~KernelProvider() = default;

  virtual double diffusivity(double z, double t) const = 0;
  virtual double gamma(double z, double t, double xi, double tau) const = 0;
  virtual double gamma_dz(double z, double t, double xi, double tau) const = 0;
  virtual double gamma_dxi(double z, double t, double xi, double tau) const = 0;
  /// int_a^b p(xi) Gamma(z,t;xi,tau) dxi with p(xi) = sum_k c[k] (xi - a)^k.
  /// t == tau is the point-mass limit (p(z), halved at the ends).
  virtual double space_integral(double z, double t, double tau, double a, double b,
                                const PiecewisePoly::Coeffs& c) const = 0;
  /// Integral of the piecewise-linear interpolant of (x, f) against Gamma, or
  /// of its piecewise-constant slope when `slope` is set.
  virtual double linear_integral(double z, double t, double tau, std::span<const double> x,
                                 std::span<const double> f, bool slope) const;
  virtual bool closed_form() const { return false; }
};

/// Constant diffusivity D: Gamma is the D-scaled heat kernel.
class ConstantKernelProvider final : public KernelProvider {
 public:
  explicit ConstantKernelProvider(double D);

  double diffusivity(double, double) const override { return D_; }
  double gamma(double z, double t, double xi, double tau) const override;
  double gamma_dz(double z, double t, double xi, double tau) const override;
  double gamma_dxi(double z, double t, double xi, double tau) const override;
  double space_integral(double z, double t, double tau, double a, double b,
                        const PiecewisePoly::Coeffs& c) const override;
  /// Node antiderivatives (erfc and exp once per node) instead of per-segment integrals.
  double linear_integral(double z, double t, double tau, std::span<const double> x,
                         std::span<const double> f, bool slope) const override;
  bool closed_form() const override { return true; }

 private:
  double D_;
};

/// Levi-series fundamental solution. Space integrals use composite
/// Gauss-Legendre panels sized to the local kernel width; xi-derivatives use
/// centered differences.
class GammaKernelProvider final : public KernelProvider {
 public:
  explicit GammaKernelProvider(GammaEvaluator gamma, int panel_nodes = 8);

  double diffusivity(double z, double t) const override;
  double gamma(double z, double t, double xi, double tau) const override;
  double gamma_dz(double z, double t, double xi, double tau) const override;
  double gamma_dxi(double z, double t, double xi, double tau) const override;
  double space_integral(double z, double t, double tau, double a, double b,
                        const PiecewisePoly::Coeffs& c) const override;

  const GammaEvaluator& evaluator() const { return gamma_; }

 private:
  GammaEvaluator gamma_;
  int panel_nodes_;
};

}  // namespace biofilm
