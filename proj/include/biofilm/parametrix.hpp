#pragma once

#include <functional>
#include <vector>

#include "biofilm/kernels.hpp"

namespace biofilm {

/// Diffusion coefficient a(z,t) and its z-derivative b(z,t). The field is
/// extended evenly to z < 0 (a(-z) = a(z), b(-z) = -b(z)).
struct DiffusivityField {
  enum class Mode { constant, variable };
  using Fn = std::function<double(double z, double t)>;

  Mode mode = Mode::constant;
  std::vector<double> D{1.0};  // per substrate, constant mode
  int substrate = 0;           // which D_j a() returns in constant mode
  double D0 = 1.0;             // diffusivity in water, variable mode
  Fn porosity;                 // p(z,t), clamped to [0,1]
  Fn porosity_dz;              // optional closed-form dp/dz
  Fn custom_a;                 // optional direct override of a
  Fn custom_b;                 // optional closed-form da/dz for custom_a
  double fd_step = 1e-6;       // centered difference step for b
  bool uniform = false;        // declared spatially and temporally constant

  static DiffusivityField constant(double D);
  static DiffusivityField variable(double D0, Fn porosity, Fn porosity_dz = {});
  static DiffusivityField custom(Fn a, Fn b = {});
  /// Variable-mode field with constant porosity p (a = D0 exp(-sqrt(1 - p))).
  static DiffusivityField uniform_porosity(double D0, double p);

  double a(double z, double t) const;
  double b(double z, double t) const;
  bool is_constant() const;
  /// Constant mode or a declared uniform variable-mode field.
  bool is_uniform() const { return is_constant() || uniform; }
  /// Lattice minimum of a on [0, L] x [t0, t1]; NonParabolic if <= 0.
  double a_min(double L, double t0, double t1, int samples = 33) const;
  void validate() const;

 private:
  double a_half(double z, double t) const;
  double b_half(double z, double t) const;
};

struct ParametrixConfig {
  int series_order = 2;
  int space_quad_nodes = 12;
  int time_quad_nodes = 12;
  void validate() const;
};

/// Z with coefficient frozen at the source point (xi, tau).
double eval_Z(const kernels::KernelPoint& p, const DiffusivityField& field);

/// Fundamental solution of a S_zz + b S_z - S_t built by the truncated Levi
/// series on the spatial window [-L, L]. Immutable after construction.
class GammaEvaluator {
 public:
  GammaEvaluator(DiffusivityField field, ParametrixConfig cfg, double L);

  double operator()(const kernels::KernelPoint& p) const;
  /// d/dz of Gamma (differentiates Z inside the Levi integral).
  double dz(const kernels::KernelPoint& p) const;

  double Z(const kernels::KernelPoint& p) const;
  double Z_dz(const kernels::KernelPoint& p) const;
  /// P applied to Z in its first pair of arguments.
  double PZ(const kernels::KernelPoint& p) const;
  /// Levi density truncated after `level` iterations (level 0 is P(Z)).
  double density(const kernels::KernelPoint& p, int level) const;

  /// Residual a Gamma_zz + b Gamma_z - Gamma_t by fourth-order differences
  /// with steps scaled by sqrt(t - tau).
  double residual(const kernels::KernelPoint& p, double rel_step = 0.02) const;

  const DiffusivityField& field() const { return field_; }
  const ParametrixConfig& config() const { return cfg_; }
  double length() const { return L_; }
  bool trivial() const { return trivial_; }

 private:
  template <class Outer>
  double levi_integral(const kernels::KernelPoint& p, int level, Outer outer) const;

  DiffusivityField field_;
  ParametrixConfig cfg_;
  double L_;
  bool trivial_;
};

/// Throws SeriesDivergence if sup-norms of successive series increments grow
/// on a small lattice near the source point.
GammaEvaluator build_gamma(const DiffusivityField& field, const ParametrixConfig& cfg, double L);

/// Odd reflection Gamma(z) - Gamma(-z); vanishes at z = 0.
double eval_H_vardiff(const GammaEvaluator& gamma, const kernels::KernelPoint& p);
/// Even reflection Gamma(z) + Gamma(-z); zero z-flux at z = 0.
double eval_H_vardiff_even(const GammaEvaluator& gamma, const kernels::KernelPoint& p);
double eval_H_vardiff_even_dz(const GammaEvaluator& gamma, const kernels::KernelPoint& p);

struct GrowthFit {
  double slope = 0.0;     // log-log slope in t - tau
  double constant = 0.0;  // sup of |value| * (t - tau)^(-exponent)
};

struct GammaBounds {
  GrowthFit value;  // expected exponent -1/2
  GrowthFit dz;     // expected exponent -1
  GrowthFit dt;     // expected exponent -3/2
};

/// Sup over z near xi of |Gamma|, |Gamma_z|, |Gamma_t| for a range of t - tau.
GammaBounds measure_gamma_bounds(const GammaEvaluator& gamma, double xi, double tau,
                                 const std::vector<double>& elapsed);

}  // namespace biofilm
