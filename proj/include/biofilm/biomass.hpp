#pragma once

#include <functional>
#include <span>
#include <vector>

#include "biofilm/kinetics.hpp"

namespace biofilm {

/// Uniform material grid on [0, L0].
struct MaterialGrid {
  std::vector<double> z0;
  double L0 = 0.0;

  static MaterialGrid uniform(double L0, int intervals);
  void validate() const;
};

/// Biomass along characteristics. Per node k: material label z0[k], current
/// position eta[k], Jacobian d eta / d z0, velocity u, species X[k][i].
/// H and R hold the rates evaluated at (X, C) of the same time level.
struct BiomassState {
  double t = 0.0;
  std::vector<double> z0;
  std::vector<double> eta;
  std::vector<double> jac;
  std::vector<double> u;
  std::vector<std::vector<double>> X;
  std::vector<std::vector<double>> H;
  std::vector<double> R;

  std::size_t size() const { return z0.size(); }
  double top() const { return eta.empty() ? 0.0 : eta.back(); }
  std::vector<double> fractions(std::size_t k, const KineticsSpec& spec) const;
};

using NodeValues = std::vector<std::vector<double>>;  // [node][substrate], physical C

/// eta = z0, jac = 1, rates and velocity from X0 and C at t0.
BiomassState make_initial_biomass(const MaterialGrid& grid, double t0,
                                  const std::function<std::vector<double>(double)>& X0,
                                  const NodeValues& C, const KineticsSpec& spec);

/// Recompute H, R and u of `state` for concentrations C at its own time.
void refresh_rates(BiomassState& state, const NodeValues& C, const KineticsSpec& spec);

/// One Heun step of the characteristics system to t + dt with C at t + dt.
/// `guess`, if given, replaces the explicit predictor for X (Picard sweeps).
/// eta is recovered as the cumulative integral of the Jacobian in z0.
BiomassState step_characteristics(const BiomassState& state, const NodeValues& C_new,
                                  const KineticsSpec& spec, double dt,
                                  const BiomassState* guess = nullptr);

/// Largest |sum_i X_i/rho_i - 1| over the nodes.
double volume_fraction_drift(const BiomassState& state, const KineticsSpec& spec);

/// Throws on broken invariants (eta(0) = 0, u(0) = 0, monotone eta, jac > 0).
void check_biomass_invariants(const BiomassState& state);

/// Linear interpolation of a nodal quantity at physical position z in [0, top].
double interpolate_at(const BiomassState& state, std::span<const double> values, double z);

}  // namespace biofilm
