#pragma once

#include <functional>
#include <span>
#include <vector>

namespace biofilm {

/// Per-species Monod parameters. Growth is
///   mu_max * X * prod_{j in substrates} C_j / (K_S[j] + C_j) - decay * X
/// and species i consumes substrate j at growth_i / yield[j].
struct MonodSpecies {
  double rho = 1.0;
  double mu_max = 0.0;
  double decay = 0.0;
  std::vector<double> K_S;      // per substrate
  std::vector<double> yield;    // per substrate; only used for j in `substrates`
  std::vector<int> substrates;  // substrate indices limiting (and consumed by) this species
};

/// Reaction terms of the model. Concentrations passed to the evaluators are
/// the physical ones (C_j); the substrate solver converts from S_j = D_j C_j.
struct KineticsSpec {
  int n = 1;  // species
  int m = 1;  // substrates
  std::vector<MonodSpecies> species;

  /// Optional override: writes Htilde (size n) and F (size m) from X and C.
  using CustomTerms = std::function<void(std::span<const double> X, std::span<const double> C,
                                         std::span<double> Htilde, std::span<double> F)>;
  CustomTerms custom;

  std::vector<double> densities() const;
  void validate() const;
};

struct GrowthTerms {
  std::vector<double> Htilde;  // biomass production
  std::vector<double> H;       // Htilde_i - X_i R, the advected-form source
  double R = 0.0;              // sum_i Htilde_i / rho_i, velocity divergence
};

inline constexpr double kNegativeStateTolerance = 1e-12;

GrowthTerms eval_growth_terms(const KineticsSpec& spec, std::span<const double> X,
                              std::span<const double> C);

std::vector<double> eval_substrate_sources(const KineticsSpec& spec, std::span<const double> X,
                                           std::span<const double> C);

/// Bounds on the concatenated state (X_1..X_n, C_1..C_m).
struct StateBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct LipschitzOptions {
  int samples_per_dim = 17;  // used when step <= 0
  double step = 0.0;         // absolute lattice spacing anchored at 0
  double safety = 1.1;
  std::size_t max_points = 200000;
};

struct LipschitzEstimate {
  double raw = 0.0;
  double reported = 0.0;  // raw * safety
};

using VectorField = std::function<std::vector<double>(std::span<const double>)>;

/// Sup over a sampled lattice of the Euclidean gradient norm of each output
/// component (maximum over components).
LipschitzEstimate estimate_lipschitz(const VectorField& f, const StateBox& box,
                                     const LipschitzOptions& opts = {});

/// Lipschitz estimate for (Htilde, F) of a kinetics spec.
LipschitzEstimate estimate_lipschitz(const KineticsSpec& spec, const StateBox& box,
                                     const LipschitzOptions& opts = {});

/// Sup of |R| over the same lattice; used by the certificate.
double sup_velocity_source(const KineticsSpec& spec, const StateBox& box,
                           const LipschitzOptions& opts = {});

/// Single-species Monod preset with one substrate.
KineticsSpec monod_single(double mu_max, double K_S, double yield, double rho, double decay = 0.0);

}  // namespace biofilm
