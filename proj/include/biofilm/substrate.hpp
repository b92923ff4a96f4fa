#pragma once

#include <memory>
#include <vector>

#include "biofilm/kernel_provider.hpp"
#include "biofilm/numerics.hpp"

namespace biofilm {

enum class RepresentationMode { image_corrected, paper_literal };
enum class BoundaryKind { dirichlet, robin };

/// Boundary data at z = L(t). Dirichlet: S = psi. Robin (h > 0):
/// S_z = alpha1 psi - alpha2 S with alpha1 = D*/(h D), alpha2 = k D*/(h D).
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::dirichlet;
  std::vector<Signal> psi;     // per substrate, in S units
  double h = 0.0;
  double k = 1.0;
  std::vector<double> Dstar;   // per substrate

  double alpha1(int j, double D) const;
  double alpha2(int j, double D) const;
  /// Robin with h = 0 reduces to Dirichlet data psi / k.
  bool effective_dirichlet() const { return kind == BoundaryKind::dirichlet || h == 0.0; }
  double trace_value(int j, double t) const;
  double trace_rate(int j, double t) const;
  void validate(int m) const;
};

/// One time level of the boundary-integral history.
struct TimeSlice {
  double t = 0.0;
  double L = 0.0;
  double Ldot = 0.0;
  double jac_top = 1.0;
  std::vector<double> x;                // slice positions, x.front() = 0, x.back() = L
  std::vector<std::vector<double>> F;   // [substrate][node], source in S units
  std::vector<double> theta;            // S_z at L
  std::vector<double> trace;            // S at L (psi, or rho under Robin)
  std::vector<double> trace_rate;       // d trace / dt (Dirichlet only)
  std::vector<double> phi;              // S at 0
  double residual = 0.0;                // largest boundary residual over substrates
};

struct SubstrateSettings {
  RepresentationMode mode = RepresentationMode::image_corrected;
  int profile_gauss_nodes = 8;  // per history interval, in w = sqrt(t - tau)
  int grading_levels = 40;      // cap on geometric panels in the newest interval
};

/// Volterra state for all substrates. levels.front() sits at the origin
/// (initial data or last rebaseline); levels.back() is the current time.
struct SubstrateState {
  int m = 0;
  BoundarySpec boundary;
  SubstrateSettings settings;
  std::vector<std::shared_ptr<const KernelProvider>> kernels;  // per substrate
  double t_origin = 0.0;
  double L_origin = 0.0;
  std::vector<PiecewisePoly> initial;  // per substrate on [0, L_origin]
  /// Per substrate: theta ~ theta(t_origin) + beta sqrt(t - t_origin) near the
  /// origin when the data violate first-order corner compatibility at z = L.
  /// The sqrt part is integrated exactly; 0 after a rebaseline.
  std::vector<double> startup_beta;
  std::vector<TimeSlice> levels;

  const TimeSlice& current() const { return levels.back(); }
};

/// Clamped cubic spline of nodal data with end slopes (0, slope_top).
PiecewisePoly profile_spline(const std::vector<double>& x, const std::vector<double>& S, double slope_top);

/// Sets up levels.front() from the initial profiles. theta and trace at the
/// origin come from the data (spline end slope and boundary value).
SubstrateState make_substrate_state(int m, BoundarySpec boundary, SubstrateSettings settings,
                                    std::vector<std::shared_ptr<const KernelProvider>> kernels,
                                    double t0, std::vector<PiecewisePoly> initial, TimeSlice origin);

/// theta_j at the current level (Dirichlet data). Writes nothing.
double solve_theta_step(const SubstrateState& state, int j);

/// (rho_j, Phi_j) at the current level under Robin data.
std::pair<double, double> solve_robin_step(const SubstrateState& state, int j);

/// Phi_j = S_j(0, t) at the current level (0 in paper-literal mode).
double eval_phi(const SubstrateState& state, int j);

/// Solves the current level for every substrate (theta, trace, Phi, residual),
/// in parallel over substrates up to `threads`.
void solve_boundary_level(SubstrateState& state, int threads = 1);

/// S_j at positions z (0 <= z <= L) at the current level. Points at L return the trace.
std::vector<double> eval_substrate_profile(const SubstrateState& state, int j,
                                           const std::vector<double>& z);

/// Representation evaluated at z = L(t) from inside, minus the trace.
double boundary_residual(const SubstrateState& state, int j);

/// |S_z(0)| by the one-sided three-point formula on the first three nodes.
double verify_flux_zero(const std::vector<double>& x, const std::vector<double>& S);

/// Restart the history at the current level with the given nodal profiles.
void rebaseline_state(SubstrateState& state, const std::vector<std::vector<double>>& profiles);

}  // namespace biofilm
