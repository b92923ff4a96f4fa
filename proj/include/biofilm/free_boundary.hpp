#pragma once

#include <utility>
#include <vector>

#include "biofilm/biomass.hpp"

namespace biofilm {

enum class SigmaMode { none, detach, attach };
enum class SigmaForm { constant, linear, quadratic };

/// Attachment/detachment rate sigma(L) = c, c L or c L^2.
struct SigmaSpec {
  SigmaMode mode = SigmaMode::none;
  SigmaForm form = SigmaForm::constant;
  double coeff = 0.0;
  std::vector<double> attach_X;  // composition of attached material

  double rate(double L) const;
  /// Signed contribution to dL/dt: -sigma under detachment, +sigma under attachment.
  double signed_rate(double L) const;
};

struct FreeBoundaryState {
  double t = 0.0;
  double L = 0.0;
  double Ldot = 0.0;
  double L0 = 0.0;
  double L_min = 0.0;  // 0 selects 1e-6 L0
  SigmaSpec sigma;
  std::vector<std::pair<double, double>> history;  // (t, L)

  double extinction_threshold() const { return L_min > 0.0 ? L_min : 1e-6 * L0; }
};

FreeBoundaryState make_free_boundary(double L0, double t0, const SigmaSpec& sigma, double L_min = 0.0);

/// Material velocity at physical position z. Above the top node the profile
/// is continued with slope R_top.
double velocity_at(const BiomassState& b, double z);

/// Advance L to new_b.t. With sigma none L is the top characteristic
/// eta(L0, t); otherwise a Heun step of dL/dt = u(L) -/+ sigma(L).
FreeBoundaryState step_boundary(const FreeBoundaryState& s, const BiomassState& old_b,
                                const BiomassState& new_b);

/// Make the top node of `b` sit on L. Detach: drop nodes above L and insert
/// the interpolated node at z0* with eta(z0*) = L. Attach: extend the grid
/// with attached material (a new node once the top cell exceeds `h_ref` in
/// z0). Returns the active top label z0*.
double trim_domain(const FreeBoundaryState& s, BiomassState& b, double h_ref);

struct TrajectoryBounds {
  double max_rate = 0.0;  // sup |L(t) - L(tau)| / (t - tau) over the recorded history
  double min_L = 0.0;
  double max_L = 0.0;
  bool lipschitz_ok = false;  // max_rate <= M
  bool band_ok = false;       // L0/2 <= L <= 3 L0/2
};

/// Checks the certified-interval bounds on history samples with t - t0 <= lambda.
TrajectoryBounds check_trajectory_bounds(const FreeBoundaryState& s, double M, double lambda);

}  // namespace biofilm
