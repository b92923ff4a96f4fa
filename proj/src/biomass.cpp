#include "biofilm/biomass.hpp"

#include <algorithm>
#include <cmath>

#include "biofilm/errors.hpp"

namespace biofilm {

MaterialGrid MaterialGrid::uniform(double L0, int intervals) {
  MaterialGrid g;
  g.L0 = L0;
  g.z0.resize(static_cast<std::size_t>(intervals) + 1);
  for (int k = 0; k <= intervals; ++k) g.z0[k] = L0 * k / intervals;
  g.z0.back() = L0;
  return g;
}

void MaterialGrid::validate() const {
  if (!(L0 > 0.0)) throw SolverError(ErrorCode::ValidationError, "L0 must be positive");
  if (z0.size() < 17) throw SolverError(ErrorCode::ValidationError, "material grid needs N_z >= 16");
  if (z0.front() != 0.0 || z0.back() != L0)
    throw SolverError(ErrorCode::ValidationError, "material grid must span [0, L0]");
  for (std::size_t k = 1; k < z0.size(); ++k)
    if (!(z0[k] > z0[k - 1])) throw SolverError(ErrorCode::ValidationError, "material grid not increasing");
}

std::vector<double> BiomassState::fractions(std::size_t k, const KineticsSpec& spec) const {
  const auto rho = spec.densities();
  std::vector<double> f(X[k].size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = X[k][i] / rho[i];
  return f;
}

namespace {

void integrate_velocity(BiomassState& s) {
  const std::size_t n = s.size();
  s.u.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double h = s.z0[k] - s.z0[k - 1];
    s.u[k] = s.u[k - 1] + 0.5 * h * (s.R[k - 1] * s.jac[k - 1] + s.R[k] * s.jac[k]);
  }
}

void integrate_positions(BiomassState& s) {
  const std::size_t n = s.size();
  s.eta.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double h = s.z0[k] - s.z0[k - 1];
    s.eta[k] = s.eta[k - 1] + 0.5 * h * (s.jac[k - 1] + s.jac[k]);
  }
}

void clamp_state(std::vector<double>& x) {
  for (double& v : x) {
    if (v < -kNegativeStateTolerance)
      throw SolverError(ErrorCode::NegativeState, "species concentration below tolerance");
    if (v < 0.0) v = 0.0;
  }
}

}  // namespace

void refresh_rates(BiomassState& s, const NodeValues& C, const KineticsSpec& spec) {
  if (C.size() != s.size()) throw SolverError(ErrorCode::ValidationError, "substrate sample count mismatch");
  s.H.resize(s.size());
  s.R.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto g = eval_growth_terms(spec, s.X[k], C[k]);
    s.H[k] = std::move(g.H);
    s.R[k] = g.R;
  }
  integrate_velocity(s);
}

BiomassState make_initial_biomass(const MaterialGrid& grid, double t0,
                                  const std::function<std::vector<double>(double)>& X0,
                                  const NodeValues& C, const KineticsSpec& spec) {
  BiomassState s;
  s.t = t0;
  s.z0 = grid.z0;
  s.eta = grid.z0;
  s.jac.assign(grid.z0.size(), 1.0);
  s.X.reserve(grid.z0.size());
  for (double z : grid.z0) {
    auto x = X0(z);
    if (static_cast<int>(x.size()) != spec.n)
      throw SolverError(ErrorCode::ValidationError, "initial species vector has wrong size");
    clamp_state(x);
    s.X.push_back(std::move(x));
  }
  refresh_rates(s, C, spec);
  return s;
}

BiomassState step_characteristics(const BiomassState& state, const NodeValues& C_new,
                                  const KineticsSpec& spec, double dt, const BiomassState* guess) {
  if (!(dt > 0.0)) throw SolverError(ErrorCode::ValidationError, "dt must be positive");
  if (C_new.size() != state.size())
    throw SolverError(ErrorCode::ValidationError, "substrate sample count mismatch");
  if (guess && guess->size() != state.size()) guess = nullptr;

  BiomassState next;
  next.t = state.t + dt;
  next.z0 = state.z0;
  const std::size_t n = state.size();
  next.X.resize(n);
  next.H.resize(n);
  next.R.resize(n);
  next.jac.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> pred;
    if (guess) {
      pred = guess->X[k];
    } else {
      pred = state.X[k];
      for (std::size_t i = 0; i < pred.size(); ++i) pred[i] += dt * state.H[k][i];
      clamp_state(pred);
    }
    const auto gp = eval_growth_terms(spec, pred, C_new[k]);
    auto x = state.X[k];
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.5 * dt * (state.H[k][i] + gp.H[i]);
    clamp_state(x);
    next.X[k] = std::move(x);
    next.jac[k] = state.jac[k] * std::exp(0.5 * dt * (state.R[k] + gp.R));
    if (!(next.jac[k] > 0.0) || !std::isfinite(next.jac[k]))
      throw SolverError(ErrorCode::JacobianCollapse, "non-positive Jacobian at node " + std::to_string(k));
  }
  for (std::size_t k = 0; k < n; ++k) {
    auto g = eval_growth_terms(spec, next.X[k], C_new[k]);
    next.H[k] = std::move(g.H);
    next.R[k] = g.R;
  }
  integrate_velocity(next);
  integrate_positions(next);
  return next;
}

double volume_fraction_drift(const BiomassState& state, const KineticsSpec& spec) {
  const auto rho = spec.densities();
  double worst = 0.0;
  for (const auto& x : state.X) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] / rho[i];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

void check_biomass_invariants(const BiomassState& s) {
  if (s.size() < 2) throw SolverError(ErrorCode::ValidationError, "biomass state has fewer than two nodes");
  if (s.eta.front() != 0.0 || s.u.front() != 0.0)
    throw SolverError(ErrorCode::ValidationError, "substratum node moved");
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!(s.jac[k] > 0.0)) throw SolverError(ErrorCode::JacobianCollapse, "non-positive Jacobian");
    if (k > 0 && !(s.eta[k] > s.eta[k - 1]))
      throw SolverError(ErrorCode::ValidationError, "characteristics crossed");
    for (double x : s.X[k])
      if (x < -kNegativeStateTolerance) throw SolverError(ErrorCode::NegativeState, "negative species");
  }
}

double interpolate_at(const BiomassState& s, std::span<const double> v, double z) {
  const auto& e = s.eta;
  if (z <= e.front()) return v.front();
  if (z >= e.back()) return v.back();
  const auto it = std::upper_bound(e.begin(), e.end(), z);
  const std::size_t k = static_cast<std::size_t>(it - e.begin());
  const double w = (z - e[k - 1]) / (e[k] - e[k - 1]);
  return (1.0 - w) * v[k - 1] + w * v[k];
}

}  // namespace biofilm
