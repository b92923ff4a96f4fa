#include "biofilm/free_boundary.hpp"

#include <algorithm>
#include <cmath>

#include "biofilm/errors.hpp"

namespace biofilm {

double SigmaSpec::rate(double L) const {
  if (mode == SigmaMode::none) return 0.0;
  switch (form) {
    case SigmaForm::constant: return coeff;
    case SigmaForm::linear: return coeff * L;
    case SigmaForm::quadratic: return coeff * L * L;
  }
  return 0.0;
}

double SigmaSpec::signed_rate(double L) const {
  if (mode == SigmaMode::detach) return -rate(L);
  if (mode == SigmaMode::attach) return rate(L);
  return 0.0;
}

FreeBoundaryState make_free_boundary(double L0, double t0, const SigmaSpec& sigma, double L_min) {
  if (!(L0 > 0.0)) throw SolverError(ErrorCode::ValidationError, "L0 must be positive");
  if (sigma.coeff < 0.0) throw SolverError(ErrorCode::ValidationError, "sigma coefficient must be >= 0");
  FreeBoundaryState s;
  s.t = t0;
  s.L = L0;
  s.L0 = L0;
  s.L_min = L_min;
  s.sigma = sigma;
  s.history.emplace_back(t0, L0);
  return s;
}

double velocity_at(const BiomassState& b, double z) {
  if (z > b.top()) return b.u.back() + b.R.back() * (z - b.top());
  return interpolate_at(b, b.u, z);
}

FreeBoundaryState step_boundary(const FreeBoundaryState& s, const BiomassState& old_b,
                                const BiomassState& new_b) {
  const double dt = new_b.t - s.t;
  if (!(dt > 0.0)) throw SolverError(ErrorCode::HistoryGap, "boundary step needs increasing time");
  FreeBoundaryState n = s;
  n.t = new_b.t;
  if (s.sigma.mode == SigmaMode::none) {
    n.L = new_b.top();
    n.Ldot = new_b.u.back();
  } else {
    const double f0 = velocity_at(old_b, s.L) + s.sigma.signed_rate(s.L);
    const double Lp = s.L + dt * f0;
    const double f1 = velocity_at(new_b, Lp) + s.sigma.signed_rate(Lp);
    n.L = s.L + 0.5 * dt * (f0 + f1);
    n.Ldot = velocity_at(new_b, n.L) + s.sigma.signed_rate(n.L);
  }
  if (!(n.L > n.extinction_threshold()))
    throw SolverError(ErrorCode::ExtinctionReached, "biofilm thickness fell below L_min");
  n.history.emplace_back(n.t, n.L);
  return n;
}

namespace {

template <class T>
T lerp(const T& a, const T& b, double w) {
  return (1.0 - w) * a + w * b;
}

std::vector<double> lerp_vec(const std::vector<double>& a, const std::vector<double>& b, double w) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = lerp(a[i], b[i], w);
  return out;
}

void truncate(BiomassState& b, std::size_t count) {
  b.z0.resize(count);
  b.eta.resize(count);
  b.jac.resize(count);
  b.u.resize(count);
  b.X.resize(count);
  b.H.resize(count);
  b.R.resize(count);
}

// move the top of b down onto L < eta_top
double trim_down(BiomassState& b, double L) {
  const auto it = std::lower_bound(b.eta.begin(), b.eta.end(), L);
  std::size_t hi = static_cast<std::size_t>(it - b.eta.begin());
  if (hi == 0) throw SolverError(ErrorCode::BoundaryOutsideDomain, "free boundary below the substratum");
  const std::size_t lo = hi - 1;
  const double w = (L - b.eta[lo]) / (b.eta[hi] - b.eta[lo]);
  if (w >= 1.0 - 1e-12) {
    truncate(b, hi + 1);
  } else if (w <= 1e-9 && lo > 0) {
    truncate(b, lo + 1);
  } else {
    const double z0 = lerp(b.z0[lo], b.z0[hi], w);
    const double jac = lerp(b.jac[lo], b.jac[hi], w);
    const double u = lerp(b.u[lo], b.u[hi], w);
    const double R = lerp(b.R[lo], b.R[hi], w);
    auto X = lerp_vec(b.X[lo], b.X[hi], w);
    auto H = lerp_vec(b.H[lo], b.H[hi], w);
    truncate(b, lo + 1);
    b.z0.push_back(z0);
    b.eta.push_back(L);
    b.jac.push_back(jac);
    b.u.push_back(u);
    b.R.push_back(R);
    b.X.push_back(std::move(X));
    b.H.push_back(std::move(H));
  }
  b.eta.back() = L;
  return b.z0.back();
}

}  // namespace

double trim_domain(const FreeBoundaryState& s, BiomassState& b, double h_ref) {
  const double L = s.L;
  const double gap = L - b.top();
  const double tiny = 1e-12 * std::max(1.0, L);
  if (std::abs(gap) <= tiny) {
    b.eta.back() = L;
    return b.z0.back();
  }
  if (gap < 0.0) return trim_down(b, L);
  if (s.sigma.mode != SigmaMode::attach)
    throw SolverError(ErrorCode::BoundaryOutsideDomain, "free boundary above the top characteristic");

  const std::size_t top = b.size() - 1;
  const double cell = b.z0[top] - b.z0[top - 1];
  if (cell < h_ref) {
    // the top node is the boundary node from an earlier attachment: relabel it
    const std::size_t p = top - 1;
    b.z0[top] = b.z0[p] + (L - b.eta[p]) / b.jac[p];
    b.eta[top] = L;
    b.u[top] = velocity_at(b, L);
    return b.z0[top];
  }
  const double u = b.u[top] + b.R[top] * gap;
  b.z0.push_back(b.z0[top] + gap / b.jac[top]);
  b.eta.push_back(L);
  b.jac.push_back(b.jac[top]);
  b.u.push_back(u);
  b.R.push_back(b.R[top]);
  b.X.push_back(s.sigma.attach_X.empty() ? b.X[top] : s.sigma.attach_X);
  b.H.push_back(std::vector<double>(b.X.back().size(), 0.0));
  return b.z0.back();
}

TrajectoryBounds check_trajectory_bounds(const FreeBoundaryState& s, double M, double lambda) {
  TrajectoryBounds out;
  if (s.history.empty()) return out;
  const double t0 = s.history.front().first;
  out.min_L = out.max_L = s.history.front().second;
  for (std::size_t i = 0; i < s.history.size(); ++i) {
    const auto [ti, Li] = s.history[i];
    if (ti - t0 > lambda) break;
    out.min_L = std::min(out.min_L, Li);
    out.max_L = std::max(out.max_L, Li);
    // the largest chord slope of a sampled path is attained between neighbours
    if (i > 0) {
      const auto [tj, Lj] = s.history[i - 1];
      out.max_rate = std::max(out.max_rate, std::abs(Li - Lj) / (ti - tj));
    }
  }
  out.lipschitz_ok = out.max_rate <= M;
  out.band_ok = out.min_L >= 0.5 * s.L0 && out.max_L <= 1.5 * s.L0;
  return out;
}

}  // namespace biofilm
