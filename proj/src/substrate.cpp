#include "biofilm/substrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "biofilm/errors.hpp"

namespace biofilm {

double BoundarySpec::alpha1(int j, double D) const { return Dstar.at(j) / (h * D); }
double BoundarySpec::alpha2(int j, double D) const { return k * Dstar.at(j) / (h * D); }

double BoundarySpec::trace_value(int j, double t) const {
  const double v = psi.at(j).value(t);
  return kind == BoundaryKind::robin ? v / k : v;
}

double BoundarySpec::trace_rate(int j, double t) const {
  const double v = psi.at(j).rate(t);
  return kind == BoundaryKind::robin ? v / k : v;
}

void BoundarySpec::validate(int m) const {
  if (static_cast<int>(psi.size()) != m)
    throw SolverError(ErrorCode::ValidationError, "one boundary signal per substrate required");
  for (const auto& s : psi)
    if (!s.value || !s.rate) throw SolverError(ErrorCode::ValidationError, "boundary signal incomplete");
  if (kind == BoundaryKind::robin) {
    if (!(k > 0.0)) throw SolverError(ErrorCode::NonPhysicalRobin, "transfer coefficient k must be > 0");
    if (h < 0.0) throw SolverError(ErrorCode::NonPhysicalRobin, "boundary layer h must be >= 0");
    if (h > 0.0) {
      if (static_cast<int>(Dstar.size()) != m)
        throw SolverError(ErrorCode::ValidationError, "one bulk diffusivity per substrate required");
      for (double d : Dstar)
        if (!(d > 0.0)) throw SolverError(ErrorCode::NonPhysicalRobin, "bulk diffusivity must be > 0");
    }
  }
}

namespace {

constexpr double kInvSqrt4Pi = 0.28209479177387814;

// image combinations Gamma(z; xi) + eps Gamma(-z; xi)
struct Images {
  const KernelProvider& P;
  double eps;

  double value(double z, double t, double xi, double tau) const {
    return P.gamma(z, t, xi, tau) + eps * P.gamma(-z, t, xi, tau);
  }
  double dz(double z, double t, double xi, double tau) const {
    return P.gamma_dz(z, t, xi, tau) - eps * P.gamma_dz(-z, t, xi, tau);
  }
  double dxi(double z, double t, double xi, double tau) const {
    return P.gamma_dxi(z, t, xi, tau) + eps * P.gamma_dxi(-z, t, xi, tau);
  }
  // int_lo^hi p(xi) [Gamma(z) + eps Gamma(-z)] dxi over the pieces of p
  double poly(const PiecewisePoly& p, double z, double t, double tau, double lo, double hi) const {
    double acc = 0.0;
    const auto& br = p.breaks();
    const auto& pc = p.pieces();
    for (std::size_t i = 0; i < pc.size(); ++i) {
      const double a = std::max(lo, p.piece_lo(i));
      const double b = std::min(hi, p.piece_hi(i));
      if (!(b > a)) continue;
      const auto& c = pc[i];
      const double o = a - br[i];
      const PiecewisePoly::Coeffs sh{c[0] + o * (c[1] + o * (c[2] + o * c[3])),
                                     c[1] + o * (2.0 * c[2] + 3.0 * o * c[3]), c[2] + 3.0 * o * c[3],
                                     c[3]};
      acc += P.space_integral(z, t, tau, a, b, sh);
      if (eps != 0.0) acc += eps * P.space_integral(-z, t, tau, a, b, sh);
    }
    return acc;
  }
  // int over the slice of F (piecewise linear) or its slope (piecewise constant)
  double slice(const std::vector<double>& x, const std::vector<double>& F, bool slope, double z,
               double t, double tau) const {
    double acc = P.linear_integral(z, t, tau, x, F, slope);
    if (eps != 0.0) acc += eps * P.linear_integral(-z, t, tau, x, F, slope);
    return acc;
  }
};

double lerp(double a, double b, double w) { return a + w * (b - a); }

double startup(const SubstrateState& st, int j) {
  return st.startup_beta.empty() ? 0.0 : st.startup_beta.at(static_cast<std::size_t>(j));
}

void check_levels(const SubstrateState& st) {
  if (st.levels.empty()) throw SolverError(ErrorCode::HistoryGap, "substrate history is empty");
  for (std::size_t k = 1; k < st.levels.size(); ++k)
    if (!(st.levels[k].t > st.levels[k - 1].t))
      throw SolverError(ErrorCode::HistoryGap, "substrate history times not increasing");
}

std::vector<double> time_grid(const SubstrateState& st) {
  std::vector<double> g(st.levels.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = st.levels[k].t;
  return g;
}

// trapezoid over the levels of a per-level quantity
template <class Fn>
double trapezoid_levels(const SubstrateState& st, Fn f) {
  double acc = 0.0;
  double prev = f(st.levels[0]);
  for (std::size_t k = 1; k < st.levels.size(); ++k) {
    const double cur = f(st.levels[k]);
    acc += 0.5 * (st.levels[k].t - st.levels[k - 1].t) * (prev + cur);
    prev = cur;
  }
  return acc;
}

// panel edges in w = sqrt(t - tau) on [0, W], halving towards 0 down to the
// layer width d / (20 sqrt(a)); integrands at d = 0 are smooth in w
std::vector<double> graded_edges(double W, double d, double a, int cap) {
  int panels = 4;
  if (d > 0.0) {
    const double wmin = d / (20.0 * std::sqrt(a));
    panels = W <= wmin ? 1 : static_cast<int>(std::ceil(std::log2(W / wmin))) + 1;
  }
  panels = std::clamp(panels, 1, std::max(1, cap));
  std::vector<double> e{W};
  for (int p = 1; p < panels; ++p) e.push_back(0.5 * e.back());
  e.push_back(0.0);
  return e;
}

// int dtau int F(xi, tau) K(z; xi, tau) dxi over the history. F is linear in
// time between levels; the newest intervals are integrated in w = sqrt(t - tau)
// (graded in the newest one), older ones by the trapezoid rule.
double volume_term(const SubstrateState& st, int j, const Images& img, double z, bool slope) {
  const std::size_t n = st.levels.size() - 1;
  if (n == 0) return 0.0;
  const auto& cur = st.levels[n];
  const double t = cur.t;
  auto J = [&](std::size_t k, double tau) {
    const auto& lv = st.levels[k];
    return img.slice(lv.x, lv.F.at(j), slope, z, t, tau);
  };
  constexpr std::size_t kNear = 4;
  const std::size_t split = n > kNear ? n - kNear : 0;
  double acc = 0.0;
  double prev = split > 0 ? J(0, st.levels[0].t) : 0.0;
  for (std::size_t k = 1; k <= split; ++k) {
    const double cur_v = J(k, st.levels[k].t);
    acc += 0.5 * (st.levels[k].t - st.levels[k - 1].t) * (prev + cur_v);
    prev = cur_v;
  }
  const int gauss = std::max(st.settings.profile_gauss_nodes, 4);
  for (std::size_t k = split; k < n; ++k) {
    const double ta = st.levels[k].t, tb = st.levels[k + 1].t;
    std::vector<double> edges{std::sqrt(t - ta), std::sqrt(t - tb)};
    int nodes = gauss;
    if (k + 1 == n) {
      const double a = img.P.diffusivity(cur.L, t);
      edges = graded_edges(edges.front(), std::max(cur.L - z, 0.0), a, st.settings.grading_levels);
      nodes = std::max(gauss, 6);
    }
    const auto& rule = gauss_legendre(nodes);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double whi = edges[p], wlo = edges[p + 1];
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double w = wlo + 0.5 * (whi - wlo) * (rule.nodes[q] + 1.0);
        const double tau = t - w * w;
        const double th = std::clamp((tau - ta) / (tb - ta), 0.0, 1.0);
        const double v = (1.0 - th) * J(k, tau) + th * J(k + 1, tau);
        acc += 0.5 * (whi - wlo) * rule.weights[q] * 2.0 * w * v;
      }
    }
  }
  return acc;
}

}  // namespace

namespace {

struct BoundaryFactors {
  double single = 0.0;  // sqrt(t - tau) * image kernel
  double flux = 0.0;    // sqrt(t - tau) * a * d/dz image kernel
  double dlayer = 0.0;  // sqrt(t - tau) * (-a) * d/dxi image kernel
};

// smooth factors of the weakly singular kernels at z = L(t), source on the boundary at level k
BoundaryFactors boundary_factors(const Images& img, const TimeSlice& cur, const TimeSlice& lv,
                                 bool is_diag) {
  BoundaryFactors f;
  if (is_diag) {
    const double a = img.P.diffusivity(cur.L, cur.t);
    const double g = kInvSqrt4Pi / std::sqrt(a);
    f.single = g;
    f.flux = -0.5 * cur.Ldot * g;
    f.dlayer = -0.5 * cur.Ldot * g;
    return f;
  }
  const double rs = std::sqrt(cur.t - lv.t);
  const double a = img.P.diffusivity(lv.L, lv.t);
  f.single = rs * img.value(cur.L, cur.t, lv.L, lv.t);
  f.flux = rs * a * img.dz(cur.L, cur.t, lv.L, lv.t);
  f.dlayer = -rs * a * img.dxi(cur.L, cur.t, lv.L, lv.t);
  return f;
}

double solve_theta_corrected(const SubstrateState& st, int j) {
  const auto& P = *st.kernels.at(j);
  const Images G{P, -1.0};
  const Images N{P, 1.0};
  const std::size_t n = st.levels.size() - 1;
  const auto& cur = st.levels[n];
  const auto& org = st.levels.front();
  const double t = cur.t;
  const double L = cur.L;
  const auto& phi = st.initial.at(j);
  const double Lo = st.L_origin;

  double rest = (org.trace.at(j) - phi(Lo)) * G.value(L, t, Lo, org.t);
  rest += G.poly(phi.derivative(), L, t, org.t, 0.0, Lo);

  const auto grid = time_grid(st);
  const auto w = quad_weights_singular(grid, t);
  // theta = (piecewise-linear remainder) + beta sqrt(tau - t_origin)
  const double beta = startup(st, j);
  const auto v = beta != 0.0 ? quad_weights_sqrt(grid, t) : std::vector<double>(grid.size(), 0.0);
  double diag_flux = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const auto& lv = st.levels[k];
    const bool diag = k == n;
    const auto gf = boundary_factors(G, cur, lv, diag);
    const double psidot = diag ? st.boundary.trace_rate(j, t) : lv.trace_rate.at(j);
    rest += w[k] * gf.single * (psidot - lv.F.at(j).back());
    const double nz = diag ? boundary_factors(N, cur, lv, true).flux : boundary_factors(N, cur, lv, false).flux;
    const double root = beta * std::sqrt(lv.t - org.t);
    rest += nz * (v[k] * beta - w[k] * root);
    if (diag) {
      diag_flux = nz;
    } else {
      rest += w[k] * nz * lv.theta.at(j);
    }
  }
  rest += volume_term(st, j, G, L, true);

  const double coef = 1.0 - 2.0 * w[n] * diag_flux;
  if (std::abs(coef) < 1e-12) throw SolverError(ErrorCode::DiagonalDegeneracy, "theta diagonal coefficient vanished");
  return 2.0 * rest / coef;
}

double solve_theta_literal(const SubstrateState& st, int j) {
  const auto& P = *st.kernels.at(j);
  const Images G{P, -1.0};
  const Images N{P, 1.0};
  const std::size_t n = st.levels.size() - 1;
  const auto& cur = st.levels[n];
  const auto& org = st.levels.front();
  const double t = cur.t;
  const double L = cur.L;
  const auto& phi = st.initial.at(j);
  const double Lo = st.L_origin;
  const double a_n = P.diffusivity(L, t);

  // U with Phi(0) = 0
  double rest = 2.0 * N.value(L, t, 0.0, org.t) * phi(0.0) - 2.0 * org.trace.at(j) * N.value(L, t, Lo, org.t);
  rest += 2.0 * N.poly(phi.derivative(), L, t, org.t, 0.0, Lo);

  const auto w = quad_weights_singular(time_grid(st), t);
  double diag = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const auto& lv = st.levels[k];
    const bool is_diag = k == n;
    const auto nf = boundary_factors(N, cur, lv, is_diag);
    const double psidot = is_diag ? st.boundary.trace_rate(j, t) : lv.trace_rate.at(j);
    rest += 2.0 * w[k] * nf.single * (psidot - lv.F.at(j).back());
    if (is_diag) {
      diag = -0.5 * cur.Ldot * kInvSqrt4Pi / (a_n * std::sqrt(a_n));
    } else {
      rest += 2.0 * w[k] * std::sqrt(t - lv.t) * G.dz(L, t, lv.L, lv.t) * lv.theta.at(j);
    }
  }
  rest += 2.0 * trapezoid_levels(st, [&](const TimeSlice& lv) {
            return lv.t < t ? N.value(L, t, 0.0, lv.t) * lv.F.at(j).front() : 0.0;
          });
  const double coef = 1.0 - 2.0 * w[n] * diag;
  if (std::abs(coef) < 1e-12) throw SolverError(ErrorCode::DiagonalDegeneracy, "theta diagonal coefficient vanished");
  return rest / coef;
}

}  // namespace

double solve_theta_step(const SubstrateState& st, int j) {
  check_levels(st);
  if (st.levels.size() == 1) return st.levels.front().theta.at(j);
  if (st.settings.mode == RepresentationMode::paper_literal) return solve_theta_literal(st, j);
  return solve_theta_corrected(st, j);
}

namespace {

struct CurrentDensities {
  double theta = 0.0;
  double trace = 0.0;
};

struct LayerPoint {
  double tau, L, Ldot, theta, trace, jac;
};

LayerPoint interpolate_level(const TimeSlice& a, const TimeSlice& b, const CurrentDensities* bcur, int j,
                             double tau) {
  const double w = (tau - a.t) / (b.t - a.t);
  const double thb = bcur ? bcur->theta : b.theta.at(j);
  const double trb = bcur ? bcur->trace : b.trace.at(j);
  return {tau, lerp(a.L, b.L, w), lerp(a.Ldot, b.Ldot, w), lerp(a.theta.at(j), thb, w),
          lerp(a.trace.at(j), trb, w), lerp(a.jac_top, b.jac_top, w)};
}

// S(z, t_n) from the representation; `at_boundary` adds the inside jump at z = L
double represent(const SubstrateState& st, int j, double z, const CurrentDensities& cn, bool at_boundary) {
  const auto& P = *st.kernels.at(j);
  const bool literal = st.settings.mode == RepresentationMode::paper_literal;
  const Images img{P, literal ? -1.0 : 1.0};
  const std::size_t n = st.levels.size() - 1;
  const auto& cur = st.levels[n];
  const double t = cur.t;
  const auto& org = st.levels.front();

  double S = img.poly(st.initial.at(j), z, t, org.t, 0.0, st.L_origin);

  auto layer = [&](const LayerPoint& p) {
    const double a = P.diffusivity(p.L, p.tau);
    if (literal) {
      return img.value(z, t, p.L, p.tau) * p.theta - img.dxi(z, t, p.L, p.tau) * p.trace * p.jac;
    }
    return img.value(z, t, p.L, p.tau) * (a * p.theta + p.Ldot * p.trace) -
           a * img.dxi(z, t, p.L, p.tau) * p.trace;
  };

  // sqrt start-up part of theta minus its linear interpolant on interval k
  const double beta = literal ? 0.0 : startup(st, j);
  auto root_part = [&](std::size_t k, double tau) {
    if (beta == 0.0) return 0.0;
    const double ta = st.levels[k].t, tb = st.levels[k + 1].t;
    const double lin = lerp(std::sqrt(ta - org.t), std::sqrt(tb - org.t), (tau - ta) / (tb - ta));
    return beta * (std::sqrt(std::max(tau - org.t, 0.0)) - lin);
  };

  // time layers in w = sqrt(t - tau): tau = t - w^2, dtau = 2 w dw
  auto integrate_w = [&](std::size_t k, double wlo, double whi, int nodes) {
    const auto& rule = gauss_legendre(nodes);
    const CurrentDensities* bc = (k + 1 == n) ? &cn : nullptr;
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double wq = wlo + 0.5 * (whi - wlo) * (rule.nodes[q] + 1.0);
      const double tau = t - wq * wq;
      if (!(t > tau)) continue;  // weight ~ w vanishes below rounding of t
      auto p = interpolate_level(st.levels[k], st.levels[k + 1], bc, j, tau);
      p.theta += root_part(k, tau);
      acc += 0.5 * (whi - wlo) * rule.weights[q] * 2.0 * wq * layer(p);
    }
    return acc;
  };

  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (k == 0 && beta != 0.0) {
      // sqrt(tau - t_origin) start: integrate in v with tau = t_origin + v^2
      const auto& rule = gauss_legendre(std::max(st.settings.profile_gauss_nodes, 6));
      const double V = std::sqrt(st.levels[1].t - org.t);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double vq = 0.5 * V * (rule.nodes[q] + 1.0);
        const double tau = org.t + vq * vq;
        auto p = interpolate_level(st.levels[0], st.levels[1], nullptr, j, tau);
        p.theta += root_part(0, tau);
        S += 0.5 * V * rule.weights[q] * 2.0 * vq * layer(p);
      }
      continue;
    }
    S += integrate_w(k, std::sqrt(t - st.levels[k + 1].t), std::sqrt(t - st.levels[k].t),
                     st.settings.profile_gauss_nodes);
  }
  {
    // newest interval: geometric panels towards w = 0 resolve the layer bump at w ~ d / (2 sqrt(a))
    const double W = std::sqrt(t - st.levels[n - 1].t);
    const auto edges = graded_edges(W, std::max(cur.L - z, 0.0), P.diffusivity(cur.L, t), st.settings.grading_levels);
    const int nodes = std::max(st.settings.profile_gauss_nodes, 6);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) S += integrate_w(n - 1, edges[p + 1], edges[p], nodes);
  }
  if (at_boundary) {
    const double a_n = P.diffusivity(cur.L, t);
    S += 0.5 * cn.trace * (literal ? cur.jac_top / a_n : 1.0);
  }
  S += volume_term(st, j, img, z, false);
  return S;
}

CurrentDensities stored(const SubstrateState& st, int j) {
  return {st.current().theta.at(j), st.current().trace.at(j)};
}

}  // namespace

double eval_phi(const SubstrateState& st, int j) {
  check_levels(st);
  if (st.settings.mode == RepresentationMode::paper_literal) return 0.0;
  if (st.levels.size() == 1) return st.initial.at(j)(0.0);
  return represent(st, j, 0.0, stored(st, j), false);
}

std::vector<double> eval_substrate_profile(const SubstrateState& st, int j, const std::vector<double>& z) {
  check_levels(st);
  const auto& cur = st.current();
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] >= cur.L * (1.0 - 1e-14)) {
      out[i] = cur.trace.at(j);
    } else if (st.levels.size() == 1) {
      out[i] = st.initial.at(j)(z[i]);
    } else {
      out[i] = represent(st, j, z[i], stored(st, j), false);
    }
  }
  return out;
}

double boundary_residual(const SubstrateState& st, int j) {
  check_levels(st);
  if (st.levels.size() == 1) return std::abs(st.initial.at(j)(st.L_origin) - st.current().trace.at(j));
  const auto cn = stored(st, j);
  return std::abs(represent(st, j, st.current().L, cn, true) - cn.trace);
}

std::pair<double, double> solve_robin_step(const SubstrateState& st, int j) {
  check_levels(st);
  if (st.settings.mode == RepresentationMode::paper_literal)
    throw SolverError(ErrorCode::ValidationError, "paper-literal mode supports Dirichlet data only");
  if (!(st.boundary.k > 0.0)) throw SolverError(ErrorCode::NonPhysicalRobin, "transfer coefficient k must be > 0");
  if (st.boundary.effective_dirichlet()) {
    throw SolverError(ErrorCode::ValidationError, "Robin step requested for Dirichlet data");
  }
  const auto& org = st.levels.front();
  if (st.levels.size() == 1) return {org.trace.at(j), org.phi.at(j)};

  const auto& P = *st.kernels.at(j);
  const Images N{P, 1.0};
  const std::size_t n = st.levels.size() - 1;
  const auto& cur = st.levels[n];
  const double t = cur.t;
  const double L = cur.L;
  const double a_n = P.diffusivity(L, t);
  const double al1 = st.boundary.alpha1(j, a_n);
  const double al2 = st.boundary.alpha2(j, a_n);
  const double psi = st.boundary.psi.at(j).value(t);

  double rhs = N.poly(st.initial.at(j), L, t, org.t, 0.0, st.L_origin);
  rhs += volume_term(st, j, N, L, false);
  const auto w = quad_weights_singular(time_grid(st), t);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& lv = st.levels[k];
    const auto f = boundary_factors(N, cur, lv, false);
    const double a = P.diffusivity(lv.L, lv.t);
    rhs += w[k] * (f.single * (a * lv.theta.at(j) + lv.Ldot * lv.trace.at(j)) + f.dlayer * lv.trace.at(j));
  }
  const auto fd = boundary_factors(N, cur, cur, true);
  rhs += w[n] * fd.single * a_n * al1 * psi;
  const double coef = 0.5 - w[n] * (fd.single * (cur.Ldot - a_n * al2) + fd.dlayer);
  if (std::abs(coef) < 1e-12) throw SolverError(ErrorCode::DiagonalDegeneracy, "Robin diagonal coefficient vanished");
  const double rho = rhs / coef;
  const CurrentDensities cn{al1 * psi - al2 * rho, rho};
  return {rho, represent(st, j, 0.0, cn, false)};
}

namespace {

void solve_one(SubstrateState& st, int j) {
  auto& cur = st.levels.back();
  const double t = cur.t;
  if (st.boundary.effective_dirichlet()) {
    cur.trace[j] = st.boundary.trace_value(j, t);
    cur.trace_rate[j] = st.boundary.trace_rate(j, t);
    cur.theta[j] = solve_theta_step(st, j);
    cur.phi[j] = eval_phi(st, j);
  } else {
    const auto [rho, phi] = solve_robin_step(st, j);
    const double a = st.kernels.at(j)->diffusivity(cur.L, t);
    cur.trace[j] = rho;
    cur.trace_rate[j] = 0.0;
    cur.theta[j] = st.boundary.alpha1(j, a) * st.boundary.psi.at(j).value(t) - st.boundary.alpha2(j, a) * rho;
    cur.phi[j] = phi;
  }
  if (!std::isfinite(cur.theta[j]) || !std::isfinite(cur.trace[j]) || !std::isfinite(cur.phi[j]))
    throw SolverError(ErrorCode::NonPhysicalState, "non-finite boundary density");
}

}  // namespace

void solve_boundary_level(SubstrateState& st, int threads) {
  check_levels(st);
  auto& cur = st.levels.back();
  const auto m = static_cast<std::size_t>(st.m);
  cur.theta.resize(m);
  cur.trace.resize(m);
  cur.trace_rate.resize(m);
  cur.phi.resize(m);
  std::vector<double> res(m, 0.0);
  auto work = [&](int j) {
    solve_one(st, j);
    res[j] = st.levels.size() > 1 ? boundary_residual(st, j) : 0.0;
  };
  const int nthreads = std::clamp(threads, 1, st.m);
  if (nthreads == 1) {
    for (int j = 0; j < st.m; ++j) work(j);
  } else {
    // substrates are independent given the frozen slice; errors are rethrown on the caller
    std::vector<std::exception_ptr> errors(m);
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w] {
        for (int j = w; j < st.m; j += nthreads) {
          try {
            work(j);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  cur.residual = st.m ? *std::max_element(res.begin(), res.end()) : 0.0;
}

double verify_flux_zero(const std::vector<double>& x, const std::vector<double>& S) {
  if (x.size() < 3 || S.size() < 3) return 0.0;
  const double h1 = x[1] - x[0], h2 = x[2] - x[1];
  // second-order one-sided derivative on a non-uniform stencil
  const double c0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
  const double c1 = (h1 + h2) / (h1 * h2);
  const double c2 = -h1 / (h2 * (h1 + h2));
  return std::abs(c0 * S[0] + c1 * S[1] + c2 * S[2]);
}

PiecewisePoly profile_spline(const std::vector<double>& x, const std::vector<double>& S, double slope_top) {
  return PiecewisePoly::clamped_spline(x, S, 0.0, slope_top);
}

SubstrateState make_substrate_state(int m, BoundarySpec boundary, SubstrateSettings settings,
                                    std::vector<std::shared_ptr<const KernelProvider>> kernels, double t0,
                                    std::vector<PiecewisePoly> initial, TimeSlice origin) {
  boundary.validate(m);
  if (static_cast<int>(kernels.size()) != m || static_cast<int>(initial.size()) != m)
    throw SolverError(ErrorCode::ValidationError, "one kernel provider and initial profile per substrate");
  if (settings.mode == RepresentationMode::paper_literal && !boundary.effective_dirichlet())
    throw SolverError(ErrorCode::ValidationError, "paper-literal mode supports Dirichlet data only");
  SubstrateState st;
  st.m = m;
  st.boundary = std::move(boundary);
  st.settings = settings;
  st.kernels = std::move(kernels);
  st.t_origin = t0;
  st.L_origin = origin.L;
  st.initial = std::move(initial);
  origin.t = t0;
  origin.theta.resize(m);
  origin.trace.resize(m);
  origin.trace_rate.resize(m);
  origin.phi.resize(m);
  for (int j = 0; j < m; ++j) {
    const auto& p = st.initial[j];
    origin.theta[j] = p.derivative(origin.L);
    origin.phi[j] = p(0.0);
    if (st.boundary.effective_dirichlet()) {
      origin.trace[j] = st.boundary.trace_value(j, t0);
      origin.trace_rate[j] = st.boundary.trace_rate(j, t0);
    } else {
      origin.trace[j] = p(origin.L);
      origin.trace_rate[j] = 0.0;
    }
  }
  origin.residual = 0.0;
  // first-order corner mismatch g = (a phi'' + F) - (psi' - Ldot phi') at (L, t0)
  st.startup_beta.assign(static_cast<std::size_t>(m), 0.0);
  if (st.settings.mode == RepresentationMode::image_corrected && st.boundary.effective_dirichlet()) {
    for (int j = 0; j < m; ++j) {
      const auto& p = st.initial[j];
      const double L = origin.L;
      const double a = st.kernels[j]->diffusivity(L, t0);
      const double curvature = p.derivative().derivative(L);
      const double g = a * curvature + origin.F[j].back() - (origin.trace_rate[j] - origin.Ldot * origin.theta[j]);
      st.startup_beta[j] = -2.0 * g / std::sqrt(std::numbers::pi * a);
    }
  }
  st.levels.assign(1, std::move(origin));
  return st;
}

void rebaseline_state(SubstrateState& st, const std::vector<std::vector<double>>& profiles) {
  check_levels(st);
  auto cur = st.levels.back();
  if (st.levels.size() == 1) return;
  std::vector<PiecewisePoly> init;
  for (int j = 0; j < st.m; ++j) {
    auto S = profiles.at(j);
    S.back() = cur.trace.at(j);
    init.push_back(profile_spline(cur.x, S, cur.theta.at(j)));
  }
  st.initial = std::move(init);
  st.t_origin = cur.t;
  st.L_origin = cur.L;
  st.startup_beta.assign(static_cast<std::size_t>(st.m), 0.0);
  st.levels.assign(1, std::move(cur));
}

}  // namespace biofilm
