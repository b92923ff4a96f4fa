#include "biofilm/driver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "biofilm/errors.hpp"
#include "biofilm/kernel_provider.hpp"

namespace biofilm {

void Problem::validate() const {
  auto fail = [](const std::string& what) { throw SolverError(ErrorCode::ValidationError, what); };
  if (!(L0 > 0.0)) fail("L0 must be positive");
  if (N_z < 16) fail("N_z must be >= 16");
  kinetics.validate();
  const auto n = static_cast<std::size_t>(kinetics.n);
  const auto m = static_cast<std::size_t>(kinetics.m);
  if (X0.size() != n) fail("one initial biomass profile per species required");
  if (D.size() != m || C0.size() != m || psi.size() != m) fail("D, C0 and psi need one entry per substrate");
  for (double d : D)
    if (!(d > 0.0)) fail("substrate diffusivities must be positive");
  if (boundary == BoundaryKind::robin && h > 0.0 && Dstar.size() != m) fail("Dstar needs one entry per substrate");
  if (sigma.mode == SigmaMode::attach && !sigma.attach_X.empty() && sigma.attach_X.size() != n)
    fail("attached composition needs one entry per species");
  if (variable_diffusivity) {
    field.validate();
    parametrix.validate();
  }
  if (mode == RepresentationMode::paper_literal && boundary == BoundaryKind::robin && h > 0.0)
    fail("paper-literal mode supports Dirichlet data only");
  if (quadrature.profile_gauss_nodes < 1 || quadrature.grading_levels < 1) fail("quadrature settings must be >= 1");
}

void MarchConfig::validate() const {
  auto fail = [](const std::string& what) { throw SolverError(ErrorCode::ValidationError, what); };
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(t_end >= 0.0)) fail("t_end must be >= 0");
  if (!(picard_tol > 0.0)) fail("picard_tol must be positive");
  if (picard_max_iter < 1) fail("picard_max_iter must be >= 1");
  if (rebaseline_every < 16) fail("rebaseline_every must be >= 16");
  if (output_stride < 1) fail("output stride must be >= 1");
  if (max_halvings < 0) fail("max_halvings must be >= 0");
  if (!(residual_budget >= 0.0)) fail("residual_budget must be >= 0");
}

namespace {

using Profiles = std::vector<std::vector<double>>;  // [substrate][node]

BoundarySpec make_boundary(const Problem& p) {
  BoundarySpec b;
  b.kind = p.boundary;
  b.h = p.h;
  b.k = p.k;
  b.Dstar = p.Dstar;
  for (std::size_t j = 0; j < p.psi.size(); ++j) {
    const double d = p.D[j];
    const auto sig = Signal::from_pp(p.psi[j]);
    b.psi.push_back({[sig, d](double t) { return d * sig.value(t); }, [sig, d](double t) { return d * sig.rate(t); }});
  }
  return b;
}

std::vector<std::shared_ptr<const KernelProvider>> make_kernels(const Problem& p) {
  std::vector<std::shared_ptr<const KernelProvider>> out;
  for (int j = 0; j < p.kinetics.m; ++j) {
    if (!p.variable_diffusivity) {
      out.push_back(std::make_shared<ConstantKernelProvider>(p.D[j]));
    } else {
      auto field = p.field;
      field.substrate = j;
      out.push_back(std::make_shared<GammaKernelProvider>(build_gamma(field, p.parametrix, 2.0 * p.L0)));
    }
  }
  return out;
}

PiecewisePoly scaled(const PiecewisePoly& p, double s) {
  auto pieces = p.pieces();
  for (auto& c : pieces)
    for (double& v : c) v *= s;
  return PiecewisePoly(p.breaks(), std::move(pieces));
}

std::vector<std::vector<double>> sources(const Problem& p, const BiomassState& b, const NodeValues& C) {
  std::vector<std::vector<double>> F(static_cast<std::size_t>(p.kinetics.m), std::vector<double>(b.size()));
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto f = eval_substrate_sources(p.kinetics, b.X[k], C[k]);
    for (std::size_t j = 0; j < F.size(); ++j) F[j][k] = p.D[j] * f[j];
  }
  return F;
}

// value of a nodal field (given on ascending positions x) at z, clamped to the ends
std::vector<double> sample(const std::vector<double>& x, const NodeValues& v, double z) {
  if (z <= x.front()) return v.front();
  if (z >= x.back()) return v.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), z) - x.begin());
  const std::size_t lo = hi - 1;
  const double w = (z - x[lo]) / (x[hi] - x[lo]);
  std::vector<double> out(v[lo].size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (1.0 - w) * v[lo][j] + w * v[hi][j];
  return out;
}

NodeValues resample(const std::vector<double>& x, const NodeValues& v, const std::vector<double>& z) {
  NodeValues out;
  out.reserve(z.size());
  for (double zi : z) out.push_back(sample(x, v, zi));
  return out;
}

double sup_diff(const NodeValues& a, const NodeValues& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
    for (std::size_t j = 0; j < a[k].size(); ++j) m = std::max(m, std::abs(a[k][j] - b[k][j]));
  return m;
}

double sup_abs(const NodeValues& a) {
  double m = 0.0;
  for (const auto& r : a)
    for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double sup_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

TimeSlice make_slice(const Problem& p, const BiomassState& b, const NodeValues& C, double L, double Ldot) {
  TimeSlice lv;
  lv.t = b.t;
  lv.L = L;
  lv.Ldot = Ldot;
  lv.jac_top = b.jac.back();
  lv.x = b.eta;
  lv.F = sources(p, b, C);
  return lv;
}

Profiles substrate_profiles(const SubstrateState& sub) {
  Profiles S;
  for (int j = 0; j < sub.m; ++j) S.push_back(eval_substrate_profile(sub, j, sub.current().x));
  return S;
}

NodeValues to_concentrations(const Problem& p, const Profiles& S) {
  const std::size_t nodes = S.empty() ? 0 : S.front().size();
  NodeValues C(nodes, std::vector<double>(S.size()));
  for (std::size_t k = 0; k < nodes; ++k)
    for (std::size_t j = 0; j < S.size(); ++j) C[k][j] = S[j][k] / p.D[j];
  return C;
}

}  // namespace

DriverState init_driver(const Problem& problem) {
  problem.validate();
  DriverState st;
  st.problem = problem;
  const auto& p = st.problem;
  const auto grid = MaterialGrid::uniform(p.L0, p.N_z);
  st.h_ref = p.L0 / p.N_z;
  NodeValues C0(grid.z0.size(), std::vector<double>(p.C0.size()));
  for (std::size_t k = 0; k < grid.z0.size(); ++k)
    for (std::size_t j = 0; j < p.C0.size(); ++j) C0[k][j] = p.C0[j](grid.z0[k]);
  auto X0 = [&](double z) {
    std::vector<double> x(p.X0.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.X0[i](z);
    return x;
  };
  st.bio = make_initial_biomass(grid, 0.0, X0, C0, p.kinetics);
  st.fb = make_free_boundary(p.L0, 0.0, p.sigma, p.L_min);
  st.fb.Ldot = velocity_at(st.bio, p.L0) + p.sigma.signed_rate(p.L0);
  st.C = C0;

  std::vector<PiecewisePoly> initial;
  for (std::size_t j = 0; j < p.C0.size(); ++j) initial.push_back(scaled(p.C0[j], p.D[j]));
  auto settings = p.quadrature;
  settings.mode = p.mode;
  st.sub = make_substrate_state(p.kinetics.m, make_boundary(p), settings, make_kernels(p), 0.0, std::move(initial),
                                make_slice(p, st.bio, C0, p.L0, st.fb.Ldot));
  return st;
}

namespace {

double sup_X_diff(const BiomassState& a, const BiomassState& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
    for (std::size_t i = 0; i < a.X[k].size(); ++i) m = std::max(m, std::abs(a.X[k][i] - b.X[k][i]));
  return m;
}

double sup_X(const BiomassState& a) {
  double m = 0.0;
  for (const auto& x : a.X)
    for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double sup_psi(const SubstrateState& sub, double t) {
  double m = 0.0;
  for (int j = 0; j < sub.m; ++j) m = std::max(m, std::abs(sub.boundary.psi[j].value(t)));
  return m;
}

PicardReport picard_impl(DriverState& st, double dt, const MarchConfig& cfg, bool enforce_budget) {
  const Problem& p = st.problem;
  const BiomassState& b0 = st.bio;
  PicardReport rep;

  SubstrateState sub = st.sub;
  sub.levels.emplace_back();
  NodeValues Cg = st.C;  // iterate on the nodes of b0
  if (st.dt_prev > 0.0 && st.C_prev.size() == st.C.size()) {
    const double w = dt / st.dt_prev;
    for (std::size_t k = 0; k < Cg.size(); ++k)
      for (std::size_t j = 0; j < Cg[k].size(); ++j)
        Cg[k][j] = std::max(0.0, st.C[k][j] + w * (st.C[k][j] - st.C_prev[k][j]));
  }
  BiomassState prev = b0;
  std::vector<double> theta_prev = st.sub.current().theta;
  double L_prev = st.fb.L;
  BiomassState bn, bt;
  FreeBoundaryState fb;
  NodeValues Cn;
  Profiles S;

  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    bn = step_characteristics(b0, Cg, p.kinetics, dt, it > 1 ? &prev : nullptr);
    fb = step_boundary(st.fb, b0, bn);
    bt = bn;
    trim_domain(fb, bt, st.h_ref);
    sub.levels.back() = make_slice(p, bt, resample(bn.eta, Cg, bt.eta), fb.L, fb.Ldot);
    solve_boundary_level(sub, cfg.threads);
    S = substrate_profiles(sub);
    Cn = to_concentrations(p, S);
    NodeValues Cg_next = resample(bt.eta, Cn, bn.eta);

    const auto& theta = sub.current().theta;
    const double r = sup_diff(Cg_next, Cg) + sup_X_diff(bn, prev) + sup_diff(bn.eta, prev.eta) +
                     sup_diff(theta, theta_prev) + std::abs(fb.L - L_prev);
    const double scale = std::max(1.0, sup_abs(Cn) + sup_X(bn) + sup_abs(bn.eta) + sup_abs(theta) + fb.L);
    rep.ratios.push_back(rep.residuals.empty() || rep.residuals.back() == 0.0 ? 0.0 : r / rep.residuals.back());
    rep.residuals.push_back(r);
    rep.iterations = it;
    Cg = std::move(Cg_next);
    prev = bn;
    theta_prev = theta;
    L_prev = fb.L;
    if (r <= cfg.picard_tol * scale) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged) {
    throw SolverError(ErrorCode::NonContraction,
                      "Picard iteration not converged after " + std::to_string(rep.iterations) +
                          " sweeps (last ratio " + std::to_string(rep.ratios.back()) + ")");
  }

  rep.boundary_residual = sub.current().residual;
  for (int j = 0; j < sub.m; ++j) rep.flux_residual = std::max(rep.flux_residual, verify_flux_zero(bt.eta, S[j]));
  double s_ref = std::max(sup_psi(sub, bt.t), 1e-300);
  for (const auto& Sj : S) s_ref = std::max(s_ref, sup_abs(Sj));
  const double allowed = 100.0 * cfg.picard_tol * std::max(1.0, s_ref) + cfg.residual_budget * s_ref;
  rep.accepted = !enforce_budget || rep.boundary_residual <= allowed;
  if (!rep.accepted) return rep;

  refresh_rates(bt, Cn, p.kinetics);
  check_biomass_invariants(bt);
  st.bio = std::move(bt);
  st.fb = std::move(fb);
  st.C_prev = std::move(st.C);
  st.dt_prev = dt;
  st.C = std::move(Cn);
  st.sub = std::move(sub);
  ++st.step;
  ++st.since_rebaseline;
  return rep;
}

}  // namespace

PicardReport picard_step(DriverState& st, double dt, const MarchConfig& cfg) {
  if (!(dt > 0.0)) throw SolverError(ErrorCode::ValidationError, "dt must be positive");
  return picard_impl(st, dt, cfg, true);
}

void rebaseline(DriverState& st) {
  if (st.sub.levels.size() > 1) {
    Profiles S(static_cast<std::size_t>(st.sub.m), std::vector<double>(st.C.size()));
    for (std::size_t k = 0; k < st.C.size(); ++k)
      for (std::size_t j = 0; j < S.size(); ++j) S[j][k] = st.problem.D[j] * st.C[k][j];
    rebaseline_state(st.sub, S);
  }
  st.since_rebaseline = 0;
}

NodeValues current_concentrations(const DriverState& st) { return to_concentrations(st.problem, substrate_profiles(st.sub)); }

Frame snapshot(const DriverState& st) {
  Frame f;
  const auto& b = st.bio;
  f.t = b.t;
  f.L = st.fb.L;
  f.z = b.eta;
  f.z0 = b.z0;
  f.u = b.u;
  const auto& spec = st.problem.kinetics;
  const auto rho = spec.densities();
  f.X.assign(static_cast<std::size_t>(spec.n), std::vector<double>(b.size()));
  f.f = f.X;
  f.C.assign(static_cast<std::size_t>(spec.m), std::vector<double>(b.size()));
  for (std::size_t k = 0; k < b.size(); ++k) {
    for (std::size_t i = 0; i < f.X.size(); ++i) {
      f.X[i][k] = b.X[k][i];
      f.f[i][k] = b.X[k][i] / rho[i];
    }
    for (std::size_t j = 0; j < f.C.size(); ++j) f.C[j][k] = st.C[k][j];
  }
  return f;
}

namespace {

StepRecord record(const DriverState& st, const PicardReport& rep) {
  StepRecord r;
  r.t = st.bio.t;
  r.L = st.fb.L;
  r.Ldot = st.fb.Ldot;
  const auto& cur = st.sub.current();
  r.theta = cur.theta;
  r.phi = cur.phi;
  if (!st.sub.boundary.effective_dirichlet()) r.rho = cur.trace;
  r.iterations = rep.iterations;
  for (std::size_t k = 1; k < rep.ratios.size(); ++k) r.max_ratio = std::max(r.max_ratio, rep.ratios[k]);
  r.boundary_residual = rep.boundary_residual;
  r.flux_residual = rep.flux_residual;
  return r;
}

// advance to `target`, halving the step when the Picard solve fails or the boundary residual is over budget
StepRecord advance_to(DriverState& st, double target, const MarchConfig& cfg, int depth) {
  const double dt = target - st.bio.t;
  const bool last = depth >= cfg.max_halvings;
  try {
    const auto rep = picard_impl(st, dt, cfg, !last);
    if (rep.accepted) {
      auto r = record(st, rep);
      r.dt = dt;
      r.halvings = depth;
      return r;
    }
  } catch (const SolverError& e) {
    if (e.code() != ErrorCode::NonContraction || last) throw;
  }
  const double mid = st.bio.t + 0.5 * dt;
  const auto a = advance_to(st, mid, cfg, depth + 1);
  auto b = advance_to(st, target, cfg, depth + 1);
  b.dt = dt;
  b.iterations += a.iterations;
  b.max_ratio = std::max(a.max_ratio, b.max_ratio);
  b.boundary_residual = std::max(a.boundary_residual, b.boundary_residual);
  b.flux_residual = std::max(a.flux_residual, b.flux_residual);
  b.halvings = std::max(a.halvings, b.halvings);
  return b;
}

std::string strip_code(const SolverError& e) {
  const std::string w = e.what();
  const auto pos = w.find(": ");
  return pos == std::string::npos ? w : w.substr(pos + 2);
}

}  // namespace

SimulationOutput run_simulation(const Problem& problem, const MarchConfig& cfg) {
  cfg.validate();
  SimulationOutput out;
  DriverState st = init_driver(problem);
  out.frames.push_back(snapshot(st));
  if (cfg.t_end == 0.0) return out;

  const long n = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  std::vector<long> rebase_steps;
  for (double t : cfg.rebaseline_at) rebase_steps.push_back(std::lround(t / cfg.dt));

  for (long k = 1; k <= n; ++k) {
    const double target = k == n ? cfg.t_end : static_cast<double>(k) * cfg.dt;
    try {
      auto rec = advance_to(st, target, cfg, 0);
      const bool scheduled = std::find(rebase_steps.begin(), rebase_steps.end(), k) != rebase_steps.end();
      if (scheduled || st.since_rebaseline >= cfg.rebaseline_every) {
        rebaseline(st);
        rec.rebaselined = true;
      }
      out.steps.push_back(std::move(rec));
    } catch (const SolverError& e) {
      throw SolverError(e.code(), strip_code(e) + " (step " + std::to_string(k) + ", t = " + std::to_string(target) + ")");
    }
    if (k % cfg.output_stride == 0 || k == n) out.frames.push_back(snapshot(st));
  }
  return out;
}

}  // namespace biofilm
