#include "biofilm/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "biofilm/errors.hpp"
#include "biofilm/kinetics.hpp"

namespace biofilm {

void OracleConfig::validate() const {
  auto fail = [](const std::string& what) { throw SolverError(ErrorCode::ValidationError, what); };
  if (N_x < 32) fail("oracle N_x must be >= 32");
  if (!(dt > 0.0)) fail("oracle dt must be positive");
  if (!(t_end >= 0.0)) fail("oracle t_end must be >= 0");
  if (!(theta_scheme >= 0.5 && theta_scheme <= 1.0)) fail("theta_scheme must lie in [0.5, 1]");
  if (output_stride < 1) fail("oracle output stride must be >= 1");
}

namespace {

using Field = std::vector<std::vector<double>>;

struct State {
  double t = 0.0;
  double L = 0.0;
  Field X;  // [species][node]
  Field C;  // [substrate][node]
};

struct Rates {
  Field dX;
  Field F;  // [substrate][node]
  double Ldot = 0.0;
};

struct Tridiag {
  std::vector<double> lo, di, up, b;  // A C + b
};

class Oracle {
 public:
  Oracle(const Problem& p, const OracleConfig& cfg) : p_(p), cfg_(cfg) {
    const int N = cfg.N_x;
    dxi_ = 1.0 / (N - 1);
    xi_.resize(N);
    vol_.assign(N, dxi_);
    for (int k = 0; k < N; ++k) xi_[k] = k * dxi_;
    xi_.back() = 1.0;
    vol_.front() = vol_.back() = 0.5 * dxi_;
  }

  const std::vector<double>& xi() const { return xi_; }

  State initial() const {
    State s;
    s.L = p_.L0;
    const std::size_t N = xi_.size();
    s.X.assign(p_.kinetics.n, std::vector<double>(N));
    s.C.assign(p_.kinetics.m, std::vector<double>(N));
    for (std::size_t k = 0; k < N; ++k) {
      const double z = xi_[k] * p_.L0;
      for (int i = 0; i < p_.kinetics.n; ++i) s.X[i][k] = p_.X0[i](z);
      for (int j = 0; j < p_.kinetics.m; ++j) s.C[j][k] = p_.C0[j](z);
    }
    if (dirichlet())
      for (int j = 0; j < p_.kinetics.m; ++j) s.C[j].back() = trace(j, 0.0);
    return s;
  }

  State step(const State& s) const {
    const double dt = cfg_.dt;
    const Rates r0 = rates(s);
    State pred;
    pred.t = s.t + dt;
    pred.L = s.L + dt * r0.Ldot;
    pred.X = euler(s.X, r0.dX, dt);
    pred.C = diffuse(s, r0.Ldot, pred.L, r0.Ldot, pred.t, r0.F);
    check(pred);

    const Rates r1 = rates(pred);
    State next;
    next.t = pred.t;
    next.L = s.L + 0.5 * dt * (r0.Ldot + r1.Ldot);
    next.X = s.X;
    for (std::size_t i = 0; i < next.X.size(); ++i)
      for (std::size_t k = 0; k < xi_.size(); ++k) next.X[i][k] += 0.5 * dt * (r0.dX[i][k] + r1.dX[i][k]);
    Field F = r0.F;
    for (std::size_t j = 0; j < F.size(); ++j)
      for (std::size_t k = 0; k < xi_.size(); ++k) F[j][k] = 0.5 * (r0.F[j][k] + r1.F[j][k]);
    next.C = diffuse(s, r0.Ldot, next.L, r1.Ldot, next.t, F);
    check(next);
    return next;
  }

 private:
  bool dirichlet() const { return p_.boundary == BoundaryKind::dirichlet || p_.h == 0.0; }

  double trace(int j, double t) const {
    const double v = p_.psi[j](t);
    return p_.boundary == BoundaryKind::robin ? v / p_.k : v;
  }

  static Field euler(const Field& y, const Field& dy, double dt) {
    Field out = y;
    for (std::size_t i = 0; i < y.size(); ++i)
      for (std::size_t k = 0; k < y[i].size(); ++k) out[i][k] += dt * dy[i][k];
    return out;
  }

  double limited_slope(const std::vector<double>& x, std::size_t k) const {
    if (!cfg_.limiter || k == 0 || k + 1 == x.size()) return 0.0;
    const double a = x[k] - x[k - 1], b = x[k + 1] - x[k];
    if (a * b <= 0.0) return 0.0;
    return (std::abs(a) < std::abs(b) ? a : b) / dxi_;
  }

  Rates rates(const State& s) const {
    const std::size_t N = xi_.size();
    const int n = p_.kinetics.n, m = p_.kinetics.m;
    Rates r;
    r.dX.assign(n, std::vector<double>(N));
    r.F.assign(m, std::vector<double>(N));
    std::vector<double> R(N), X(n), C(m);
    Field H(n, std::vector<double>(N));
    for (std::size_t k = 0; k < N; ++k) {
      for (int i = 0; i < n; ++i) X[i] = s.X[i][k];
      for (int j = 0; j < m; ++j) C[j] = std::max(s.C[j][k], 0.0);
      const auto g = eval_growth_terms(p_.kinetics, X, C);
      const auto f = eval_substrate_sources(p_.kinetics, X, C);
      R[k] = g.R;
      for (int i = 0; i < n; ++i) H[i][k] = g.Htilde[i];
      for (int j = 0; j < m; ++j) r.F[j][k] = f[j];
    }
    // u on the control-volume faces: face k sits between node k - 1 and node k,
    // face 0 at xi = 0 and face N at xi = 1
    std::vector<double> u(N + 1, 0.0), xf(N + 1, 0.0);
    for (std::size_t k = 0; k < N; ++k) u[k + 1] = u[k] + s.L * R[k] * vol_[k];
    for (std::size_t k = 1; k < N; ++k) xf[k] = 0.5 * (xi_[k - 1] + xi_[k]);
    xf[N] = 1.0;
    r.Ldot = u[N] + p_.sigma.signed_rate(s.L);
    std::vector<double> v(N + 1);
    for (std::size_t k = 0; k <= N; ++k) v[k] = u[k] - xf[k] * r.Ldot;
    v[0] = 0.0;

    double courant = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double out = std::max(v[k + 1], 0.0) + std::max(-v[k], 0.0);
      courant = std::max(courant, cfg_.dt * out / (s.L * vol_[k]));
    }
    if (courant > 1.0)
      throw SolverError(ErrorCode::CFLViolation, "oracle Courant number " + std::to_string(courant) + " > 1");

    for (int i = 0; i < n; ++i) {
      const auto& x = s.X[i];
      std::vector<double> flux(N + 1, 0.0);
      for (std::size_t k = 1; k < N; ++k) {
        flux[k] = v[k] > 0.0 ? v[k] * (x[k - 1] + 0.5 * dxi_ * limited_slope(x, k - 1))
                             : v[k] * (x[k] - 0.5 * dxi_ * limited_slope(x, k));
      }
      double top = x[N - 1];
      if (v[N] < 0.0 && !p_.sigma.attach_X.empty()) top = p_.sigma.attach_X[i];
      flux[N] = v[N] * top;
      for (std::size_t k = 0; k < N; ++k)
        r.dX[i][k] = -(flux[k + 1] - flux[k]) / (s.L * vol_[k]) + H[i][k] - r.Ldot / s.L * x[k];
    }
    return r;
  }

  // A C + b at length L, rate Ldot and time t for substrate j
  Tridiag op(int j, double L, double Ldot, double t) const {
    const std::size_t N = xi_.size();
    const double D = p_.D[j];
    const double dif = D / (L * L * dxi_ * dxi_);
    Tridiag a{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0), std::vector<double>(N, 0.0),
              std::vector<double>(N, 0.0)};
    a.di[0] = -2.0 * dif;
    a.up[0] = 2.0 * dif;
    for (std::size_t k = 1; k + 1 < N; ++k) {
      const double adv = xi_[k] * Ldot / (L * 2.0 * dxi_);
      a.lo[k] = dif - adv;
      a.di[k] = -2.0 * dif;
      a.up[k] = dif + adv;
    }
    if (!dirichlet()) {
      // ghost node from C_z = alpha1 psi - alpha2 C at the film surface
      const double al1 = p_.Dstar[j] / (p_.h * D), al2 = p_.k * p_.Dstar[j] / (p_.h * D);
      const double psi = p_.psi[j](t);
      const double adv = Ldot / L;
      a.lo[N - 1] = 2.0 * dif;
      a.di[N - 1] = -2.0 * dif - (2.0 * dif * dxi_ * L + adv * L) * al2;
      a.b[N - 1] = (2.0 * dif * dxi_ * L + adv * L) * al1 * psi;
    }
    return a;
  }

  static std::vector<double> apply(const Tridiag& a, const std::vector<double>& c) {
    const std::size_t N = c.size();
    std::vector<double> y(N);
    for (std::size_t k = 0; k < N; ++k) {
      y[k] = a.di[k] * c[k] + a.b[k];
      if (k > 0) y[k] += a.lo[k] * c[k - 1];
      if (k + 1 < N) y[k] += a.up[k] * c[k + 1];
    }
    return y;
  }

  Field diffuse(const State& s, double Ldot0, double L1, double Ldot1, double t1, const Field& F) const {
    const double dt = cfg_.dt, th = cfg_.theta_scheme;
    const std::size_t N = xi_.size();
    Field out(s.C.size());
    for (std::size_t j = 0; j < s.C.size(); ++j) {
      const auto a0 = op(static_cast<int>(j), s.L, Ldot0, s.t);
      const auto a1 = op(static_cast<int>(j), L1, Ldot1, t1);
      const auto ex = apply(a0, s.C[j]);
      std::vector<double> lo(N), di(N), up(N), rhs(N);
      for (std::size_t k = 0; k < N; ++k) {
        lo[k] = -th * dt * a1.lo[k];
        di[k] = 1.0 - th * dt * a1.di[k];
        up[k] = -th * dt * a1.up[k];
        rhs[k] = s.C[j][k] + (1.0 - th) * dt * ex[k] + th * dt * a1.b[k] + dt * F[j][k];
      }
      if (dirichlet()) {
        lo[N - 1] = 0.0;
        di[N - 1] = 1.0;
        rhs[N - 1] = trace(static_cast<int>(j), t1);
      }
      // Thomas algorithm
      for (std::size_t k = 1; k < N; ++k) {
        const double w = lo[k] / di[k - 1];
        di[k] -= w * up[k - 1];
        rhs[k] -= w * rhs[k - 1];
      }
      out[j].assign(N, 0.0);
      out[j][N - 1] = rhs[N - 1] / di[N - 1];
      for (std::size_t k = N - 1; k-- > 0;) out[j][k] = (rhs[k] - up[k] * out[j][k + 1]) / di[k];
    }
    return out;
  }

  static void check(const State& s) {
    if (!std::isfinite(s.L) || !(s.L > 0.0))
      throw SolverError(ErrorCode::NonPhysicalState, "oracle thickness left (0, inf)");
    for (const auto& x : s.X)
      for (double v : x)
        if (!std::isfinite(v) || v < -1e-8)
          throw SolverError(ErrorCode::NonPhysicalState, "oracle biomass non-finite or negative");
    for (const auto& c : s.C)
      for (double v : c)
        if (!std::isfinite(v)) throw SolverError(ErrorCode::NonPhysicalState, "oracle substrate non-finite");
  }

  const Problem& p_;
  const OracleConfig& cfg_;
  double dxi_ = 0.0;
  std::vector<double> xi_, vol_;
};

OracleFrame frame(const State& s, const std::vector<double>& xi) {
  OracleFrame f;
  f.t = s.t;
  f.L = s.L;
  f.z.resize(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) f.z[k] = xi[k] * s.L;
  f.X = s.X;
  f.C = s.C;
  return f;
}

}  // namespace

OracleResult solve_front_fixed(const Problem& problem, const OracleConfig& cfg) {
  problem.validate();
  cfg.validate();
  if (problem.variable_diffusivity)
    throw SolverError(ErrorCode::ValidationError, "the oracle supports constant diffusivity only");
  Oracle o(problem, cfg);
  OracleResult res;
  res.xi = o.xi();
  State s = o.initial();
  res.t.push_back(s.t);
  res.L.push_back(s.L);
  res.frames.push_back(frame(s, res.xi));
  const int steps = static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  for (int n = 1; n <= steps; ++n) {
    s = o.step(s);
    s.t = n == steps ? cfg.t_end : n * cfg.dt;
    res.t.push_back(s.t);
    res.L.push_back(s.L);
    if (n % cfg.output_stride == 0 || n == steps) res.frames.push_back(frame(s, res.xi));
  }
  return res;
}

OracleComparison compare_with_oracle(const Problem& problem, const SimulationOutput& ie,
                                     const OracleResult& oracle) {
  OracleComparison c;
  double psi_scale = 0.0;
  const double t_last = ie.frames.empty() ? 0.0 : ie.frames.back().t;
  for (std::size_t j = 0; j < problem.D.size(); ++j)
    psi_scale = std::max(psi_scale, problem.D[j] * problem.psi[j].sup_abs(0.0, std::max(t_last, 1e-12)));
  if (!(psi_scale > 0.0)) psi_scale = 1.0;
  for (const auto& f : ie.frames) {
    const auto it = std::find_if(oracle.frames.begin(), oracle.frames.end(), [&](const OracleFrame& o) {
      return std::abs(o.t - f.t) <= 1e-7 * std::max(1.0, f.t);
    });
    if (it == oracle.frames.end()) continue;
    ++c.frames;
    const double dl = std::abs(f.L - it->L) / it->L;
    if (dl > c.L_diff) {
      c.L_diff = dl;
      c.t_worst_L = f.t;
    }
    for (std::size_t j = 0; j < f.C.size(); ++j) {
      for (std::size_t k = 0; k < f.z.size(); ++k) {
        const double x = std::clamp(f.z[k] / it->L, 0.0, 1.0);
        const std::size_t N = oracle.xi.size();
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x * (N - 1)), N - 2);
        const double w = (x - oracle.xi[i]) / (oracle.xi[i + 1] - oracle.xi[i]);
        const double co = (1.0 - w) * it->C[j][i] + w * it->C[j][i + 1];
        const double d = problem.D[j] * std::abs(f.C[j][k] - co) / psi_scale;
        if (d > c.S_diff) {
          c.S_diff = d;
          c.t_worst_S = f.t;
        }
      }
    }
  }
  return c;
}

}  // namespace biofilm
