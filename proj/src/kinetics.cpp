#include "biofilm/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "biofilm/errors.hpp"

namespace biofilm {

namespace {

std::vector<double> clamped(std::span<const double> v, const char* what) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) {
    if (!(x >= -kNegativeStateTolerance)) {
      throw SolverError(ErrorCode::NegativeState,
                        std::string(what) + " below tolerance: " + std::to_string(x));
    }
    if (x < 0.0) x = 0.0;
  }
  return out;
}

void check_sizes(const KineticsSpec& spec, std::span<const double> X, std::span<const double> C) {
  if (X.size() != static_cast<std::size_t>(spec.n) || C.size() != static_cast<std::size_t>(spec.m)) {
    throw std::invalid_argument("kinetics: state size does not match species/substrate counts");
  }
}

// growth part (without decay) of each species
std::vector<double> monod_growth(const KineticsSpec& spec, std::span<const double> X,
                                 std::span<const double> C) {
  std::vector<double> g(spec.n, 0.0);
  for (int i = 0; i < spec.n; ++i) {
    const auto& sp = spec.species[i];
    double rate = sp.mu_max * X[i];
    for (int j : sp.substrates) rate *= C[j] / (sp.K_S[j] + C[j]);
    g[i] = rate;
  }
  return g;
}

void raw_terms(const KineticsSpec& spec, std::span<const double> X, std::span<const double> C,
               std::span<double> Ht, std::span<double> F) {
  if (spec.custom) {
    spec.custom(X, C, Ht, F);
    return;
  }
  const auto g = monod_growth(spec, X, C);
  std::fill(F.begin(), F.end(), 0.0);
  for (int i = 0; i < spec.n; ++i) {
    const auto& sp = spec.species[i];
    Ht[i] = g[i] - sp.decay * X[i];
    for (int j : sp.substrates) F[j] -= g[i] / sp.yield[j];
  }
}

std::vector<std::vector<double>> lattice_axes(const StateBox& box, const LipschitzOptions& opts) {
  const std::size_t d = box.lo.size();
  std::vector<std::vector<double>> axes(d);
  int per_dim = std::max(2, opts.samples_per_dim);
  if (opts.step <= 0.0 && d > 0) {
    while (per_dim > 2 && std::pow(static_cast<double>(per_dim), static_cast<double>(d)) >
                              static_cast<double>(opts.max_points)) {
      --per_dim;
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double lo = box.lo[k];
    const double hi = box.hi[k];
    if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("estimate_lipschitz: box must have finite extents");
    }
    auto& ax = axes[k];
    if (opts.step > 0.0) {
      ax.push_back(lo);
      for (double q = std::ceil(lo / opts.step); q * opts.step <= hi; q += 1.0) {
        const double x = q * opts.step;
        if (x > lo && x < hi) ax.push_back(x);
      }
      if (hi > lo) ax.push_back(hi);
    } else {
      for (int i = 0; i < per_dim; ++i) ax.push_back(lo + (hi - lo) * i / (per_dim - 1));
      ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
    }
  }
  return axes;
}

template <typename Visit>
void for_each_lattice_point(const std::vector<std::vector<double>>& axes, Visit&& visit) {
  const std::size_t d = axes.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  while (true) {
    for (std::size_t k = 0; k < d; ++k) x[k] = axes[k][idx[k]];
    visit(std::span<const double>(x));
    std::size_t k = 0;
    while (k < d && ++idx[k] == axes[k].size()) idx[k++] = 0;
    if (k == d) break;
  }
}

}  // namespace

std::vector<double> KineticsSpec::densities() const {
  std::vector<double> rho(n);
  for (int i = 0; i < n; ++i) rho[i] = species[i].rho;
  return rho;
}

void KineticsSpec::validate() const {
  if (n < 1 || m < 0) throw SolverError(ErrorCode::ValidationError, "kinetics: need n >= 1, m >= 0");
  if (species.size() != static_cast<std::size_t>(n)) {
    throw SolverError(ErrorCode::ValidationError, "kinetics: species list size != n");
  }
  for (const auto& sp : species) {
    if (!(sp.rho > 0.0)) throw SolverError(ErrorCode::ValidationError, "kinetics: rho must be > 0");
    if (!(sp.mu_max >= 0.0)) throw SolverError(ErrorCode::ValidationError, "kinetics: mu_max must be >= 0");
    if (!(sp.decay >= 0.0)) throw SolverError(ErrorCode::ValidationError, "kinetics: decay must be >= 0");
    for (int j : sp.substrates) {
      if (j < 0 || j >= m) throw SolverError(ErrorCode::ValidationError, "kinetics: substrate index out of range");
      if (sp.K_S.size() <= static_cast<std::size_t>(j) || !(sp.K_S[j] > 0.0)) {
        throw SolverError(ErrorCode::ValidationError, "kinetics: K_S must be > 0");
      }
      if (sp.yield.size() <= static_cast<std::size_t>(j) || !(sp.yield[j] > 0.0)) {
        throw SolverError(ErrorCode::ValidationError, "kinetics: yield must be > 0");
      }
    }
  }
}

GrowthTerms eval_growth_terms(const KineticsSpec& spec, std::span<const double> X,
                              std::span<const double> C) {
  check_sizes(spec, X, C);
  const auto x = clamped(X, "X");
  const auto c = clamped(C, "C");
  GrowthTerms out;
  out.Htilde.assign(spec.n, 0.0);
  std::vector<double> F(spec.m, 0.0);
  raw_terms(spec, x, c, out.Htilde, F);
  for (int i = 0; i < spec.n; ++i) out.R += out.Htilde[i] / spec.species[i].rho;
  out.H.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) out.H[i] = out.Htilde[i] - x[i] * out.R;
  return out;
}

std::vector<double> eval_substrate_sources(const KineticsSpec& spec, std::span<const double> X,
                                           std::span<const double> C) {
  check_sizes(spec, X, C);
  const auto x = clamped(X, "X");
  const auto c = clamped(C, "C");
  std::vector<double> Ht(spec.n, 0.0);
  std::vector<double> F(spec.m, 0.0);
  raw_terms(spec, x, c, Ht, F);
  return F;
}

LipschitzEstimate estimate_lipschitz(const VectorField& f, const StateBox& box,
                                     const LipschitzOptions& opts) {
  if (box.lo.size() != box.hi.size()) throw std::invalid_argument("estimate_lipschitz: bad box");
  const auto axes = lattice_axes(box, opts);
  const std::size_t d = axes.size();
  double sup = 0.0;
  std::vector<double> probe(d);
  for_each_lattice_point(axes, [&](std::span<const double> x) {
    const auto f0 = f(x);
    std::vector<double> grad2(f0.size(), 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const double lo = box.lo[k], hi = box.hi[k];
      if (!(hi > lo)) continue;
      const double h = 1e-6 * std::max(1.0, hi - lo);
      std::copy(x.begin(), x.end(), probe.begin());
      std::vector<double> deriv(f0.size());
      if (x[k] - h >= lo && x[k] + h <= hi) {
        probe[k] = x[k] + h;
        const auto fp = f(probe);
        probe[k] = x[k] - h;
        const auto fm = f(probe);
        for (std::size_t c = 0; c < f0.size(); ++c) deriv[c] = (fp[c] - fm[c]) / (2.0 * h);
      } else {
        const double dir = x[k] - h < lo ? 1.0 : -1.0;
        probe[k] = x[k] + dir * h;
        const auto f1 = f(probe);
        probe[k] = x[k] + 2.0 * dir * h;
        const auto f2 = f(probe);
        for (std::size_t c = 0; c < f0.size(); ++c) {
          deriv[c] = dir * (-3.0 * f0[c] + 4.0 * f1[c] - f2[c]) / (2.0 * h);
        }
      }
      for (std::size_t c = 0; c < f0.size(); ++c) grad2[c] += deriv[c] * deriv[c];
    }
    for (double g2 : grad2) sup = std::max(sup, std::sqrt(g2));
  });
  return {sup, sup * opts.safety};
}

LipschitzEstimate estimate_lipschitz(const KineticsSpec& spec, const StateBox& box,
                                     const LipschitzOptions& opts) {
  const auto n = static_cast<std::size_t>(spec.n);
  const auto m = static_cast<std::size_t>(spec.m);
  VectorField f = [&spec, n, m](std::span<const double> state) {
    std::vector<double> Ht(n, 0.0), F(m, 0.0);
    raw_terms(spec, state.subspan(0, n), state.subspan(n, m), Ht, F);
    Ht.insert(Ht.end(), F.begin(), F.end());
    return Ht;
  };
  return estimate_lipschitz(f, box, opts);
}

double sup_velocity_source(const KineticsSpec& spec, const StateBox& box,
                           const LipschitzOptions& opts) {
  const auto n = static_cast<std::size_t>(spec.n);
  const auto m = static_cast<std::size_t>(spec.m);
  double sup = 0.0;
  for_each_lattice_point(lattice_axes(box, opts), [&](std::span<const double> state) {
    const auto g = eval_growth_terms(spec, state.subspan(0, n), state.subspan(n, m));
    sup = std::max(sup, std::abs(g.R));
  });
  return sup;
}

KineticsSpec monod_single(double mu_max, double K_S, double yield, double rho, double decay) {
  KineticsSpec spec;
  spec.n = 1;
  spec.m = 1;
  spec.species.push_back(MonodSpecies{rho, mu_max, decay, {K_S}, {yield}, {0}});
  return spec;
}

}  // namespace biofilm
