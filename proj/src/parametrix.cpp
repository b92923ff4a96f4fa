#include "biofilm/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numbers>
#include <utility>

#include "biofilm/errors.hpp"
#include "biofilm/numerics.hpp"

namespace biofilm {

using kernels::KernelPoint;

DiffusivityField DiffusivityField::constant(double D) {
  DiffusivityField f;
  f.mode = Mode::constant;
  f.D = {D};
  return f;
}

DiffusivityField DiffusivityField::variable(double D0, Fn porosity, Fn porosity_dz) {
  DiffusivityField f;
  f.mode = Mode::variable;
  f.D0 = D0;
  f.porosity = std::move(porosity);
  f.porosity_dz = std::move(porosity_dz);
  return f;
}

DiffusivityField DiffusivityField::custom(Fn a, Fn b) {
  DiffusivityField f;
  f.mode = Mode::variable;
  f.custom_a = std::move(a);
  f.custom_b = std::move(b);
  return f;
}

DiffusivityField DiffusivityField::uniform_porosity(double D0, double p) {
  auto f = variable(D0, [p](double, double) { return p; }, [](double, double) { return 0.0; });
  f.uniform = true;
  return f;
}

bool DiffusivityField::is_constant() const { return mode == Mode::constant; }

double DiffusivityField::a_half(double z, double t) const {
  if (mode == Mode::constant) return D.at(static_cast<std::size_t>(substrate));
  if (custom_a) return custom_a(z, t);
  const double p = std::clamp(porosity ? porosity(z, t) : 1.0, 0.0, 1.0);
  return D0 * std::exp(-std::sqrt(1.0 - p));
}

double DiffusivityField::b_half(double z, double t) const {
  if (mode == Mode::constant) return 0.0;
  if (custom_a) {
    if (custom_b) return custom_b(z, t);
  } else if (!porosity) {
    return 0.0;
  } else if (porosity_dz) {
    const double raw = porosity(z, t);
    const double p = std::clamp(raw, 0.0, 1.0);
    const double q = 1.0 - p;
    if (raw > 0.0 && q > 1e-12) return a_half(z, t) * porosity_dz(z, t) / (2.0 * std::sqrt(q));
  }
  const double h = fd_step;
  return (a_half(z + h, t) - a_half(z - h, t)) / (2.0 * h);
}

double DiffusivityField::a(double z, double t) const { return a_half(std::abs(z), t); }

double DiffusivityField::b(double z, double t) const {
  if (z < 0.0) return -b_half(-z, t);
  return b_half(z, t);
}

double DiffusivityField::a_min(double L, double t0, double t1, int samples) const {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    for (int k = 0; k < samples; ++k) {
      const double z = L * i / (samples - 1);
      const double t = t0 + (t1 - t0) * k / (samples - 1);
      lo = std::min(lo, a(z, t));
    }
  }
  if (!(lo > 0.0)) throw SolverError(ErrorCode::NonParabolic, "diffusivity not uniformly positive");
  return lo;
}

void DiffusivityField::validate() const {
  if (mode == Mode::constant) {
    if (D.empty()) throw SolverError(ErrorCode::ValidationError, "no diffusivities given");
    for (double d : D)
      if (!(d > 0.0)) throw SolverError(ErrorCode::NonParabolic, "diffusivity must be positive");
    if (substrate < 0 || substrate >= static_cast<int>(D.size()))
      throw SolverError(ErrorCode::ValidationError, "substrate index out of range");
  } else if (!custom_a && !(D0 > 0.0)) {
    throw SolverError(ErrorCode::NonParabolic, "D0 must be positive");
  }
  if (!(fd_step > 0.0)) throw SolverError(ErrorCode::ValidationError, "fd_step must be positive");
}

void ParametrixConfig::validate() const {
  if (series_order < 0 || series_order > 4)
    throw SolverError(ErrorCode::ValidationError, "series_order must be in [0, 4]");
  if (space_quad_nodes < 8 || time_quad_nodes < 8)
    throw SolverError(ErrorCode::ValidationError, "quadrature node counts must be >= 8");
}

double eval_Z(const KernelPoint& p, const DiffusivityField& field) {
  const double a0 = field.a(p.xi, p.tau);
  return kernels::eval_K(p, a0);
}

GammaEvaluator::GammaEvaluator(DiffusivityField field, ParametrixConfig cfg, double L)
    : field_(std::move(field)), cfg_(cfg), L_(L) {
  field_.validate();
  cfg_.validate();
  if (!(L_ > 0.0)) throw SolverError(ErrorCode::ValidationError, "domain length must be positive");
  trivial_ = field_.is_uniform() || cfg_.series_order == 0;
}

double GammaEvaluator::Z(const KernelPoint& p) const { return eval_Z(p, field_); }

double GammaEvaluator::Z_dz(const KernelPoint& p) const {
  const double v = field_.a(p.xi, p.tau) * (p.t - p.tau);
  if (!(p.t > p.tau)) throw SolverError(ErrorCode::DegenerateTime, "t <= tau");
  if (!(v > 0.0)) throw SolverError(ErrorCode::NonParabolic, "a(xi, tau) <= 0");
  return kernels::gaussian_dx(p.z - p.xi, v);
}

double GammaEvaluator::PZ(const KernelPoint& p) const {
  if (field_.is_uniform()) return 0.0;
  if (!(p.t > p.tau)) throw SolverError(ErrorCode::DegenerateTime, "t <= tau");
  const double a0 = field_.a(p.xi, p.tau);
  if (!(a0 > 0.0)) throw SolverError(ErrorCode::NonParabolic, "a(xi, tau) <= 0");
  const double v = a0 * (p.t - p.tau);
  const double d = p.z - p.xi;
  const double g = kernels::gaussian(d, v);
  const double gx = -d / (2.0 * v) * g;
  const double gxx = (d * d / (4.0 * v * v) - 1.0 / (2.0 * v)) * g;
  return (field_.a(p.z, p.t) - a0) * gxx + field_.b(p.z, p.t) * gx;
}

template <class Outer>
double GammaEvaluator::levi_integral(const KernelPoint& p, int level, Outer outer) const {
  const auto& tr = gauss_legendre(cfg_.time_quad_nodes);
  const auto& sr = gauss_legendre(cfg_.space_quad_nodes);
  const double span = p.t - p.tau;
  const double ax = std::max(field_.a(p.z, p.t), 1e-300);
  const double axi = std::max(field_.a(p.xi, p.tau), 1e-300);
  constexpr int panels = 3;
  double total = 0.0;
  for (std::size_t i = 0; i < tr.nodes.size(); ++i) {
    // lambda = tau + span (1 - cos(pi u)) / 2 clusters nodes at both ends
    const double u = 0.5 * (tr.nodes[i] + 1.0);
    const double v = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
    const double lam = p.tau + span * v;
    const double dlam = 0.5 * tr.weights[i] * span * 0.5 * std::numbers::pi * std::sin(std::numbers::pi * u);
    const double s1 = ax * (p.t - lam);
    const double s2 = axi * (lam - p.tau);
    const double centre = (p.z * s2 + p.xi * s1) / (s1 + s2);
    const double width = 8.0 * std::sqrt(2.0 * s1 * s2 / (s1 + s2));
    const double lo = std::max(-L_, centre - width);
    const double hi = std::min(L_, centre + width);
    if (!(hi > lo)) continue;
    // the even extension has a kink at sigma = 0; keep it on a panel edge
    double cuts[3] = {lo, hi, hi};
    int nseg = 1;
    if (lo < 0.0 && hi > 0.0) {
      cuts[1] = 0.0;
      nseg = 2;
    }
    double inner = 0.0;
    for (int seg = 0; seg < nseg; ++seg) {
      const double a_ = cuts[seg], b_ = cuts[seg + 1];
      const double h = (b_ - a_) / panels;
      for (int k = 0; k < panels; ++k) {
        for (std::size_t q = 0; q < sr.nodes.size(); ++q) {
          const double sigma = a_ + h * (k + 0.5 * (sr.nodes[q] + 1.0));
          const double w = 0.5 * h * sr.weights[q];
          const double o = outer(KernelPoint{p.z, p.t, sigma, lam});
          if (o == 0.0) continue;
          inner += w * o * density(KernelPoint{sigma, lam, p.xi, p.tau}, level);
        }
      }
    }
    total += dlam * inner;
  }
  return total;
}

double GammaEvaluator::density(const KernelPoint& p, int level) const {
  if (field_.is_uniform()) return 0.0;
  const double base = PZ(p);
  if (level <= 0) return base;
  return base + levi_integral(p, level - 1, [this](const KernelPoint& q) { return PZ(q); });
}

double GammaEvaluator::operator()(const KernelPoint& p) const {
  const double z = Z(p);
  if (trivial_) return z;
  return z + levi_integral(p, cfg_.series_order - 1, [this](const KernelPoint& q) { return Z(q); });
}

double GammaEvaluator::dz(const KernelPoint& p) const {
  const double z = Z_dz(p);
  if (trivial_) return z;
  return z + levi_integral(p, cfg_.series_order - 1, [this](const KernelPoint& q) { return Z_dz(q); });
}

double GammaEvaluator::residual(const KernelPoint& p, double rel_step) const {
  const double e = p.t - p.tau;
  const double h = rel_step * std::sqrt(field_.a(p.z, p.t) * e);
  const double ht = rel_step * e;
  auto G = [&](double dz_, double dt_) { return (*this)(KernelPoint{p.z + dz_, p.t + dt_, p.xi, p.tau}); };
  const double g0 = G(0, 0);
  const double gz = (-G(2 * h, 0) + 8 * G(h, 0) - 8 * G(-h, 0) + G(-2 * h, 0)) / (12 * h);
  const double gzz = (-G(2 * h, 0) + 16 * G(h, 0) - 30 * g0 + 16 * G(-h, 0) - G(-2 * h, 0)) / (12 * h * h);
  const double gt = (-G(0, 2 * ht) + 8 * G(0, ht) - 8 * G(0, -ht) + G(0, -2 * ht)) / (12 * ht);
  return field_.a(p.z, p.t) * gzz + field_.b(p.z, p.t) * gz - gt;
}

GammaEvaluator build_gamma(const DiffusivityField& field, const ParametrixConfig& cfg, double L) {
  GammaEvaluator gamma(field, cfg, L);
  if (gamma.trivial() || cfg.series_order < 2) return gamma;
  const double amax = std::max(field.a(0.0, 0.0), field.a(L, 0.0));
  std::vector<KernelPoint> lattice;
  for (double frac : {0.05, 0.25}) {
    const double e = frac * L * L / amax;
    const double w = std::sqrt(amax * e);
    for (double xi : {0.25 * L, 0.75 * L})
      for (double off : {-1.0, 0.0, 1.0}) lattice.push_back({xi + off * w, e, xi, 0.0});
  }
  double prev = 0.0;
  for (const auto& q : lattice) prev = std::max(prev, std::abs(gamma.density(q, 0)));
  for (int level = 1; level < cfg.series_order; ++level) {
    double inc = 0.0;
    for (const auto& q : lattice)
      inc = std::max(inc, std::abs(gamma.density(q, level) - gamma.density(q, level - 1)));
    if (inc > prev) {
      throw SolverError(ErrorCode::SeriesDivergence,
                        "Levi series increment grew at level " + std::to_string(level));
    }
    prev = inc;
  }
  return gamma;
}

double eval_H_vardiff(const GammaEvaluator& gamma, const KernelPoint& p) {
  if (p.z == 0.0) return 0.0;
  return gamma(p) - gamma(KernelPoint{-p.z, p.t, p.xi, p.tau});
}

double eval_H_vardiff_even(const GammaEvaluator& gamma, const KernelPoint& p) {
  return gamma(p) + gamma(KernelPoint{-p.z, p.t, p.xi, p.tau});
}

double eval_H_vardiff_even_dz(const GammaEvaluator& gamma, const KernelPoint& p) {
  if (p.z == 0.0) return 0.0;
  return gamma.dz(p) - gamma.dz(KernelPoint{-p.z, p.t, p.xi, p.tau});
}

namespace {

GrowthFit fit(const std::vector<double>& e, const std::vector<double>& sup, double exponent) {
  const double n = static_cast<double>(e.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  GrowthFit out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double x = std::log(e[i]), y = std::log(sup[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    out.constant = std::max(out.constant, sup[i] * std::pow(e[i], -exponent));
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

}  // namespace

GammaBounds measure_gamma_bounds(const GammaEvaluator& gamma, double xi, double tau,
                                 const std::vector<double>& elapsed) {
  std::vector<double> sv, sz, st;
  const double a = gamma.field().a(xi, tau);
  for (double e : elapsed) {
    const double w = std::sqrt(a * e);
    const double ht = 1e-2 * e;
    double mv = 0, mz = 0, mt = 0;
    for (int k = -12; k <= 12; ++k) {
      const KernelPoint p{xi + 0.25 * k * w, tau + e, xi, tau};
      mv = std::max(mv, std::abs(gamma(p)));
      mz = std::max(mz, std::abs(gamma.dz(p)));
      auto at = [&](double dt) { return gamma(KernelPoint{p.z, p.t + dt, xi, tau}); };
      const double gt = (-at(2 * ht) + 8 * at(ht) - 8 * at(-ht) + at(-2 * ht)) / (12 * ht);
      mt = std::max(mt, std::abs(gt));
    }
    sv.push_back(mv);
    sz.push_back(mz);
    st.push_back(mt);
  }
  return {fit(elapsed, sv, -0.5), fit(elapsed, sz, -1.0), fit(elapsed, st, -1.5)};
}

}  // namespace biofilm
