#include "biofilm/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "biofilm/errors.hpp"

namespace biofilm {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double slope_at(const PiecewisePoly::Coeffs& c, double u) { return c[1] + u * (2.0 * c[2] + 3.0 * u * c[3]); }
double value_at(const PiecewisePoly::Coeffs& c, double u) { return c[0] + u * (c[1] + u * (c[2] + u * c[3])); }

void require_c1(const PiecewisePoly& p, const char* what) {
  if (p.empty()) throw SolverError(ErrorCode::DataNotC1, std::string(what) + " has no samples");
  const auto& br = p.breaks();
  const auto& pc = p.pieces();
  for (std::size_t i = 1; i < pc.size(); ++i) {
    const double u = br[i] - br[i - 1];
    const double v_left = value_at(pc[i - 1], u), v_right = pc[i][0];
    const double d_left = slope_at(pc[i - 1], u), d_right = pc[i][1];
    const double scale = 1.0 + std::abs(v_right) + std::abs(d_right);
    if (std::abs(v_left - v_right) > 1e-9 * scale || std::abs(d_left - d_right) > 1e-9 * scale)
      throw SolverError(ErrorCode::DataNotC1, std::string(what) + " is not C1 at x = " + std::to_string(br[i]));
  }
}

DataNorms data_norms(const Problem& p, double lambda) {
  DataNorms n;
  for (std::size_t j = 0; j < p.C0.size(); ++j) {
    const auto& phi = p.C0[j];
    n.phi_sup = std::max(n.phi_sup, phi.sup_abs(0.0, p.L0));
    n.dphi_sup = std::max(n.dphi_sup, phi.derivative().sup_abs(0.0, p.L0));
    n.phi0 = std::max(n.phi0, std::abs(phi(0.0)));
    n.psi0 = std::max(n.psi0, std::abs(p.psi[j](0.0)));
    n.dpsi_sup = std::max(n.dpsi_sup, p.psi[j].derivative().sup_abs(0.0, lambda));
  }
  return n;
}

}  // namespace

const char* to_string(Verdict v) noexcept {
  return v == Verdict::certified ? "certified" : "uncertified";
}

double thickness_window(double M, double L0) { return std::min(1.0, L0 / (2.0 * M)); }

CertificateReport evaluate_constants(double lambda, double M, double K, double R, double L0,
                                     const DataNorms& d) {
  CertificateReport r;
  r.lambda = lambda;
  r.M = M;
  r.lipschitz = K;
  r.velocity_bound = R;
  r.norms = d;
  const double sl = std::sqrt(lambda);
  const double e = std::numbers::e;

  r.Mterms[0] = d.phi0 + d.psi0;
  r.Mterms[1] = d.dphi_sup;
  r.Mterms[2] = d.dpsi_sup * sl / kSqrtPi;
  r.Mterms[3] = r.Mterms[2];
  r.Mterms[4] = 2.0 * K * sl / kSqrtPi;
  r.Mterms[5] = 2.0 * K / L0 * std::sqrt(lambda / e);
  r.K1 = 0.0;
  for (double m : r.Mterms) r.K1 += m;

  // unit differences delta = |S1 - S2| = |X1 - X2| = 1; the iterates share their initial data
  const double delta = 1.0;
  const double C1 = 4.0 * lambda * std::pow(6.0 / e, 1.5) / (kSqrtPi * L0 * L0);
  const double drho = lambda * K * std::exp(R * lambda);
  const double A1 = 2.0 * K * sl / kSqrtPi;
  const double A2 = (M * delta * delta * sl + 3.0 * M * delta * L0) / (2.0 * kSqrtPi);
  r.K2terms[0] = C1 * (d.phi0 + d.psi0);
  r.K2terms[1] = 2.0 * d.dphi_sup * delta / kSqrtPi;
  r.K2terms[2] = 4.0 * d.dpsi_sup * delta * lambda / kSqrtPi;
  r.K2terms[3] = (R * sl + 2.0) / kSqrtPi * drho + delta * M / 2.0 * sl / kSqrtPi + lambda;
  r.K2terms[4] = M * delta * delta * lambda / kSqrtPi;
  r.K2terms[5] = 2.0 * (A1 + A2);
  r.K2terms[6] = 2.0 * K / L0 * std::sqrt(lambda / e);
  r.K2 = 0.0;
  for (double k : r.K2terms) r.K2 += k;

  r.flags.lambda_le_1 = lambda <= 1.0;
  r.flags.window = 2.0 * M * lambda <= L0;
  r.flags.K1_le_1 = r.K1 <= 1.0;
  r.flags.K2_lt_1 = r.K2 < 1.0;
  if (!r.flags.lambda_le_1) r.failed = "lambda <= 1";
  else if (!r.flags.window) r.failed = "2 M lambda <= L0";
  else if (!r.flags.K1_le_1) r.failed = "K1 <= 1";
  else if (!r.flags.K2_lt_1) r.failed = "K2 < 1";
  r.verdict = r.flags.all() ? Verdict::certified : Verdict::uncertified;
  return r;
}

CertificateReport compute_certificate(const Problem& p, const CertificateOptions& opts) {
  p.validate();
  for (const auto& c : p.C0) require_c1(c, "initial substrate profile");
  for (const auto& s : p.psi) require_c1(s, "boundary signal");
  for (const auto& x : p.X0) require_c1(x, "initial biomass profile");

  const DataNorms at_one = data_norms(p, 1.0);
  const double M = 1.0 + 2.0 * at_one.dphi_sup + at_one.phi_sup;
  const auto dims = static_cast<std::size_t>(p.kinetics.n + p.kinetics.m);
  const StateBox box{std::vector<double>(dims, 0.0), std::vector<double>(dims, M)};
  const double K = estimate_lipschitz(p.kinetics, box, opts.lipschitz).reported;
  const double R = sup_velocity_source(p.kinetics, box, opts.lipschitz);

  auto at = [&](double lambda) { return evaluate_constants(lambda, M, K, R, p.L0, data_norms(p, lambda)); };

  CertificateReport best = at(opts.lambda_floor);
  if (!best.flags.all()) return at(thickness_window(M, p.L0));
  double lo = opts.lambda_floor, hi = 1.0;
  auto top = at(hi);
  if (top.flags.all()) return top;
  while (hi - lo > opts.lambda_rel_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    auto r = at(mid);
    if (r.flags.all()) {
      lo = mid;
      best = std::move(r);
    } else {
      hi = mid;
    }
  }
  return best;
}

std::string format_report(const CertificateReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "verdict = " << to_string(r.verdict) << '\n';
  if (!r.failed.empty()) os << "failed = " << r.failed << '\n';
  os << "lambda = " << r.lambda << '\n' << "M = " << r.M << '\n';
  os << "K = " << r.lipschitz << '\n' << "R = " << r.velocity_bound << '\n';
  for (std::size_t i = 0; i < r.Mterms.size(); ++i) os << 'M' << i + 1 << " = " << r.Mterms[i] << '\n';
  os << "K1 = " << r.K1 << '\n';
  for (std::size_t i = 0; i < r.K2terms.size(); ++i) os << "K2." << i + 1 << " = " << r.K2terms[i] << '\n';
  os << "K2 = " << r.K2 << '\n';
  os << "flag.lambda_le_1 = " << r.flags.lambda_le_1 << '\n';
  os << "flag.window = " << r.flags.window << '\n';
  os << "flag.K1_le_1 = " << r.flags.K1_le_1 << '\n';
  os << "flag.K2_lt_1 = " << r.flags.K2_lt_1 << '\n';
  return os.str();
}

}  // namespace biofilm
