#include "biofilm/kernel_suite.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "biofilm/kernels.hpp"
#include "biofilm/numerics.hpp"

namespace biofilm::kernels {

namespace {

KernelPoint shifted(KernelPoint p, double dz, double dt, double dxi) {
  p.z += dz;
  p.t += dt;
  p.xi += dxi;
  return p;
}

// fourth-order central differences
double d_dz(KernelKind k, const KernelPoint& p, double h) {
  return (-eval_kernel(k, shifted(p, 2 * h, 0, 0)) + 8 * eval_kernel(k, shifted(p, h, 0, 0)) -
          8 * eval_kernel(k, shifted(p, -h, 0, 0)) + eval_kernel(k, shifted(p, -2 * h, 0, 0))) /
         (12 * h);
}

double d_dxi(KernelKind k, const KernelPoint& p, double h) {
  return (-eval_kernel(k, shifted(p, 0, 0, 2 * h)) + 8 * eval_kernel(k, shifted(p, 0, 0, h)) -
          8 * eval_kernel(k, shifted(p, 0, 0, -h)) + eval_kernel(k, shifted(p, 0, 0, -2 * h))) /
         (12 * h);
}

}  // namespace

std::vector<SuiteCheck> run_kernel_suite(std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> half(0.0, 2.0);
  std::uniform_real_distribution<double> log_dt(std::log(0.1), std::log(10.0));

  std::vector<SuiteCheck> out;

  // heat equation residual K_t - K_zz
  {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      KernelPoint p{pos(rng), 0.0, pos(rng), 0.0};
      p.t = std::exp(log_dt(rng));
      // steps follow the parabolic scaling of the kernel
      const double ht = 5e-3 * p.t;
      const double h = 5e-3 * std::sqrt(p.t);
      const auto K = [&](double dz, double dt) { return eval_K(shifted(p, dz, dt, 0)); };
      const double kt = (-K(0, 2 * ht) + 8 * K(0, ht) - 8 * K(0, -ht) + K(0, -2 * ht)) / (12 * ht);
      const double kzz = (-K(2 * h, 0) + 16 * K(h, 0) - 30 * K(0, 0) + 16 * K(-h, 0) -
                          K(-2 * h, 0)) / (12 * h * h);
      worst = std::max(worst, std::abs(kt - kzz));
    }
    out.push_back({"heat_equation_residual", worst, 1e-8, worst < 1e-8});
  }

  // normalization over z +- 20 sqrt(t - tau)
  {
    double worst = 0.0;
    const auto& rule = gauss_legendre(16);
    for (int i = 0; i < samples / 4; ++i) {
      const double z = pos(rng);
      const double s = std::exp(log_dt(rng));
      const double half_width = 20.0 * std::sqrt(s);
      const int panels = 400;
      const double hpanel = 2.0 * half_width / panels;
      double acc = 0.0;
      for (int k = 0; k < panels; ++k) {
        const double a = z - half_width + k * hpanel;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double xi = a + 0.5 * hpanel * (rule.nodes[q] + 1.0);
          acc += 0.5 * hpanel * rule.weights[q] * eval_K({z, s, xi, 0.0});
        }
      }
      worst = std::max(worst, std::abs(acc - 1.0));
    }
    out.push_back({"heat_kernel_normalization", worst, 1e-10, worst < 1e-10});
  }

  // reflection identities at z = 0
  {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      KernelPoint p{0.0, 0.0, half(rng), 0.0};
      p.t = std::exp(log_dt(rng)) * 0.1;
      worst = std::max(worst, std::abs(eval_image_kernel(ImageKind::Dirichlet, p)));
      worst = std::max(worst, std::abs(eval_kernel_derivative(KernelKind::N, Wrt::z, p)));
      worst = std::max(worst, std::abs(eval_kernel_derivative(KernelKind::G, Wrt::xi, p)));
    }
    out.push_back({"image_identities_at_origin", worst, 1e-300, worst == 0.0});
  }

  // analytic derivatives vs central differences
  {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      KernelPoint p{half(rng), 0.0, half(rng), 0.0};
      p.t = std::exp(log_dt(rng));
      const double h = 1e-3 * std::sqrt(p.t);
      for (KernelKind k : {KernelKind::K, KernelKind::G, KernelKind::N}) {
        // derivative scale: |K| / sqrt(t - tau) bounds every first derivative
        const double scale = eval_K({0.0, p.t, 0.0, 0.0}) / std::sqrt(p.t);
        const double az = eval_kernel_derivative(k, Wrt::z, p);
        const double axi = eval_kernel_derivative(k, Wrt::xi, p);
        worst = std::max(worst, std::abs(az - d_dz(k, p, h)) / std::max(std::abs(az), scale));
        worst = std::max(worst, std::abs(axi - d_dxi(k, p, h)) / std::max(std::abs(axi), scale));
      }
    }
    out.push_back({"derivatives_vs_finite_differences", worst, 1e-6, worst < 1e-6});
  }

  // guarded ratio stays finite on (x > 0, delta >= 0)
  {
    double worst = 0.0;
    bool finite = true;
    for (int i = 0; i < samples; ++i) {
      const double x = 1e-3 + half(rng);
      const double delta = i % 10 == 0 ? 0.0 : std::pow(10.0, -12.0 + 14.0 * (half(rng) / 2.0));
      for (int n = 1; n <= 3; ++n) {
        const double v = guarded_exp_ratio(x, delta, 4.0, n);
        const double bound = std::pow(n * 4.0 / (2.0 * std::exp(1.0) * x * x), n / 2.0);
        finite = finite && std::isfinite(v);
        worst = std::max(worst, (v - bound) / bound);
      }
    }
    const bool ok = finite && worst <= 1e-12;
    out.push_back({"guarded_ratio_bound", std::max(worst, 0.0), 1e-12, ok});
  }
  return out;
}

}  // namespace biofilm::kernels
