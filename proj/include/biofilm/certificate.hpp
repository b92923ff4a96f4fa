#pragma once

#include <array>
#include <string>

#include "biofilm/driver.hpp"

namespace biofilm {

enum class Verdict { certified, uncertified };

const char* to_string(Verdict v) noexcept;

struct CertificateOptions {
  LipschitzOptions lipschitz;
  double lambda_rel_tol = 1e-4;  // bisection stops at this relative width
  double lambda_floor = 1e-12;   // smallest window tried
};

/// Norms of the data entering the constants, maxima over substrates.
struct DataNorms {
  double phi_sup = 0.0;     // sup |phi_j| on [0, L0]
  double dphi_sup = 0.0;    // sup |phi_j'| on [0, L0]
  double phi0 = 0.0;        // |phi_j(0)|
  double psi0 = 0.0;        // |psi_j(0)|
  double dpsi_sup = 0.0;    // sup |psi_j'| on [0, lambda]
};

struct CertificateFlags {
  bool lambda_le_1 = false;
  bool window = false;   // 2 M lambda <= L0
  bool K1_le_1 = false;
  bool K2_lt_1 = false;

  bool all() const { return lambda_le_1 && window && K1_le_1 && K2_lt_1; }
};

struct CertificateReport {
  double M = 0.0;
  double lambda = 0.0;
  std::array<double, 6> Mterms{};   // M1..M6
  double K1 = 0.0;
  std::array<double, 7> K2terms{};  // right-hand sides of the seven difference bounds
  double K2 = 0.0;
  double lipschitz = 0.0;           // K over the box [0, M]^(n+m)
  double velocity_bound = 0.0;      // sup |R| over the same box
  DataNorms norms;
  CertificateFlags flags;
  Verdict verdict = Verdict::uncertified;
  std::string failed;               // first failed condition, empty when certified
};

/// Constants at a fixed window lambda for given M, K, R bound and data norms.
/// Pure arithmetic; compute_certificate calls it inside the bisection.
CertificateReport evaluate_constants(double lambda, double M, double K, double R, double L0,
                                     const DataNorms& norms);

/// Largest window allowed by the thickness bounds: min(1, L0 / (2M)).
double thickness_window(double M, double L0);

/// Throws DataNotC1 if phi_j or psi_j has a derivative jump.
CertificateReport compute_certificate(const Problem& problem, const CertificateOptions& opts = {});

/// Structured text, one "key = value" per line.
std::string format_report(const CertificateReport& r);

}  // namespace biofilm
