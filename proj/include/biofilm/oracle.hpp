#pragma once

#include <vector>

#include "biofilm/driver.hpp"

namespace biofilm {

/// Front-fixing finite-difference solver on xi = z / L(t) in [0, 1]. It shares
/// no discretization with the boundary-integral path and serves as a
/// cross-check for it.
struct OracleConfig {
  int N_x = 201;
  double dt = 1e-3;
  double t_end = 1.0;
  double theta_scheme = 0.5;  // 0.5 Crank-Nicolson, 1 backward Euler
  int output_stride = 100;    // steps between frames; the final time is always kept
  bool limiter = true;        // second-order upwind reconstruction for the biomass

  void validate() const;
};

struct OracleFrame {
  double t = 0.0;
  double L = 0.0;
  std::vector<double> z;                // physical node positions xi * L
  std::vector<std::vector<double>> X;   // [species][node]
  std::vector<std::vector<double>> C;   // [substrate][node]
};

struct OracleResult {
  std::vector<double> xi;
  std::vector<double> t, L;             // every step, including t = 0
  std::vector<OracleFrame> frames;
};

/// Throws CFLViolation when the biomass transport exceeds unit Courant number
/// and NonPhysicalState on non-finite or negative states.
OracleResult solve_front_fixed(const Problem& problem, const OracleConfig& cfg);

struct OracleComparison {
  double S_diff = 0.0;        // sup over common frames of |S_ie - S_oracle| / sup psi_S
  double L_diff = 0.0;        // sup over common frames of |L_ie - L_oracle| / L_oracle
  double t_worst_S = 0.0;
  double t_worst_L = 0.0;
  int frames = 0;
};

/// Matches frames by time (within half the smaller step) and interpolates the
/// oracle profile linearly to the integral-equation nodes.
OracleComparison compare_with_oracle(const Problem& problem, const SimulationOutput& ie,
                                     const OracleResult& oracle);

}  // namespace biofilm
