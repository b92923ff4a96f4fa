#pragma once

#include <vector>

#include "biofilm/biomass.hpp"
#include "biofilm/free_boundary.hpp"
#include "biofilm/kinetics.hpp"
#include "biofilm/numerics.hpp"
#include "biofilm/parametrix.hpp"
#include "biofilm/substrate.hpp"

namespace biofilm {

/// Physical problem in pre-rescaling units: concentrations C_j, the solver
/// works with S_j = D_j C_j internally.
struct Problem {
  double L0 = 1.0;
  int N_z = 32;
  KineticsSpec kinetics;
  std::vector<PiecewisePoly> X0;   // per species on [0, L0]
  std::vector<double> D;           // per substrate
  std::vector<PiecewisePoly> C0;   // per substrate on [0, L0]
  std::vector<PiecewisePoly> psi;  // per substrate, boundary data in time
  BoundaryKind boundary = BoundaryKind::dirichlet;
  double h = 0.0;
  double k = 1.0;
  std::vector<double> Dstar;       // per substrate (Robin)
  SigmaSpec sigma;
  double L_min = 0.0;
  bool variable_diffusivity = false;
  DiffusivityField field;          // variable mode only
  ParametrixConfig parametrix;
  RepresentationMode mode = RepresentationMode::image_corrected;
  SubstrateSettings quadrature;

  void validate() const;
};

struct MarchConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  int rebaseline_every = 256;
  std::vector<double> rebaseline_at;  // extra rebaseline times (snapped to the grid)
  int output_stride = 1;
  int max_halvings = 3;
  double residual_budget = 1e-3;      // discretization part of the step acceptance test, relative to sup psi
  int threads = 1;

  void validate() const;
};

/// Convergence record of one Picard solve. residuals[k] = |U^{k+1} - U^k|,
/// ratios[k] = residuals[k] / residuals[k-1] (ratios[0] = 0).
struct PicardReport {
  int iterations = 0;
  std::vector<double> residuals;
  std::vector<double> ratios;
  double boundary_residual = 0.0;
  double flux_residual = 0.0;  // max_j |S_jz(0)| from the nodal profile
  bool converged = false;
  bool accepted = false;       // converged and within the boundary-residual budget
};

/// Coupled state at the current time level.
struct DriverState {
  Problem problem;
  BiomassState bio;
  FreeBoundaryState fb;
  SubstrateState sub;
  NodeValues C;          // [node][substrate], physical, at bio.eta
  NodeValues C_prev;     // previous accepted level, for the extrapolated first guess
  double dt_prev = 0.0;
  double h_ref = 0.0;    // reference material spacing for attachment
  int step = 0;
  int since_rebaseline = 0;
};

DriverState init_driver(const Problem& problem);

/// One Picard solve to state.bio.t + dt. The state advances only when the
/// report is accepted. Throws NonContraction after picard_max_iter sweeps.
PicardReport picard_step(DriverState& state, double dt, const MarchConfig& cfg);

/// Restart the substrate histories from the current profiles.
void rebaseline(DriverState& state);

/// Current S_j / D_j at the active nodes.
NodeValues current_concentrations(const DriverState& state);

struct Frame {
  double t = 0.0;
  double L = 0.0;
  std::vector<double> z, z0, u;
  std::vector<std::vector<double>> X;  // [species][node]
  std::vector<std::vector<double>> f;  // [species][node]
  std::vector<std::vector<double>> C;  // [substrate][node]
};

struct StepRecord {
  double t = 0.0;
  double dt = 0.0;
  double L = 0.0;
  double Ldot = 0.0;
  std::vector<double> theta, phi, rho;  // rho only under Robin data
  int iterations = 0;
  double max_ratio = 0.0;               // max q_k over k >= 2 (k counted from 1)
  double boundary_residual = 0.0;
  double flux_residual = 0.0;
  int halvings = 0;
  bool rebaselined = false;
};

struct SimulationOutput {
  std::vector<Frame> frames;
  std::vector<StepRecord> steps;
};

Frame snapshot(const DriverState& state);

SimulationOutput run_simulation(const Problem& problem, const MarchConfig& cfg);

}  // namespace biofilm
