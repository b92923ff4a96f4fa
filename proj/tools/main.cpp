#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "biofilm/certificate.hpp"
#include "biofilm/config.hpp"
#include "biofilm/kernel_suite.hpp"
#include "biofilm/oracle.hpp"
#include "biofilm/output.hpp"

using namespace biofilm;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kUncertified = 3, kSolverFailure = 4 };

bool is_config_error(const SolverError& e) {
  return e.code() == ErrorCode::ParseError || e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::IoError;
}

std::optional<SimulationConfig> load(const std::string& path, int& rc) {
  try {
    auto cfg = load_config(path);
    cfg.march.threads = thread_cap(cfg.problem.kinetics.m);
    return cfg;
  } catch (const SolverError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    rc = kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    rc = kConfigError;
  }
  return std::nullopt;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int simulate(const std::string& path, const std::string& out_dir, const std::string& mode) {
  int rc = kOk;
  auto cfg = load(path, rc);
  if (!cfg) return rc;
  if (!mode.empty()) {
    cfg->problem.mode = mode == "paper-literal" ? RepresentationMode::paper_literal : RepresentationMode::image_corrected;
    cfg->problem.quadrature.mode = cfg->problem.mode;
    try {
      cfg->problem.validate();
    } catch (const SolverError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kConfigError;
    }
  }
  if (!out_dir.empty()) cfg->output.directory = out_dir;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto out = run_simulation(cfg->problem, cfg->march);
    write_output(out, cfg->problem, cfg->output.directory, cfg->output.format, make_provenance(*cfg));
    const auto& last = out.frames.back();
    int iters = 0;
    double q = 0.0;
    for (const auto& s : out.steps) {
      iters = std::max(iters, s.iterations);
      q = std::max(q, s.max_ratio);
    }
    std::printf("config_hash = %s\nmode = %s\nsteps = %zu\nframes = %zu\nt = %s\nL = %s\n", config_hash(*cfg).c_str(),
                to_string(cfg->problem.mode), out.steps.size(), out.frames.size(), format_double(last.t).c_str(),
                format_double(last.L).c_str());
    std::printf("max_iterations = %d\nmax_ratio = %.6g\nthreads = %d\nseconds = %.3f\noutput = %s\n", iters, q,
                cfg->march.threads, seconds_since(t0), cfg->output.directory.c_str());
    return kOk;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return e.code() == ErrorCode::ValidationError ? kConfigError : kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

int certify(const std::string& path) {
  int rc = kOk;
  const auto cfg = load(path, rc);
  if (!cfg) return rc;
  try {
    const auto r = compute_certificate(cfg->problem);
    std::cout << format_report(r);
    return r.verdict == Verdict::certified ? kOk : kUncertified;
  } catch (const SolverError& e) {
    if (e.code() == ErrorCode::DataNotC1) {
      std::cout << "verdict = uncertified\nfailed = data not C1\n";
      std::cerr << e.what() << "\n";
      return kUncertified;
    }
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

int verify_kernels(std::uint64_t seed, int samples) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (const auto& c : kernels::run_kernel_suite(seed, samples)) {
    std::printf("%-4s %-40s measured %.3e  tolerance %.1e\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                c.tolerance);
    ok = ok && c.passed;
  }
  std::printf("%s in %.2f s\n", ok ? "all kernel checks passed" : "kernel checks FAILED", seconds_since(t0));
  return ok ? kOk : kSolverFailure;
}

int compare_oracle(const std::string& path) {
  int rc = kOk;
  auto cfg = load(path, rc);
  if (!cfg) return rc;
  const double frame_dt = cfg->march.dt * cfg->march.output_stride;
  const double ratio = frame_dt / cfg->oracle.dt;
  cfg->oracle.output_stride = std::abs(ratio - std::round(ratio)) < 1e-9 * ratio ? std::max(1, (int)std::round(ratio)) : 1;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ie = run_simulation(cfg->problem, cfg->march);
    const double t_ie = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const auto oracle = solve_front_fixed(cfg->problem, cfg->oracle);
    const double t_or = seconds_since(t1);
    const auto c = compare_with_oracle(cfg->problem, ie, oracle);
    std::printf("frames_compared = %d\nS_diff = %.6e\nS_diff_t = %s\nL_diff = %.6e\nL_diff_t = %s\n", c.frames,
                c.S_diff, format_double(c.t_worst_S).c_str(), c.L_diff, format_double(c.t_worst_L).c_str());
    std::printf("L_integral = %s\nL_oracle = %s\nseconds_integral = %.3f\nseconds_oracle = %.3f\n",
                format_double(ie.frames.back().L).c_str(), format_double(oracle.L.back()).c_str(), t_ie, t_or);
    return kOk;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return e.code() == ErrorCode::ValidationError ? kConfigError : kSolverFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-boundary biofilm solver"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config, out_dir, mode;
  auto* sim = app.add_subcommand("simulate", "March the coupled problem and write profiles");
  sim->add_option("--config", config, "configuration file")->required();
  sim->add_option("--out", out_dir, "output directory (overrides [output] directory)");
  sim->add_option("--mode", mode, "representation mode")->check(CLI::IsMember({"image-corrected", "paper-literal"}));

  auto* cert = app.add_subcommand("certify", "Evaluate the existence and contraction constants");
  cert->add_option("--config", config, "configuration file")->required();

  std::uint64_t seed = 20240611;
  int samples = 200;
  auto* kern = app.add_subcommand("verify-kernels", "Self-check the heat kernels");
  kern->add_option("--seed", seed, "random seed");
  kern->add_option("--samples", samples, "random samples per check")->check(CLI::Range(1, 100000));

  auto* cmp = app.add_subcommand("compare-oracle", "Compare against the front-fixing finite-difference solver");
  cmp->add_option("--config", config, "configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (sim->parsed()) return simulate(config, out_dir, mode);
  if (cert->parsed()) return certify(config);
  if (kern->parsed()) return verify_kernels(seed, samples);
  return compare_oracle(config);
}
