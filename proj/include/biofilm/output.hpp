#pragma once

#include <map>
#include <string>
#include <vector>

#include "biofilm/config.hpp"
#include "biofilm/driver.hpp"

namespace biofilm {

inline constexpr const char* kToolVersion = "0.1.0";

struct Provenance {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string mode = "image-corrected";
  std::string boundary = "dirichlet";
  std::string diffusivity = "constant";
};

Provenance make_provenance(const SimulationConfig& cfg);

/// Writes profile_NNNNN.{csv,jsonl} per frame and series.{csv,jsonl}. Existing
/// profile_* and series.* files in the directory are removed first, so a
/// rerun leaves exactly the files of the new run. Throws IoError.
void write_output(const SimulationOutput& out, const Problem& problem, const std::string& directory,
                  OutputFormat format, const Provenance& prov);

/// Column names of a profile file: z, z0, u, X_1..X_n, f_1..f_n, C_1..C_m.
std::vector<std::string> profile_columns(int n, int m);
/// t, dt, L, Ldot, theta_j, phi_j, [rho_j], iterations, max_ratio,
/// boundary_residual, flux_residual, halvings, rebaselined.
std::vector<std::string> series_columns(int m, bool robin);

struct CsvTable {
  std::map<std::string, std::string> meta;  // "# key = value" header lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace biofilm
