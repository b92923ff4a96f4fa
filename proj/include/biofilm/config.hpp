#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biofilm/driver.hpp"
#include "biofilm/errors.hpp"
#include "biofilm/oracle.hpp"

namespace biofilm {

/// ParseError carrying the 1-based position of the offending text.
class ConfigParseError : public SolverError {
 public:
  ConfigParseError(int line, int column, const std::string& what)
      : SolverError(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class OutputFormat { csv, json_lines };

struct OutputSpec {
  std::string directory = "out";
  int stride = 1;
  OutputFormat format = OutputFormat::csv;
};

/// Variable mode: a = D0 exp(-sqrt(1 - p(z))); a single constant piece
/// of p is declared uniform.
struct DiffusivitySpec {
  bool variable = false;
  double D0 = 1.0;
  PiecewisePoly porosity = PiecewisePoly::constant(1.0);
};

struct SimulationConfig {
  Problem problem;  // built from the sections below; field follows `diffusivity`
  DiffusivitySpec diffusivity;
  MarchConfig march;
  OracleConfig oracle;
  OutputSpec output;
  std::vector<std::string> defaulted;  // "section.key" entries filled from defaults
};

/// Sectioned key = value text; '#' or ';' start a comment. Profiles and
/// signals are written constant(v), poly(c0, c1, ...) or
/// pp(x0, ..., xN | c.. | c..) with coefficients in powers of (x - x_i).
SimulationConfig parse_config(const std::string& text);
SimulationConfig load_config(const std::string& path);

/// Canonical text: every key written, numbers with 17 significant digits.
std::string serialize_config(const SimulationConfig& cfg);

PiecewisePoly parse_profile(const std::string& spec);
std::string format_profile(const PiecewisePoly& p);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
/// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const SimulationConfig& cfg);

const char* to_string(RepresentationMode m) noexcept;
const char* to_string(OutputFormat f) noexcept;

/// Per-substrate worker count: min(m, hardware threads), capped by the
/// BIOFILM_FBP_THREADS environment variable when it holds a positive integer.
int thread_cap(int m);

/// 17 significant digits, reads back bit-exactly.
std::string format_double(double v);

}  // namespace biofilm
