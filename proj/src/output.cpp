#include "biofilm/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace biofilm {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_fail(const std::string& what) { throw SolverError(ErrorCode::IoError, what); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) io_fail("cannot write '" + path.string() + "'");
  return f;
}

void close_checked(std::ofstream& f, const fs::path& path) {
  f.flush();
  if (!f) io_fail("write failed for '" + path.string() + "'");
}

std::vector<std::pair<std::string, std::string>> header(const Provenance& p) {
  return {{"config_hash", p.config_hash},
          {"tool_version", p.tool_version},
          {"mode", p.mode},
          {"boundary", p.boundary},
          {"diffusivity", p.diffusivity}};
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<double>> profile_rows(const Frame& f) {
  std::vector<std::vector<double>> rows(f.z.size());
  for (std::size_t k = 0; k < f.z.size(); ++k) {
    auto& r = rows[k];
    r = {f.z[k], f.z0[k], f.u[k]};
    for (const auto& x : f.X) r.push_back(x[k]);
    for (const auto& x : f.f) r.push_back(x[k]);
    for (const auto& x : f.C) r.push_back(x[k]);
  }
  return rows;
}

std::vector<double> series_row(const StepRecord& s, bool robin) {
  std::vector<double> r{s.t, s.dt, s.L, s.Ldot};
  r.insert(r.end(), s.theta.begin(), s.theta.end());
  r.insert(r.end(), s.phi.begin(), s.phi.end());
  if (robin) r.insert(r.end(), s.rho.begin(), s.rho.end());
  r.insert(r.end(), {static_cast<double>(s.iterations), s.max_ratio, s.boundary_residual, s.flux_residual,
                     static_cast<double>(s.halvings), s.rebaselined ? 1.0 : 0.0});
  return r;
}

void write_table(const fs::path& path, OutputFormat format, const std::vector<std::pair<std::string, std::string>>& meta,
                 const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
  auto f = open_out(path);
  if (format == OutputFormat::csv) {
    for (const auto& [k, v] : meta) f << "# " << k << " = " << v << "\n";
    for (std::size_t c = 0; c < cols.size(); ++c) f << (c ? "," : "") << cols[c];
    f << "\n";
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) f << (c ? "," : "") << format_double(r[c]);
      f << "\n";
    }
  } else {
    f << "{";
    for (std::size_t i = 0; i < meta.size(); ++i) f << (i ? ", " : "") << quoted(meta[i].first) << ": " << quoted(meta[i].second);
    f << "}\n";
    for (const auto& r : rows) {
      f << "{";
      for (std::size_t c = 0; c < r.size(); ++c) {
        // JSON has no literal for non-finite values
        const std::string v = std::isfinite(r[c]) ? format_double(r[c]) : "null";
        f << (c ? ", " : "") << quoted(cols[c]) << ": " << v;
      }
      f << "}\n";
    }
  }
  close_checked(f, path);
}

}  // namespace

Provenance make_provenance(const SimulationConfig& cfg) {
  Provenance p;
  p.config_hash = config_hash(cfg);
  p.mode = to_string(cfg.problem.mode);
  p.boundary = cfg.problem.boundary == BoundaryKind::robin ? "robin" : "dirichlet";
  p.diffusivity = cfg.problem.variable_diffusivity ? "variable" : "constant";
  return p;
}

std::vector<std::string> profile_columns(int n, int m) {
  std::vector<std::string> c{"z", "z0", "u"};
  for (int i = 1; i <= n; ++i) c.push_back("X_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) c.push_back("f_" + std::to_string(i));
  for (int j = 1; j <= m; ++j) c.push_back("C_" + std::to_string(j));
  return c;
}

std::vector<std::string> series_columns(int m, bool robin) {
  std::vector<std::string> c{"t", "dt", "L", "Ldot"};
  for (int j = 1; j <= m; ++j) c.push_back("theta_" + std::to_string(j));
  for (int j = 1; j <= m; ++j) c.push_back("phi_" + std::to_string(j));
  if (robin)
    for (int j = 1; j <= m; ++j) c.push_back("rho_" + std::to_string(j));
  for (const char* s : {"iterations", "max_ratio", "boundary_residual", "flux_residual", "halvings", "rebaselined"})
    c.push_back(s);
  return c;
}

void write_output(const SimulationOutput& out, const Problem& problem, const std::string& directory,
                  OutputFormat format, const Provenance& prov) {
  const fs::path dir(directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) io_fail("cannot create output directory '" + directory + "'");
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && (name.rfind("profile_", 0) == 0 || name.rfind("series.", 0) == 0))
      fs::remove(e.path(), ec);
  }
  if (ec) io_fail("cannot clear output directory '" + directory + "': " + ec.message());

  const std::string ext = format == OutputFormat::csv ? ".csv" : ".jsonl";
  const int n = problem.kinetics.n, m = problem.kinetics.m;
  const bool robin = problem.boundary == BoundaryKind::robin && problem.h > 0.0;
  const auto pcols = profile_columns(n, m);
  for (std::size_t k = 0; k < out.frames.size(); ++k) {
    const auto& fr = out.frames[k];
    auto meta = header(prov);
    meta.emplace_back("t", format_double(fr.t));
    meta.emplace_back("L", format_double(fr.L));
    char name[32];
    std::snprintf(name, sizeof name, "profile_%05zu", k);
    write_table(dir / (name + ext), format, meta, pcols, profile_rows(fr));
  }
  std::vector<std::vector<double>> rows;
  for (const auto& s : out.steps) rows.push_back(series_row(s, robin));
  write_table(dir / ("series" + ext), format, header(prov), series_columns(m, robin), rows);
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw SolverError(ErrorCode::IoError, "no column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r[c]);
  return v;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) io_fail("cannot read '" + path + "'");
  CsvTable t;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) t.meta[line.substr(2, eq - 2)] = line.substr(eq + 3);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size()) io_fail("ragged row in '" + path + "'");
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size()) io_fail("bad number '" + c + "' in '" + path + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace biofilm
