#include "biofilm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace biofilm {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  int key_col = 0;
  int value_col = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;
};

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  if (lead) *lead = a;
  return s.substr(a, b - a);
}

std::vector<Section> lex(const std::string& text) {
  std::vector<Section> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    int depth = 0;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const char c = raw[i];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if ((c == '#' || c == ';') && depth <= 0) {
        cut = i;
        break;
      }
    }
    const std::string body = raw.substr(0, cut);
    std::size_t lead = 0;
    const std::string t = trim(body, &lead);
    if (t.empty()) continue;
    const int col = static_cast<int>(lead) + 1;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigParseError(line, col + static_cast<int>(t.size()), "expected ']'");
      const std::string name = trim(t.substr(1, t.size() - 2));
      if (name.empty()) throw ConfigParseError(line, col + 1, "empty section name");
      for (const auto& s : out)
        if (s.name == name) throw ConfigParseError(line, col + 1, "duplicate section [" + name + "]");
      out.push_back(Section{name, line, {}});
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigParseError(line, col, "expected 'key = value'");
    if (out.empty()) throw ConfigParseError(line, col, "key outside of any section");
    std::size_t klead = 0, vlead = 0;
    const std::string key = trim(body.substr(0, eq), &klead);
    const std::string value = trim(body.substr(eq + 1), &vlead);
    if (key.empty()) throw ConfigParseError(line, static_cast<int>(eq) + 1, "missing key before '='");
    for (char c : key)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw ConfigParseError(line, static_cast<int>(klead) + 1, "invalid key '" + key + "'");
    for (const auto& e : out.back().entries)
      if (e.key == key) throw ConfigParseError(line, static_cast<int>(klead) + 1, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigParseError(line, static_cast<int>(eq) + 2, "missing value for '" + key + "'");
    out.back().entries.push_back(
        Entry{key, value, line, static_cast<int>(klead) + 1, static_cast<int>(eq + 1 + vlead) + 1, false});
  }
  return out;
}

// position inside a value, reported relative to the value start
struct Where {
  int line = 0;
  int col = 0;
};

[[noreturn]] void bad(const Where& w, std::size_t offset, const std::string& what) {
  throw ConfigParseError(w.line, w.col + static_cast<int>(offset), what);
}

double number_at(const std::string& s, std::size_t from, std::size_t to, const Where& w) {
  std::size_t a = from, b = to;
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  if (a == b) bad(w, from, "expected a number");
  double v = 0.0;
  const char* first = s.data() + a;
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + b, v);
  if (res.ec != std::errc() || res.ptr != s.data() + b) bad(w, a, "invalid number '" + s.substr(a, b - a) + "'");
  return v;
}

// comma and/or whitespace separated numbers in s[from, to)
std::vector<double> numbers_at(const std::string& s, std::size_t from, std::size_t to, const Where& w) {
  std::vector<double> out;
  std::size_t i = from;
  while (i < to) {
    while (i < to && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
    if (i >= to) break;
    std::size_t j = i;
    while (j < to && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != ',') ++j;
    out.push_back(number_at(s, i, j, w));
    i = j;
  }
  return out;
}

PiecewisePoly::Coeffs coeffs(const std::vector<double>& v, std::size_t at, const Where& w) {
  if (v.empty() || v.size() > 4) bad(w, at, "a piece needs 1 to 4 coefficients (degree <= 3)");
  PiecewisePoly::Coeffs c{0.0, 0.0, 0.0, 0.0};
  std::copy(v.begin(), v.end(), c.begin());
  return c;
}

PiecewisePoly profile_at(const std::string& s, const Where& w) {
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') bad(w, 0, "expected constant(..), poly(..) or pp(..)");
  const std::string kind = trim(s.substr(0, open));
  const std::size_t lo = open + 1, hi = s.size() - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (kind == "constant") {
    return PiecewisePoly::constant(number_at(s, lo, hi, w));
  }
  if (kind == "poly") {
    return PiecewisePoly({0.0, inf}, {coeffs(numbers_at(s, lo, hi, w), lo, w)});
  }
  if (kind == "pp") {
    std::vector<std::size_t> bars;
    for (std::size_t i = lo; i < hi; ++i)
      if (s[i] == '|') bars.push_back(i);
    if (bars.empty()) bad(w, lo, "pp needs breakpoints and at least one piece");
    bars.push_back(hi);
    const auto breaks = numbers_at(s, lo, bars.front(), w);
    std::vector<PiecewisePoly::Coeffs> pieces;
    for (std::size_t k = 0; k + 1 < bars.size(); ++k)
      pieces.push_back(coeffs(numbers_at(s, bars[k] + 1, bars[k + 1], w), bars[k] + 1, w));
    if (breaks.size() != pieces.size() + 1)
      bad(w, lo, "pp with " + std::to_string(pieces.size()) + " pieces needs " + std::to_string(pieces.size() + 1) +
                     " breakpoints");
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
      if (!(breaks[k + 1] > breaks[k])) bad(w, lo, "pp breakpoints must increase");
    return PiecewisePoly(breaks, pieces);
  }
  bad(w, 0, "unknown profile kind '" + kind + "'");
}

std::string trimmed_coeffs(const PiecewisePoly::Coeffs& c) {
  std::size_t n = 4;
  while (n > 1 && c[n - 1] == 0.0) --n;
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? ", " : "") + format_double(c[i]);
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PiecewisePoly parse_profile(const std::string& spec) { return profile_at(trim(spec), Where{1, 1}); }

std::string format_profile(const PiecewisePoly& p) {
  const auto& br = p.breaks();
  const auto& pc = p.pieces();
  if (pc.size() == 1 && br.size() == 2 && br[0] == 0.0 && std::isinf(br[1])) {
    const auto& c = pc[0];
    if (c[1] == 0.0 && c[2] == 0.0 && c[3] == 0.0) return "constant(" + format_double(c[0]) + ")";
    return "poly(" + trimmed_coeffs(c) + ")";
  }
  std::string out = "pp(";
  for (std::size_t i = 0; i < br.size(); ++i) out += (i ? ", " : "") + format_double(br[i]);
  for (const auto& c : pc) out += " | " + trimmed_coeffs(c);
  return out + ")";
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const SimulationConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_config(cfg))));
  return buf;
}

int thread_cap(int m) {
  int n = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BIOFILM_FBP_THREADS")) {
    int cap = 0;
    const auto res = std::from_chars(env, env + std::strlen(env), cap);
    if (res.ec == std::errc() && cap > 0) n = std::min(n, cap);
  }
  return std::clamp(n, 1, std::max(m, 1));
}

const char* to_string(RepresentationMode m) noexcept {
  return m == RepresentationMode::image_corrected ? "image-corrected" : "paper-literal";
}

const char* to_string(OutputFormat f) noexcept { return f == OutputFormat::csv ? "csv" : "json-lines"; }

namespace {

[[noreturn]] void invalid(const std::string& what) { throw SolverError(ErrorCode::ValidationError, what); }

class Reader {
 public:
  explicit Reader(std::vector<Section> s) : sections_(std::move(s)) {}

  std::vector<std::string> defaulted;

  bool has(const std::string& sec) const {
    return std::any_of(sections_.begin(), sections_.end(), [&](const Section& s) { return s.name == sec; });
  }

  double num(const std::string& sec, const std::string& key) { return number(need(sec, key)); }
  double num(const std::string& sec, const std::string& key, double def) {
    Entry* e = get(sec, key);
    return e ? number(*e) : fallback(sec, key, def);
  }

  int integer(const std::string& sec, const std::string& key) { return to_int(need(sec, key)); }
  int integer(const std::string& sec, const std::string& key, int def) {
    Entry* e = get(sec, key);
    return e ? to_int(*e) : fallback(sec, key, def);
  }

  std::string word(const std::string& sec, const std::string& key, const std::string& def,
                   std::initializer_list<const char*> allowed) {
    Entry* e = get(sec, key);
    if (!e) return fallback(sec, key, def);
    if (allowed.size() == 0) return e->value;
    for (const char* a : allowed)
      if (e->value == a) return e->value;
    std::string opts;
    for (const char* a : allowed) opts += std::string(opts.empty() ? "" : ", ") + a;
    invalid(sec + "." + key + ": expected one of " + opts + ", got '" + e->value + "'");
  }

  std::vector<double> list(const std::string& sec, const std::string& key) { return to_list(need(sec, key)); }
  std::vector<double> list(const std::string& sec, const std::string& key, std::vector<double> def) {
    Entry* e = get(sec, key);
    return e ? to_list(*e) : fallback(sec, key, std::move(def));
  }

  PiecewisePoly profile(const std::string& sec, const std::string& key) {
    Entry& e = need(sec, key);
    return profile_at(e.value, Where{e.line, e.value_col});
  }
  PiecewisePoly profile(const std::string& sec, const std::string& key, PiecewisePoly def) {
    Entry* e = get(sec, key);
    return e ? profile_at(e->value, Where{e->line, e->value_col}) : fallback(sec, key, std::move(def));
  }

  void check_sections(const std::vector<std::string>& allowed) const {
    for (const auto& s : sections_)
      if (std::find(allowed.begin(), allowed.end(), s.name) == allowed.end())
        invalid("unknown section [" + s.name + "] at line " + std::to_string(s.line));
  }

  // unknown keys are reported before any missing or invalid value
  void check_known_keys() const {
    static const std::map<std::string, std::vector<std::string>> known{
        {"domain", {"L0", "n", "m", "t_end", "dt", "N_z", "L_min"}},
        {"species", {"rho", "mu_max", "K_S", "yield", "decay", "substrates", "phi"}},
        {"substrate", {"D", "phi", "psi"}},
        {"boundary", {"kind", "h", "k", "Dstar", "sigma", "sigma_form", "sigma_coeff", "attach_X"}},
        {"diffusivity", {"kind", "D0", "porosity"}},
        {"numerics", {"picard_tol", "max_iter", "rebaseline_every", "rebaseline_at", "max_halvings", "residual_budget",
                      "mode", "parametrix_order", "profile_gauss_nodes", "grading_levels"}},
        {"output", {"directory", "stride", "format"}},
        {"oracle", {"N_x", "dt", "theta_scheme"}},
    };
    for (const auto& s : sections_) {
      const auto dot = s.name.find('.');
      const auto it = known.find(s.name.substr(0, dot));
      if (it == known.end() || (dot != std::string::npos) != (it->first == "species" || it->first == "substrate"))
        invalid("unknown section [" + s.name + "] at line " + std::to_string(s.line));
      for (const auto& e : s.entries)
        if (std::find(it->second.begin(), it->second.end(), e.key) == it->second.end())
          invalid("unknown key '" + e.key + "' in [" + s.name + "] at line " + std::to_string(e.line));
    }
  }

  void check_unused() const {
    for (const auto& s : sections_)
      for (const auto& e : s.entries)
        if (!e.used) invalid("unknown key '" + e.key + "' in [" + s.name + "] at line " + std::to_string(e.line));
  }

 private:
  std::vector<Section> sections_;

  Entry* get(const std::string& sec, const std::string& key) {
    for (auto& s : sections_)
      if (s.name == sec)
        for (auto& e : s.entries)
          if (e.key == key) {
            e.used = true;
            return &e;
          }
    return nullptr;
  }

  Entry& need(const std::string& sec, const std::string& key) {
    Entry* e = get(sec, key);
    if (!e) invalid("missing required key '" + key + "' in [" + sec + "]");
    return *e;
  }

  template <class T>
  T fallback(const std::string& sec, const std::string& key, T def) {
    defaulted.push_back(sec + "." + key);
    return def;
  }

  static double number(const Entry& e) {
    return number_at(e.value, 0, e.value.size(), Where{e.line, e.value_col});
  }

  static int to_int(const Entry& e) {
    int v = 0;
    const char* end = e.value.data() + e.value.size();
    const auto res = std::from_chars(e.value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
      throw ConfigParseError(e.line, e.value_col, "expected an integer for '" + e.key + "'");
    return v;
  }

  static std::vector<double> to_list(const Entry& e) {
    if (e.value == "none") return {};
    return numbers_at(e.value, 0, e.value.size(), Where{e.line, e.value_col});
  }
};

void need_positive(double v, const std::string& name) {
  if (!(v > 0.0)) invalid(name + " must be positive");
}

void need_size(const std::vector<double>& v, int n, const std::string& name) {
  if (v.size() != static_cast<std::size_t>(n))
    invalid(name + ": expected " + std::to_string(n) + " values, got " + std::to_string(v.size()));
}

DiffusivityField make_field(const DiffusivitySpec& d) {
  const auto& br = d.porosity.breaks();
  const auto& pc = d.porosity.pieces();
  if (pc.size() == 1 && br.front() == 0.0 && std::isinf(br.back()) && pc[0][1] == 0.0 && pc[0][2] == 0.0 &&
      pc[0][3] == 0.0)
    return DiffusivityField::uniform_porosity(d.D0, pc[0][0]);
  const auto p = d.porosity;
  const auto dp = d.porosity.derivative();
  return DiffusivityField::variable(
      d.D0, [p](double z, double) { return p(z); }, [dp](double z, double) { return dp(z); });
}

std::string join(const std::vector<double>& v) {
  if (v.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

}  // namespace

SimulationConfig parse_config(const std::string& text) {
  Reader r(lex(text));
  r.check_known_keys();
  SimulationConfig cfg;
  Problem& p = cfg.problem;

  if (!r.has("domain")) invalid("missing required section [domain]");
  p.L0 = r.num("domain", "L0");
  const int n = r.integer("domain", "n");
  const int m = r.integer("domain", "m");
  cfg.march.t_end = r.num("domain", "t_end");
  cfg.march.dt = r.num("domain", "dt");
  p.N_z = r.integer("domain", "N_z", 32);
  p.L_min = r.num("domain", "L_min", 0.0);
  need_positive(p.L0, "domain.L0");
  need_positive(cfg.march.dt, "domain.dt");
  if (n < 1) invalid("domain.n must be >= 1");
  if (m < 0) invalid("domain.m must be >= 0");
  if (!(cfg.march.t_end >= 0.0)) invalid("domain.t_end must be >= 0");
  if (p.N_z < 16) invalid("domain.N_z must be >= 16");

  std::vector<std::string> sections{"domain", "boundary", "diffusivity", "numerics", "output", "oracle"};
  p.kinetics.n = n;
  p.kinetics.m = m;
  std::vector<double> all(m);
  for (int j = 0; j < m; ++j) all[j] = j + 1;
  for (int i = 1; i <= n; ++i) {
    const std::string s = "species." + std::to_string(i);
    sections.push_back(s);
    if (!r.has(s)) invalid("missing required section [" + s + "]");
    MonodSpecies sp;
    sp.rho = r.num(s, "rho", 1.0);
    sp.mu_max = r.num(s, "mu_max");
    sp.K_S = r.list(s, "K_S");
    sp.yield = r.list(s, "yield");
    sp.decay = r.num(s, "decay", 0.0);
    need_size(sp.K_S, m, s + ".K_S");
    need_size(sp.yield, m, s + ".yield");
    need_positive(sp.rho, s + ".rho");
    if (!(sp.mu_max >= 0.0)) invalid(s + ".mu_max must be >= 0");
    if (!(sp.decay >= 0.0)) invalid(s + ".decay must be >= 0");
    for (double j : r.list(s, "substrates", all)) {
      if (j != std::floor(j) || j < 1 || j > m) invalid(s + ".substrates: index out of range 1.." + std::to_string(m));
      sp.substrates.push_back(static_cast<int>(j) - 1);
    }
    for (int j : sp.substrates) {
      if (!(sp.K_S[j] > 0.0)) invalid(s + ".K_S must be positive");
      if (!(sp.yield[j] > 0.0)) invalid(s + ".yield must be positive");
    }
    p.kinetics.species.push_back(std::move(sp));
    p.X0.push_back(r.profile(s, "phi"));
  }
  for (int j = 1; j <= m; ++j) {
    const std::string s = "substrate." + std::to_string(j);
    sections.push_back(s);
    if (!r.has(s)) invalid("missing required section [" + s + "]");
    p.D.push_back(r.num(s, "D"));
    need_positive(p.D.back(), s + ".D");
    p.C0.push_back(r.profile(s, "phi"));
    p.psi.push_back(r.profile(s, "psi"));
  }
  r.check_sections(sections);

  p.boundary = r.word("boundary", "kind", "dirichlet", {"dirichlet", "robin"}) == "robin" ? BoundaryKind::robin
                                                                                          : BoundaryKind::dirichlet;
  p.h = r.num("boundary", "h", 0.0);
  p.k = r.num("boundary", "k", 1.0);
  p.Dstar = r.list("boundary", "Dstar", {});
  if (!(p.h >= 0.0)) invalid("boundary.h must be >= 0");
  need_positive(p.k, "boundary.k");
  if (p.boundary == BoundaryKind::robin && p.h > 0.0) need_size(p.Dstar, m, "boundary.Dstar");
  const auto sigma = r.word("boundary", "sigma", "none", {"none", "detach", "attach"});
  p.sigma.mode = sigma == "detach" ? SigmaMode::detach : sigma == "attach" ? SigmaMode::attach : SigmaMode::none;
  const auto form = r.word("boundary", "sigma_form", "constant", {"constant", "linear", "quadratic"});
  p.sigma.form = form == "linear" ? SigmaForm::linear : form == "quadratic" ? SigmaForm::quadratic : SigmaForm::constant;
  p.sigma.coeff = r.num("boundary", "sigma_coeff", 0.0);
  p.sigma.attach_X = r.list("boundary", "attach_X", {});
  if (!(p.sigma.coeff >= 0.0)) invalid("boundary.sigma_coeff must be >= 0");
  if (!p.sigma.attach_X.empty()) need_size(p.sigma.attach_X, n, "boundary.attach_X");

  cfg.diffusivity.variable = r.word("diffusivity", "kind", "constant", {"constant", "variable"}) == "variable";
  cfg.diffusivity.D0 = r.num("diffusivity", "D0", 1.0);
  cfg.diffusivity.porosity = r.profile("diffusivity", "porosity", PiecewisePoly::constant(1.0));
  need_positive(cfg.diffusivity.D0, "diffusivity.D0");
  p.variable_diffusivity = cfg.diffusivity.variable;
  if (p.variable_diffusivity) p.field = make_field(cfg.diffusivity);

  auto& mc = cfg.march;
  mc.picard_tol = r.num("numerics", "picard_tol", mc.picard_tol);
  mc.picard_max_iter = r.integer("numerics", "max_iter", mc.picard_max_iter);
  mc.rebaseline_every = r.integer("numerics", "rebaseline_every", mc.rebaseline_every);
  mc.rebaseline_at = r.list("numerics", "rebaseline_at", {});
  mc.max_halvings = r.integer("numerics", "max_halvings", mc.max_halvings);
  mc.residual_budget = r.num("numerics", "residual_budget", mc.residual_budget);
  p.mode = r.word("numerics", "mode", "image-corrected", {"image-corrected", "paper-literal"}) == "paper-literal"
               ? RepresentationMode::paper_literal
               : RepresentationMode::image_corrected;
  p.parametrix.series_order = r.integer("numerics", "parametrix_order", p.parametrix.series_order);
  p.quadrature.profile_gauss_nodes = r.integer("numerics", "profile_gauss_nodes", p.quadrature.profile_gauss_nodes);
  p.quadrature.grading_levels = r.integer("numerics", "grading_levels", p.quadrature.grading_levels);
  p.quadrature.mode = p.mode;
  if (!(mc.picard_tol > 0.0)) invalid("numerics.picard_tol must be positive");
  if (mc.picard_max_iter < 1) invalid("numerics.max_iter must be >= 1");
  if (mc.rebaseline_every < 16) invalid("numerics.rebaseline_every must be >= 16");
  if (mc.max_halvings < 0) invalid("numerics.max_halvings must be >= 0");
  if (!(mc.residual_budget >= 0.0)) invalid("numerics.residual_budget must be >= 0");
  if (p.parametrix.series_order < 0) invalid("numerics.parametrix_order must be >= 0");
  if (p.quadrature.profile_gauss_nodes < 1) invalid("numerics.profile_gauss_nodes must be >= 1");
  if (p.quadrature.grading_levels < 1) invalid("numerics.grading_levels must be >= 1");

  cfg.output.directory = r.word("output", "directory", "out", {});
  cfg.output.stride = r.integer("output", "stride", 1);
  cfg.output.format =
      r.word("output", "format", "csv", {"csv", "json-lines"}) == "csv" ? OutputFormat::csv : OutputFormat::json_lines;
  if (cfg.output.stride < 1) invalid("output.stride must be >= 1");
  mc.output_stride = cfg.output.stride;

  cfg.oracle.N_x = r.integer("oracle", "N_x", cfg.oracle.N_x);
  cfg.oracle.dt = r.num("oracle", "dt", cfg.oracle.dt);
  cfg.oracle.theta_scheme = r.num("oracle", "theta_scheme", cfg.oracle.theta_scheme);
  cfg.oracle.t_end = mc.t_end;
  if (cfg.oracle.N_x < 32) invalid("oracle.N_x must be >= 32");
  need_positive(cfg.oracle.dt, "oracle.dt");
  if (!(cfg.oracle.theta_scheme >= 0.5 && cfg.oracle.theta_scheme <= 1.0))
    invalid("oracle.theta_scheme must lie in [0.5, 1]");

  r.check_unused();
  cfg.defaulted = std::move(r.defaulted);
  p.validate();
  mc.validate();
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SolverError(ErrorCode::IoError, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimulationConfig& cfg) {
  const Problem& p = cfg.problem;
  const auto& mc = cfg.march;
  std::ostringstream o;
  auto kv = [&o](const char* key, const std::string& v) { o << key << " = " << v << "\n"; };
  auto num = [&kv](const char* key, double v) { kv(key, format_double(v)); };
  auto integer = [&kv](const char* key, long v) { kv(key, std::to_string(v)); };

  o << "[domain]\n";
  num("L0", p.L0);
  integer("n", p.kinetics.n);
  integer("m", p.kinetics.m);
  num("t_end", mc.t_end);
  num("dt", mc.dt);
  integer("N_z", p.N_z);
  num("L_min", p.L_min);
  for (int i = 0; i < p.kinetics.n; ++i) {
    const auto& sp = p.kinetics.species[i];
    o << "\n[species." << i + 1 << "]\n";
    num("rho", sp.rho);
    num("mu_max", sp.mu_max);
    kv("K_S", join(sp.K_S));
    kv("yield", join(sp.yield));
    num("decay", sp.decay);
    std::vector<double> subs;
    for (int j : sp.substrates) subs.push_back(j + 1);
    kv("substrates", join(subs));
    kv("phi", format_profile(p.X0[i]));
  }
  for (int j = 0; j < p.kinetics.m; ++j) {
    o << "\n[substrate." << j + 1 << "]\n";
    num("D", p.D[j]);
    kv("phi", format_profile(p.C0[j]));
    kv("psi", format_profile(p.psi[j]));
  }
  o << "\n[boundary]\n";
  kv("kind", p.boundary == BoundaryKind::robin ? "robin" : "dirichlet");
  num("h", p.h);
  num("k", p.k);
  kv("Dstar", join(p.Dstar));
  kv("sigma", p.sigma.mode == SigmaMode::detach ? "detach" : p.sigma.mode == SigmaMode::attach ? "attach" : "none");
  kv("sigma_form", p.sigma.form == SigmaForm::linear      ? "linear"
                   : p.sigma.form == SigmaForm::quadratic ? "quadratic"
                                                          : "constant");
  num("sigma_coeff", p.sigma.coeff);
  kv("attach_X", join(p.sigma.attach_X));
  o << "\n[diffusivity]\n";
  kv("kind", cfg.diffusivity.variable ? "variable" : "constant");
  num("D0", cfg.diffusivity.D0);
  kv("porosity", format_profile(cfg.diffusivity.porosity));
  o << "\n[numerics]\n";
  num("picard_tol", mc.picard_tol);
  integer("max_iter", mc.picard_max_iter);
  integer("rebaseline_every", mc.rebaseline_every);
  kv("rebaseline_at", join(mc.rebaseline_at));
  integer("max_halvings", mc.max_halvings);
  num("residual_budget", mc.residual_budget);
  kv("mode", to_string(p.mode));
  integer("parametrix_order", p.parametrix.series_order);
  integer("profile_gauss_nodes", p.quadrature.profile_gauss_nodes);
  integer("grading_levels", p.quadrature.grading_levels);
  o << "\n[output]\n";
  kv("directory", cfg.output.directory);
  integer("stride", cfg.output.stride);
  kv("format", to_string(cfg.output.format));
  o << "\n[oracle]\n";
  integer("N_x", cfg.oracle.N_x);
  num("dt", cfg.oracle.dt);
  num("theta_scheme", cfg.oracle.theta_scheme);
  return o.str();
}

}  // namespace biofilm
