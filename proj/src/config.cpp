#include "symcurv/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "symcurv/errors.hpp"
#include "symcurv/geomsolve.hpp"

namespace symcurv {
namespace {

constexpr std::array<std::pair<Command, std::string_view>, 8> kCommands = {{
    {Command::CheckConditionC, "check-condition-c"},
    {Command::CheckConditionQ, "check-condition-q"},
    {Command::CheckCone, "check-cone"},
    {Command::VerifyConcavity, "verify-concavity"},
    {Command::VerifyGuan, "verify-guan"},
    {Command::Solve, "solve"},
    {Command::Homotopy, "homotopy"},
    {Command::BarrierCheck, "barrier-check"},
}};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run",
       {"command", "seed", "trials", "output_dir", "steps", "homotopy_eps", "min_step", "max_iter",
        "newton_tol", "monitor_z"}},
      {"operator", {"n", "k", "alphas"}},
      {"psi", {"family", "c", "p", "eps", "axis", "axes", "r_inner", "r_outer"}},
      {"grid", {"n_lon", "n_lat", "initial_radius"}},
      {"verify", {"tol", "hessian_tol", "hessian_trials", "field", "l", "delta"}},
  };
  return keys;
}

const std::set<std::string> kFields = {"root-q",       "quotient-qk",    "sigma-over-q",
                                       "sum-quotient", "lower-quotient", "sigma"};
const std::set<std::string> kFamilies = {"constant", "radial", "anisotropic", "ellipsoid"};

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

struct Entry {
  std::string value;
  int line = 0;
};

using Table = std::map<std::string, Entry>;  // "section.key"

double to_real(const Entry& e, const std::string& key) {
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError(e.line, key + ": expected a number, got '" + e.value + "'");
  }
  return v;
}

long to_integer(const Entry& e, const std::string& key) {
  long v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(e.line, key + ": expected an integer, got '" + e.value + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

std::vector<double> to_reals(const Entry& e, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) out.push_back(to_real(Entry{item, e.line}, key));
  return out;
}

Eigen::Vector3d to_vec3(const Entry& e, const std::string& key) {
  const auto v = to_reals(e, key);
  if (v.size() != 3) throw ConfigError(e.line, key + ": expected 3 comma-separated numbers");
  return {v[0], v[1], v[2]};
}

class Reader {
 public:
  explicit Reader(Table t, int last_line) : table_(std::move(t)), last_line_(last_line) {}

  const Entry* find(const std::string& key) const {
    const auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }
  bool has(const std::string& key) const { return find(key) != nullptr; }
  bool has_section(const std::string& section) const {
    return std::any_of(table_.begin(), table_.end(),
                       [&](const auto& kv) { return kv.first.rfind(section + ".", 0) == 0; });
  }
  const Entry& require(const std::string& key, const std::string& why) const {
    if (const Entry* e = find(key)) return *e;
    const auto dot = key.find('.');
    throw ConfigError(section_line(key.substr(0, dot)),
                      "missing required key '" + key.substr(dot + 1) + "' in [" + key.substr(0, dot) +
                          "] (" + why + ")");
  }
  void real(const std::string& key, double& out) const {
    if (const Entry* e = find(key)) out = to_real(*e, key);
  }
  template <class Int>
  void integer(const std::string& key, Int& out) const {
    if (const Entry* e = find(key)) out = static_cast<Int>(to_integer(*e, key));
  }
  int line_of(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->line : last_line_;
  }
  int section_line(const std::string& section) const {
    int line = 0;
    for (const auto& [k, e] : table_) {
      if (k.rfind(section + ".", 0) == 0 && (line == 0 || e.line < line)) line = e.line;
    }
    return line > 0 ? line : last_line_;
  }

 private:
  Table table_;
  int last_line_;
};

}  // namespace

std::string_view command_name(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

long RunConfig::effective_trials() const {
  if (trials > 0) return trials;
  switch (command) {
    case Command::CheckConditionQ:
    case Command::VerifyConcavity:
    case Command::CheckCone:
    case Command::VerifyGuan:
      return 10000;
    case Command::BarrierCheck:
    case Command::Homotopy:
      return 2000;
    default:
      return 1;
  }
}

long RunConfig::effective_hessian_trials() const {
  return hessian_trials > 0 ? hessian_trials : std::max(1L, effective_trials() / 10);
}

int RunConfig::effective_l() const { return l >= 0 ? l : (op ? op->k - 1 : 0); }

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](std::string key, std::string value) { out.emplace_back(std::move(key), std::move(value)); };
  auto vec = [](const Eigen::Vector3d& v) {
    return format_double(v.x()) + "," + format_double(v.y()) + "," + format_double(v.z());
  };
  add("run.command", std::string(command_name(command)));
  add("run.seed", std::to_string(seed));
  add("run.trials", std::to_string(effective_trials()));
  add("run.output_dir", output_dir);
  if (command == Command::Solve || command == Command::Homotopy) {
    add("run.max_iter", std::to_string(max_iter));
    add("run.newton_tol", newton_tol > 0.0 ? format_double(newton_tol) : "auto");
  }
  if (command == Command::Homotopy) {
    add("run.steps", std::to_string(steps));
    add("run.homotopy_eps", format_double(homotopy_eps));
    add("run.min_step", format_double(min_step));
    add("run.monitor_z", format_double(monitor_z));
  }
  if (op) {
    add("operator.n", std::to_string(op->n));
    add("operator.k", std::to_string(op->k));
    std::string a;
    for (std::size_t i = 0; i < op->alphas.size(); ++i) a += (i ? "," : "") + op->alphas[i].str();
    add("operator.alphas", a);
  }
  if (psi) {
    add("psi.family", psi->family);
    if (psi->family == "ellipsoid") {
      add("psi.axes", vec(psi->axes));
    } else {
      add("psi.c", format_double(psi->c));
    }
    add("psi.p", format_double(psi->p));
    if (psi->family == "anisotropic") {
      add("psi.eps", format_double(psi->eps));
      add("psi.axis", vec(psi->axis));
    }
    add("psi.r_inner", format_double(psi->r_inner));
    add("psi.r_outer", format_double(psi->r_outer));
  }
  if (command == Command::Solve || command == Command::Homotopy) {
    add("grid.n_lon", std::to_string(n_lon));
    add("grid.n_lat", std::to_string(n_lat));
    if (command == Command::Solve) add("grid.initial_radius", format_double(initial_radius));
  }
  if (command == Command::VerifyConcavity || command == Command::CheckConditionQ ||
      command == Command::VerifyGuan ||
      command == Command::BarrierCheck) {
    add("verify.tol", format_double(tol));
  }
  if (command == Command::VerifyConcavity || command == Command::CheckConditionQ) {
    add("verify.hessian_tol", format_double(hessian_tol));
    add("verify.hessian_trials", std::to_string(effective_hessian_trials()));
  }
  if (command == Command::VerifyConcavity) add("verify.field", field);
  if (command == Command::VerifyGuan ||
      (command == Command::VerifyConcavity && (field == "sum-quotient" || field == "lower-quotient"))) {
    add("verify.l", std::to_string(effective_l()));
  }
  if (command == Command::VerifyGuan) add("verify.delta", format_double(delta));
  return out;
}

RunConfig parse_config(std::string_view text) {
  Table table;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::set<std::string> seen_sections;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) throw ConfigError(line_no, "unterminated section header");
      section = trim(std::string_view(line).substr(1, close - 1));
      if (!known_keys().count(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
      if (!seen_sections.insert(section).second) {
        throw ConfigError(line_no, "duplicate section [" + section + "]");
      }
      line = trim(std::string_view(line).substr(close + 1));
      if (line.empty()) continue;
    }
    // key=value pairs; a token without '=' continues the previous value ("alphas=0, 1, 1").
    // Glue "key = value" into one token.
    std::string glued;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '=') {
        while (!glued.empty() && std::isspace(static_cast<unsigned char>(glued.back()))) glued.pop_back();
        glued += '=';
        while (i + 1 < line.size() && std::isspace(static_cast<unsigned char>(line[i + 1]))) ++i;
      } else {
        glued += line[i];
      }
    }
    std::istringstream tokens(glued);
    std::string token;
    std::vector<std::pair<std::string, std::string>> pairs;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        if (pairs.empty()) throw ConfigError(line_no, "expected key=value, got '" + token + "'");
        pairs.back().second += token;
        continue;
      }
      if (eq == 0) {
        if (pairs.empty()) throw ConfigError(line_no, "missing key before '='");
        throw ConfigError(line_no, "unexpected '=' in value of '" + pairs.back().first + "'");
      }
      pairs.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
    for (auto& [key, value] : pairs) {
      if (section.empty()) throw ConfigError(line_no, "key '" + key + "' outside any section");
      if (!known_keys().at(section).count(key)) {
        throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
      }
      if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
      const std::string full = section + "." + key;
      if (table.count(full)) {
        throw ConfigError(line_no, "duplicate key '" + key + "' in [" + section + "] (first set on line " +
                                       std::to_string(table[full].line) + ")");
      }
      table[full] = Entry{value, line_no};
    }
  }

  const Reader r(std::move(table), line_no);
  RunConfig cfg;
  {
    const Entry& e = r.require("run.command", "selects the operation");
    const auto it = std::find_if(kCommands.begin(), kCommands.end(),
                                 [&](const auto& c) { return c.second == e.value; });
    if (it == kCommands.end()) throw ConfigError(e.line, "unknown command '" + e.value + "'");
    cfg.command = it->first;
  }
  if (const Entry* e = r.find("run.seed")) {
    const long s = to_integer(*e, "seed");
    if (s < 0) throw ConfigError(e->line, "seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  r.integer("run.trials", cfg.trials);
  if (cfg.trials < 0) throw ConfigError(r.line_of("run.trials"), "trials must be nonnegative");
  if (const Entry* e = r.find("run.output_dir")) cfg.output_dir = e->value;
  r.integer("run.steps", cfg.steps);
  if (cfg.steps < 1) throw ConfigError(r.line_of("run.steps"), "steps must be at least 1");
  r.real("run.homotopy_eps", cfg.homotopy_eps);
  r.real("run.min_step", cfg.min_step);
  if (!(cfg.min_step > 0.0)) throw ConfigError(r.line_of("run.min_step"), "min_step must be positive");
  r.integer("run.max_iter", cfg.max_iter);
  if (cfg.max_iter < 1) throw ConfigError(r.line_of("run.max_iter"), "max_iter must be at least 1");
  r.real("run.newton_tol", cfg.newton_tol);
  if (cfg.newton_tol < 0.0) throw ConfigError(r.line_of("run.newton_tol"), "newton_tol must be nonnegative");
  r.real("run.monitor_z", cfg.monitor_z);

  // Every command runs on an operator.
  {
    OperatorParams op;
    op.n = static_cast<int>(to_integer(r.require("operator.n", "all commands need an operator"), "n"));
    op.k = static_cast<int>(to_integer(r.require("operator.k", "all commands need an operator"), "k"));
    const Entry& a = r.require("operator.alphas", "all commands need an operator");
    if (op.n < 1) throw ConfigError(r.line_of("operator.n"), "n must be at least 1");
    if (op.k < 1 || op.k > op.n) throw ConfigError(r.line_of("operator.k"), "k must satisfy 1 <= k <= n");
    for (const auto& item : split_list(a.value)) {
      try {
        op.alphas.push_back(parse_rational(item));
      } catch (const DomainError& ex) {
        throw ConfigError(a.line, std::string("alphas: ") + ex.what());
      }
    }
    if (static_cast<int>(op.alphas.size()) != op.k + 1) {
      throw ConfigError(a.line, "alphas must have k+1 = " + std::to_string(op.k + 1) + " entries, got " +
                                    std::to_string(op.alphas.size()));
    }
    for (const auto& x : op.alphas) {
      if (x < 0) throw ConfigError(a.line, "alphas must be nonnegative");
    }
    if (op.alphas.back() <= 0) throw ConfigError(a.line, "alpha_k must be positive");
    cfg.op = std::move(op);
  }

  const bool geometric = cfg.command == Command::Solve || cfg.command == Command::Homotopy ||
                         cfg.command == Command::BarrierCheck;
  if (geometric) {
    if (cfg.op->n != 2) throw ConfigError(r.line_of("operator.n"), "surface commands need n = 2");
    PsiParams psi;
    const Entry& fam = r.require("psi.family", "surface commands need a prescribed function");
    if (!kFamilies.count(fam.value)) throw ConfigError(fam.line, "unknown psi family '" + fam.value + "'");
    psi.family = fam.value;
    if (psi.family == "ellipsoid") {
      psi.axes = to_vec3(r.require("psi.axes", "ellipsoid family"), "axes");
      if (r.has("psi.c")) throw ConfigError(r.line_of("psi.c"), "ellipsoid family takes no 'c'");
    } else {
      psi.c = to_real(r.require("psi.c", psi.family + " family"), "c");
      if (r.has("psi.axes")) throw ConfigError(r.line_of("psi.axes"), "'axes' applies to the ellipsoid family only");
    }
    if (psi.family == "radial" || psi.family == "anisotropic") {
      psi.p = to_real(r.require("psi.p", psi.family + " family"), "p");
    } else {
      r.real("psi.p", psi.p);
      if (psi.family == "constant" && r.has("psi.p")) {
        throw ConfigError(r.line_of("psi.p"), "constant family takes no 'p'");
      }
    }
    if (psi.family == "anisotropic") {
      psi.eps = to_real(r.require("psi.eps", "anisotropic family"), "eps");
      if (const Entry* e = r.find("psi.axis")) psi.axis = to_vec3(*e, "axis");
    } else if (r.has("psi.eps") || r.has("psi.axis")) {
      throw ConfigError(r.line_of(r.has("psi.eps") ? "psi.eps" : "psi.axis"),
                        "'eps'/'axis' apply to the anisotropic family only");
    }
    r.real("psi.r_inner", psi.r_inner);
    if (cfg.command != Command::Solve) {
      psi.r_outer = to_real(r.require("psi.r_outer", "barrier radius"), "r_outer");
    } else {
      r.real("psi.r_outer", psi.r_outer);
    }
    cfg.psi = psi;
  } else if (r.has_section("psi")) {
    throw ConfigError(r.section_line("psi"), "[psi] is only used by solve, homotopy and barrier-check");
  }

  r.integer("grid.n_lon", cfg.n_lon);
  r.integer("grid.n_lat", cfg.n_lat);
  r.real("grid.initial_radius", cfg.initial_radius);
  if (cfg.n_lon < 4 || cfg.n_lon % 2 != 0) throw ConfigError(r.line_of("grid.n_lon"), "n_lon must be even and >= 4");
  if (cfg.n_lat < 2) throw ConfigError(r.line_of("grid.n_lat"), "n_lat must be at least 2");
  if (static_cast<long>(cfg.n_lon) * cfg.n_lat > 2048) {
    throw ConfigError(r.line_of("grid.n_lon"), "grid exceeds 2048 nodes");
  }
  if (!(cfg.initial_radius > 0.0)) {
    throw ConfigError(r.line_of("grid.initial_radius"), "initial_radius must be positive");
  }

  r.real("verify.tol", cfg.tol);
  r.real("verify.hessian_tol", cfg.hessian_tol);
  r.integer("verify.hessian_trials", cfg.hessian_trials);
  if (const Entry* e = r.find("verify.field")) {
    if (!kFields.count(e->value)) throw ConfigError(e->line, "unknown field '" + e->value + "'");
    cfg.field = e->value;
  }
  r.integer("verify.l", cfg.l);
  if (r.has("verify.l") && (cfg.l < 0 || cfg.l >= cfg.op->k)) {
    throw ConfigError(r.line_of("verify.l"), "l must satisfy 0 <= l < k");
  }
  r.real("verify.delta", cfg.delta);
  if (!(cfg.delta > 0.0)) throw ConfigError(r.line_of("verify.delta"), "delta must be positive");
  if (cfg.tol < 0.0 || cfg.hessian_tol < 0.0) {
    throw ConfigError(r.line_of(cfg.tol < 0.0 ? "verify.tol" : "verify.hessian_tol"),
                      "tolerances must be nonnegative");
  }
  return cfg;
}

}  // namespace symcurv
