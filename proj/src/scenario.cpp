#include "quadprop/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "quadprop/classical.hpp"
#include "quadprop/propagator.hpp"

namespace quadprop {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + text + "'");
  }
  if (pos != text.size())
    throw std::invalid_argument("config key '" + key + "': bad number '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + text + "'");
  }
  if (pos != text.size())
    throw std::invalid_argument("config key '" + key + "': bad integer '" + text + "'");
  return static_cast<int>(v);
}

enum class KvKind { number, text, boolean };

struct KV {
  std::string key;
  std::string value;  // %.17g for numbers, "0"/"1" for booleans
  KvKind kind = KvKind::number;
};

KV num_kv(std::string key, double v) { return {std::move(key), fmt_g(v), KvKind::number}; }
KV int_kv(std::string key, long v) { return {std::move(key), std::to_string(v), KvKind::number}; }
KV str_kv(std::string key, std::string v) { return {std::move(key), std::move(v), KvKind::text}; }
KV bool_kv(std::string key, bool v) { return {std::move(key), v ? "1" : "0", KvKind::boolean}; }

std::vector<KV> config_kv(const ScenarioConfig& cfg) {
  std::vector<KV> kv;
  kv.push_back(str_kv("profile", cfg.profile));
  for (const auto& [name, value] : cfg.params) kv.push_back(num_kv("param." + name, value));
  kv.push_back(num_kv("omega_bar", cfg.omega_bar));
  kv.push_back(num_kv("hbar", cfg.hbar));
  kv.push_back(num_kv("t_min", cfg.t_min));
  kv.push_back(num_kv("t_max", cfg.t_max));
  kv.push_back(int_kv("grid", cfg.grid));
  kv.push_back(num_kv("rtol", cfg.tol.rtol));
  kv.push_back(num_kv("atol", cfg.tol.atol));
  kv.push_back(num_kv("root_tol", cfg.tol.root_tol));
  kv.push_back(str_kv("format", cfg.format));
  return kv;
}

std::vector<KV> check_kv(const EmpCheckReport& rep) {
  std::vector<KV> kv;
  kv.push_back(num_kv("constraint_max_dev", rep.max_constraint_dev));
  kv.push_back(num_kv("omega_bar_max_rel_dev", rep.max_omega_bar_rel_dev));
  kv.push_back(num_kv("mean_omega_bar_sq", rep.mean_omega_bar_sq));
  kv.push_back(bool_kv("tau_monotone", rep.tau_monotone));
  kv.push_back(bool_kv("rho_positive", rep.rho_positive));
  kv.push_back(bool_kv("pass", rep.pass));
  if (!rep.pass) kv.push_back(str_kv("warning", "invariant check failed; data is suspect"));
  return kv;
}

using Cell = std::optional<std::string>;
using Row = std::vector<Cell>;

struct Table {
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

void json_escape(std::ostream& os, const std::string& s) {
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      default: os << c;
    }
  }
}

void json_kv_block(std::ostream& os, const std::vector<KV>& kv, const char* indent) {
  os << "{";
  bool first = true;
  for (const auto& e : kv) {
    os << (first ? "\n" : ",\n") << indent << "  \"";
    json_escape(os, e.key);
    os << "\": ";
    switch (e.kind) {
      case KvKind::number: os << e.value; break;
      case KvKind::boolean: os << (e.value == "1" ? "true" : "false"); break;
      case KvKind::text:
        os << '"';
        json_escape(os, e.value);
        os << '"';
        break;
    }
    first = false;
  }
  os << "\n" << indent << "}";
}

void write_csv(std::ostream& os, const std::string& command, const std::vector<KV>& config,
               const std::vector<KV>& checks, const Table& table) {
  os << "# quadprop " << command << "\n";
  for (const auto& e : config) os << "# " << e.key << " = " << e.value << "\n";
  for (const auto& e : checks) os << "# check." << e.key << " = " << e.value << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      if (row[c]) os << *row[c];
    }
    os << "\n";
  }
}

void write_json(std::ostream& os, const std::string& command, const std::vector<KV>& config,
                const std::vector<KV>& checks, const Table& table) {
  os << "{\n  \"command\": \"";
  json_escape(os, command);
  os << "\",\n  \"config\": ";
  json_kv_block(os, config, "  ");
  os << ",\n  \"checks\": ";
  json_kv_block(os, checks, "  ");
  os << ",\n  \"columns\": [";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? ", " : "") << '"';
    json_escape(os, table.columns[c]);
    os << '"';
  }
  os << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    os << (r ? ",\n    " : "\n    ") << "[";
    const Row& row = table.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? ", " : "");
      if (row[c])
        os << *row[c];
      else
        os << "null";
    }
    os << "]";
  }
  os << "\n  ]\n}\n";
}

void emit(std::ostream& os, const ScenarioConfig& cfg, const std::string& command,
          const std::vector<KV>& config, const std::vector<KV>& checks, const Table& table) {
  if (cfg.format == "json")
    write_json(os, command, config, checks, table);
  else
    write_csv(os, command, config, checks, table);
}

struct Prepared {
  EmpSolution solution;
  EmpCheckReport report;
};

Prepared prepare(const ScenarioConfig& cfg) {
  validate_config(cfg);
  const SystemProfile p = profile_from_config(cfg);
  EmpOptions opts;
  opts.rtol = cfg.tol.rtol;
  opts.atol = cfg.tol.atol;
  opts.hbar = cfg.hbar;
  opts.verify = false;
  EmpSolution sol = solve_emp(p, cfg.omega_bar, TimeSpan{cfg.t_min, cfg.t_max}, opts);
  EmpCheckReport rep = verify_emp(sol);
  return {std::move(sol), rep};
}

std::vector<double> scan_times(const ScenarioConfig& cfg) {
  std::vector<double> t(static_cast<std::size_t>(cfg.grid));
  const double dt = (cfg.t_max - cfg.t_min) / (cfg.grid - 1);
  for (int i = 0; i < cfg.grid; ++i) t[static_cast<std::size_t>(i)] = cfg.t_min + i * dt;
  t.back() = cfg.t_max;
  return t;
}

}  // namespace

void validate_config(const ScenarioConfig& cfg) {
  if (!(cfg.t_max > cfg.t_min)) throw std::invalid_argument("config: need t_min < t_max");
  if (cfg.grid < 2) throw std::invalid_argument("config: grid must be >= 2");
  if (!(cfg.tol.rtol > 0) || !(cfg.tol.atol > 0) || !(cfg.tol.root_tol > 0))
    throw std::invalid_argument("config: tolerances must be positive");
  if (!(cfg.omega_bar > 0)) throw std::invalid_argument("config: omega_bar must be positive");
  if (!(cfg.hbar > 0)) throw std::invalid_argument("config: hbar must be positive");
  if (cfg.format != "csv" && cfg.format != "json")
    throw std::invalid_argument("config: format must be csv or json");
}

void apply_config_file(ScenarioConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config file line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "profile")
      cfg.profile = value;
    else if (key == "out")
      cfg.out = value;
    else if (key == "format")
      cfg.format = value;
    else if (key == "omega_bar")
      cfg.omega_bar = parse_double(key, value);
    else if (key == "hbar")
      cfg.hbar = parse_double(key, value);
    else if (key == "t_min")
      cfg.t_min = parse_double(key, value);
    else if (key == "t_max")
      cfg.t_max = parse_double(key, value);
    else if (key == "grid")
      cfg.grid = parse_int(key, value);
    else if (key == "rtol")
      cfg.tol.rtol = parse_double(key, value);
    else if (key == "atol")
      cfg.tol.atol = parse_double(key, value);
    else if (key == "root_tol")
      cfg.tol.root_tol = parse_double(key, value);
    else if (key.rfind("param.", 0) == 0 && key.size() > 6)
      cfg.params[key.substr(6)] = parse_double(key, value);
    else
      throw std::invalid_argument("config file line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
  }
}

SystemProfile profile_from_config(const ScenarioConfig& cfg) {
  return make_profile(profile_kind_from_string(cfg.profile), cfg.params);
}

int run_emp(const ScenarioConfig& cfg, std::ostream& os) {
  const Prepared pre = prepare(cfg);
  Table tb;
  tb.columns = {"t", "rho", "rho_dot", "tau", "tau_dot"};
  for (double t : scan_times(cfg))
    tb.rows.push_back({fmt_g(t), fmt_g(pre.solution.rho(t)), fmt_g(pre.solution.rho_dot(t)),
                       fmt_g(pre.solution.tau(t)), fmt_g(pre.solution.tau_dot(t))});
  emit(os, cfg, "emp", config_kv(cfg), check_kv(pre.report), tb);
  return pre.report.pass ? 0 : 2;
}

int run_caustics(const ScenarioConfig& cfg, std::ostream& os) {
  const Prepared pre = prepare(cfg);
  const CausticChart chart = locate_caustics(pre.solution);
  os << "{\n  \"omega_bar\": " << fmt_g(chart.omega_bar) << ",\n  \"caustics\": [";
  for (std::size_t i = 0; i < chart.caustics.size(); ++i)
    os << (i ? ", " : "") << "{\"l\": " << chart.caustics[i].first
       << ", \"t\": " << fmt_g(chart.caustics[i].second) << "}";
  os << "],\n  \"boundaries\": [";
  for (std::size_t i = 0; i < chart.boundaries.size(); ++i)
    os << (i ? ", " : "") << "{\"k\": " << chart.boundaries[i].first
       << ", \"r\": " << fmt_g(chart.boundaries[i].second) << "}";
  os << "],\n  \"config\": ";
  json_kv_block(os, config_kv(cfg), "  ");
  os << ",\n  \"checks\": ";
  json_kv_block(os, check_kv(pre.report), "  ");
  os << "\n}\n";
  return pre.report.pass ? 0 : 2;
}

int run_density(const ScenarioConfig& cfg, std::ostream& os) {
  const Prepared pre = prepare(cfg);
  Table tb;
  tb.columns = {"t", "density", "at_caustic"};
  for (double t : scan_times(cfg)) {
    const double d = probability_density(pre.solution, t);
    if (std::isinf(d))
      tb.rows.push_back({fmt_g(t), std::nullopt, std::string("1")});
    else
      tb.rows.push_back({fmt_g(t), fmt_g(d), std::string("0")});
  }
  emit(os, cfg, "density", config_kv(cfg), check_kv(pre.report), tb);
  return pre.report.pass ? 0 : 2;
}

int run_phase(const ScenarioConfig& cfg, double a, std::ostream& os) {
  const Prepared pre = prepare(cfg);
  const double t0 = pre.solution.t_front();
  auto config = config_kv(cfg);
  config.push_back(num_kv("slope", a));
  Table tb;
  tb.columns = {"t", "re_P", "im_P", "maslov_index", "at_caustic"};
  for (double t : scan_times(cfg)) {
    const double x2 = trajectory(pre.solution, a, 0.0, t).x;
    const PropagatorValue v = general_propagator(pre.solution, x2, t, 0.0, t0);
    if (v.at_caustic) {
      tb.rows.push_back({fmt_g(t), std::nullopt, std::nullopt,
                         std::to_string(v.maslov_index), std::string("1")});
    } else {
      const std::complex<double> P = std::polar(1.0, v.phase);
      tb.rows.push_back({fmt_g(t), fmt_g(P.real()), fmt_g(P.imag()),
                         std::to_string(v.maslov_index), std::string("0")});
    }
  }
  emit(os, cfg, "phase", config, check_kv(pre.report), tb);
  return pre.report.pass ? 0 : 2;
}

int run_trajectory(const ScenarioConfig& cfg, double a, double b, std::ostream& os) {
  const Prepared pre = prepare(cfg);
  auto config = config_kv(cfg);
  config.push_back(num_kv("slope", a));
  config.push_back(num_kv("offset", b));
  Table tb;
  tb.columns = {"t", "x", "x_dot", "X", "T", "s"};
  for (double t : scan_times(cfg)) {
    const PhasePoint pt = trajectory(pre.solution, a, b, t);
    const LiftPoint lift = bargmann_lift(pre.solution, a, b, 0.0, t);
    Cell Xc, Tc;
    try {
      const MapPoint m = niederer_forward(pre.solution, pt.x, t);
      Xc = fmt_g(m.X);
      Tc = fmt_g(m.T);
    } catch (const std::domain_error&) {
      // map-domain boundary: leave the mapped coordinates empty
    }
    tb.rows.push_back({fmt_g(t), fmt_g(pt.x), fmt_g(pt.x_dot), Xc, Tc, fmt_g(lift.s)});
  }
  emit(os, cfg, "trajectory", config, check_kv(pre.report), tb);
  return pre.report.pass ? 0 : 2;
}

int run_evolve(const ScenarioConfig& cfg, double center, double width, double momentum,
               double t2, std::ostream& os) {
  const Prepared pre = prepare(cfg);
  auto config = config_kv(cfg);
  config.push_back(num_kv("center", center));
  config.push_back(num_kv("width", width));
  config.push_back(num_kv("momentum", momentum));
  config.push_back(num_kv("t2", t2));

  // Symmetric grid so caustic mirroring stays on-grid.
  const double half_span = std::abs(center) + 12.0 * width;
  std::vector<double> grid(static_cast<std::size_t>(cfg.grid));
  const double dx = 2.0 * half_span / (cfg.grid - 1);
  for (int i = 0; i < cfg.grid; ++i)
    grid[static_cast<std::size_t>(i)] = -half_span + i * dx;
  const WavePacket initial =
      make_gaussian_packet(grid, center, width, momentum, cfg.hbar, cfg.t_min);
  const WavePacket evolved = evolve_wavepacket(pre.solution, initial, t2);

  auto checks = check_kv(pre.report);
  const double n0 = packet_norm(initial), n1 = packet_norm(evolved);
  checks.push_back(num_kv("norm_initial", n0));
  checks.push_back(num_kv("norm_evolved", n1));
  checks.push_back(num_kv("norm_drift", std::abs(n1 - n0)));

  Table tb;
  tb.columns = {"stage", "x", "re_psi", "im_psi", "abs2_psi"};
  auto add_rows = [&tb, &cfg](const char* stage, const WavePacket& p) {
    const std::string tag = cfg.format == "json" ? "\"" + std::string(stage) + "\"" : stage;
    for (std::size_t i = 0; i < p.x.size(); ++i)
      tb.rows.push_back({tag, fmt_g(p.x[i]), fmt_g(p.psi[i].real()), fmt_g(p.psi[i].imag()),
                         fmt_g(std::norm(p.psi[i]))});
  };
  add_rows("initial", initial);
  add_rows("evolved", evolved);
  emit(os, cfg, "evolve", config, checks, tb);
  return pre.report.pass ? 0 : 2;
}

}  // namespace quadprop
