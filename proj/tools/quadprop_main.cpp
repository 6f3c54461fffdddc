#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quadprop/scenario.hpp"

namespace {

void apply_param_flags(quadprop::ScenarioConfig& cfg, const std::vector<std::string>& entries) {
  for (const std::string& e : entries) {
    const auto eq = e.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--param expects key=value, got '" + e + "'");
    const std::string key = e.substr(0, eq);
    const std::string text = e.substr(eq + 1);
    std::size_t pos = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != text.size())
      throw std::invalid_argument("--param " + key + ": bad number '" + text + "'");
    cfg.params[key] = value;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classical maps and exact propagators for 1-D quadratic systems"};
  app.require_subcommand(1);

  std::optional<std::string> profile, out, format;
  std::optional<double> omega_bar, hbar, t_min, t_max, rtol, atol, root_tol;
  std::optional<int> grid;
  std::vector<std::string> param_flags;
  std::string config_path;

  app.add_option("--profile", profile, "profile kind: constant | caldirola_kanai | mathieu");
  app.add_option("--param", param_flags, "profile parameter as key=value (repeatable)");
  app.add_option("--omega-bar", omega_bar, "reduced constant frequency (default 1)");
  app.add_option("--hbar", hbar, "Planck constant (default 1)");
  app.add_option("--t-min", t_min, "scan start time (default 0)");
  app.add_option("--t-max", t_max, "scan end time (default 10)");
  app.add_option("--grid", grid, "number of scan points (default 200)");
  app.add_option("--rtol", rtol, "integrator relative tolerance (default 1e-10)");
  app.add_option("--atol", atol, "integrator absolute tolerance (default 1e-12)");
  app.add_option("--root-tol", root_tol, "root-finder tolerance (default 1e-12)");
  app.add_option("--out", out, "output file path (default: stdout)");
  app.add_option("--format", format, "output format: csv | json (default csv)");
  app.add_option("--config", config_path, "config file with 'key = value' lines");

  auto* cmd_emp =
      app.add_subcommand("emp", "tabulate the auxiliary amplitude and reparametrized time");
  auto* cmd_caustics =
      app.add_subcommand("caustics", "locate caustic times and map-domain boundaries");
  auto* cmd_density = app.add_subcommand("density", "scan the on-axis propagator density");

  double slope = 1.0, offset = 0.0;
  auto* cmd_phase =
      app.add_subcommand("phase", "scan the unit phase factor along a classical path");
  cmd_phase->add_option("--slope", slope, "path slope coefficient a (default 1)");

  auto* cmd_trajectory =
      app.add_subcommand("trajectory", "tabulate a classical path with its mapped image");
  cmd_trajectory->add_option("--slope", slope, "path slope coefficient a (default 1)");
  cmd_trajectory->add_option("--offset", offset, "path offset coefficient b (default 0)");

  double center = 0.0, width = 1.0, momentum = 0.0;
  std::optional<double> t2;
  auto* cmd_evolve = app.add_subcommand("evolve", "propagate a Gaussian packet");
  cmd_evolve->add_option("--center", center, "packet center (default 0)");
  cmd_evolve->add_option("--width", width, "packet width (default 1)");
  cmd_evolve->add_option("--momentum", momentum, "packet momentum (default 0)");
  cmd_evolve->add_option("--t2", t2, "target time (default: t-max)");

  for (auto* sub : {cmd_emp, cmd_caustics, cmd_density, cmd_phase, cmd_trajectory, cmd_evolve})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  quadprop::ScenarioConfig cfg;
  try {
    if (!config_path.empty()) quadprop::apply_config_file(cfg, config_path);
    if (profile) cfg.profile = *profile;
    if (omega_bar) cfg.omega_bar = *omega_bar;
    if (hbar) cfg.hbar = *hbar;
    if (t_min) cfg.t_min = *t_min;
    if (t_max) cfg.t_max = *t_max;
    if (grid) cfg.grid = *grid;
    if (rtol) cfg.tol.rtol = *rtol;
    if (atol) cfg.tol.atol = *atol;
    if (root_tol) cfg.tol.root_tol = *root_tol;
    if (out) cfg.out = *out;
    if (format) cfg.format = *format;
    apply_param_flags(cfg, param_flags);
    quadprop::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "quadprop: " << e.what() << "\n";
    return 1;
  }

  auto run = [&cfg](auto&& body) -> int {
    try {
      if (cfg.out.empty()) return body(std::cout);
      std::ofstream os(cfg.out);
      if (!os) throw std::runtime_error("cannot open output file '" + cfg.out + "'");
      return body(os);
    } catch (const std::exception& e) {
      std::cerr << "quadprop: " << e.what() << "\n";
      return 1;
    }
  };

  if (cmd_emp->parsed())
    return run([&](std::ostream& os) { return quadprop::run_emp(cfg, os); });
  if (cmd_caustics->parsed())
    return run([&](std::ostream& os) { return quadprop::run_caustics(cfg, os); });
  if (cmd_density->parsed())
    return run([&](std::ostream& os) { return quadprop::run_density(cfg, os); });
  if (cmd_phase->parsed())
    return run([&](std::ostream& os) { return quadprop::run_phase(cfg, slope, os); });
  if (cmd_trajectory->parsed())
    return run([&](std::ostream& os) { return quadprop::run_trajectory(cfg, slope, offset, os); });
  if (cmd_evolve->parsed())
    return run([&](std::ostream& os) {
      return quadprop::run_evolve(cfg, center, width, momentum, t2.value_or(cfg.t_max), os);
    });
  return 1;
}
