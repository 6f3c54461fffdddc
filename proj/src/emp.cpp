#include "quadprop/emp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace quadprop {

RhoVanished::RhoVanished(double t)
    : std::runtime_error("solve_emp: rho approaching zero near t = " + std::to_string(t)),
      time_(t) {}

EmpSolution::EmpSolution(SystemProfile profile, double omega_bar, double hbar,
                         DenseSolution state)
    : profile_(std::move(profile)),
      omega_bar_(omega_bar),
      hbar_(hbar),
      state_(std::move(state)) {}

double EmpSolution::rho(double t) const { return state_.value(t, 0); }

double EmpSolution::rho_dot(double t) const { return state_.value(t, 1); }

double EmpSolution::rho_ddot(double t) const {
  const double r = rho(t), rd = rho_dot(t);
  const double lam = profile_.lam(t);
  return -profile_.lam_dot(t) * rd - profile_.omega_sq(t) * r +
         std::exp(-2.0 * lam) * omega_bar_ * omega_bar_ / (r * r * r);
}

double EmpSolution::tau(double t) const { return state_.value(t, 2); }

double EmpSolution::tau_dot(double t) const {
  const double r = rho(t);
  return std::exp(-profile_.lam(t)) / (r * r);
}

double EmpSolution::tau_ddot(double t) const {
  return -(profile_.lam_dot(t) + 2.0 * rho_dot(t) / rho(t)) * tau_dot(t);
}

double EmpSolution::tau_dddot(double t) const {
  const double r = rho(t), rd = rho_dot(t);
  const double g = profile_.lam_dot(t) + 2.0 * rd / r;
  const double g_dot =
      profile_.lam_ddot(t) + 2.0 * rho_ddot(t) / r - 2.0 * (rd / r) * (rd / r);
  return -g_dot * tau_dot(t) - g * tau_ddot(t);
}

namespace {

double omega_bar_sq_estimate(const EmpSolution& sol, double t) {
  const auto& p = sol.profile();
  const double td = sol.tau_dot(t);
  const double tdd = sol.tau_ddot(t);
  const double tddd = sol.tau_dddot(t);
  const double ld = p.lam_dot(t);
  return (p.omega_sq(t) - 0.5 * tddd / td + 0.75 * (tdd / td) * (tdd / td) -
          0.5 * p.lam_ddot(t) - 0.25 * ld * ld) /
         (td * td);
}

}  // namespace

EmpSolution solve_emp(const SystemProfile& p, double omega_bar, TimeSpan span,
                      const EmpOptions& opts) {
  if (!(opts.rho0 > 0)) throw std::invalid_argument("solve_emp: rho0 must be positive");
  if (!(omega_bar > 0)) throw std::invalid_argument("solve_emp: omega_bar must be positive");
  if (!(opts.hbar > 0)) throw std::invalid_argument("solve_emp: hbar must be positive");

  const double floor = 1e-6 * opts.rho0;
  const double wb2 = omega_bar * omega_bar;
  RhsFn rhs = [&p, wb2, floor](double t, const std::vector<double>& y,
                               std::vector<double>& dy) {
    const double rho = y[0];
    if (rho < floor) throw RhoVanished(t);
    const double lam = p.lam(t);
    const double inv_rho_sq = 1.0 / (rho * rho);
    dy[0] = y[1];
    dy[1] = -p.lam_dot(t) * y[1] - p.omega_sq(t) * rho +
            std::exp(-2.0 * lam) * wb2 * inv_rho_sq / rho;
    dy[2] = std::exp(-lam) * inv_rho_sq;
  };

  IvpOptions iopts;
  iopts.rtol = opts.rtol;
  iopts.atol = opts.atol;
  iopts.h_max = opts.h_max;
  DenseSolution state =
      integrate_ivp(rhs, {opts.rho0, opts.rho_dot0, opts.tau0}, span, iopts);

  EmpSolution sol(p, omega_bar, opts.hbar, std::move(state));
  if (opts.verify) {
    const EmpCheckReport report = verify_emp(sol);
    if (!report.pass)
      throw std::runtime_error(
          "solve_emp: invariant violation (constraint dev " +
          std::to_string(report.max_constraint_dev) + ", omega_bar rel dev " +
          std::to_string(report.max_omega_bar_rel_dev) + ")");
  }
  return sol;
}

EmpSolution solve_emp(const SystemProfile& p, double omega_bar, TimeSpan span,
                      double rho0, double rho_dot0, double tau0, double rtol) {
  EmpOptions opts;
  opts.rho0 = rho0;
  opts.rho_dot0 = rho_dot0;
  opts.tau0 = tau0;
  opts.rtol = rtol;
  return solve_emp(p, omega_bar, span, opts);
}

std::pair<double, double> check_omega_bar(const EmpSolution& sol, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("check_omega_bar: n_samples must be >= 2");
  const auto& times = sol.state().times();
  const std::size_t interior = times.size() > 2 ? times.size() - 2 : 0;
  std::vector<double> sample_ts;
  sample_ts.reserve(static_cast<std::size_t>(n_samples));
  if (interior >= static_cast<std::size_t>(n_samples)) {
    for (int i = 0; i < n_samples; ++i) {
      const std::size_t idx =
          1 + static_cast<std::size_t>((double(i) * double(interior - 1)) /
                                       double(n_samples - 1));
      sample_ts.push_back(times[idx]);
    }
  } else {
    // Not enough knots: fall back to evenly spaced interior times. The
    // derivative formulas are analytic in the interpolated state, so this
    // stays meaningful.
    const double t0 = sol.t_front(), t1 = sol.t_back();
    for (int i = 0; i < n_samples; ++i)
      sample_ts.push_back(t0 + (t1 - t0) * (i + 1) / double(n_samples + 1));
  }
  const double target = sol.omega_bar() * sol.omega_bar();
  double sum = 0.0, max_rel = 0.0;
  for (double t : sample_ts) {
    const double est = omega_bar_sq_estimate(sol, t);
    sum += est;
    max_rel = std::max(max_rel, std::abs(est - target) / target);
  }
  return {sum / double(sample_ts.size()), max_rel};
}

EmpCheckReport verify_emp(const EmpSolution& sol) {
  EmpCheckReport report;
  const auto& state = sol.state();
  const auto& times = state.times();
  report.tau_monotone = true;
  report.rho_positive = true;
  double prev_tau = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& y = state.state(i);
    const double rho = y[0], tau = y[2];
    if (!(rho > 0)) report.rho_positive = false;
    if (!(tau > prev_tau) && i > 0) report.tau_monotone = false;
    prev_tau = tau;
    const double tau_dot = std::exp(-sol.profile().lam(times[i])) / (rho * rho);
    if (!(tau_dot > 0)) report.tau_monotone = false;
    const double dev =
        std::abs(tau_dot * rho * rho * std::exp(sol.profile().lam(times[i])) - 1.0);
    report.max_constraint_dev = std::max(report.max_constraint_dev, dev);
  }
  const int n = static_cast<int>(std::min<std::size_t>(
      std::max<std::size_t>(times.size() > 2 ? times.size() - 2 : 2, 2), 500));
  const auto [mean, max_rel] = check_omega_bar(sol, n);
  report.mean_omega_bar_sq = mean;
  report.max_omega_bar_rel_dev = max_rel;
  report.pass = report.rho_positive && report.tau_monotone &&
                report.max_constraint_dev < 1e-7 && report.max_omega_bar_rel_dev < 1e-6;
  return report;
}

std::pair<double, double> schwarzian_decompose(const EmpSolution& sol, double t) {
  const auto& p = sol.profile();
  const double span = sol.t_back() - sol.t_front();
  for (double u : {sol.t_front(), sol.t_front() + 0.37 * span, sol.t_back()}) {
    if (std::abs(p.lam(u)) > 1e-12 || std::abs(p.lam_dot(u)) > 1e-12)
      throw std::invalid_argument("schwarzian_decompose: friction present");
  }
  const double td = sol.tau_dot(t), tdd = sol.tau_ddot(t), tddd = sol.tau_dddot(t);
  const double kinetic = td * td * sol.omega_bar() * sol.omega_bar();
  const double schwarz = tddd / td - 1.5 * (tdd / td) * (tdd / td);
  return {kinetic, 0.5 * schwarz};
}

double junker_inomata_condition(const EmpSolution& sol, double t) {
  const auto& p = sol.profile();
  const double wb = sol.omega_bar();
  const double phase = wb * sol.tau(t);
  const double c = std::cos(phase);
  if (std::abs(c) < 1e-6)
    throw std::domain_error(
        "junker_inomata_condition: t = " + std::to_string(t) +
        " is too close to a map-domain boundary (cos(omega_bar tau) ~ 0)");
  const double td = sol.tau_dot(t), tdd = sol.tau_ddot(t), tddd = sol.tau_dddot(t);
  const double tn = std::tan(phase);
  // g = f'/f for f = tau_dot^(1/2) sec(omega_bar tau); then
  // f''/f - 2(f'/f)^2 = g' - g^2.
  const double g = 0.5 * tdd / td + wb * td * tn;
  const double g_dot = 0.5 * (tddd / td - (tdd / td) * (tdd / td)) + wb * tdd * tn +
                       wb * wb * td * td / (c * c);
  const double ld = p.lam_dot(t);
  return p.omega_sq(t) - (g_dot - g * g + 0.25 * ld * ld + 0.5 * p.lam_ddot(t));
}

}  // namespace quadprop
