#pragma once

#include <stdexcept>
#include <utility>

#include "quadprop/integrators.hpp"
#include "quadprop/profiles.hpp"

namespace quadprop {

struct EmpOptions {
  double rho0 = 1.0;
  double rho_dot0 = 0.0;
  double tau0 = 0.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = 0.02;
  double hbar = 1.0;
  bool verify = true;  // assert the type invariants after integration
};

// Thrown when the envelope collapses during integration; the right-hand side
// diverges as rho^-3, so continuing through the approach is meaningless.
class RhoVanished : public std::runtime_error {
 public:
  explicit RhoVanished(double t);
  double time() const { return time_; }

 private:
  double time_;
};

// The solved envelope/fake-time pair for one profile on one span. The state
// components are (rho, rho_dot, tau); tau_dot and higher time derivatives are
// evaluated from the constraint tau_dot = exp(-lam)/rho^2 and its analytic
// derivatives rather than from the interpolant.
class EmpSolution {
 public:
  EmpSolution(SystemProfile profile, double omega_bar, double hbar, DenseSolution state);

  const SystemProfile& profile() const { return profile_; }
  double omega_bar() const { return omega_bar_; }
  double hbar() const { return hbar_; }
  double t_front() const { return state_.t_front(); }
  double t_back() const { return state_.t_back(); }
  const DenseSolution& state() const { return state_; }

  double rho(double t) const;
  double rho_dot(double t) const;
  double rho_ddot(double t) const;
  double tau(double t) const;
  double tau_dot(double t) const;
  double tau_ddot(double t) const;
  double tau_dddot(double t) const;

 private:
  SystemProfile profile_;
  double omega_bar_;
  double hbar_;
  DenseSolution state_;
};

EmpSolution solve_emp(const SystemProfile& p, double omega_bar, TimeSpan span,
                      const EmpOptions& opts = {});
EmpSolution solve_emp(const SystemProfile& p, double omega_bar, TimeSpan span,
                      double rho0, double rho_dot0, double tau0, double rtol);

// Recomputes omega_bar^2 from the solved system at n_samples interior knots;
// returns (mean of the estimates, max relative deviation from sol.omega_bar^2).
std::pair<double, double> check_omega_bar(const EmpSolution& sol, int n_samples);

struct EmpCheckReport {
  double max_constraint_dev = 0.0;      // |tau_dot rho^2 exp(lam) - 1| over knots
  double max_omega_bar_rel_dev = 0.0;   // from check_omega_bar
  double mean_omega_bar_sq = 0.0;
  bool tau_monotone = false;
  bool rho_positive = false;
  bool pass = false;
};

EmpCheckReport verify_emp(const EmpSolution& sol);

// Splits omega^2(t) into (tau_dot^2 omega_bar^2, S/2) with S the Schwarzian
// derivative of tau; only meaningful without friction.
std::pair<double, double> schwarzian_decompose(const EmpSolution& sol, double t);

// Residual of omega^2(t) against the f-form consistency condition with
// f = tau_dot^(1/2) sec(omega_bar tau); zero on an exactly solved system.
double junker_inomata_condition(const EmpSolution& sol, double t);

}  // namespace quadprop
