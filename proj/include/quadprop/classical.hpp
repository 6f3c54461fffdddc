#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "quadprop/emp.hpp"

namespace quadprop {

// Homogeneous fundamental solutions anchored at t0 with u1(t0) = u2'(t0) = 0,
// u1'(t0) = u2(t0) = 1, plus an optional particular solution u_p.
struct FundamentalPair {
  TimeFn u1, u1_dot;
  TimeFn u2, u2_dot;
  TimeFn u_p, u_p_dot;  // null means no driving
  double t0 = 0.0;

  bool has_particular() const { return static_cast<bool>(u_p); }
};

FundamentalPair fundamental_pair(const EmpSolution& sol);
FundamentalPair with_particular(FundamentalPair pair, TimeFn u_p, TimeFn u_p_dot);

struct MapPoint {
  double X;
  double T;
};

struct SpacePoint {
  double x;
  double t;
};

struct PhasePoint {
  double x;
  double x_dot;
};

struct LiftPoint {
  double x;
  double t;
  double s;
};

// Trajectory-straightening map T = u1/u2, X = (x - u_p)/u2.
MapPoint arnold_map(const FundamentalPair& pair, double x, double t);

// T = tan(omega_bar tau)/omega_bar, X = x exp(lam/2) tau_dot^(1/2) sec(omega_bar tau).
MapPoint niederer_forward(const EmpSolution& sol, double x, double t);

// Inverse on branch k: tau = (arctan(omega_bar T) + k pi)/omega_bar, with t
// recovered from the monotone tau grid and x scaled back through the same
// conformal factor, so forward(inverse) round-trips on every branch.
SpacePoint niederer_inverse(const EmpSolution& sol, double X, double T, int k);

// x(t) = rho [a sin(omega_bar tau)/omega_bar + b cos(omega_bar tau)], which
// equals a u1 + b u2; velocity from the analytic derivative.
PhasePoint trajectory(const EmpSolution& sol, double a, double b, double t);

using PathFn = std::function<PhasePoint(double)>;

// Quadrature of (1/2) exp(lam) (x_dot^2 - omega^2 x^2) along the path.
double classical_action(const SystemProfile& p, const PathFn& path, double t1, double t2);

// Vertical coordinate of the lifted trajectory: s = s0 - action from t0 to t.
LiftPoint bargmann_lift(const EmpSolution& sol, double a, double b, double s0, double t);

struct CausticChart {
  std::vector<std::pair<int, double>> caustics;    // (l, t_l), tau(t_l) = pi l / omega_bar
  std::vector<std::pair<int, double>> boundaries;  // (k, r_k), tau(r_k) = (k+1/2) pi / omega_bar
  double omega_bar = 1.0;
};

// All caustics and map-domain boundaries inside the solved span, sorted,
// with the interlacing r_k < t_{k+1} < r_{k+1} asserted.
CausticChart locate_caustics(const EmpSolution& sol);

std::string to_json(const CausticChart& chart);

}  // namespace quadprop
