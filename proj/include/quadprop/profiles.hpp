#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>

#include "quadprop/integrators.hpp"

namespace quadprop {

using TimeFn = std::function<double(double)>;

enum class ProfileKind { constant, caldirola_kanai, mathieu, custom };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

// A quadratic system: frequency-squared, friction exponent with derivatives,
// and an optional driving force. Immutable after construction.
struct SystemProfile {
  TimeFn omega_sq;
  TimeFn lam;
  TimeFn lam_dot;
  TimeFn lam_ddot;
  TimeFn force;  // null means no driving
  ProfileKind kind = ProfileKind::custom;
  std::map<std::string, double> params;

  bool has_force() const { return static_cast<bool>(force); }
};

// Built-in kinds. constant/caldirola_kanai take omega0 (and lambda0, which
// defaults to 0 for constant and is required for caldirola_kanai); mathieu
// takes a and q.
SystemProfile make_profile(ProfileKind kind, const std::map<std::string, double>& params);

// User-supplied callables. Missing lam_dot/lam_ddot fall back to centered
// finite differences of lam with h = 1e-6.
SystemProfile make_custom_profile(TimeFn omega_sq, TimeFn lam, TimeFn lam_dot = nullptr,
                                  TimeFn lam_ddot = nullptr);

SystemProfile with_force(SystemProfile p, TimeFn force);

// Friction-free presentation: Omega^2(t) = omega^2(t) - lam_dot^2/4 - lam_ddot/2.
double shifted_frequency(const SystemProfile& p, double t);

struct DrivingRemoval {
  SystemProfile homogeneous;  // same profile with the force cleared
  TimeFn shift;               // particular solution h(t), h(t0) = h'(t0) = 0
  TimeFn shift_dot;
};

// Splits off a particular solution of the forced equation so that callers can
// work with the homogeneous system and map back via x = x_forced - h.
DrivingRemoval remove_driving_force(const SystemProfile& p, double t0, double t1,
                                    double tol = 1e-10);

// For lam = lambda0*t with constant omega0: the equivalent presentation with
// unit friction removed, t_tilde = -exp(-lambda0*t)/lambda0 and
// Omega_tilde^2 = omega0^2/(t_tilde^2 lambda0^2). Returns (t_tilde, Omega_tilde^2).
std::pair<double, double> time_reparametrize(const SystemProfile& p, double t);

}  // namespace quadprop
