#include "quadprop/profiles.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace quadprop {

namespace {

double require_param(const std::map<std::string, double>& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end())
    throw std::invalid_argument("make_profile: missing parameter '" + name + "'");
  return it->second;
}

TimeFn constant_fn(double v) {
  return [v](double) { return v; };
}

}  // namespace

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::caldirola_kanai: return "caldirola_kanai";
    case ProfileKind::mathieu: return "mathieu";
    case ProfileKind::custom: return "custom";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "constant") return ProfileKind::constant;
  if (name == "caldirola_kanai") return ProfileKind::caldirola_kanai;
  if (name == "mathieu") return ProfileKind::mathieu;
  if (name == "custom") return ProfileKind::custom;
  throw std::invalid_argument("unknown profile kind '" + name + "'");
}

SystemProfile make_profile(ProfileKind kind, const std::map<std::string, double>& params) {
  SystemProfile p;
  p.kind = kind;
  p.params = params;
  switch (kind) {
    case ProfileKind::constant:
    case ProfileKind::caldirola_kanai: {
      const double omega0 = require_param(params, "omega0");
      double lambda0 = 0.0;
      if (kind == ProfileKind::caldirola_kanai) {
        lambda0 = require_param(params, "lambda0");
      } else if (auto it = params.find("lambda0"); it != params.end()) {
        lambda0 = it->second;
      }
      if (lambda0 < 0) throw std::invalid_argument("make_profile: lambda0 < 0");
      p.params["omega0"] = omega0;
      p.params["lambda0"] = lambda0;
      p.omega_sq = constant_fn(omega0 * omega0);
      p.lam = [lambda0](double t) { return lambda0 * t; };
      p.lam_dot = constant_fn(lambda0);
      p.lam_ddot = constant_fn(0.0);
      break;
    }
    case ProfileKind::mathieu: {
      const double a = require_param(params, "a");
      const double q = require_param(params, "q");
      p.omega_sq = [a, q](double t) { return a - 2.0 * q * std::cos(2.0 * t); };
      p.lam = constant_fn(0.0);
      p.lam_dot = constant_fn(0.0);
      p.lam_ddot = constant_fn(0.0);
      break;
    }
    case ProfileKind::custom:
      throw std::invalid_argument("make_profile: use make_custom_profile for custom kinds");
  }
  return p;
}

SystemProfile make_custom_profile(TimeFn omega_sq, TimeFn lam, TimeFn lam_dot,
                                  TimeFn lam_ddot) {
  if (!omega_sq || !lam)
    throw std::invalid_argument("make_custom_profile: omega_sq and lam are required");
  SystemProfile p;
  p.kind = ProfileKind::custom;
  p.omega_sq = std::move(omega_sq);
  p.lam = std::move(lam);
  constexpr double h = 1e-6;
  if (lam_dot) {
    p.lam_dot = std::move(lam_dot);
  } else {
    TimeFn f = p.lam;
    p.lam_dot = [f](double t) { return (f(t + h) - f(t - h)) / (2 * h); };
  }
  if (lam_ddot) {
    p.lam_ddot = std::move(lam_ddot);
  } else {
    TimeFn f = p.lam;
    p.lam_ddot = [f](double t) { return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h); };
  }
  return p;
}

SystemProfile with_force(SystemProfile p, TimeFn force) {
  p.force = std::move(force);
  return p;
}

double shifted_frequency(const SystemProfile& p, double t) {
  const double ld = p.lam_dot(t);
  return p.omega_sq(t) - 0.25 * ld * ld - 0.5 * p.lam_ddot(t);
}

DrivingRemoval remove_driving_force(const SystemProfile& p, double t0, double t1,
                                    double tol) {
  if (!(t1 > t0)) throw std::invalid_argument("remove_driving_force: need t0 < t1");
  DrivingRemoval out;
  out.homogeneous = p;
  out.homogeneous.force = nullptr;
  if (!p.has_force()) {
    out.shift = [](double) { return 0.0; };
    out.shift_dot = [](double) { return 0.0; };
    return out;
  }
  const SystemProfile& prof = p;
  RhsFn rhs = [prof](double t, const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[1];
    dy[1] = prof.force(t) - prof.lam_dot(t) * y[1] - prof.omega_sq(t) * y[0];
  };
  IvpOptions opts;
  opts.rtol = tol;
  opts.atol = tol * 1e-2;
  auto sol = std::make_shared<DenseSolution>(
      integrate_ivp(rhs, {0.0, 0.0}, {t0, t1}, opts));
  out.shift = [sol](double t) { return sol->value(t, 0); };
  out.shift_dot = [sol](double t) { return sol->value(t, 1); };
  return out;
}

std::pair<double, double> time_reparametrize(const SystemProfile& p, double t) {
  if (p.kind != ProfileKind::constant && p.kind != ProfileKind::caldirola_kanai)
    throw std::invalid_argument(
        "time_reparametrize: requires a constant-frequency profile with lam = lambda0*t");
  const double omega0 = p.params.at("omega0");
  const double lambda0 = p.params.at("lambda0");
  if (lambda0 == 0)
    throw std::invalid_argument("time_reparametrize: degenerate for lambda0 = 0");
  const double t_tilde = -std::exp(-lambda0 * t) / lambda0;
  const double omega_tilde_sq =
      omega0 * omega0 / (t_tilde * t_tilde * lambda0 * lambda0);
  return {t_tilde, omega_tilde_sq};
}

}  // namespace quadprop
