#include "quadprop/classical.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace quadprop {

namespace {

constexpr double kBoundaryGuard = 1e-9;  // |cos(omega_bar tau)| below this is singular
constexpr double kArnoldGuard = 1e-12;   // |u2| guard for the Arnold map

// Solves tau(t) = target on the monotone tau grid; assumes target within range.
double time_at_tau(const EmpSolution& sol, double target, double root_tol = 1e-12) {
  const auto& state = sol.state();
  const auto& times = state.times();
  const std::size_t n = times.size();
  const double tau_front = state.state(0)[2];
  const double tau_back = state.state(n - 1)[2];
  const double slack = 1e-12 * std::max(1.0, std::abs(tau_back - tau_front));
  if (target < tau_front - slack || target > tau_back + slack)
    throw std::out_of_range("required time outside the solved span (tau = " +
                            std::to_string(target) + ")");
  if (std::abs(target - tau_front) <= slack) return times.front();
  if (std::abs(target - tau_back) <= slack) return times.back();
  // Binary search for the straddling knot interval.
  std::size_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (state.state(mid)[2] <= target)
      lo = mid;
    else
      hi = mid;
  }
  if (std::abs(state.state(lo)[2] - target) <= slack) return times[lo];
  if (std::abs(state.state(hi)[2] - target) <= slack) return times[hi];
  return find_root([&sol, target](double t) { return sol.tau(t) - target; }, times[lo],
                   times[hi], root_tol);
}

}  // namespace

FundamentalPair fundamental_pair(const EmpSolution& sol) {
  auto s = std::make_shared<const EmpSolution>(sol);
  const double wb = s->omega_bar();
  FundamentalPair pair;
  pair.t0 = s->t_front();
  pair.u1 = [s, wb](double t) { return s->rho(t) * std::sin(wb * s->tau(t)) / wb; };
  pair.u1_dot = [s, wb](double t) {
    const double ph = wb * s->tau(t);
    return s->rho_dot(t) * std::sin(ph) / wb + s->rho(t) * s->tau_dot(t) * std::cos(ph);
  };
  pair.u2 = [s, wb](double t) { return s->rho(t) * std::cos(wb * s->tau(t)); };
  pair.u2_dot = [s, wb](double t) {
    const double ph = wb * s->tau(t);
    return s->rho_dot(t) * std::cos(ph) - s->rho(t) * s->tau_dot(t) * wb * std::sin(ph);
  };
  return pair;
}

FundamentalPair with_particular(FundamentalPair pair, TimeFn u_p, TimeFn u_p_dot) {
  if (!u_p || !u_p_dot)
    throw std::invalid_argument("with_particular: both u_p and u_p_dot are required");
  pair.u_p = std::move(u_p);
  pair.u_p_dot = std::move(u_p_dot);
  return pair;
}

MapPoint arnold_map(const FundamentalPair& pair, double x, double t) {
  const double u2 = pair.u2(t);
  if (std::abs(u2) <= kArnoldGuard)
    throw std::domain_error("arnold_map: u2 vanishes at t = " + std::to_string(t) +
                            " (map-domain boundary)");
  const double up = pair.has_particular() ? pair.u_p(t) : 0.0;
  return {(x - up) / u2, pair.u1(t) / u2};
}

MapPoint niederer_forward(const EmpSolution& sol, double x, double t) {
  const double wb = sol.omega_bar();
  const double ph = wb * sol.tau(t);
  const double c = std::cos(ph);
  if (std::abs(c) < kBoundaryGuard)
    throw std::domain_error("niederer_forward: t = " + std::to_string(t) +
                            " is a map-domain boundary (cos(omega_bar tau) ~ 0)");
  // exp(lam/2) tau_dot^(1/2) = 1/rho by the constraint.
  const double scale = 1.0 / sol.rho(t);
  return {x * scale / c, std::tan(ph) / wb};
}

SpacePoint niederer_inverse(const EmpSolution& sol, double X, double T, int k) {
  const double wb = sol.omega_bar();
  const double tau = (std::atan(wb * T) + k * M_PI) / wb;
  const double t = time_at_tau(sol, tau);
  const double x = X * sol.rho(t) * std::cos(wb * tau);
  return {x, t};
}

PhasePoint trajectory(const EmpSolution& sol, double a, double b, double t) {
  const double wb = sol.omega_bar();
  const double ph = wb * sol.tau(t);
  const double sn = std::sin(ph), cs = std::cos(ph);
  const double rho = sol.rho(t), rho_dot = sol.rho_dot(t), tau_dot = sol.tau_dot(t);
  const double osc = a * sn / wb + b * cs;
  const double osc_dtau = a * cs - b * wb * sn;
  return {rho * osc, rho_dot * osc + rho * tau_dot * osc_dtau};
}

double classical_action(const SystemProfile& p, const PathFn& path, double t1, double t2) {
  if (t2 < t1) throw std::invalid_argument("classical_action: need t1 <= t2");
  if (t1 == t2) return 0.0;
  auto lagrangian = [&p, &path](double t) {
    const PhasePoint ph = path(t);
    return std::complex<double>(
        0.5 * std::exp(p.lam(t)) *
            (ph.x_dot * ph.x_dot - p.omega_sq(t) * ph.x * ph.x),
        0.0);
  };
  return quad_complex(lagrangian, t1, t2, 1e-12).real();
}

LiftPoint bargmann_lift(const EmpSolution& sol, double a, double b, double s0, double t) {
  const PhasePoint end = trajectory(sol, a, b, t);
  PathFn path = [&sol, a, b](double u) { return trajectory(sol, a, b, u); };
  const double action = classical_action(sol.profile(), path, sol.t_front(), t);
  return {end.x, t, s0 - action};
}

CausticChart locate_caustics(const EmpSolution& sol) {
  CausticChart chart;
  chart.omega_bar = sol.omega_bar();
  const auto& state = sol.state();
  const double tau_lo = state.state(0)[2];
  const double tau_hi = state.state(state.knot_count() - 1)[2];
  const double wb = sol.omega_bar();

  const long l_lo = std::lround(std::ceil(wb * tau_lo / M_PI - 1e-12));
  const long l_hi = std::lround(std::floor(wb * tau_hi / M_PI + 1e-12));
  for (long l = l_lo; l <= l_hi; ++l) {
    const double target = M_PI * double(l) / wb;
    if (target < tau_lo - 1e-12 || target > tau_hi + 1e-12) continue;
    chart.caustics.emplace_back(static_cast<int>(l),
                                time_at_tau(sol, std::clamp(target, tau_lo, tau_hi)));
  }
  const long k_lo = std::lround(std::ceil(wb * tau_lo / M_PI - 0.5 - 1e-12));
  const long k_hi = std::lround(std::floor(wb * tau_hi / M_PI - 0.5 + 1e-12));
  for (long k = k_lo; k <= k_hi; ++k) {
    const double target = (double(k) + 0.5) * M_PI / wb;
    if (target < tau_lo - 1e-12 || target > tau_hi + 1e-12) continue;
    chart.boundaries.emplace_back(static_cast<int>(k),
                                  time_at_tau(sol, std::clamp(target, tau_lo, tau_hi)));
  }

  // Interlacing r_k < t_{k+1} < r_{k+1} for every stored consecutive run.
  for (const auto& [k, r] : chart.boundaries) {
    const auto caustic = std::find_if(chart.caustics.begin(), chart.caustics.end(),
                                      [k = k](const auto& c) { return c.first == k + 1; });
    if (caustic == chart.caustics.end()) continue;
    const auto next = std::find_if(chart.boundaries.begin(), chart.boundaries.end(),
                                   [k = k](const auto& b) { return b.first == k + 1; });
    const bool below_ok = r < caustic->second;
    const bool above_ok = next == chart.boundaries.end() || caustic->second < next->second;
    if (!below_ok || !above_ok)
      throw std::runtime_error("locate_caustics: interlacing violated near t = " +
                               std::to_string(caustic->second));
  }
  return chart;
}

std::string to_json(const CausticChart& chart) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"omega_bar\": " << chart.omega_bar << ", \"caustics\": [";
  for (std::size_t i = 0; i < chart.caustics.size(); ++i) {
    if (i) os << ", ";
    os << "{\"l\": " << chart.caustics[i].first << ", \"t\": " << chart.caustics[i].second
       << "}";
  }
  os << "], \"boundaries\": [";
  for (std::size_t i = 0; i < chart.boundaries.size(); ++i) {
    if (i) os << ", ";
    os << "{\"k\": " << chart.boundaries[i].first
       << ", \"r\": " << chart.boundaries[i].second << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace quadprop
