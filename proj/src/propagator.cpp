#include "quadprop/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace quadprop {

namespace {

constexpr double kCausticSinThreshold = 1e-8;

double wrap_phase(double p) {
  p = std::fmod(p, 2.0 * M_PI);
  if (p > M_PI)
    p -= 2.0 * M_PI;
  else if (p <= -M_PI)
    p += 2.0 * M_PI;
  return p;
}

// exp(-i pi ell / 2), exact.
std::complex<double> quarter_turn(int ell) {
  switch (((ell % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

struct KernelGeometry {
  double dtau_scaled = 0.0;  // omega_bar * (tau(t2) - tau(t1))
  double sn = 0.0, cs = 1.0;
  double A1 = 1.0, A2 = 1.0;  // exp(lam_i) tau_dot_i
  double cross = 1.0;         // exp((lam1+lam2)/2) sqrt(tau_dot1 tau_dot2)
  double rho1 = 1.0, rho2 = 1.0;
  int ell = 0;
  bool at_caustic = false;
};

KernelGeometry kernel_geometry(const EmpSolution& sol, double t2, double t1) {
  KernelGeometry g;
  const double wb = sol.omega_bar();
  g.dtau_scaled = wb * (sol.tau(t2) - sol.tau(t1));
  g.sn = std::sin(g.dtau_scaled);
  g.cs = std::cos(g.dtau_scaled);
  const double lam1 = sol.profile().lam(t1), lam2 = sol.profile().lam(t2);
  const double td1 = sol.tau_dot(t1), td2 = sol.tau_dot(t2);
  g.A1 = std::exp(lam1) * td1;
  g.A2 = std::exp(lam2) * td2;
  g.cross = std::exp(0.5 * (lam1 + lam2)) * std::sqrt(td1 * td2);
  g.rho1 = sol.rho(t1);
  g.rho2 = sol.rho(t2);
  g.at_caustic = std::abs(g.sn) < kCausticSinThreshold;
  g.ell = g.at_caustic ? static_cast<int>(std::lround(g.dtau_scaled / M_PI))
                       : static_cast<int>(std::floor(g.dtau_scaled / M_PI));
  return g;
}

PropagatorValue kernel_value(const EmpSolution& sol, double x2, double t2, double x1,
                             double t1, double hbar) {
  const KernelGeometry g = kernel_geometry(sol, t2, t1);
  PropagatorValue v;
  v.maslov_index = g.ell;
  if (g.at_caustic) {
    v.at_caustic = true;
    v.modulus = std::numeric_limits<double>::infinity();
    return v;
  }
  const double wb = sol.omega_bar();
  v.modulus = std::sqrt(wb * g.cross / (2.0 * M_PI * hbar * std::abs(g.sn)));
  const double action = wb / (2.0 * g.sn) *
                        ((x2 * x2 * g.A2 + x1 * x1 * g.A1) * g.cs - 2.0 * x2 * x1 * g.cross);
  v.phase = wrap_phase(-0.5 * M_PI * (0.5 + g.ell) + action / hbar);
  v.amplitude = std::polar(v.modulus, v.phase);
  return v;
}

}  // namespace

PropagatorValue free_propagator(double X2, double T2, double X1, double T1, double hbar) {
  if (!(hbar > 0)) throw std::invalid_argument("free_propagator: hbar must be positive");
  const double dT = T2 - T1;
  PropagatorValue v;
  if (dT == 0.0) {
    v.at_caustic = true;
    v.modulus = std::numeric_limits<double>::infinity();
    return v;
  }
  v.maslov_index = dT > 0 ? 0 : -1;
  v.modulus = 1.0 / std::sqrt(2.0 * M_PI * hbar * std::abs(dT));
  const double dX = X2 - X1;
  v.phase = wrap_phase(-0.25 * M_PI * (dT > 0 ? 1.0 : -1.0) + dX * dX / (2.0 * hbar * dT));
  v.amplitude = std::polar(v.modulus, v.phase);
  return v;
}

PropagatorValue constant_propagator(double omega0, double lambda0, double x2, double t2,
                                    double x1, double t1, double hbar) {
  if (!(hbar > 0)) throw std::invalid_argument("constant_propagator: hbar must be positive");
  const double Omega_sq = omega0 * omega0 - 0.25 * lambda0 * lambda0;
  if (!(Omega_sq > 0))
    throw std::invalid_argument(
        "constant_propagator: overdamped regime (omega0^2 - lambda0^2/4 <= 0)");
  const double Omega = std::sqrt(Omega_sq);
  const double theta = Omega * (t2 - t1);
  const double sn = std::sin(theta), cs = std::cos(theta);
  PropagatorValue v;
  if (std::abs(sn) < kCausticSinThreshold) {
    v.at_caustic = true;
    v.maslov_index = static_cast<int>(std::lround(theta / M_PI));
    v.modulus = std::numeric_limits<double>::infinity();
    return v;
  }
  v.maslov_index = static_cast<int>(std::floor(theta / M_PI));
  const double e2 = std::exp(lambda0 * t2), e1 = std::exp(lambda0 * t1);
  const double cross = std::exp(0.5 * lambda0 * (t2 + t1));
  v.modulus = std::sqrt(Omega * cross / (2.0 * M_PI * hbar * std::abs(sn)));
  const double action =
      Omega / (2.0 * sn) * ((x2 * x2 * e2 + x1 * x1 * e1) * cs - 2.0 * x2 * x1 * cross);
  v.phase = wrap_phase(-0.25 * M_PI * (1.0 + 2.0 * v.maslov_index) + action / hbar);
  v.amplitude = std::polar(v.modulus, v.phase);
  return v;
}

PropagatorValue dissipative_propagator(double lambda0, double x2, double t2, double x1,
                                       double t1, double hbar) {
  if (!(hbar > 0))
    throw std::invalid_argument("dissipative_propagator: hbar must be positive");
  if (!(lambda0 > 0))
    throw std::invalid_argument("dissipative_propagator: lambda0 must be positive");
  if (t2 == t1) throw std::invalid_argument("dissipative_propagator: t2 = t1");
  const double D = std::exp(-lambda0 * t1) - std::exp(-lambda0 * t2);
  PropagatorValue v;
  v.maslov_index = D > 0 ? 0 : -1;
  v.modulus = std::sqrt(lambda0 / (2.0 * M_PI * hbar * std::abs(D)));
  const double dx = x2 - x1;
  v.phase = wrap_phase(-0.25 * M_PI * (D > 0 ? 1.0 : -1.0) +
                       lambda0 * dx * dx / (2.0 * hbar * D));
  v.amplitude = std::polar(v.modulus, v.phase);
  return v;
}

int maslov_index(const EmpSolution& sol, double t1, double t2) {
  const double arg = sol.omega_bar() * (sol.tau(t2) - sol.tau(t1)) / M_PI;
  return static_cast<int>(std::floor(arg));
}

PropagatorValue general_propagator(const EmpSolution& sol, double x2, double t2, double x1,
                                   double t1) {
  return kernel_value(sol, x2, t2, x1, t1, sol.hbar());
}

CausticKernel caustic_propagator(const EmpSolution& sol, double t1, double t2) {
  const KernelGeometry g = kernel_geometry(sol, t2, t1);
  if (!g.at_caustic)
    throw std::invalid_argument("caustic_propagator: omega_bar delta-tau = " +
                                std::to_string(g.dtau_scaled) + " is not a caustic");
  CausticKernel k;
  k.ell = g.ell;
  k.phase = quarter_turn(g.ell);
  k.mirror_sign = (g.ell % 2 == 0) ? 1.0 : -1.0;
  // exp(lam/2) tau_dot^(1/2) = 1/rho by the constraint.
  k.scale1 = 1.0 / g.rho1;
  k.scale2 = 1.0 / g.rho2;
  k.weight = std::sqrt(k.scale1 * k.scale2);
  return k;
}

std::complex<double> phase_factor(const EmpSolution& sol, double a, double t, double hbar) {
  const double t0 = sol.t_front();
  const double x2 = trajectory(sol, a, 0.0, t).x;
  const PropagatorValue v = kernel_value(sol, x2, t, 0.0, t0, hbar);
  if (v.at_caustic)
    throw std::domain_error("phase_factor: t = " + std::to_string(t) +
                            " is at a caustic");
  return std::polar(1.0, v.phase);
}

double probability_density(const EmpSolution& sol, double t) {
  const KernelGeometry g = kernel_geometry(sol, t, sol.t_front());
  if (g.at_caustic) return std::numeric_limits<double>::infinity();
  return sol.omega_bar() * g.cross / (2.0 * M_PI * sol.hbar() * std::abs(g.sn));
}

WavePacket make_gaussian_packet(std::vector<double> grid, double center, double width,
                                double momentum, double hbar, double time) {
  if (grid.size() < 2) throw std::invalid_argument("make_gaussian_packet: need >= 2 points");
  if (!(width > 0)) throw std::invalid_argument("make_gaussian_packet: width must be positive");
  if (!(hbar > 0)) throw std::invalid_argument("make_gaussian_packet: hbar must be positive");
  const double h = grid[1] - grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double d = grid[i] - grid[i - 1];
    if (!(d > 0) || std::abs(d - h) > 1e-9 * std::abs(h))
      throw std::invalid_argument("make_gaussian_packet: grid must be uniform increasing");
  }
  WavePacket p;
  p.time = time;
  p.hbar = hbar;
  p.psi.reserve(grid.size());
  const double norm = std::pow(M_PI * width * width, -0.25);
  for (double x : grid) {
    const double u = (x - center) / width;
    p.psi.push_back(std::polar(norm * std::exp(-0.5 * u * u), momentum * x / hbar));
  }
  p.x = std::move(grid);
  return p;
}

double packet_norm(const WavePacket& packet) {
  if (packet.x.size() < 2 || packet.psi.size() != packet.x.size())
    throw std::invalid_argument("packet_norm: malformed packet");
  const double h = packet.x[1] - packet.x[0];
  double sum = 0.0;
  for (std::size_t i = 0; i < packet.x.size(); ++i) {
    const double w = (i == 0 || i + 1 == packet.x.size()) ? 0.5 : 1.0;
    sum += w * std::norm(packet.psi[i]);
  }
  return std::sqrt(sum * h);
}

namespace {

// Composite Simpson weights; odd interval counts close out with the 3/8 rule.
std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 3)
    throw std::invalid_argument("evolve_wavepacket: grid too small for quadrature");
  const std::size_t m = n - 1;
  std::size_t plain_end = m;
  bool tail = false;
  if (m % 2 == 1) {
    if (m < 3)
      throw std::invalid_argument("evolve_wavepacket: grid too small for quadrature");
    plain_end = m - 3;
    tail = true;
  }
  std::vector<double> w(n, 0.0);
  if (plain_end > 0) {
    w[0] += h / 3.0;
    w[plain_end] += h / 3.0;
    for (std::size_t j = 1; j < plain_end; ++j)
      w[j] += (j % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
  }
  if (tail) {
    w[plain_end] += 3.0 * h / 8.0;
    w[plain_end + 1] += 9.0 * h / 8.0;
    w[plain_end + 2] += 9.0 * h / 8.0;
    w[plain_end + 3] += 3.0 * h / 8.0;
  }
  return w;
}

// Catmull-Rom sample of a packet at an off-grid point; zero outside the grid.
std::complex<double> sample_packet(const WavePacket& p, double x) {
  const std::size_t n = p.x.size();
  const double h = p.x[1] - p.x[0];
  const double s = (x - p.x.front()) / h;
  if (s < 0.0 || s > double(n - 1)) return {0.0, 0.0};
  std::size_t i = static_cast<std::size_t>(std::floor(s));
  if (i >= n - 1) i = n - 2;
  const double t = s - double(i);
  auto at = [&](std::ptrdiff_t j) {
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 1);
    return p.psi[static_cast<std::size_t>(j)];
  };
  const std::complex<double> p0 = at(static_cast<std::ptrdiff_t>(i) - 1);
  const std::complex<double> p1 = at(static_cast<std::ptrdiff_t>(i));
  const std::complex<double> p2 = at(static_cast<std::ptrdiff_t>(i) + 1);
  const std::complex<double> p3 = at(static_cast<std::ptrdiff_t>(i) + 2);
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (p2 - p0) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (3.0 * p1 - p0 - 3.0 * p2 + p3) * t3);
}

}  // namespace

WavePacket evolve_wavepacket(const EmpSolution& sol, const WavePacket& packet, double t2) {
  const std::size_t n = packet.x.size();
  if (n < 2 || packet.psi.size() != n)
    throw std::invalid_argument("evolve_wavepacket: malformed packet");
  if (std::abs(packet.hbar - sol.hbar()) > 1e-12 * sol.hbar())
    throw std::invalid_argument("evolve_wavepacket: packet hbar differs from solution hbar");
  const double t1 = packet.time;
  const double hbar = sol.hbar();
  const double h = packet.x[1] - packet.x[0];

  WavePacket out;
  out.x = packet.x;
  out.psi.assign(n, {0.0, 0.0});
  out.time = t2;
  out.hbar = hbar;

  const KernelGeometry g = kernel_geometry(sol, t2, t1);
  if (g.at_caustic) {
    const CausticKernel k = caustic_propagator(sol, t1, t2);
    const double ratio = k.scale2 / k.scale1;
    const std::complex<double> factor = std::sqrt(ratio) * k.phase;
    const bool unit_ratio = std::abs(ratio - 1.0) < 1e-12;
    const double span = packet.x.back() - packet.x.front();
    const bool symmetric = std::abs(packet.x.front() + packet.x.back()) < 1e-12 * span;
    if (unit_ratio && (k.mirror_sign > 0 || symmetric)) {
      for (std::size_t j = 0; j < n; ++j)
        out.psi[j] = factor * (k.mirror_sign > 0 ? packet.psi[j] : packet.psi[n - 1 - j]);
    } else {
      for (std::size_t j = 0; j < n; ++j)
        out.psi[j] = factor * sample_packet(packet, k.mirror_source(packet.x[j]));
    }
    return out;
  }

  const double wb = sol.omega_bar();
  const double x_max = std::max(std::abs(packet.x.front()), std::abs(packet.x.back()));
  const double phase_rate =
      wb / (hbar * std::abs(g.sn)) * x_max * (g.A1 * std::abs(g.cs) + g.cross);
  if (h * phase_rate > 0.5 * M_PI)
    throw std::runtime_error(
        "evolve_wavepacket: grid too coarse to resolve the kernel oscillation "
        "(adjacent-point phase step " +
        std::to_string(h * phase_rate) + " rad)");

  const std::vector<double> w = simpson_weights(n, h);
  const double kappa = wb / (2.0 * hbar * g.sn);
  const double modulus = std::sqrt(wb * g.cross / (2.0 * M_PI * hbar * std::abs(g.sn)));
  const double base = -0.5 * M_PI * (0.5 + g.ell);

  std::vector<std::complex<double>> source(n);
  for (std::size_t j = 0; j < n; ++j)
    source[j] =
        w[j] * std::polar(1.0, kappa * g.A1 * g.cs * packet.x[j] * packet.x[j]) *
        packet.psi[j];

  const double couple = -2.0 * kappa * g.cross;
  for (std::size_t i = 0; i < n; ++i) {
    const double x2 = packet.x[i];
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j)
      acc += source[j] * std::polar(1.0, couple * x2 * packet.x[j]);
    out.psi[i] = acc * std::polar(modulus, base + kappa * g.A2 * g.cs * x2 * x2);
  }
  return out;
}

std::complex<double> vanvleck_oracle(const SystemProfile& p, double x2, double t2, double x1,
                                     double t1, double hbar) {
  if (!(hbar > 0)) throw std::invalid_argument("vanvleck_oracle: hbar must be positive");
  if (!(t2 > t1)) throw std::invalid_argument("vanvleck_oracle: need t1 < t2");

  RhsFn rhs = [&p](double t, const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[1];
    dy[1] = (p.has_force() ? p.force(t) : 0.0) - p.lam_dot(t) * y[1] -
            p.omega_sq(t) * y[0];
  };
  IvpOptions opts;
  opts.rtol = 1e-13;
  opts.atol = 1e-15;
  opts.h_max = 1e-2;
  const TimeSpan span{t1, t2};

  auto endpoint = [&](double a, double v0) {
    return integrate_ivp(rhs, {a, v0}, span, opts).value(t2, 0);
  };

  // The endpoint map is affine in the initial velocity; the basis run both
  // screens for conjugate points and seeds the shooting bracket.
  const double base0 = endpoint(x1, 0.0);
  const double base1 = endpoint(x1, 1.0);
  const double sensitivity = base1 - base0;
  if (std::abs(sensitivity) < 1e-8)
    throw std::domain_error("vanvleck_oracle: endpoints are conjugate (no unique path)");

  auto action_between = [&](double a, double b) {
    const double v_lin = (b - endpoint(a, 0.0)) / sensitivity;
    const double spread = std::max(1e-6, 1e-9 * std::abs(v_lin));
    const double v0 = find_root(
        [&](double v) { return endpoint(a, v) - b; }, v_lin - spread, v_lin + spread,
        1e-14);
    const DenseSolution path = integrate_ivp(rhs, {a, v0}, span, opts);
    PathFn path_fn = [&path](double t) {
      return PhasePoint{path.value(t, 0), path.value(t, 1)};
    };
    return classical_action(p, path_fn, t1, t2);
  };

  const double fd = 1e-4;
  const double mixed = (action_between(x1 + fd, x2 + fd) - action_between(x1 + fd, x2 - fd) -
                        action_between(x1 - fd, x2 + fd) +
                        action_between(x1 - fd, x2 - fd)) /
                       (4.0 * fd * fd);
  const double action = action_between(x1, x2);
  const std::complex<double> prefac =
      std::sqrt(std::complex<double>(0.0, mixed / (2.0 * M_PI * hbar)));
  return prefac * std::polar(1.0, action / hbar);
}

}  // namespace quadprop
