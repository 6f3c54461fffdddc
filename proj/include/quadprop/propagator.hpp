#pragma once

#include <complex>
#include <vector>

#include "quadprop/classical.hpp"

namespace quadprop {

// One kernel evaluation. Outside caustics amplitude = modulus * exp(i phase)
// with phase reduced into (-pi, pi]. At a caustic the kernel degenerates to a
// delta distribution: at_caustic is set, modulus carries an infinity sentinel
// and amplitude is meaningless; use caustic_propagator for the descriptor.
struct PropagatorValue {
  std::complex<double> amplitude{0.0, 0.0};
  int maslov_index = 0;
  bool at_caustic = false;
  double modulus = 0.0;
  double phase = 0.0;
};

// Degenerate kernel at a caustic: phase factor, mirror parity and the scales
// of the delta support x1 * scale1 = (-1)^ell * x2 * scale2.
struct CausticKernel {
  int ell = 0;
  std::complex<double> phase{1.0, 0.0};  // exp(-i pi ell / 2), exact
  double mirror_sign = 1.0;              // (-1)^ell
  double weight = 1.0;                   // sqrt(scale1 * scale2)
  double scale1 = 1.0;                   // exp(lam1/2) tau_dot1^(1/2)
  double scale2 = 1.0;

  // Source point whose amplitude lands at x2.
  double mirror_source(double x2) const { return mirror_sign * (scale2 / scale1) * x2; }
};

struct WavePacket {
  std::vector<double> x;                  // strictly increasing uniform grid
  std::vector<std::complex<double>> psi;  // amplitude per grid point
  double time = 0.0;
  double hbar = 1.0;
};

PropagatorValue free_propagator(double X2, double T2, double X1, double T1, double hbar);

// Exact kernel for constant omega0 with lam = lambda0 t; requires the
// underdamped regime omega0^2 - lambda0^2/4 > 0.
PropagatorValue constant_propagator(double omega0, double lambda0, double x2, double t2,
                                    double x1, double t1, double hbar);

// Exact kernel for pure friction (omega0 = 0, lambda0 > 0).
PropagatorValue dissipative_propagator(double lambda0, double x2, double t2, double x1,
                                       double t1, double hbar);

// Count of completed half-periods: floor(omega_bar (tau(t2) - tau(t1)) / pi).
int maslov_index(const EmpSolution& sol, double t1, double t2);

// Kernel for the solved time-dependent system, phase assembled explicitly
// from the Maslov term; routes to the caustic descriptor when
// |sin(omega_bar delta-tau)| < 1e-8.
PropagatorValue general_propagator(const EmpSolution& sol, double x2, double t2, double x1,
                                   double t1);

CausticKernel caustic_propagator(const EmpSolution& sol, double t1, double t2);

// Unit phase of the kernel along the classical path with initial slope a
// launched from (0, t_front); hbar may differ from the solution's.
std::complex<double> phase_factor(const EmpSolution& sol, double a, double t, double hbar);

// |K(x, t | 0, t_front)|^2, position independent; +infinity at caustics.
double probability_density(const EmpSolution& sol, double t);

WavePacket make_gaussian_packet(std::vector<double> grid, double center, double width,
                                double momentum, double hbar, double time);

// Trapezoid L2 norm of the packet.
double packet_norm(const WavePacket& packet);

// psi(x2, t2) = integral of K(x2, t2 | x1, t1) psi(x1, t1) dx1 on the packet
// grid; at caustics applies the exact mirror map instead.
WavePacket evolve_wavepacket(const EmpSolution& sol, const WavePacket& packet, double t2);

// Independent semiclassical cross-check: shoots the classical path, computes
// the action by quadrature and the mixed endpoint derivative by central
// differences, and assembles the van Vleck amplitude on the principal branch.
std::complex<double> vanvleck_oracle(const SystemProfile& p, double x2, double t2,
                                     double x1, double t1, double hbar);

}  // namespace quadprop
