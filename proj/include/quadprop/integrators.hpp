#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace quadprop {

struct TimeSpan {
  double t0;
  double t1;
};

/// Right-hand side of y' = f(t, y); writes the derivative into dydt (same size as y).
using RhsFn = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

struct IvpOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = 0.0;  // 0 means unrestricted
  std::size_t max_steps = 2000000;
};

/// Piecewise-polynomial solution of an initial-value problem.
///
/// Knots are the accepted integrator steps; states and right-hand-side values are
/// stored at every knot. Solutions produced by integrate_ivp carry the Dormand-Prince
/// fourth-order dense-output polynomial per interval; hand-built solutions (knots plus
/// derivatives only) interpolate with a cubic Hermite. In both cases the interpolant
/// reproduces the stored knot values and derivatives exactly.
class DenseSolution {
 public:
  enum class Interp { cubic_hermite, rk_dense };

  DenseSolution() = default;

  /// Build a cubic-Hermite solution from knots, states and derivatives.
  DenseSolution(std::vector<double> ts, std::vector<std::vector<double>> ys,
                std::vector<std::vector<double>> fs);

  std::size_t dim() const { return dim_; }
  std::size_t knot_count() const { return ts_.size(); }
  double t_front() const;
  double t_back() const;
  Interp interp() const { return interp_; }

  const std::vector<double>& times() const { return ts_; }
  const std::vector<double>& state(std::size_t i) const { return ys_[i]; }
  const std::vector<double>& deriv(std::size_t i) const { return fs_[i]; }

  /// Interpolated state component at time t (throws std::out_of_range outside the span).
  double value(double t, std::size_t comp) const;
  std::vector<double> value(double t) const;
  /// Time derivative of the interpolant.
  double derivative(double t, std::size_t comp) const;

 private:
  friend DenseSolution integrate_ivp(const RhsFn&, std::vector<double>, TimeSpan,
                                     const IvpOptions&);

  std::size_t locate(double t) const;

  std::vector<double> ts_;
  std::vector<std::vector<double>> ys_;
  std::vector<std::vector<double>> fs_;
  // rk_dense: contribution vectors of the quartic dense polynomial, one set per interval.
  std::vector<std::vector<double>> rc3_, rc4_, rc5_;
  std::size_t dim_ = 0;
  Interp interp_ = Interp::cubic_hermite;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) over a forward span.
///
/// Error control is per step on the weighted RMS norm with weights
/// atol + rtol * max(|y_before|, |y_after|). Throws std::invalid_argument for an empty
/// or backward span and std::runtime_error on step-size underflow, non-finite
/// right-hand sides, or step-budget exhaustion. Exceptions thrown by the right-hand
/// side propagate to the caller.
DenseSolution integrate_ivp(const RhsFn& rhs, std::vector<double> y0, TimeSpan span,
                            const IvpOptions& opts = {});
DenseSolution integrate_ivp(const RhsFn& rhs, std::vector<double> y0, TimeSpan span,
                            double rtol, double atol);

/// Root of a continuous scalar function on a sign-changing bracket [a, b].
///
/// Brent-style combination of bisection with secant / inverse-quadratic steps.
/// Throws std::invalid_argument if f(a) and f(b) have the same sign.
double find_root(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

/// Adaptive complex-valued quadrature of f over the finite interval [a, b].
///
/// Gauss-Kronrod 7-15 panels with bisection of the worst panel until the summed error
/// estimate drops below tol (absolute). Throws std::runtime_error if the tolerance is
/// not reached within the refinement budget.
std::complex<double> quad_complex(const std::function<std::complex<double>(double)>& f,
                                  double a, double b, double tol = 1e-10);

}  // namespace quadprop
