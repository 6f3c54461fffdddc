#include "quadprop/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace quadprop {

namespace {

std::string at_time(double t) { return " at t = " + std::to_string(t); }

}  // namespace

DenseSolution::DenseSolution(std::vector<double> ts, std::vector<std::vector<double>> ys,
                             std::vector<std::vector<double>> fs)
    : ts_(std::move(ts)), ys_(std::move(ys)), fs_(std::move(fs)) {
  if (ts_.size() < 2 || ys_.size() != ts_.size() || fs_.size() != ts_.size())
    throw std::invalid_argument("DenseSolution: need matching knots, states, derivatives");
  for (std::size_t i = 1; i < ts_.size(); ++i)
    if (!(ts_[i] > ts_[i - 1]))
      throw std::invalid_argument("DenseSolution: knot times must be strictly increasing");
  dim_ = ys_.front().size();
  interp_ = Interp::cubic_hermite;
}

double DenseSolution::t_front() const {
  if (ts_.empty()) throw std::logic_error("DenseSolution: empty");
  return ts_.front();
}

double DenseSolution::t_back() const {
  if (ts_.empty()) throw std::logic_error("DenseSolution: empty");
  return ts_.back();
}

std::size_t DenseSolution::locate(double t) const {
  if (ts_.empty()) throw std::logic_error("DenseSolution: empty");
  const double lo = ts_.front(), hi = ts_.back();
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                       std::max({std::abs(lo), std::abs(hi), 1.0});
  if (t < lo - slack || t > hi + slack)
    throw std::out_of_range("DenseSolution: t = " + std::to_string(t) +
                            " outside span [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  std::size_t i = (it == ts_.begin()) ? 0 : std::size_t(it - ts_.begin()) - 1;
  if (i >= ts_.size() - 1) i = ts_.size() - 2;
  return i;
}

double DenseSolution::value(double t, std::size_t comp) const {
  const std::size_t i = locate(t);
  const double h = ts_[i + 1] - ts_[i];
  const double th = (t - ts_[i]) / h;
  if (th == 0.0) return ys_[i][comp];
  if (th == 1.0) return ys_[i + 1][comp];
  if (interp_ == Interp::rk_dense) {
    const double th1 = 1.0 - th;
    const double rc2 = ys_[i + 1][comp] - ys_[i][comp];
    return ys_[i][comp] +
           th * (rc2 + th1 * (rc3_[i][comp] + th * (rc4_[i][comp] + th1 * rc5_[i][comp])));
  }
  // cubic Hermite basis
  const double th2 = th * th, th3 = th2 * th;
  const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
  const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
  return h00 * ys_[i][comp] + h * h10 * fs_[i][comp] + h01 * ys_[i + 1][comp] +
         h * h11 * fs_[i + 1][comp];
}

std::vector<double> DenseSolution::value(double t) const {
  std::vector<double> out(dim_);
  for (std::size_t c = 0; c < dim_; ++c) out[c] = value(t, c);
  return out;
}

double DenseSolution::derivative(double t, std::size_t comp) const {
  const std::size_t i = locate(t);
  const double h = ts_[i + 1] - ts_[i];
  const double th = (t - ts_[i]) / h;
  if (th == 0.0) return fs_[i][comp];
  if (th == 1.0) return fs_[i + 1][comp];
  if (interp_ == Interp::rk_dense) {
    // d/dth of rc1 + rc2 th + rc3 th(1-th) + rc4 th^2(1-th) + rc5 th^2(1-th)^2
    const double rc2 = ys_[i + 1][comp] - ys_[i][comp];
    const double d = rc2 + rc3_[i][comp] * (1 - 2 * th) +
                     rc4_[i][comp] * th * (2 - 3 * th) +
                     rc5_[i][comp] * th * (2 - 6 * th + 4 * th * th);
    return d / h;
  }
  const double th2 = th * th;
  const double g00 = (6 * th2 - 6 * th) / h, g10 = 3 * th2 - 4 * th + 1;
  const double g01 = (-6 * th2 + 6 * th) / h, g11 = 3 * th2 - 2 * th;
  return g00 * ys_[i][comp] + g10 * fs_[i][comp] + g01 * ys_[i + 1][comp] +
         g11 * fs_[i + 1][comp];
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Embedded 4th-order error weights (b - bhat).
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace

DenseSolution integrate_ivp(const RhsFn& rhs, std::vector<double> y0, TimeSpan span,
                            const IvpOptions& opts) {
  if (!(span.t1 > span.t0))
    throw std::invalid_argument("integrate_ivp: span must satisfy t1 > t0");
  if (!(opts.rtol > 0) || !(opts.atol > 0))
    throw std::invalid_argument("integrate_ivp: tolerances must be positive");
  const std::size_t n = y0.size();
  if (n == 0) throw std::invalid_argument("integrate_ivp: empty state");

  DenseSolution sol;
  sol.dim_ = n;
  sol.interp_ = DenseSolution::Interp::rk_dense;

  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n);
  double t = span.t0;
  std::vector<double> y = std::move(y0);
  rhs(t, y, k1);
  for (double v : k1)
    if (!std::isfinite(v)) throw std::runtime_error("integrate_ivp: non-finite rhs" + at_time(t));

  const double span_len = span.t1 - span.t0;
  double h_cap = span_len;
  if (opts.h_max > 0) h_cap = std::min(h_cap, opts.h_max);

  // Initial step from the scale of y and f.
  double d0 = 0, dd1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = opts.atol + opts.rtol * std::abs(y[i]);
    d0 = std::max(d0, std::abs(y[i]) / sc);
    dd1 = std::max(dd1, std::abs(k1[i]) / sc);
  }
  double h = (dd1 > 1e-10) ? 0.01 * d0 / dd1 : 1e-6;
  h = std::min(std::max(h, 1e-10), h_cap);

  sol.ts_.push_back(t);
  sol.ys_.push_back(y);
  sol.fs_.push_back(k1);

  const double uround = std::numeric_limits<double>::epsilon();
  bool last_rejected = false;

  for (std::size_t step = 0;; ++step) {
    if (step >= opts.max_steps)
      throw std::runtime_error("integrate_ivp: step budget exhausted" + at_time(t));
    if (h < 16 * uround * std::max(std::abs(t), 1.0))
      throw std::runtime_error("integrate_ivp: step size underflow" + at_time(t));
    bool last = false;
    if (t + h >= span.t1 - 1e-14 * span_len) {
      h = span.t1 - t;
      last = true;
    }

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                            a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, y1, k7);

    double err = 0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(y1[i]) || !std::isfinite(k7[i])) {
        finite = false;
        break;
      }
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = finite ? std::sqrt(err / double(n)) : std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      // Accept: store dense coefficients for [t, t+h].
      std::vector<double> rc3(n), rc4(n), rc5(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        rc3[i] = bspl;
        rc4[i] = ydiff - h * k7[i] - bspl;
        rc5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                      d7 * k7[i]);
      }
      sol.rc3_.push_back(std::move(rc3));
      sol.rc4_.push_back(std::move(rc4));
      sol.rc5_.push_back(std::move(rc5));
      t += h;
      y.swap(y1);
      k1.swap(k7);  // FSAL
      sol.ts_.push_back(t);
      sol.ys_.push_back(y);
      sol.fs_.push_back(k1);
      if (last || t >= span.t1) break;
      double fac = 0.9 * std::pow(std::max(err, 1e-30), -0.2);
      fac = std::min(fac, last_rejected ? 1.0 : 5.0);
      fac = std::max(fac, 0.2);
      h = std::min(h * fac, h_cap);
      last_rejected = false;
    } else {
      if (!finite && h < 1e-12)
        throw std::runtime_error("integrate_ivp: non-finite rhs" + at_time(t));
      double fac = finite ? std::max(0.9 * std::pow(err, -0.2), 0.2) : 0.2;
      h *= fac;
      last_rejected = true;
    }
  }
  return sol;
}

DenseSolution integrate_ivp(const RhsFn& rhs, std::vector<double> y0, TimeSpan span,
                            double rtol, double atol) {
  IvpOptions opts;
  opts.rtol = rtol;
  opts.atol = atol;
  return integrate_ivp(rhs, std::move(y0), span, opts);
}

double find_root(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("find_root: tol must be positive");
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0))
    throw std::invalid_argument("find_root: no sign change on [" + std::to_string(a) +
                                ", " + std::to_string(b) + "]");
  // Brent's method.
  double c = a, fc = fa, d = b - a, e = d;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2 * eps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {  // secant
        p = 2 * xm * s;
        q = 1 - s;
      } else {  // inverse quadratic
        const double qq = fa / fc, r = fb / fc;
        p = s * (2 * xm * qq * (qq - r) - (b - a) * (r - 1));
        q = (qq - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2 * p < std::min(3 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  std::complex<double> integral;
  double err;
};

Panel gk15(const std::function<std::complex<double>(double)>& f, double a, double b) {
  const double hlgth = 0.5 * (b - a), centr = 0.5 * (a + b);
  const std::complex<double> fc = f(centr);
  std::complex<double> resk = wgk[7] * fc;
  std::complex<double> resg = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = hlgth * xgk[j];
    const std::complex<double> f1 = f(centr - dx), f2 = f(centr + dx);
    resk += wgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.integral = resk * hlgth;
  p.err = std::abs((resk - resg) * hlgth);
  return p;
}

}  // namespace

std::complex<double> quad_complex(const std::function<std::complex<double>(double)>& f,
                                  double a, double b, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("quad_complex: tol must be positive");
  if (a == b) return {0.0, 0.0};
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<Panel> panels{gk15(f, a, b)};
  const std::size_t max_panels = 4096;
  while (true) {
    double total_err = 0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total_err += panels[i].err;
      if (panels[i].err > panels[worst].err) worst = i;
    }
    if (total_err <= tol) break;
    if (panels.size() >= max_panels)
      throw std::runtime_error("quad_complex: tolerance not reached at maximum refinement");
    const Panel w = panels[worst];
    const double mid = 0.5 * (w.a + w.b);
    if (!(mid > w.a && mid < w.b))
      throw std::runtime_error("quad_complex: interval underflow before tolerance reached");
    panels[worst] = gk15(f, w.a, mid);
    panels.push_back(gk15(f, mid, w.b));
  }
  std::complex<double> total{0.0, 0.0};
  for (const Panel& p : panels) total += p.integral;
  return sign * total;
}

}  // namespace quadprop
