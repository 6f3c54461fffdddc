#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "quadprop/classical.hpp"
#include "quadprop/integrators.hpp"

using namespace quadprop;

namespace {

EmpSolution mathieu_solution(double t_max = 10.0) {
  const SystemProfile p = make_profile(ProfileKind::mathieu, {{"a", 2.0}, {"q", 1.0}});
  return solve_emp(p, 1.0, {0.0, t_max});
}

EmpSolution flat_solution(double t_max = 10.0) {
  const SystemProfile p = make_profile(ProfileKind::constant, {{"omega0", 1.0}});
  return solve_emp(p, 1.0, {0.0, t_max});
}

// Direct integration of x'' + lam_dot x' + omega^2 x = 0.
DenseSolution integrate_newton(const SystemProfile& p, double x0, double v0, double t_max) {
  const RhsFn rhs = [&p](double t, const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[1];
    dy[1] = -p.lam_dot(t) * y[1] - p.omega_sq(t) * y[0];
  };
  return integrate_ivp(rhs, {x0, v0}, {0.0, t_max}, IvpOptions{1e-12, 1e-14});
}

}  // namespace

TEST_CASE("fundamental pair initial data") {
  const EmpSolution sol = mathieu_solution(2.0);
  const FundamentalPair pair = fundamental_pair(sol);
  CHECK(std::abs(pair.u1(0.0)) < 1e-12);
  CHECK(pair.u1_dot(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pair.u2(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(pair.u2_dot(0.0)) < 1e-12);
  CHECK_FALSE(pair.has_particular());
  CHECK(pair.t0 == 0.0);
}

TEST_CASE("wronskian decays with the friction exponent") {
  const SystemProfile p =
      make_profile(ProfileKind::constant, {{"omega0", 2.0}, {"lambda0", 1.0}});
  const EmpSolution sol = solve_emp(p, std::sqrt(3.75), {0.0, 6.0});
  const FundamentalPair pair = fundamental_pair(sol);
  for (double t = 0.0; t <= 6.0; t += 0.3) {
    const double w = pair.u1_dot(t) * pair.u2(t) - pair.u1(t) * pair.u2_dot(t);
    CHECK(w == doctest::Approx(std::exp(-t)).epsilon(1e-7));
  }
}

TEST_CASE("flat case reduces to sine and cosine") {
  const EmpSolution sol = flat_solution(6.0);
  const FundamentalPair pair = fundamental_pair(sol);
  for (double t : {0.4, 1.7, 3.0, 5.9}) {
    CHECK(pair.u1(t) == doctest::Approx(std::sin(t)).epsilon(1e-9));
    CHECK(pair.u2(t) == doctest::Approx(std::cos(t)).epsilon(1e-9));
    CHECK(pair.u1_dot(t) == doctest::Approx(std::cos(t)).epsilon(1e-9));
    CHECK(pair.u2_dot(t) == doctest::Approx(-std::sin(t)).epsilon(1e-9));
  }
}

TEST_CASE("fundamental pair solves the equation of motion") {
  const EmpSolution sol = mathieu_solution();
  const FundamentalPair pair = fundamental_pair(sol);
  const DenseSolution d1 = integrate_newton(sol.profile(), 0.0, 1.0, 10.0);
  const DenseSolution d2 = integrate_newton(sol.profile(), 1.0, 0.0, 10.0);
  for (double t = 0.0; t <= 10.0; t += 0.25) {
    CHECK(pair.u1(t) == doctest::Approx(d1.value(t, 0)).epsilon(1e-6));
    CHECK(pair.u2(t) == doctest::Approx(d2.value(t, 0)).epsilon(1e-6));
  }
}

TEST_CASE("straightening map on the flat case") {
  const EmpSolution sol = flat_solution(2.0);
  const FundamentalPair pair = fundamental_pair(sol);

  const MapPoint start = arnold_map(pair, 0.8, 0.0);
  CHECK(start.T == doctest::Approx(0.0));
  CHECK(start.X == doctest::Approx(0.8));

  const MapPoint quarter = arnold_map(pair, 1.0, M_PI / 4);
  CHECK(quarter.T == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(quarter.X == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

  CHECK_THROWS_AS(arnold_map(pair, 1.0, M_PI / 2), std::domain_error);
}

TEST_CASE("conformal map matches the straightening map") {
  const EmpSolution sol = mathieu_solution();
  const FundamentalPair pair = fundamental_pair(sol);
  for (double t : {0.3, 1.1, 2.3, 4.0, 6.0}) {
    for (double x : {-1.5, 0.4, 2.0}) {
      const MapPoint a = arnold_map(pair, x, t);
      const MapPoint n = niederer_forward(sol, x, t);
      CHECK(a.T == doctest::Approx(n.T).epsilon(1e-9));
      CHECK(a.X == doctest::Approx(n.X).epsilon(1e-9));
    }
  }
}

TEST_CASE("conformal map on the flat case") {
  const EmpSolution sol = flat_solution(2.0);
  const MapPoint m = niederer_forward(sol, 1.0, M_PI / 4);
  CHECK(m.T == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.X == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(niederer_forward(sol, 1.0, M_PI / 2), std::domain_error);
}

TEST_CASE("map speed equals the squared conformal factor") {
  // dT/dt = tau_dot sec^2(omega_bar tau), the square of the scaling factor
  // f = tau_dot^(1/2) sec(omega_bar tau).
  const EmpSolution sol = mathieu_solution();
  const double fd = 1e-6;
  for (double t : {0.5, 1.0, 2.5, 5.0}) {
    const double dT =
        (niederer_forward(sol, 1.0, t + fd).T - niederer_forward(sol, 1.0, t - fd).T) /
        (2.0 * fd);
    const double sec = 1.0 / std::cos(sol.omega_bar() * sol.tau(t));
    const double f_sq = sol.tau_dot(t) * sec * sec;
    CHECK(dT == doctest::Approx(f_sq).epsilon(1e-6));
  }
}

TEST_CASE("inverse map round-trips on every branch") {
  const EmpSolution sol = mathieu_solution();
  // One interior time per map cell; cell k sits between consecutive
  // boundaries r_k, with branch index k for the arctan.
  const std::vector<std::pair<double, int>> samples = {
      {1.0, 0}, {3.0, 1}, {5.5, 2}, {8.0, 3}};
  for (const auto& [t, k] : samples) {
    for (double x : {-0.9, 0.6, 1.8}) {
      const MapPoint m = niederer_forward(sol, x, t);
      const SpacePoint back = niederer_inverse(sol, m.X, m.T, k);
      CHECK(back.t == doctest::Approx(t).epsilon(1e-8));
      CHECK(back.x == doctest::Approx(x).epsilon(1e-8));
    }
  }
}

TEST_CASE("inverse map on the flat case") {
  const EmpSolution sol = flat_solution(2.0);
  const SpacePoint s = niederer_inverse(sol, std::sqrt(2.0), 1.0, 0);
  CHECK(s.t == doctest::Approx(M_PI / 4).epsilon(1e-10));
  CHECK(s.x == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("trajectory initial data and flat closed form") {
  const EmpSolution sol = flat_solution(6.0);
  for (double t : {0.3, 2.2, 4.8}) {
    CHECK(trajectory(sol, 1.0, 0.0, t).x == doctest::Approx(std::sin(t)).epsilon(1e-9));
    CHECK(trajectory(sol, 1.0, 0.0, t).x_dot == doctest::Approx(std::cos(t)).epsilon(1e-9));
  }
  const PhasePoint init = trajectory(sol, 0.7, -0.2, 0.0);
  CHECK(init.x == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(init.x_dot == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("trajectory matches direct integration") {
  const EmpSolution sol = mathieu_solution();
  const double a = 0.7, b = -0.3;
  const DenseSolution direct = integrate_newton(sol.profile(), b, a, 10.0);
  double worst = 0.0;
  for (double t = 0.0; t <= 10.0; t += 0.05) {
    const PhasePoint pt = trajectory(sol, a, b, t);
    worst = std::max(worst, std::abs(pt.x - direct.value(t, 0)));
    worst = std::max(worst, std::abs(pt.x_dot - direct.value(t, 1)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("straightened trajectories are affine") {
  const EmpSolution sol = mathieu_solution();
  const double a = 1.1, b = 0.4;
  for (double t : {0.2, 1.0, 2.5, 4.0, 7.0}) {
    const PhasePoint pt = trajectory(sol, a, b, t);
    const MapPoint m = niederer_forward(sol, pt.x, t);
    CHECK(m.X == doctest::Approx(a * m.T + b).epsilon(1e-7));
  }
}

TEST_CASE("focusing alternates the envelope-scaled sign") {
  const EmpSolution sol = mathieu_solution();
  const CausticChart chart = locate_caustics(sol);
  REQUIRE(chart.caustics.size() >= 3);
  for (const auto& [l, t] : chart.caustics) {
    const double scaled = trajectory(sol, 0.9, 1.0, t).x / sol.rho(t);
    CHECK(scaled == doctest::Approx(l % 2 == 0 ? 1.0 : -1.0).epsilon(1e-6));
  }
}

TEST_CASE("classical action of a free straight line") {
  const SystemProfile p = make_custom_profile([](double) { return 0.0; },
                                              [](double) { return 0.0; },
                                              [](double) { return 0.0; },
                                              [](double) { return 0.0; });
  const double v = 1.7;
  const PathFn line = [v](double t) { return PhasePoint{0.3 + v * t, v}; };
  CHECK(classical_action(p, line, 0.0, 2.0) == doctest::Approx(0.5 * v * v * 2.0).epsilon(1e-12));
}

TEST_CASE("classical action of an oscillator arc") {
  const SystemProfile p = make_profile(ProfileKind::constant, {{"omega0", 1.0}});
  const PathFn arc = [](double t) { return PhasePoint{std::sin(t), std::cos(t)}; };
  CHECK(classical_action(p, arc, 0.0, M_PI / 4) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(classical_action(p, arc, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(classical_action(p, arc, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("lift accumulates the negative action") {
  const EmpSolution sol = flat_solution(3.0);
  const double a = 1.3, s0 = 0.5;
  for (double t : {0.9, 1.6, 2.7}) {
    const LiftPoint lp = bargmann_lift(sol, a, 0.0, s0, t);
    CHECK(lp.t == t);
    CHECK(lp.x == doctest::Approx(a * std::sin(t)).epsilon(1e-9));
    CHECK(lp.s ==
          doctest::Approx(s0 - a * a / 4.0 * std::sin(2.0 * t)).epsilon(1e-8));
  }
  const LiftPoint rest = bargmann_lift(sol, 0.0, 0.0, s0, 2.0);
  CHECK(rest.s == doctest::Approx(s0));
}

TEST_CASE("caustic chart of the flat case") {
  const EmpSolution sol = flat_solution(10.0);
  const CausticChart chart = locate_caustics(sol);
  REQUIRE(chart.caustics.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(chart.caustics[i].first == static_cast<int>(i));
    CHECK(chart.caustics[i].second == doctest::Approx(M_PI * double(i)).epsilon(1e-9));
  }
  REQUIRE(chart.boundaries.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(chart.boundaries[i].first == static_cast<int>(i));
    CHECK(chart.boundaries[i].second == doctest::Approx(M_PI * (double(i) + 0.5)).epsilon(1e-9));
  }
}

TEST_CASE("caustic chart of the mathieu case") {
  const CausticChart chart = locate_caustics(mathieu_solution());
  REQUIRE(chart.caustics.size() == 4);  // includes l = 0 at the start
  CHECK(chart.caustics[1].second == doctest::Approx(1.92).epsilon(0.011));
  CHECK(chart.caustics[2].second == doctest::Approx(4.80).epsilon(0.005));
  CHECK(chart.caustics[3].second == doctest::Approx(7.83).epsilon(0.003));
  REQUIRE(chart.boundaries.size() == 4);
  CHECK(chart.boundaries[0].second == doctest::Approx(1.52).epsilon(0.014));
  CHECK(chart.boundaries[1].second == doctest::Approx(4.49).epsilon(0.005));
  CHECK(chart.boundaries[2].second == doctest::Approx(6.75).epsilon(0.003));
  CHECK(chart.boundaries[3].second == doctest::Approx(8.44).epsilon(0.003));
}

TEST_CASE("sign of the conformal cosine is fixed inside each cell") {
  const EmpSolution sol = mathieu_solution();
  const CausticChart chart = locate_caustics(sol);
  std::vector<double> edges = {sol.t_front()};
  for (const auto& [k, r] : chart.boundaries) edges.push_back(r);
  edges.push_back(sol.t_back());
  for (std::size_t cell = 0; cell + 1 < edges.size(); ++cell) {
    const double lo = edges[cell] + 1e-3, hi = edges[cell + 1] - 1e-3;
    const double ref = std::cos(sol.omega_bar() * sol.tau(0.5 * (lo + hi)));
    for (int i = 0; i <= 20; ++i) {
      const double t = lo + (hi - lo) * i / 20.0;
      CHECK(std::cos(sol.omega_bar() * sol.tau(t)) * ref > 0.0);
    }
  }
}

TEST_CASE("chart serializes to json") {
  const std::string text = to_json(locate_caustics(flat_solution(4.0)));
  CHECK(text.find("\"omega_bar\"") != std::string::npos);
  CHECK(text.find("\"caustics\"") != std::string::npos);
  CHECK(text.find("\"boundaries\"") != std::string::npos);
}

TEST_CASE("particular shift moves the straightened image") {
  const EmpSolution sol = flat_solution(2.0);
  FundamentalPair pair = fundamental_pair(sol);
  pair = with_particular(std::move(pair), [](double) { return 0.5; },
                         [](double) { return 0.0; });
  REQUIRE(pair.has_particular());
  const MapPoint m = arnold_map(pair, 1.0, 0.0);
  CHECK(m.X == doctest::Approx(0.5));
  CHECK(m.T == doctest::Approx(0.0));
}
