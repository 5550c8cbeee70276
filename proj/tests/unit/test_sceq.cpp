#include <doctest.h>

#include "scg/sceq.hpp"

#include <cmath>
#include <random>

using namespace scg;
using namespace scg::sceq;
using numerics::kPi;

namespace {

const double kHc2 = 1440 * kPi * kPi;

HubbleTrajectory uniform(double tau0, double tau1, int n, double a0, std::function<double(double)> H) {
  HubbleTrajectory t;
  t.tau0 = tau0;
  t.a0 = a0;
  for (int j = 0; j <= n; ++j) {
    t.tau.push_back(tau0 + (tau1 - tau0) * j / n);
    t.H.push_back(H(t.tau.back()));
  }
  t.H0 = t.H.front();
  return t;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("interval rule integrates cubics exactly and converges at fourth order") {
  const int n = 10;
  const double h = 0.3;
  std::vector<double> f(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double x = j * h;
    f[j] = 1 - 2 * x + 0.5 * x * x * x;
  }
  auto I = cumulative_integral(f, h);
  for (int j = 0; j <= n; ++j) {
    const double x = j * h;
    CHECK(I[j] == doctest::Approx(x - x * x + x * x * x * x / 8).epsilon(1e-13));
  }
  double prev = 0;
  for (int k : {16, 32, 64, 128}) {
    std::vector<double> g(k + 1);
    for (int j = 0; j <= k; ++j) g[j] = std::exp(2.0 * j / k);
    const double err = std::abs(cumulative_integral(g, 1.0 / k).back() - (std::exp(2.0) - 1) / 2);
    if (prev > 0) CHECK(prev / err > 11.0);
    prev = err;
  }
  CHECK_THROWS(cumulative_integral({1, 2, 3}, 0.1));
}

TEST_CASE("scale factor functional") {
  auto zero = uniform(0, 2, 20, 1.7, [](double) { return 0.0; });
  for (double a : scale_factor(zero)) CHECK(a == 1.7);
  const double a0 = 0.8, H0 = 0.6;
  auto cst = uniform(0, 1.5, 30, a0, [=](double) { return H0; });
  auto a = scale_factor(cst);
  for (std::size_t j = 0; j < a.size(); ++j)
    CHECK(a[j] == doctest::Approx(a0 / (1 - a0 * H0 * cst.tau[j])).epsilon(1e-13));
  // de Sitter in conformal time with tau0 = -1/(a0 H)
  const double H = 2.0, tau0 = -1 / (a0 * H);
  auto ds = uniform(tau0, 0.5 * tau0, 16, a0, [=](double) { return H; });
  auto ads = scale_factor(ds);
  for (std::size_t j = 0; j < ads.size(); ++j) CHECK(ads[j] == doctest::Approx(-1 / (H * ds.tau[j])).epsilon(1e-12));
  auto bad = uniform(0, 3, 30, 1.0, [](double) { return 1.0; });
  CHECK_THROWS_AS(scale_factor(bad), std::domain_error);
  CHECK_FALSE(check_regularity(bad, kHc2).a_finite);
}

TEST_CASE("trace integrand") {
  SolverParams p;
  CHECK(trace_integrand(0.0, 1.0, 0.0, p) == 0.0);
  p.Lambda = 0.37;
  for (double H : {-3.0, 0.5, 40.0})
    for (double a : {0.5, 2.0}) {
      const double expect = a * (std::pow(H, 4) - 2 * kHc2 * H * H + 960 * kPi * kPi * p.Lambda) / (kHc2 - H * H);
      CHECK(trace_integrand(H, a, 123.0, p) == doctest::Approx(expect).epsilon(1e-14));
    }
  CHECK_THROWS_AS(trace_integrand(std::sqrt(kHc2), 1.0, 0.0, p), std::domain_error);
}

TEST_CASE("Minkowski is reproduced in one iteration") {
  SolverParams p;
  p.grid_n = 16;
  auto r = solve_local(0.0, 1.0, 0.0, 5.0, p);
  CHECK(r.reason == Termination::converged);
  CHECK(r.iterations == 1);
  for (double H : r.trajectory.H) CHECK(H == 0.0);
  CHECK(r.residual_norm == 0.0);
  auto e = extend_maximal(r, 40.0, p);
  CHECK(e.reason == Termination::reached_tau_max);
  CHECK(e.trajectory.tau.back() == 40.0);
  CHECK(sup_abs(e.trajectory.H) == 0.0);
  PicardProblem P(p, 0, 1, 0, 1);
  CHECK(sup_abs(P.map(std::vector<double>(P.grid().size(), 0.0))) == 0.0);
}

TEST_CASE("stationary de Sitter fixed point") {
  SolverParams p;
  p.Lambda = 1e-4 * kHc2 * kHc2 / (960 * kPi * kPi);
  p.grid_n = 64;
  const double Hs = stationary_hubble(p.Lambda);
  CHECK(std::pow(Hs, 4) - 2 * kHc2 * Hs * Hs + 960 * kPi * kPi * p.Lambda == doctest::Approx(0.0).epsilon(1e-9));
  const double a0 = 1.0, tau0 = -1.0 / (a0 * Hs);
  auto r = solve_local(tau0, a0, Hs, 0.8 * tau0, p);
  CHECK(r.ok());
  CHECK(r.residual_norm < 1e-10);
  for (double H : r.trajectory.H) CHECK(std::abs(H - Hs) < 1e-10);
  auto e = extend_maximal(r, 0.05 * tau0, p);
  CHECK(e.reason == Termination::reached_tau_max);
  CHECK(e.residual_norm < 1e-10);
  for (std::size_t j = 0; j < e.a.size(); ++j)
    CHECK(e.a[j] == doctest::Approx(-1 / (Hs * e.trajectory.tau[j])).epsilon(1e-8));
}

TEST_CASE("Picard map contracts on a short window") {
  SolverParams p;
  p.Lambda = 2.0;
  p.grid_n = 32;
  PicardProblem P(p, 0.0, 1.0, 0.3, 0.05);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  double K = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> H1(P.grid().size()), H2(P.grid().size());
    for (std::size_t j = 0; j < H1.size(); ++j) {
      H1[j] = 0.3 + u(rng);
      H2[j] = 0.3 + u(rng);
    }
    K = std::max(K, sup_distance(P.map(H1), P.map(H2)) / sup_distance(H1, H2));
  }
  CHECK(K < 1.0);
}

TEST_CASE("massless nontrivial solution: grid refinement and differential consistency") {
  SolverParams p;
  p.Lambda = 1.0;
  const double tau0 = 0.0, a0 = 1.0, H0 = 0.2, tau1 = 0.6;
  std::vector<double> Hend;
  for (int n : {16, 32, 64}) {
    p.grid_n = n;
    auto r = solve_local(tau0, a0, H0, tau1, p);
    REQUIRE(r.reason == Termination::converged);
    CHECK(r.regularity.ok());
    CHECK(r.lipschitz < 1.0);
    Hend.push_back(r.trajectory.H.back());
    if (n == 64) {
      CHECK(sup_abs(trace_identity_residual(r, p)) < 1e-5);
      // reference by a fine RK4 on (a, H) in conformal time
      double a = a0, H = H0, t = tau0;
      const int steps = 20000;
      const double dt = (tau1 - tau0) / steps;
      auto rhs = [&](double aa, double HH) { return std::pair{aa * aa * HH, trace_integrand(HH, aa, 0.0, p)}; };
      for (int s = 0; s < steps; ++s) {
        auto [k1a, k1h] = rhs(a, H);
        auto [k2a, k2h] = rhs(a + 0.5 * dt * k1a, H + 0.5 * dt * k1h);
        auto [k3a, k3h] = rhs(a + 0.5 * dt * k2a, H + 0.5 * dt * k2h);
        auto [k4a, k4h] = rhs(a + dt * k3a, H + dt * k3h);
        a += dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
        H += dt / 6 * (k1h + 2 * k2h + 2 * k3h + k4h);
        t += dt;
      }
      CHECK(r.trajectory.H.back() == doctest::Approx(H).epsilon(1e-7));
      CHECK(r.a.back() == doctest::Approx(a).epsilon(1e-7));
    }
  }
  const double e1 = std::abs(Hend[0] - Hend[1]), e2 = std::abs(Hend[1] - Hend[2]);
  CHECK(e1 / e2 > 4.0);  // at least second order
}

TEST_CASE("trajectory approaching the pole stops at H_c") {
  SolverParams p;
  p.grid_n = 16;
  const double Hc = std::sqrt(kHc2);
  auto r = solve_local(0.0, 1.0, -0.5 * Hc, 1e-5, p);
  REQUIRE(r.ok());
  auto e = extend_maximal(r, 1.0, p);
  CHECK(e.reason == Termination::hit_Hc);
  CHECK(e.trajectory.tau.back() < 1.0);
  CHECK(e.regularity.max_H_over_Hc > 0.9);
}

TEST_CASE("expanding de Sitter without Lambda balance runs into a diverging a") {
  SolverParams p;
  p.grid_n = 16;
  p.Lambda = 1e-4 * kHc2 * kHc2 / (960 * kPi * kPi);
  const double Hs = stationary_hubble(p.Lambda);
  auto r = solve_local(0.0, 1.0, Hs, 0.1, p);
  REQUIRE(r.ok());
  auto e = extend_maximal(r, 10.0, p);
  CHECK(e.reason == Termination::a_diverging);
  CHECK(e.trajectory.tau.back() < 1.0 / Hs);
}

TEST_CASE("constraint equation") {
  SolverParams p;
  p.Lambda = 3 * 0.49;
  CHECK(constraint_check(0.0, 1.0, 0.7, p) == doctest::Approx(0.0).epsilon(1e-15));  // m = 0
  p.m = 0.0;
  p.Lambda = 0.2;
  CHECK(constraint_check(0.0, 2.0, 0.7, p) == doctest::Approx(3 * 0.49 - 0.2).epsilon(1e-15));
  p.m = 1.3;
  p.radiation = 0.01;
  const double H0 = 0.7;
  const double rho0 = p.m * p.m * H0 * H0 / (96 * kPi * kPi);
  CHECK(constraint_check(-1.0, 2.0, H0, p) == doctest::Approx(3 * H0 * H0 - rho0 - 0.2 - 0.01).epsilon(1e-14));
  CHECK(constraint_check(0.0, 1.0, 0.0, SolverParams{.m = 1.0, .Lambda = 0.0}) == 0.0);
}

TEST_CASE("massive field on a short window") {
  SolverParams p;
  p.m = 1.0;
  p.grid_n = 32;
  const double rho0 = 3.0 - constraint_check(0.0, 1.0, 1.0, p);
  p.Lambda = 3.0 - rho0;
  CHECK(constraint_check(0.0, 1.0, 1.0, p) == doctest::Approx(0.0));
  auto r = solve_local(0.0, 1.0, 1.0, 0.5, p);
  REQUIRE(r.reason == Termination::converged);
  CHECK(r.residual_norm < 1e-6);
  CHECK(r.lipschitz < 1.0);
  CHECK(r.regularity.ok());
  CHECK(r.wick_error < 1e-6);
  // Wick square at tau0 is the local constant of the adiabatic state
  CHECK(r.wick.front() == doctest::Approx(-1.0 / (32 * kPi * kPi)).epsilon(1e-9));
  // trace identity away from tau0, where H is not smooth
  auto res = trace_identity_residual(r, p);
  for (std::size_t j = r.a.size() / 4; j + 2 < r.a.size(); ++j) CHECK(std::abs(res[j]) < 1e-6);
}
