#include <doctest.h>

#include "scg/numerics.hpp"

#include <cmath>
#include <vector>

using namespace scg::numerics;

namespace {

// Composite Simpson with one Richardson step; independent of the library.
template <class F>
double simpson_richardson(F f, double a, double b, int n) {
  auto simpson = [&](int m) {
    const double h = (b - a) / m;
    double s = f(a) + f(b);
    for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  const double s1 = simpson(n), s2 = simpson(2 * n);
  return s2 + (s2 - s1) / 15.0;
}

}  // namespace

TEST_CASE("E1 reference values") {
  // 30-digit reference evaluations
  struct Ref {
    cplx z, v;
  };
  const std::vector<Ref> refs = {
      {{1.0, 0.0}, {0.21938393439552027367716377546, 0.0}},
      {{0.0, 0.5}, {0.177784078806612901335810271071, -1.07768890875182993006969498407}},
      {{0.0, 2.0}, {-0.422980828774864995698565153198, 0.0346166500077982293453984565588}},
      {{0.0, 3.0}, {-0.119629786008000327626472281177, 0.277856201204571637166408559472}},
      {{0.0, 10.0}, {0.0454564330044553726345328299526, 0.0875512674239774300996501877499}},
      {{0.0, 1e-6}, {13.2382948930629912887533248017, -1.57079532679489661928692249908}},
      {{0.0, 1e6}, {3.49994438922720492637592474167e-7, -9.36751777537769113490497622885e-7}},
      {{1.0, 1.0}, {0.000281624451981418325509928038659, -0.179324535039358940145284149403}},
      {{5.0, 0.5}, {0.000952681242761916285142751258752, -0.000633114227638586501845561917165}},
  };
  for (const auto& r : refs) {
    CAPTURE(r.z);
    CHECK(std::abs(exp_integral_E1(r.z) - r.v) < 1e-12);
  }
}

TEST_CASE("E1 rejects the singular point and the left half plane") {
  CHECK_THROWS_AS(exp_integral_E1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_E1(cplx(-1.0, 0.5)), std::domain_error);
}

TEST_CASE("E1 on the imaginary axis obeys the logarithmic bound") {
  for (double x = 1e-4; x < 1e4; x *= 1.37) {
    const double bound = std::log((1.0 + std::sqrt(1.0 + x * x)) / x);
    CHECK(std::abs(exp_integral_E1(cplx(0.0, x))) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("E1 Schwarz reflection") {
  for (cplx z : {cplx(0.3, 0.7), cplx(2.5, 4.0), cplx(1e-3, 30.0), cplx(0.0, 1.9)})
    CHECK(std::abs(exp_integral_E1(std::conj(z)) - std::conj(exp_integral_E1(z))) < 1e-14);
}

TEST_CASE("E1 series and continued fraction agree across |z| = 2") {
  for (int k = 0; k < 64; ++k) {
    const double phi = -kPi / 2 + kPi * k / 63.0;
    const cplx z = std::polar(2.0, phi);
    CHECK(std::abs(detail::e1_series(z) - detail::e1_continued_fraction(z)) < 1e-12);
  }
}

TEST_CASE("E2 at zero, against quadrature and at large imaginary argument") {
  CHECK(exp_integral_E2(0.0) == cplx(1.0, 0.0));
  // E2(z) = \int_0^1 exp(-z/u) du
  const double ref = simpson_richardson([](double u) { return u > 0 ? std::exp(-2.0 / u) : 0.0; },
                                        0.0, 1.0, 4000);
  CHECK(std::abs(exp_integral_E2(2.0).real() - ref) < 1e-10);
  CHECK(std::abs(exp_integral_E2(2.0).real() - 0.0375342618204904527595198245164) < 1e-13);
  for (double y = 10; y < 1e5; y *= 3.1)
    CHECK(std::abs(exp_integral_E2(cplx(0.0, y))) <= (1.0 / y) * (1.0 + 2.0 / y));
}

TEST_CASE("adaptive_quad basic and semi-infinite") {
  auto r = adaptive_quad([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const double c = 2.0;
  auto t = adaptive_quad_semi_infinite(
      [c](double k) { return k * k * std::pow(k * k + c * c, -2.5); }, 0.0, c);
  CHECK(std::abs(t.value - 1.0 / 12.0) < 1e-12);
}

TEST_CASE("adaptive_quad on an oscillatory integrand") {
  auto f = [](double x) { return std::sin(50 * x) / (1 + x * x); };
  const double ref = simpson_richardson(f, 0.0, 100.0, 400000);
  CHECK(std::abs(ref - 0.02001576922743659246862322) < 1e-9);
  QuadConfig cfg;
  cfg.max_subdivisions = 5000;
  auto r = adaptive_quad(f, 0.0, 100.0, cfg);
  CHECK(r.converged);
  CHECK(std::abs(r.value - ref) < 1e-8);
}

TEST_CASE("adaptive_quad error estimates bound the true error") {
  struct Case {
    std::function<double(double)> f;
    double a, b, exact;
  };
  const std::vector<Case> suite = {
      {[](double x) { return std::exp(x); }, 0, 1, std::exp(1.0) - 1},
      {[](double x) { return std::sqrt(x); }, 0, 1, 2.0 / 3.0},
      {[](double x) { return 1 / std::sqrt(x); }, 0, 1, 2.0},
      {[](double x) { return std::log(x); }, 0, 1, -1.0},
      {[](double x) { return 1 / (1 + x * x); }, -10, 10, 2 * std::atan(10.0)},
      {[](double x) { return std::cos(x); }, 0, 20, std::sin(20.0)},
      {[](double x) { return x * std::sin(30 * x); }, 0, 1,
       (std::sin(30.0) - 30 * std::cos(30.0)) / 900.0},
      {[](double x) { return std::pow(x, 0.25); }, 0, 2, std::pow(2.0, 1.25) / 1.25},
      {[](double x) { return std::exp(-x * x); }, -5, 5, std::sqrt(kPi) * std::erf(5.0)},
      {[](double x) { return std::abs(x - 0.3); }, 0, 1, 0.5 * (0.09 + 0.49)},
      {[](double x) { return 1 / (x + 0.01); }, 0, 1, std::log(101.0)},
      {[](double x) { return std::pow(x, 7); }, -1, 2, (256.0 - 1.0) / 8.0},
      {[](double x) { return std::tanh(50 * (x - 0.5)); }, 0, 1, 0.0},
      {[](double x) { return std::exp(-10 * x) * std::cos(40 * x); }, 0, 3,
       [] {
         auto F = [](double x) {
           return std::exp(-10 * x) * (-10 * std::cos(40 * x) + 40 * std::sin(40 * x)) / 1700.0;
         };
         return F(3.0) - F(0.0);
       }()},
      {[](double x) { return x * std::log(x); }, 0, 1, -0.25},
      {[](double x) { return 1 / (1 + std::exp(x)); }, 0, 5, std::log(2.0 / (1 + std::exp(-5.0)))},
      {[](double x) { return std::sin(x) * std::sin(x); }, 0, kPi, kPi / 2},
      {[](double x) { return std::pow(x, -0.7); }, 0, 1, 1.0 / 0.3},
      {[](double x) { return 1 / (1e-4 + x * x); }, -1, 1, 2 * std::atan(100.0) * 100.0},
      {[](double x) { return std::cbrt(x); }, -1, 8, 0.75 * (16.0 - 1.0)},
  };
  REQUIRE(suite.size() == 20);
  QuadConfig cfg;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-10;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    CAPTURE(i);
    auto r = adaptive_quad(suite[i].f, suite[i].a, suite[i].b, cfg);
    CHECK(std::abs(r.value - suite[i].exact) <= std::max(r.error, 1e-15));
  }
}

TEST_CASE("adaptive_quad reports failure when the cap is hit") {
  QuadConfig cfg;
  cfg.max_subdivisions = 3;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-15;
  auto r = adaptive_quad([](double x) { return std::sin(1000 * x); }, 0, 10, cfg);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(1000 * x); }, 0, 10, cfg),
                  QuadratureError);
}

TEST_CASE("oscillatory tails") {
  // 1/p: closed form against a direct sum of the integral
  const double w = 3.0, p0 = 2.0;
  auto e = oscillatory_tail_inverse_p(w, p0);
  QuadConfig cfg;
  cfg.max_subdivisions = 20000;
  auto head = adaptive_quad_complex([&](double p) { return std::exp(cplx(0, w * p)) / p; }, p0,
                                    p0 + 2000 * kPi / w, cfg);
  // remainder after whole periods, two IBP terms
  const double P = p0 + 2000 * kPi / w;
  cplx rest = -std::exp(cplx(0, w * P)) / (cplx(0, w) * P) -
              std::exp(cplx(0, w * P)) / (P * P * cplx(0, w) * cplx(0, w));
  CHECK(std::abs(e.value - (head.value + rest)) < 1e-8);

  // 1/p^2: two IBP terms against a high-accuracy oscillatory reference
  Envelope g2{[](double p) { return 1 / (p * p); }, [](double p) { return -2 / (p * p * p); },
              [](double p) { return 6 / (p * p * p * p); }, 2.0};
  auto t = oscillatory_tail(g2, 50.0, 10.0);
  const cplx ref(0.0000928450704564189343441816, -0.000177139812033099906206167);
  CHECK(std::abs(t.value - ref) < 1e-8);
  CHECK(std::abs(t.value - ref) <= t.remainder_bound);

  // omega = 0 is a plain integral
  auto z = oscillatory_tail(g2, 0.0, 10.0);
  CHECK(std::abs(z.value - cplx(0.1, 0.0)) < 1e-12);

  Envelope flat{[](double) { return 1.0; }, [](double) { return 0.0; },
                [](double) { return 0.0; }, 0.0};
  CHECK_THROWS(oscillatory_tail(flat, 1.0, 1.0));
}
