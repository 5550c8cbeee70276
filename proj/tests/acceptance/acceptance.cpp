// One PASS/FAIL line per acceptance criterion. Tolerances and time limits are
// fixed below; the exit status is nonzero if any line fails.

#include "fluct_oracle.hpp"
#include "oracles.hpp"
#include "scg/fluct.hpp"
#include "scg/geodesy.hpp"
#include "scg/modes.hpp"
#include "scg/runcomb.hpp"
#include "scg/sceq.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace scg;
using runcomb::BigInt;
using runcomb::Partition;
using runcomb::RunPolynomial;

namespace {

constexpr double kTimeCombinatorics = 1.0;     // s
constexpr double kTimeBruteForce = 120.0;      // s
constexpr double kWorldfunRel = 1e-10;
constexpr double kTransportSlope = 6.0;
constexpr double kWronskian = 1e-8;
constexpr double kInitialEnergyRel = 1e-10;
constexpr double kInitialEnergyIntegral = 1e-6;
constexpr double kDeSitterResidual = 1e-10;
constexpr double kMassiveResidual = 1e-6;
constexpr int kMassiveGrid = 256;
constexpr double kTimeSolver = 300.0;          // s
constexpr double kSpectrumLimitRel = 0.01;
constexpr double kScalingRel = 1e-3;
constexpr double kAuxARel = 1e-6;
constexpr double kTimeSpectrum = 120.0;        // s
constexpr double kBispectrumRel = 1e-2;
constexpr double kTimeBispectrum = 600.0;      // s

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s %2d  %s\n      %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

RunPolynomial poly(std::initializer_list<std::pair<std::vector<int>, long long>> terms) {
  RunPolynomial p;
  for (const auto& [parts, c] : terms) p.add(Partition(parts), BigInt(c));
  return p;
}

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

void partitions_of(int n, int max_part, std::vector<int>& cur, std::vector<Partition>& out) {
  if (n == 0) {
    out.emplace_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_of(n - p, p, cur, out);
    cur.pop_back();
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---------------------------------------------------------------------------

void criterion1() {
  Stopwatch sw;
  bool ok = true;
  const std::vector<RunPolynomial> A = {
      poly({{{1}, 1}}),
      poly({{{2}, 1}}),
      poly({{{3}, 1}, {{1, 1, 1}, 1}}),
      poly({{{4}, 1}, {{2, 1, 1}, 5}}),
      poly({{{5}, 1}, {{3, 1, 1}, 7}, {{2, 2, 1}, 11}, {{1, 1, 1, 1, 1}, 5}}),
      poly({{{6}, 1}, {{4, 1, 1}, 9}, {{2, 2, 2}, 11}, {{3, 2, 1}, 38}, {{2, 1, 1, 1, 1}, 61}})};
  const std::vector<RunPolynomial> C = {
      poly({{{1, 1}, 1}}),
      poly({{{2, 1}, 2}}),
      poly({{{2, 2}, 2}, {{3, 1}, 2}, {{1, 1, 1, 1}, 2}}),
      poly({{{4, 1}, 2}, {{3, 2}, 6}, {{2, 1, 1, 1}, 16}}),
      poly({{{5, 1}, 2}, {{4, 2}, 8}, {{3, 3}, 6}, {{2, 2, 1, 1}, 62}, {{3, 1, 1, 1}, 26}, {{1, 1, 1, 1, 1, 1}, 16}})};
  const std::vector<RunPolynomial> L = {
      RunPolynomial::constant(1),
      poly({{{1}, 2}}),
      poly({{{1, 1}, 4}, {{2}, 2}}),
      poly({{{1, 1, 1}, 10}, {{2, 1}, 12}, {{3}, 2}}),
      poly({{{1, 1, 1, 1}, 32}, {{2, 1, 1}, 58}, {{2, 2}, 12}, {{3, 1}, 16}, {{4}, 2}}),
      poly({{{1, 1, 1, 1, 1}, 122}, {{2, 1, 1, 1}, 300}, {{2, 2, 1}, 142}, {{3, 1, 1}, 94}, {{3, 2}, 40}, {{4, 1}, 20},
            {{5}, 2}}),
      poly({{{1, 1, 1, 1, 1, 1}, 544}, {{2, 1, 1, 1, 1}, 1682}, {{3, 1, 1, 1}, 568}, {{2, 2, 1, 1}, 1284},
            {{4, 1, 1}, 138}, {{3, 2, 1}, 556}, {{2, 2, 2}, 142}, {{5, 1}, 24}, {{4, 2}, 60}, {{3, 3}, 40}, {{6}, 2}})};
  const std::vector<std::vector<long long>> K = {{1}, {1}, {2}, {4, 2}, {8, 16}, {16, 88, 16}, {32, 416, 272}};
  std::ostringstream bad;
  for (int n = 1; n <= 6; ++n)
    if (!(runcomb::atomic_poly(n) == A[n - 1])) ok = false, bad << " A" << n;
  for (int n = 2; n <= 6; ++n)
    if (!(runcomb::circular_poly(n) == C[n - 2])) ok = false, bad << " C" << n;
  for (int n = 0; n <= 6; ++n)
    if (!(runcomb::linear_poly(n) == L[n])) ok = false, bad << " L" << n;
  for (int n = 0; n <= 6; ++n) {
    const auto v = runcomb::valley_poly(n);
    std::vector<BigInt> ref(K[n].begin(), K[n].end());
    if (v != ref) ok = false, bad << " K" << n;
  }
  const double t = sw.seconds();
  ok = ok && t < kTimeCombinatorics;
  report(1, ok, "A_n, C_n, K_n, L_n golden polynomials, n <= 6",
         "exact match" + (bad.str().empty() ? std::string() : ", mismatched:" + bad.str()) + fmt("; %.3f s", t) +
             fmt(" (limit %.0f s)", kTimeCombinatorics));
}

void criterion2() {
  bool ok = true;
  std::ostringstream bad;
  for (int n = 1; n <= 12; ++n) {
    if (runcomb::eval_poly_uniform(runcomb::atomic_poly(n), 1) != runcomb::Rational(factorial(n - 1)))
      ok = false, bad << " A" << n;
    if (n >= 2 && runcomb::eval_poly_uniform(runcomb::circular_poly(n), 1) != runcomb::Rational(factorial(n - 1)))
      ok = false, bad << " C" << n;
  }
  bool linear_ok = true, literal_ok = true;
  for (int n = 0; n <= 11; ++n) {
    const auto v = runcomb::eval_poly_uniform(runcomb::linear_poly(n + 1), 1);
    linear_ok = linear_ok && v == runcomb::Rational(factorial(n + 2));
    literal_ok = literal_ok && v == runcomb::Rational(factorial(n));
  }
  ok = ok && linear_ok;
  report(2, ok, "factorial sums at x = 1 (A_n, C_n -> (n-1)!, n <= 12; L_{n+1}, n <= 11)",
         std::string(bad.str().empty() ? "A_n, C_n exact" : "mismatch:" + bad.str()) +
             (linear_ok ? "; L_{n+1}(1..1) = (n+2)! = |S_{n+2}| exact" : "; L sums wrong") +
             (literal_ok ? "" : "; the literal form L_{n+1}(1..1) = n! is off by the index shift (e.g. L_1 = 2)"));
}

void criterion3() {
  const std::vector<long long> secant = {1, 1, 5, 61, 1385, 50521};
  const std::vector<long long> tangent = {1, 2, 16, 272, 7936, 353792};
  bool ok = true;
  std::ostringstream got;
  for (int n = 0; n < 6; ++n) {
    const BigInt c = runcomb::atomic_poly(2 * n + 1).coefficient(Partition(std::vector<int>(2 * n + 1, 1)));
    ok = ok && c == secant[n];
    got << (n ? "," : "") << c;
  }
  got << " | ";
  for (int n = 1; n <= 6; ++n) {
    const BigInt c = runcomb::circular_poly(2 * n).coefficient(Partition(std::vector<int>(2 * n, 1)));
    ok = ok && c == tangent[n - 1];
    got << (n > 1 ? "," : "") << c;
  }
  report(3, ok, "alternating counts from x1^{2n+1} in A and x1^{2n} in C", got.str());
}

void criterion4() {
  Stopwatch sw;
  bool ok = true;
  long checked = 0;
  std::ostringstream bad;
  auto compare = [&](const std::map<Partition, BigInt>& brute, int weight, runcomb::RunKind kind, const char* tag,
                     int n) {
    std::vector<Partition> parts;
    std::vector<int> cur;
    partitions_of(weight, weight, cur, parts);
    for (const auto& p : parts) {
      auto it = brute.find(p);
      const BigInt expect = it == brute.end() ? BigInt(0) : it->second;
      ++checked;
      if (runcomb::run_count(p, kind) != expect) ok = false, bad << ' ' << tag << n << '[' << p.to_string() << ']';
    }
  };
  for (int n = 1; n <= 9; ++n) compare(oracle::atomic_counts(n), n, runcomb::RunKind::atomic, "A", n);
  for (int n = 2; n <= 9; ++n) compare(oracle::circular_counts(n), n, runcomb::RunKind::circular, "C", n);
  for (int n = 1; n <= 9; ++n) compare(oracle::linear_counts(n), n, runcomb::RunKind::linear, "L", n);
  const double t = sw.seconds();
  ok = ok && t < kTimeBruteForce;
  report(4, ok, "Z_A, Z_C, Z_L against exhaustive permutation enumeration, n <= 9",
         std::to_string(checked) + " partitions exact" + (bad.str().empty() ? "" : ", mismatched:" + bad.str()) +
             fmt("; %.1f s", t) + fmt(" (limit %.0f s)", kTimeBruteForce));
}

void criterion5() {
  const int N = 10;
  const auto y = runcomb::cumulant_weights(N);
  runcomb::Assignment w;
  for (int i = 0; i < N; ++i) w[i + 1] = runcomb::Rational(y[i]);
  bool values = runcomb::eval_poly(runcomb::atomic_poly(5), w) == 995328 &&
                runcomb::eval_poly(runcomb::circular_poly(5), w) == 165888 &&
                runcomb::eval_poly(runcomb::linear_poly(5), w) == 3727360;
  // A(l) = sum A_{n+1} l^n/n! = 2/(1-12l); C(l) = sum C_{n+2} l^n/n! = 4/(1-12l)^2; L(l) = sum L_n l^n/n! = (1-12l)^{-1/3}
  int first_bad = -1;
  std::string which;
  BigInt p12 = 1, lprod = 1;
  for (int n = 0; n <= N; ++n) {
    if (n + 1 <= N && runcomb::eval_poly(runcomb::atomic_poly(n + 1), w) != runcomb::Rational(2 * p12 * factorial(n)))
      if (first_bad < 0) first_bad = n + 1, which = "A";
    if (n + 2 <= N &&
        runcomb::eval_poly(runcomb::circular_poly(n + 2), w) != runcomb::Rational(4 * (n + 1) * p12 * factorial(n)))
      if (first_bad < 0) first_bad = n + 2, which = "C";
    if (runcomb::eval_poly(runcomb::linear_poly(n), w) != runcomb::Rational(lprod))
      if (first_bad < 0) first_bad = n, which = "L";
    p12 *= 12;
    lprod *= 12 * n + 4;
  }
  const bool series = first_bad < 0;
  report(5, values && series, "cumulant weights: A5, C5, L5 values and closed-form series through index 10",
         std::string(values ? "A5 = 995328, C5 = 165888, L5 = 3727360" : "value mismatch") + "; conjectured series " +
             (series ? "hold for A_1..A_10, C_2..C_10, L_0..L_10"
                     : "fail first at " + which + "_" + std::to_string(first_bad)));
}

void criterion6() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.5, 0.5), ua(0.5, 1.5), ud(-1.0, 1.0);
  double worst = 0, min_slope = 1e300;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = ua(rng);
    std::vector<double> h = {u(rng), u(rng), u(rng), u(rng)};
    auto c = geodesy::sigma_coeffs(geodesy::MetricJet::flrw_conformal(a, h, 4), 6);
    for (int s = 0; s < 3; ++s) {
      std::vector<double> dx = {1e-2 * ud(rng), 1e-2 * ud(rng), 1e-2 * ud(rng), 1e-2 * ud(rng)};
      const double r2 = dx[1] * dx[1] + dx[2] * dx[2] + dx[3] * dx[3];
      const double ref = geodesy::flrw_sigma_reference(geodesy::FlrwChart::conformal, h, a, dx[0], r2);
      worst = std::max(worst, rel(geodesy::sigma_eval(c, dx), ref));
    }
    const std::vector<double> dir = {ud(rng), ud(rng), ud(rng), ud(rng)};
    auto err = [&](double s) {
      return c.transport_residual({dir[0] * s, dir[1] * s, dir[2] * s, dir[3] * s});
    };
    min_slope = std::min(min_slope, std::log2(std::abs(err(0.05)) / std::abs(err(0.025))));
  }
  report(6, worst <= kWorldfunRel && min_slope >= kTransportSlope,
         "order-6 conformal FLRW world function at 20 random backgrounds; transport Richardson slope",
         fmt("max relative deviation %.2e", worst) + fmt(" (tol %.0e)", kWorldfunRel) +
             fmt("; min slope %.2f", min_slope) + fmt(" (need >= %.0f)", kTransportSlope));
}

void criterion7() {
  using modes::CosmoBackground;
  std::vector<CosmoBackground> bgs = {CosmoBackground::static_universe(1.0, 1.0),
                                      CosmoBackground::power_law(1.0, 2.0, 1.0, 1.0),
                                      CosmoBackground::de_sitter(1.0, 0.8, -2.0)};
  std::vector<std::pair<double, double>> spans = {{0.0, 4.0}, {1.0, 2.0}, {-2.0, -0.5}};
  double wr = 0;
  for (std::size_t b = 0; b < bgs.size(); ++b)
    for (int pts : {11, 41, 161})
      for (double k : {0.0, 0.1, 1.0, 10.0, 100.0})
        wr = std::max(wr, modes::max_wronskian_residual(modes::mode(bgs[b], k, linspace(spans[b].first, spans[b].second, pts))));

  bool zero = true;
  auto massless = CosmoBackground::power_law(1.0, 2.0, 0.0, 1.0);
  for (double k : {0.1, 1.0, 7.0}) {
    auto m = modes::mode(massless, k, linspace(1.0, 2.0, 9));
    for (double v : modes::wick_integrand(massless, m)) zero = zero && v == 0.0;
  }
  zero = zero && modes::wick_square_at(massless, 1.5) == 0.0;

  auto bg = CosmoBackground::power_law(1.3, 1.0, 0.7, 0.9);
  const double a0 = bg.a0(), da = bg.da(bg.tau0), m = bg.mass, c = a0 * m;
  double per_k = 0;
  for (double k : {0.0, 0.3, 1.0, 4.0, 20.0}) {
    const double expected = std::pow(m, 4) * a0 * a0 * da * da / (8 * std::pow(bg.k0(k), 5));
    per_k = std::max(per_k, rel(std::abs(modes::initial_energy_integrand(bg, k)), expected));
  }
  const double scale = 8 / (std::pow(m, 4) * a0 * a0 * da * da);
  auto f = [&](double k) { return k * k * std::abs(modes::initial_energy_integrand(bg, k)) * scale; };
  numerics::QuadConfig cfg;
  cfg.abs_tol = 1e-14;
  const double I = numerics::adaptive_quad_semi_infinite(f, 0.0, 1.0, cfg).value;
  const double dI = std::abs(I - 1.0 / (3 * c * c));
  report(7, wr < kWronskian && zero && per_k <= kInitialEnergyRel && dI < kInitialEnergyIntegral,
         "modes: Wronskian, massless Wick integrand, initial-energy integrand and its k-integral",
         fmt("Wronskian %.2e", wr) + fmt(" (tol %.0e)", kWronskian) + (zero ? "; m = 0 integrand exactly 0" : "; m = 0 integrand nonzero") +
             fmt("; per-k rel %.1e", per_k) + fmt("; |I - 1/(3c^2)| = %.1e", dI));
}

void criterion8() {
  Stopwatch total;
  sceq::SolverParams p0;
  p0.grid_n = 64;
  auto mink = sceq::solve_local(0.0, 1.0, 0.0, 5.0, p0);
  bool mink_ok = mink.ok() && mink.residual_norm == 0.0;
  for (double H : mink.trajectory.H) mink_ok = mink_ok && H == 0.0;

  sceq::SolverParams pd;
  pd.grid_n = 64;
  pd.Lambda = 1e-4 * pd.Hc2 * pd.Hc2 / (960 * numerics::kPi * numerics::kPi);
  const double Hs = sceq::stationary_hubble(pd.Lambda, pd.Hc2);
  auto ds = sceq::solve_local(-1.0 / Hs, 1.0, Hs, -0.8 / Hs, pd);
  double ds_dev = 0;
  for (double H : ds.trajectory.H) ds_dev = std::max(ds_dev, std::abs(H - Hs));
  const bool ds_ok = ds.ok() && ds.residual_norm < kDeSitterResidual && ds_dev < kDeSitterResidual;

  Stopwatch sw;
  sceq::SolverParams pm;
  pm.m = 1.0;
  pm.grid_n = kMassiveGrid;
  pm.Lambda = sceq::constraint_check(0.0, 1.0, 1.0, pm);  // closes the constraint at H0 = 1
  auto mv = sceq::solve_local(0.0, 1.0, 1.0, 0.5, pm);
  const double t = sw.seconds();
  const bool mv_ok = mv.reason == sceq::Termination::converged && mv.lipschitz < 1.0 &&
                     mv.residual_norm < kMassiveResidual && mv.regularity.ok() && t < kTimeSolver;
  report(8, mink_ok && ds_ok && mv_ok, "solver: Minkowski, massless de Sitter fixed point, massive short window",
         std::string(mink_ok ? "Minkowski exact" : "Minkowski not exact") + fmt("; de Sitter residual %.1e", ds.residual_norm) +
             fmt(" (tol %.0e)", kDeSitterResidual) + fmt("; massive grid-n %.0f: ", kMassiveGrid) + sceq::to_string(mv.reason) +
             fmt(", ratio %.3f", mv.lipschitz) + fmt(", residual %.1e", mv.residual_norm) +
             (mv.regularity.ok() ? ", regular" : ", regularity violated") + fmt(", %.1f s", t) +
             fmt(" (limit %.0f s)", kTimeSolver));
}

void criterion9() {
  Stopwatch sw;
  fluct::FluctParams prm;
  const double C = fluct::harrison_zeldovich_C(prm.m);
  double limit_dev = 0;
  for (double k : {0.2, 1.0, 5.0}) {
    const double P = fluct::power_spectrum_P0(-100.0 / k, k, prm).value;
    limit_dev = std::max(limit_dev, std::abs(k * k * k * P / C - 1));
  }
  double max_ratio = 0, small_ratio = 0;
  for (double tau : {-1000.0, -100.0, -10.0, -1.0, -0.1, -0.01})
    for (double k : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      const double P = fluct::power_spectrum_P0(tau, k, prm).value;
      max_ratio = std::max(max_ratio, k * k * k * P / (16 * C));
    }
  for (double tau : {-0.1, -0.01, -0.001})
    for (double k : {0.1, 1.0, 10.0}) {
      const double P = fluct::power_spectrum_P0(tau, k, prm).value;
      small_ratio = std::max(small_ratio, std::abs(P) / (std::pow(prm.m, 4) * tau * tau / (36 * numerics::kPi * numerics::kPi * k)));
    }
  double scaling = 0;
  for (double kt : {-0.01, -0.3, -3.0, -30.0, -300.0}) {
    // non-dyadic factors, so the two p-grids do not coincide in floating point
    const double a = std::pow(0.3, 3) * fluct::power_spectrum_P0(kt / 0.3, 0.3, prm).value;
    const double b = std::pow(1.7, 3) * fluct::power_spectrum_P0(kt / 1.7, 1.7, prm).value;
    scaling = std::max(scaling, rel(a, b));
  }
  double aux = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int l = 0; l < 10; ++l) {
        const double tau = -10.0 + 9.9 * i / 9, kappa = 0.1 * std::pow(50.0, j / 9.0);
        double p = -6.0 + 12.0 * (l + 0.37) / 10;
        if (std::abs(std::abs(p) - kappa) < 0.05) p += 0.11;
        aux = std::max(aux, std::abs(fluct::auxA(tau, kappa, p) - oracle::auxA_direct(tau, kappa, p)) /
                                std::abs(oracle::auxA_direct(tau, kappa, p)));
      }
  const double t = sw.seconds();
  report(9,
         limit_dev < kSpectrumLimitRel && max_ratio <= 1.0 && small_ratio <= 1.0 && scaling < kScalingRel &&
             aux < kAuxARel && t < kTimeSpectrum,
         "fluctuations: large-|k tau| limit, 16C bound, small-tau bound, k tau scaling, auxA closed form",
         fmt("|k^3 P0/C - 1| at |k tau| = 100: %.2e", limit_dev) + fmt("; max k^3 P0/(16C) %.3f", max_ratio) +
             fmt("; max P0/small-tau bound %.2e", small_ratio) + fmt("; scaling %.1e", scaling) +
             fmt("; auxA vs quadrature %.1e", aux) + fmt("; %.1f s", t) + fmt(" (limit %.0f s)", kTimeSpectrum));
}

void criterion10() {
  Stopwatch sw;
  fluct::FluctParams prm;  // default grid
  const double s3 = std::sqrt(3.0);
  using V = fluct::Vec3;
  constexpr double s = 1.7;  // non-dyadic, so the scaled quadrature grid is genuinely different
  auto shrink = [](const V& v) { return V{v[0] / s, v[1] / s, v[2] / s}; };
  struct Config {
    const char* name;
    V k1, k2, k3;
  };
  const Config configs[] = {{"equilateral", {1, 0, 0}, {-0.5, s3 / 2, 0}, {-0.5, -s3 / 2, 0}},
                            {"squeezed", {1, 0, 0}, {-1.1, -0.1 * s3, 0}, {0.1, 0.1 * s3, 0}}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& c : configs) {
    const auto base = fluct::bispectrum_B0(-1.0, c.k1, c.k2, c.k3, prm);
    const auto cyc = fluct::bispectrum_B0(-1.0, c.k2, c.k3, c.k1, prm);
    const auto swp = fluct::bispectrum_B0(-1.0, c.k2, c.k1, c.k3, prm);
    const auto scl = fluct::bispectrum_B0(-s, shrink(c.k1), shrink(c.k2), shrink(c.k3), prm);
    const double perm = std::max(rel(cyc.value, base.value), rel(swp.value, base.value));
    const double scal = rel(scl.value * std::pow(s, -6), base.value);
    ok = ok && perm < kBispectrumRel && scal < kBispectrumRel;
    detail << c.name << fmt(" B0 = %.6e", base.value) << fmt(" perm %.1e", perm) << fmt(" scaling %.1e", scal)
           << fmt(" est.err %.1e", base.error / std::abs(base.value)) << "; ";
  }
  const double t = sw.seconds();
  ok = ok && t < kTimeBispectrum;
  detail << fmt("%.0f s", t) << fmt(" (limit %.0f s, tol ", kTimeBispectrum) << fmt("%.0e)", kBispectrumRel);
  report(10, ok, "bispectrum: permutation symmetry and k tau scaling, default accuracy", detail.str());
}

void criterion11() {
  bool ok = true;
  std::ostringstream detail;
  for (int n = 2; n <= 4; ++n) {
    const auto brute = oracle::wick_pairings(n);
    std::map<oracle::Lambda, BigInt> mine;
    BigInt total = 0;
    for (const auto& g : runcomb::wick_moment_graphs(n)) {
      mine[g.lambda] += g.pairing_weight * g.multiplicity;
      total += g.pairing_weight * g.multiplicity;
    }
    ok = ok && brute == mine;
    detail << "n=" << n << ": " << mine.size() << " matrices, " << total << " contractions" << (n < 4 ? "; " : "");
  }
  report(11, ok, "Wick moment graphs against exhaustive Gaussian pairings, n = 2, 3, 4", detail.str());
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4,
                                                   criterion5, criterion6, criterion7, criterion8,
                                                   criterion9, criterion10, criterion11};
  for (std::size_t i = 0; i < all.size(); ++i) {
    try {
      all[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, "exception", e.what());
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
  return failures == 0 ? 0 : 1;
}
