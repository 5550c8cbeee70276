#pragma once

#include "scg/numerics.hpp"

#include <array>
#include <complex>
#include <vector>

namespace scg::fluct {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

struct BispectrumGrid {
  int radial = 32;     // Gauss-Legendre nodes in the mapped radius
  int polar = 16;      // per hemisphere
  int azimuthal = 48;  // periodic trapezoid
};

struct FluctParams {
  double m = 1.0;  // field mass
  double H = 1.0;  // background Hubble constant
  double rel_tol = 1e-9;
  int max_subdivisions = 200000;
  double tail_scale = 200.0;  // numeric p-range reaches max(10 kappa, tail_scale / |tau|)
  BispectrumGrid grid;
  double bispectrum_rel_tol = 1e-2;
  int threads = 0;
};

// Closed form through E2; valid for every real p, with E2(0) = 1 at |p| = kappa.
cplx auxA(double tau, double kappa, double p);
double auxA_bound(double kappa, double p);                    // 4 kappa^2 / |kappa^2 - p^2|
double auxA_limit(double kappa, double p);                    // kappa^2 / |kappa^2 - p^2|
double auxA_small_time_bound(double tau, double kappa, double p);  // 2 kappa^2 |tau| / |p|

// (3 - 2 sqrt3 arccoth sqrt3) m^4 / (192 pi^2)
double harrison_zeldovich_C(double m);

struct SpectrumValue {
  double value = 0.0;       // P0
  double error = 0.0;       // quadrature error plus tail model error
  double tail = 0.0;        // contribution beyond the numeric range (limit form)
  double tail_bound = 0.0;  // rigorous bound on that contribution
  int evaluations = 0;
  bool converged = true;
};

SpectrumValue power_spectrum_P0(double tau, double k, const FluctParams& p = {});
// k^3 P0 at k = 1, tau = ktau.
double rescaled_profile(double ktau, const FluctParams& p = {});
std::vector<double> rescaled_profile(const std::vector<double>& ktau, const FluctParams& p = {});

struct SpectrumGrid {
  std::vector<double> tau, k;
  std::vector<std::vector<SpectrumValue>> P0;  // [i_tau][i_k]
  std::vector<std::vector<double>> k3P0;
};
SpectrumGrid spectrum_grid(const std::vector<double>& tau, const std::vector<double>& k,
                           const FluctParams& p = {});

double retarded_hat(double tau, double tau1, double k, double H);
// -6 H^2 tau^4 (d^2/dtau^2 + k^2/3) (tau^{-2} phi) in spatial Fourier space.
double hyperbolic_operator(double tau, double k, double H, double phi, double dphi, double d2phi);
// (1/(128 pi^5)) \int_k^\infty e^{-i p (tau - tau')} dp with the eps -> 0+ limit; throws at tau = tau'.
cplx minkowski_sq_kernel(double tau, double tau_prime, double k);
// P0 from its double-time definition, 2 H^4 m^4 \int\int Dret Dret tau1^2 tau'^2 w2hat, with the
// time integrals done numerically. Equals P0 / 2 with the stated normalization.
SpectrumValue P0_double_time(double tau, double k, const FluctParams& p = {});

struct BispectrumValue {
  double value = 0.0;  // real part
  double imag = 0.0;   // reported, expected to vanish
  double error = 0.0;  // coarse-vs-fine difference
  double coarse = 0.0;
  long evaluations = 0;
  bool degraded = false;
};

// Sum over the six orderings of the integrand, without the overall prefactor.
cplx bispectrum_integrand(double tau, const Vec3& k1, const Vec3& k2, const Vec3& k3, const Vec3& p);
BispectrumValue bispectrum_B0(double tau, const Vec3& k1, const Vec3& k2, const Vec3& k3,
                              const FluctParams& p = {});

}  // namespace scg::fluct
