#pragma once

#include "scg/numerics.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace scg::modes {

using cplx = std::complex<double>;

// Conformally coupled scalar on a spatially flat FLRW background in conformal time.
struct CosmoBackground {
  std::function<double(double)> a;
  std::function<double(double)> da;  // a'(tau)
  double tau0 = 0.0;
  double mass = 0.0;
  double tau_min = -1e300, tau_max = 1e300;  // domain of a
  std::string name = "custom";

  double a0() const { return a(tau0); }
  double V(double tau) const;   // m^2 (a^2 - a0^2)
  double dV(double tau) const;  // 2 m^2 a a'
  double k0(double k) const;    // sqrt(k^2 + a0^2 m^2)

  static CosmoBackground static_universe(double a0, double mass, double tau0 = 0.0);
  // a = c tau^p on tau > 0
  static CosmoBackground power_law(double c, double p, double mass, double tau0);
  // a = -1/(H tau) on tau < 0
  static CosmoBackground de_sitter(double hubble, double mass, double tau0);
  // Cubic Hermite through samples (tau, a, a').
  static CosmoBackground tabulated(std::vector<double> tau, std::vector<double> a,
                                   std::vector<double> da, double mass, double tau0);
};

struct ModeOptions {
  double tol = 1e-12;         // remainder bound target, relative to (2 k0)^{-1/2}
  int max_order = 400;
  int nodes_per_panel = 10;   // Chebyshev-Lobatto points
  double max_phase = 1.0;     // k0 * panel length
};

struct ModeResult {
  double k = 0.0, k0 = 0.0;
  std::vector<double> tau;
  std::vector<cplx> chi, dchi;
  std::vector<cplx> correction;  // chi - chi^(0), summed without cancellation
  int order = 0;                // partial modes summed
  double remainder_bound = 0.0; // a priori bound on the discarded sum
  double last_term = 0.0;       // max |chi^(N)| on the grid
  bool converged = true;
};

// chi^(0..n) sampled on the grid (rows indexed by n).
std::vector<std::vector<cplx>> partial_modes(const CosmoBackground& bg, double k, int n,
                                             const std::vector<double>& tau_grid,
                                             const ModeOptions& opt = {});
ModeResult mode(const CosmoBackground& bg, double k, const std::vector<double>& tau_grid,
                const ModeOptions& opt = {});

// (2 k0)^{-1/2}/n! min(X, Y)^n with X = k0^{-1} \int|V|, Y = \int (tau - eta)|V|.
double partial_mode_bound(const CosmoBackground& bg, double k, int n, double tau);

double wronskian_residual(cplx chi, cplx dchi);
double max_wronskian_residual(const ModeResult& m);

// Energy per mode rho(S, T); rho(S, conj S) is real.
cplx energy_per_mode(const CosmoBackground& bg, double tau, double k, cplx S, cplx dS, cplx T,
                     cplx dT, double xi = 1.0 / 6.0);

struct BogoliubovPair {
  cplx A;
  double B = 0.0;
};

struct BogoliubovResult {
  BogoliubovPair pair;
  cplx rho_mixed;    // rho(chi, chi), smeared
  double rho_diag;   // rho(chi, conj chi), smeared
  bool condition_ok = true;
};

// Minimizes the (smeared) energy over Bogoliubov transformations of chi.
// weights[j] = f(tau_j)^2 times quadrature weight; an empty vector selects the
// last grid point (instantaneous).
BogoliubovResult low_energy_bogoliubov(const CosmoBackground& bg, const ModeResult& m,
                                       const std::vector<double>& weights, double xi = 1.0 / 6.0);
double energy_difference(const BogoliubovPair& p, double rho_diag, cplx rho_mixed);
bool minimal_state_exists(const CosmoBackground& bg, double tau, double k, double xi = 1.0 / 6.0);

struct WickOptions {
  double lambda = 0.0;   // renormalization length; 0 selects sqrt(2) e^{-gamma} / m
  double k_max = 0.0;    // cutoff K*; 0 selects automatically
  int k_panels = 0;      // Gauss-Legendre panels on [0, K*]; 0 selects automatically
  ModeOptions modes{1e-12, 400, 10, 1.0};
  int threads = 0;
};

struct WickReport {
  std::vector<double> tau;
  std::vector<double> value;      // renormalized Wick square
  std::vector<double> integral;   // k-integral part including tails
  std::vector<double> local;      // closed local terms
  std::vector<double> tail;       // analytic tail beyond K*
  std::vector<double> error;      // estimated error of the k-integral
  double k_max = 0.0;
  int k_nodes = 0;
  bool converged = true;
};

double default_lambda(double mass);
double wick_local_terms(const CosmoBackground& bg, double tau, double lambda);
// Regularized k-integrand |chi|^2 - 1/(2 k0) + V/(4 k0^3) at each grid time.
std::vector<double> wick_integrand(const CosmoBackground& bg, const ModeResult& m);
WickReport wick_square(const CosmoBackground& bg, const std::vector<double>& tau_grid,
                       const WickOptions& opt = {});
double wick_square_at(const CosmoBackground& bg, double tau, const WickOptions& opt = {});

// Per-mode regularized energy at tau0, (chi terms) - (W0 terms) = -m^4 a0^2 a'^2 / (8 k0^5).
double initial_energy_integrand(const CosmoBackground& bg, double k);
// Energy density at tau0 from the regularized integrand, reported with positive sign:
// (1/(2 pi^2)) (1/(2 a0^4)) m^4 a0^2 a'^2 / 8 \int k^2 k0^{-5} dk = m^2 a'^2 / (96 pi^2 a0^4).
double energy_density_initial(const CosmoBackground& bg);
double energy_density_initial_numeric(const CosmoBackground& bg, const numerics::QuadConfig& cfg = {});

}  // namespace scg::modes
