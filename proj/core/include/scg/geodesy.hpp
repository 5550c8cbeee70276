#pragma once

#include "scg/jet_poly.hpp"

#include <functional>
#include <string>
#include <vector>

namespace scg::geodesy {

// Taylor jet of a metric about a base point x: g_{mu nu}(x + h) as polynomials
// in h, truncated at `order`.
struct MetricJet {
  int dim = 4;
  int order = 0;
  std::vector<double> base;   // coordinates of x, informational
  std::vector<JetPoly> g;     // dim*dim row-major, polynomials in dim variables
  std::string signature = "-+++";

  const JetPoly& component(int mu, int nu) const { return g[mu * dim + nu]; }

  static MetricJet minkowski(int dim = 4, int order = 8);
  // ds^2 = a(tau)^2(-dtau^2 + dx^2); conformal_hubble = (H, H', H'', ...) in conformal time.
  static MetricJet flrw_conformal(double a, const std::vector<double>& conformal_hubble, int order,
                                  int dim = 4);
  // ds^2 = -dt^2 + a(t)^2 dx^2; hubble = (H, Hdot, Hddot, ...).
  static MetricJet flrw_cosmological(double a, const std::vector<double>& hubble, int order,
                                     int dim = 4);
  // a = -1/(H tau), tau < 0, exact jet to any order.
  static MetricJet desitter_conformal(double hubble, double tau, int order, int dim = 4);
  // Taylor coefficients from analytic partial derivatives d^alpha g_{mu nu}.
  static MetricJet from_partials(
      int dim, int order,
      const std::function<double(int mu, int nu, const std::vector<int>& alpha)>& partial);
  // Central finite differences of a metric function; the step grows with the
  // derivative order from rel_step * max(|x|, 1) to keep roundoff bounded.
  static MetricJet from_function(
      int dim, const std::function<std::vector<double>(const std::vector<double>&)>& metric,
      const std::vector<double>& x, int order, double rel_step = 1e-5);
};

class SigmaCoefficients {
 public:
  int dim() const { return dim_; }
  int order() const { return order_; }

  // varsigma_{mu_1...mu_m}(x); indices in any order.
  double coefficient(const std::vector<int>& indices) const;
  // Coordinate partial d^alpha varsigma_{mu_1...mu_m}(x), alpha as counts per coordinate.
  double partial(const std::vector<int>& indices, const std::vector<int>& alpha) const;
  // Full rank-m array, row-major over dim^m entries.
  std::vector<double> tensor(int m) const;

  double eval(const std::vector<double>& dx) const;
  // d sigma / d x^mu at fixed x' = x + dx.
  std::vector<double> gradient(const std::vector<double>& dx) const;
  // g^{mu nu}(x) sigma_mu sigma_nu - 2 sigma for the truncated series.
  double transport_residual(const std::vector<double>& dx) const;

  // (1/m!) varsigma dx...dx as a polynomial in (h, dx), h-truncated at order - m.
  const JetPoly& term(int m) const { return terms_.at(m); }

 private:
  friend SigmaCoefficients sigma_coeffs(const MetricJet& g, int order);
  int dim_ = 0;
  int order_ = 0;
  std::vector<JetPoly> terms_;
  std::vector<double> ginv0_;
};

SigmaCoefficients sigma_coeffs(const MetricJet& g, int order);
double sigma_eval(const SigmaCoefficients& c, const std::vector<double>& dx);

// Truncated inverse metric jet, polynomials in dim variables.
std::vector<JetPoly> inverse_metric_jet(const MetricJet& g, int order);

enum class FlrwChart { cosmological, conformal };

// The sixth-order closed-form expansion, truncated at total degree `order` in
// the separation. derivs = (H, H', H'', H''') in the chart's time variable.
double flrw_sigma_reference(FlrwChart chart, const std::vector<double>& derivs, double a,
                            double dt, double dx2, int order = 6);

struct DeSitterPair {
  double tau, tau_p;
  std::vector<double> x, x_p;
  double hubble = 1.0;
};

double desitter_Z(const DeSitterPair& p);
double desitter_sigma(double Z, double hubble);
// Same, evaluated through 1 - Z to keep precision near coincidence.
double desitter_sigma(const DeSitterPair& p);

}  // namespace scg::geodesy
