#pragma once

#include "scg/modes.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace scg::sceq {

// Units 8 pi G = c = 1. Renormalization constants are fixed so that the
// box R and m^2 R terms drop out of the trace.
struct SolverParams {
  double m = 0.0;
  double Lambda = 0.0;
  double Hc2 = 1440.0 * numerics::kPi * numerics::kPi;
  double lambda = 0.0;     // Wick renormalization length, 0 = default for m
  double radiation = 0.0;  // classical radiation added to rho0 in the constraint
  int grid_n = 256;        // intervals per window
  double tol_delta = 1e-8; // times max(1, |H0|)
  double tol_residual = 1e-6;
  int max_iterations = 200;
  int max_retries = 8;
  double shrink = 0.5;
  double target_ratio = 0.5;  // extension keeps the measured Lipschitz ratio below this
  modes::WickOptions wick;
};

// Knots of an accepted solution; a and H on a uniform grid.
struct HubbleTrajectory {
  double tau0 = 0.0, a0 = 1.0, H0 = 0.0;
  std::vector<double> tau, H;
  std::vector<double> a;  // filled by the solver; recomputed from H when empty
};

enum class Termination { converged, reached_tau_max, hit_Hc, a_diverging, iteration_cap, not_closed };
std::string to_string(Termination t);

struct Regularity {
  bool below_Hc = true;         // |H| < H_c
  bool a_finite = true;         // a0 \int H < 1
  bool a_positive = true;
  double max_H_over_Hc = 0.0;
  double min_denominator = 1.0; // min of 1 - a0 \int H
  bool ok() const { return below_Hc && a_finite && a_positive; }
};

struct SolveReport {
  HubbleTrajectory trajectory;
  std::vector<double> a, wick, f, residual;  // on trajectory.tau
  std::vector<double> deltas;                // sup |F(H_k) - H_k| per iteration
  double lipschitz = 0.0;                    // largest ratio delta_{k+1}/delta_k over the second half
  double residual_norm = 0.0;
  Regularity regularity;
  Termination reason = Termination::not_closed;
  int iterations = 0;
  int retries = 0;
  int windows = 1;
  double state_tau0 = 0.0;  // anchor of the adiabatic state
  double wick_error = 0.0;  // largest k-integral error estimate of the Wick square
  bool ok() const { return reason == Termination::converged || reason == Termination::reached_tau_max; }
};

// Exact integral of the cubic interpolant over each interval, accumulated.
std::vector<double> cumulative_integral(const std::vector<double>& f, double h);
// Cubic interpolation of the samples at tau.
double interpolate(const HubbleTrajectory& t, double tau);

std::vector<double> scale_factor(const HubbleTrajectory& t);
Regularity check_regularity(const HubbleTrajectory& t, double Hc2);

double trace_integrand(double H, double a, double wick, const SolverParams& p);
// dH/dt from the trace equation.
double hubble_rate(double H, double wick, const SolverParams& p);
// Root of H^4 - 2 Hc^2 H^2 + 960 pi^2 Lambda = 0 below H_c.
double stationary_hubble(double Lambda, double Hc2 = 1440.0 * numerics::kPi * numerics::kPi);

// Fixed-point problem on one window [tau_start, tau_end]. Earlier knots (if any)
// extend the background back to the state anchor so the Wick square keeps its
// original initial data.
class PicardProblem {
 public:
  PicardProblem(SolverParams p, double tau_start, double a_start, double H_start, double tau_end,
                HubbleTrajectory history = {});

  const std::vector<double>& grid() const { return grid_; }
  double step() const { return h_; }
  const SolverParams& params() const { return p_; }
  double H0() const { return H0_; }

  std::vector<double> scale_factor(const std::vector<double>& H) const;
  std::vector<double> wick(const std::vector<double>& H, const std::vector<double>& a) const;
  std::vector<double> integrand(const std::vector<double>& H) const;
  std::vector<double> map(const std::vector<double>& H) const;
  Regularity regularity(const std::vector<double>& H) const;
  double last_wick_error() const { return wick_error_; }

 private:
  modes::CosmoBackground background(const std::vector<double>& H, const std::vector<double>& a) const;

  SolverParams p_;
  double a0_, H0_;
  double h_;
  std::vector<double> grid_;
  HubbleTrajectory history_;  // knots before tau_start, with their a values
  std::vector<double> history_a_;
  mutable std::uint64_t cache_key_ = 0;
  mutable bool cache_valid_ = false;
  mutable std::vector<double> cache_wick_;
  mutable double wick_error_ = 0.0;
};

double sup_distance(const std::vector<double>& x, const std::vector<double>& y);

SolveReport solve_local(double tau0, double a0, double H0, double tau1, const SolverParams& p);
SolveReport extend_maximal(const SolveReport& local, double tau_max, const SolverParams& p);

// 3 H0^2 - rho0 - Lambda - radiation for the order-zero adiabatic state at tau0.
double constraint_check(double tau0, double a0, double H0, const SolverParams& p);

// -6(Hdot + 2H^2) - omega(:T:) + 4 Lambda on the accepted solution, with Hdot from
// finite differences and the trace assembled from the Hadamard coefficient.
std::vector<double> trace_identity_residual(const SolveReport& r, const SolverParams& p);

}  // namespace scg::sceq
