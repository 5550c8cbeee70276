#include "scg/sceq.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace scg::sceq {

using numerics::kPi;

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::reached_tau_max: return "reached tau_max";
    case Termination::hit_Hc: return "hit H_c";
    case Termination::a_diverging: return "a diverging";
    case Termination::iteration_cap: return "iteration cap";
    case Termination::not_closed: return "not closed";
  }
  return "?";
}

std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 4) throw std::invalid_argument("cumulative_integral: need at least 4 samples");
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double piece;
    if (j == 0)
      piece = 9 * f[0] + 19 * f[1] - 5 * f[2] + f[3];
    else if (j + 2 == n)
      piece = f[j - 2] - 5 * f[j - 1] + 19 * f[j] + 9 * f[j + 1];
    else
      piece = -f[j - 1] + 13 * f[j] + 13 * f[j + 1] - f[j + 2];
    out[j + 1] = out[j] + h * piece / 24.0;
  }
  return out;
}

double interpolate(const HubbleTrajectory& t, double tau) {
  const auto& x = t.tau;
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("interpolate: empty trajectory");
  if (tau < x.front() || tau > x.back()) throw std::domain_error("interpolate: outside the grid");
  if (n < 4) {
    if (n == 1) return t.H[0];
    std::size_t i = std::min<std::size_t>(std::upper_bound(x.begin(), x.end(), tau) - x.begin(), n - 1);
    i = std::max<std::size_t>(i, 1);
    const double s = (tau - x[i - 1]) / (x[i] - x[i - 1]);
    return (1 - s) * t.H[i - 1] + s * t.H[i];
  }
  std::size_t i = std::upper_bound(x.begin(), x.end(), tau) - x.begin();
  i = i == 0 ? 0 : i - 1;  // interval [i, i+1]
  std::size_t lo = i == 0 ? 0 : i - 1;
  lo = std::min(lo, n - 4);
  double s = 0.0;
  for (std::size_t a = lo; a < lo + 4; ++a) {
    double w = 1.0;
    for (std::size_t b = lo; b < lo + 4; ++b)
      if (b != a) w *= (tau - x[b]) / (x[a] - x[b]);
    s += w * t.H[a];
  }
  return s;
}

namespace {

double uniform_step(const std::vector<double>& tau) {
  if (tau.size() < 4) throw std::invalid_argument("trajectory: need at least 4 knots");
  const double h = (tau.back() - tau.front()) / (tau.size() - 1);
  for (std::size_t i = 1; i < tau.size(); ++i)
    if (std::abs(tau[i] - tau[i - 1] - h) > 1e-9 * std::abs(h) + 1e-14 * std::abs(tau[i]))
      throw std::invalid_argument("trajectory: grid is not uniform");
  return h;
}

std::vector<double> a_from_H(double a0, const std::vector<double>& H, double h, Regularity* reg) {
  auto I = cumulative_integral(H, h);
  std::vector<double> a(H.size());
  double min_den = 1.0;
  for (std::size_t j = 0; j < H.size(); ++j) {
    const double den = 1.0 - a0 * I[j];
    min_den = std::min(min_den, den);
    a[j] = a0 / den;
  }
  if (reg) {
    reg->min_denominator = min_den;
    reg->a_finite = min_den > 0.0;
    reg->a_positive = min_den > 0.0;
  } else if (!(min_den > 0.0)) {
    throw std::domain_error("scale factor: a0 \\int H reached 1 (regularity b)");
  }
  return a;
}

std::uint64_t fnv1a(const std::vector<double>& v) {
  std::uint64_t h = 1469598103934665603ull;
  for (double d : v) {
    unsigned char b[sizeof(double)];
    std::memcpy(b, &d, sizeof d);
    for (unsigned char c : b) {
      h ^= c;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace

std::vector<double> scale_factor(const HubbleTrajectory& t) {
  return a_from_H(t.a0, t.H, uniform_step(t.tau), nullptr);
}

Regularity check_regularity(const HubbleTrajectory& t, double Hc2) {
  Regularity r;
  const double Hc = std::sqrt(Hc2);
  for (double H : t.H) {
    r.max_H_over_Hc = std::max(r.max_H_over_Hc, std::abs(H) / Hc);
    if (!(std::abs(H) < Hc)) r.below_Hc = false;
  }
  if (t.a.empty())
    a_from_H(t.a0, t.H, uniform_step(t.tau), &r);
  else
    for (double a : t.a) r.a_positive = r.a_positive && a > 0.0 && std::isfinite(a);
  r.a_finite = r.a_finite && r.a_positive;
  return r;
}

double hubble_rate(double H, double wick, const SolverParams& p) {
  const double H2 = H * H, den = p.Hc2 - H2;
  if (!(den > 0.0)) throw std::domain_error("trace equation: |H| reached H_c");
  const double m2 = p.m * p.m;
  return (H2 * H2 - 2.0 * p.Hc2 * H2 - 7.5 * m2 * m2 + 240.0 * kPi * kPi * (m2 * wick + 4.0 * p.Lambda)) / den;
}

double trace_integrand(double H, double a, double wick, const SolverParams& p) {
  return a * hubble_rate(H, wick, p);
}

double stationary_hubble(double Lambda, double Hc2) {
  const double x = 960.0 * kPi * kPi * Lambda / (Hc2 * Hc2);
  if (x > 1.0) throw std::domain_error("stationary_hubble: no real root for this Lambda");
  // Hc^2 (1 - sqrt(1 - x)) without cancellation
  return std::sqrt(Hc2 * x / (1.0 + std::sqrt(1.0 - x)));
}

double sup_distance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("sup_distance: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

PicardProblem::PicardProblem(SolverParams p, double tau_start, double a_start, double H_start,
                             double tau_end, HubbleTrajectory history)
    : p_(std::move(p)), a0_(a_start), H0_(H_start), history_(std::move(history)) {
  if (!(a_start > 0.0)) throw std::invalid_argument("solver: a0 must be positive");
  if (!(std::abs(H_start) < std::sqrt(p_.Hc2))) throw std::invalid_argument("solver: |H0| must be below H_c");
  if (!(tau_end > tau_start)) throw std::invalid_argument("solver: empty window");
  if (p_.grid_n < 3) throw std::invalid_argument("solver: grid_n must be at least 3");
  if (p_.m < 0.0) throw std::invalid_argument("solver: mass must be nonnegative");
  h_ = (tau_end - tau_start) / p_.grid_n;
  grid_.resize(p_.grid_n + 1);
  for (int j = 0; j <= p_.grid_n; ++j) grid_[j] = j == p_.grid_n ? tau_end : tau_start + j * h_;
  if (!history_.tau.empty()) {
    if (history_.a.size() != history_.tau.size()) throw std::invalid_argument("solver: history needs a samples");
    if (std::abs(history_.tau.back() - tau_start) > 1e-12 * std::max(1.0, std::abs(tau_start)))
      throw std::invalid_argument("solver: history must end at the window start");
  }
}

std::vector<double> PicardProblem::scale_factor(const std::vector<double>& H) const {
  return a_from_H(a0_, H, h_, nullptr);
}

Regularity PicardProblem::regularity(const std::vector<double>& H) const {
  Regularity r;
  const double Hc = std::sqrt(p_.Hc2);
  for (double v : H) {
    if (!std::isfinite(v)) {
      r.below_Hc = false;
      r.max_H_over_Hc = INFINITY;
      continue;
    }
    r.max_H_over_Hc = std::max(r.max_H_over_Hc, std::abs(v) / Hc);
    if (!(std::abs(v) < Hc)) r.below_Hc = false;
  }
  if (r.below_Hc) a_from_H(a0_, H, h_, &r);
  return r;
}

modes::CosmoBackground PicardProblem::background(const std::vector<double>& H,
                                                 const std::vector<double>& a) const {
  std::vector<double> t, av, dav;
  if (!history_.tau.empty()) {
    for (std::size_t i = 0; i + 1 < history_.tau.size(); ++i) {
      t.push_back(history_.tau[i]);
      av.push_back(history_.a[i]);
      dav.push_back(history_.a[i] * history_.a[i] * history_.H[i]);
    }
  }
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    t.push_back(grid_[j]);
    av.push_back(a[j]);
    dav.push_back(a[j] * a[j] * H[j]);
  }
  const double anchor = t.front();
  return modes::CosmoBackground::tabulated(std::move(t), std::move(av), std::move(dav), p_.m, anchor);
}

std::vector<double> PicardProblem::wick(const std::vector<double>& H, const std::vector<double>& a) const {
  if (p_.m == 0.0) return std::vector<double>(grid_.size(), 0.0);
  const std::uint64_t key = fnv1a(H);
  if (cache_valid_ && key == cache_key_) return cache_wick_;
  modes::WickOptions opt = p_.wick;
  if (p_.lambda > 0.0) opt.lambda = p_.lambda;
  auto rep = modes::wick_square(background(H, a), grid_, opt);
  if (!rep.converged) throw std::runtime_error("solver: mode expansion did not converge");
  wick_error_ = 0.0;
  for (double e : rep.error) wick_error_ = std::max(wick_error_, e);
  cache_key_ = key;
  cache_valid_ = true;
  cache_wick_ = rep.value;
  return rep.value;
}

std::vector<double> PicardProblem::integrand(const std::vector<double>& H) const {
  const auto a = scale_factor(H);
  const auto W = wick(H, a);
  std::vector<double> f(H.size());
  for (std::size_t j = 0; j < H.size(); ++j) f[j] = trace_integrand(H[j], a[j], W[j], p_);
  return f;
}

std::vector<double> PicardProblem::map(const std::vector<double>& H) const {
  if (H.size() != grid_.size()) throw std::invalid_argument("picard map: wrong sample count");
  auto I = cumulative_integral(integrand(H), h_);
  for (double& v : I) v += H0_;
  return I;
}

namespace {

Termination classify_failure(const Regularity& r) {
  if (r.max_H_over_Hc > 0.9 || !r.below_Hc) return Termination::hit_Hc;
  if (!r.a_finite || r.min_denominator < 1e-3) return Termination::a_diverging;
  return Termination::not_closed;
}

// Largest step ratio over the second half of the iteration; early Volterra
// iterates may grow before the factorial decay sets in.
double late_ratio(const std::vector<double>& d, double floor) {
  double k = 0.0;
  for (std::size_t i = std::max<std::size_t>(1, d.size() / 2); i < d.size(); ++i)
    if (d[i - 1] > floor) k = std::max(k, d[i] / d[i - 1]);
  return k;
}

SolveReport solve_window(double tau0, double a0, double H0, double tau1, const SolverParams& p,
                         const HubbleTrajectory& history) {
  SolveReport rep;
  rep.state_tau0 = history.tau.empty() ? tau0 : history.tau.front();
  const double tol_d = p.tol_delta * std::max(1.0, std::abs(H0));
  Regularity last_reg;
  for (int attempt = 0; attempt <= p.max_retries; ++attempt) {
    rep.retries = attempt;
    PicardProblem P(p, tau0, a0, H0, tau1, history);
    std::vector<double> H(P.grid().size(), H0), F;
    std::vector<double> deltas;
    bool closed = true, converged = false;
    int it = 0;
    for (it = 1; it <= p.max_iterations; ++it) {
      last_reg = P.regularity(H);
      if (!last_reg.ok()) {
        closed = false;
        break;
      }
      try {
        F = P.map(H);
      } catch (const std::domain_error&) {
        closed = false;
        break;
      }
      const double d = sup_distance(F, H);
      deltas.push_back(d);
      if (!std::isfinite(d)) {
        closed = false;
        break;
      }
      if (d < tol_d && d < p.tol_residual) {
        converged = true;
        break;
      }
      const std::size_t n = deltas.size();
      if (n >= 4 && deltas[n - 1] > deltas[n - 2] && deltas[n - 2] > deltas[n - 3] && deltas[n - 1] > deltas[0]) {
        closed = false;
        break;
      }
      H.swap(F);
    }
    rep.deltas = deltas;
    rep.iterations = std::min(it, p.max_iterations);
    if (!closed) {
      tau1 = tau0 + p.shrink * (tau1 - tau0);
      continue;
    }
    // accepted iterate H with residual H - F(H)
    const auto a = P.scale_factor(H);
    rep.trajectory.tau0 = tau0;
    rep.trajectory.a0 = a0;
    rep.trajectory.H0 = H0;
    rep.trajectory.tau = P.grid();
    rep.trajectory.H = H;
    rep.trajectory.a = a;
    rep.a = a;
    rep.wick = P.wick(H, a);
    rep.wick_error = P.last_wick_error();
    rep.f = P.integrand(H);
    rep.residual.resize(H.size());
    for (std::size_t j = 0; j < H.size(); ++j) rep.residual[j] = H[j] - F[j];
    rep.residual_norm = sup_distance(H, F);
    rep.lipschitz = late_ratio(deltas, 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(H0)));
    rep.regularity = P.regularity(H);
    rep.reason = converged ? Termination::converged : Termination::iteration_cap;
    return rep;
  }
  rep.regularity = last_reg;
  rep.reason = classify_failure(last_reg);
  return rep;
}

}  // namespace

SolveReport solve_local(double tau0, double a0, double H0, double tau1, const SolverParams& p) {
  return solve_window(tau0, a0, H0, tau1, p, {});
}

SolveReport extend_maximal(const SolveReport& local, double tau_max, const SolverParams& p) {
  if (!local.ok()) throw std::invalid_argument("extend_maximal: needs an accepted local solution");
  SolveReport rep = local;
  auto& tr = rep.trajectory;
  if (tr.tau.empty()) throw std::invalid_argument("extend_maximal: empty solution");
  double L = tr.tau.back() - tr.tau.front();
  const double min_len = 1e-12 * std::max({1.0, std::abs(tr.tau.back()), L});
  const int max_windows = 100000;
  const double a_blowup = 1e12 * tr.a.front();
  while (tr.tau.back() < tau_max) {
    if (tr.a.back() > a_blowup) {
      rep.reason = Termination::a_diverging;
      return rep;
    }
    if (rep.windows >= max_windows) {
      rep.reason = Termination::not_closed;
      return rep;
    }
    const double start = tr.tau.back();
    const double end = std::min(tau_max, start + L);
    if (end - start < min_len) {
      rep.reason = classify_failure(rep.regularity);
      return rep;
    }
    SolveReport w = solve_window(start, tr.a.back(), tr.H.back(), end, p, tr);
    if (!w.ok()) {
      // the shrunken window may still be usable next time round
      if (w.reason == Termination::not_closed && L > min_len) {
        L *= std::pow(p.shrink, p.max_retries + 1);
        rep.regularity = w.regularity;
        if (L > min_len) continue;
      }
      rep.reason = w.reason == Termination::iteration_cap ? Termination::iteration_cap : classify_failure(w.regularity);
      if (w.reason == Termination::hit_Hc || w.reason == Termination::a_diverging) rep.reason = w.reason;
      rep.regularity = w.regularity;
      return rep;
    }
    for (std::size_t j = 1; j < w.trajectory.tau.size(); ++j) {
      tr.tau.push_back(w.trajectory.tau[j]);
      tr.H.push_back(w.trajectory.H[j]);
      tr.a.push_back(w.trajectory.a[j]);
      rep.a.push_back(w.a[j]);
      rep.wick.push_back(w.wick[j]);
      rep.f.push_back(w.f[j]);
      rep.residual.push_back(w.residual[j]);
    }
    rep.deltas.insert(rep.deltas.end(), w.deltas.begin(), w.deltas.end());
    rep.iterations += w.iterations;
    rep.retries += w.retries;
    rep.windows += 1;
    rep.residual_norm = std::max(rep.residual_norm, w.residual_norm);
    rep.wick_error = std::max(rep.wick_error, w.wick_error);
    rep.lipschitz = std::max(rep.lipschitz, w.lipschitz);
    rep.regularity.max_H_over_Hc = std::max(rep.regularity.max_H_over_Hc, w.regularity.max_H_over_Hc);
    rep.regularity.min_denominator = std::min(rep.regularity.min_denominator, w.regularity.min_denominator);
    const double used = w.trajectory.tau.back() - w.trajectory.tau.front();
    if (w.retries > 0 || w.lipschitz > p.target_ratio)
      L = 0.5 * used;
    else if (w.lipschitz < 0.25 * p.target_ratio)
      L = 1.5 * used;
    else
      L = used;
  }
  rep.reason = Termination::reached_tau_max;
  return rep;
}

double constraint_check(double tau0, double a0, double H0, const SolverParams& p) {
  const double da = a0 * a0 * H0;
  modes::CosmoBackground bg;
  bg.a = [=](double t) { return a0 + da * (t - tau0); };
  bg.da = [=](double) { return da; };
  bg.tau0 = tau0;
  bg.mass = p.m;
  const double rho0 = modes::energy_density_initial(bg) + p.radiation;
  return 3.0 * H0 * H0 - rho0 - p.Lambda;
}

std::vector<double> trace_identity_residual(const SolveReport& r, const SolverParams& p) {
  const auto& t = r.trajectory.tau;
  const auto& H = r.trajectory.H;
  const std::size_t n = t.size();
  if (n < 5) throw std::invalid_argument("trace identity: need at least 5 knots");
  // derivative in tau from local quartic interpolation (exact for degree 4)
  auto deriv = [&](const std::vector<double>& y, std::size_t j) {
    std::size_t lo = j >= 2 ? j - 2 : 0;
    lo = std::min(lo, n - 5);
    double s = 0.0;
    for (std::size_t a = lo; a < lo + 5; ++a) {
      // d/dx of the Lagrange basis l_a at t_j
      double w = 0.0;
      for (std::size_t b = lo; b < lo + 5; ++b) {
        if (b == a) continue;
        double term = 1.0 / (t[a] - t[b]);
        for (std::size_t c = lo; c < lo + 5; ++c)
          if (c != a && c != b) term *= (t[j] - t[c]) / (t[a] - t[c]);
        w += term;
      }
      s += w * y[a];
    }
    return s;
  };
  std::vector<double> Hdot(n), R(n), Rdot(n), Rddot(n);
  for (std::size_t j = 0; j < n; ++j) Hdot[j] = deriv(H, j) / r.a[j];
  for (std::size_t j = 0; j < n; ++j) R[j] = 6.0 * (Hdot[j] + 2.0 * H[j] * H[j]);
  for (std::size_t j = 0; j < n; ++j) Rdot[j] = deriv(R, j) / r.a[j];
  for (std::size_t j = 0; j < n; ++j) Rddot[j] = deriv(Rdot, j) / r.a[j];
  const double m2 = p.m * p.m, pi2 = kPi * kPi;
  const double c34 = -1.0 / (2880.0 * pi2);  // 6 c3 + 2 c4
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double boxR = -(Rddot[j] + 3.0 * H[j] * Rdot[j]);
    const double v1 = -H[j] * H[j] * (Hdot[j] + H[j] * H[j]) / 60.0 - boxR / 720.0 + m2 * m2 / 8.0;
    const double trace = -m2 * r.wick[j] + v1 / (4.0 * pi2) - c34 * boxR;
    out[j] = -6.0 * (Hdot[j] + 2.0 * H[j] * H[j]) - trace + 4.0 * p.Lambda;
  }
  return out;
}

}  // namespace scg::sceq
