#include "scg/fluct.hpp"

#include "scg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scg::fluct {

using numerics::kPi;

namespace {

const double kSqrt3 = std::sqrt(3.0);

// \int_P^\infty (p^2 - kappa^2)^{-2} dp
double inverse_square_tail(double P, double kappa) {
  const double q = kappa / P;
  if (q < 0.1) {
    double s = 0.0, qq = 1.0;
    for (int n = 0; n < 30; ++n, qq *= q * q) s += (n + 1) * qq / (2 * n + 3);
    return s / (P * P * P);
  }
  return P / (2 * kappa * kappa * (P * P - kappa * kappa)) + std::log1p(-2 * kappa / (P + kappa)) / (4 * kappa * kappa * kappa);
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    w[i] = 2.0 / ((1 - z * z) * dp * dp);
  }
}

}  // namespace

cplx auxA(double tau, double kappa, double p) {
  if (!(tau < 0.0)) throw std::domain_error("auxA: tau must be negative");
  if (!(kappa > 0.0)) throw std::domain_error("auxA: kappa must be positive");
  if (!std::isfinite(p)) throw std::domain_error("auxA: p must be finite");
  const cplx i(0.0, 1.0);
  const cplx e_plus = numerics::exp_integral_E2(cplx(0.0, (p + kappa) * tau));
  const cplx e_minus = numerics::exp_integral_E2(cplx(0.0, (p - kappa) * tau));
  return 0.5 * i * kappa * tau * (e_plus * std::polar(1.0, kappa * tau) - e_minus * std::polar(1.0, -kappa * tau));
}

double auxA_bound(double kappa, double p) { return 4 * kappa * kappa / std::abs(kappa * kappa - p * p); }
double auxA_limit(double kappa, double p) { return kappa * kappa / std::abs(kappa * kappa - p * p); }
double auxA_small_time_bound(double tau, double kappa, double p) { return 2 * kappa * kappa * std::abs(tau) / std::abs(p); }

double harrison_zeldovich_C(double m) {
  const double acoth = 0.5 * std::log((kSqrt3 + 1) / (kSqrt3 - 1));
  return (3 - 2 * kSqrt3 * acoth) / (192 * kPi * kPi) * m * m * m * m;
}

namespace {

// \int_k^\infty g(p) dp on the split [k, 2 kappa, 10 kappa, P] plus the limit tail
template <class G>
SpectrumValue p_integral(double tau, double k, const FluctParams& prm, G&& g, double limit_weight) {
  const double kappa = k / kSqrt3;
  const double P = std::max(10 * kappa, prm.tail_scale / std::abs(tau));
  numerics::QuadConfig cfg;
  cfg.rel_tol = prm.rel_tol;
  cfg.abs_tol = 1e-15 * limit_weight * std::pow(kappa, 4) / (k * k * k);
  cfg.max_subdivisions = prm.max_subdivisions;
  SpectrumValue v;
  double sum = 0.0, err = 0.0;
  const double cuts[] = {k, 2 * kappa, 10 * kappa, P};
  for (int s = 0; s < 3; ++s) {
    if (!(cuts[s + 1] > cuts[s])) continue;
    auto r = numerics::adaptive_quad(g, cuts[s], cuts[s + 1], cfg);
    sum += r.value;
    err += r.error;
    v.evaluations += r.evaluations;
    v.converged = v.converged && r.converged;
  }
  // beyond P, |A|^2 -> kappa^4/(p^2 - kappa^2)^2 up to O(1/(p |tau|)) and is bounded by 16 times it
  const double tail = limit_weight * std::pow(kappa, 4) * inverse_square_tail(P, kappa);
  v.tail = tail;
  v.tail_bound = 16 * tail;
  v.value = sum + tail;
  v.error = err + tail / (P * std::abs(tau));
  return v;
}

}  // namespace

SpectrumValue power_spectrum_P0(double tau, double k, const FluctParams& prm) {
  if (!(tau < 0.0) || !(k > 0.0)) throw std::domain_error("P0: need tau < 0 and k > 0");
  if (!(prm.m > 0.0)) throw std::invalid_argument("P0: mass must be positive");
  const double kappa = k / kSqrt3;
  auto g = [&](double p) { return std::norm(auxA(tau, kappa, p)); };
  SpectrumValue v = p_integral(tau, k, prm, g, 1.0);
  const double pref = std::pow(prm.m, 4) / (16 * kPi * kPi * std::pow(k, 4));
  v.value *= pref;
  v.error *= pref;
  v.tail *= pref;
  v.tail_bound *= pref;
  if (!v.converged) throw numerics::QuadratureError("P0: quadrature did not converge", v.value, v.error);
  return v;
}

double rescaled_profile(double ktau, const FluctParams& p) {
  return power_spectrum_P0(ktau, 1.0, p).value;
}

std::vector<double> rescaled_profile(const std::vector<double>& ktau, const FluctParams& p) {
  std::vector<double> out(ktau.size());
  parallel_for(ktau.size(), [&](std::size_t i) { out[i] = rescaled_profile(ktau[i], p); }, p.threads);
  return out;
}

SpectrumGrid spectrum_grid(const std::vector<double>& tau, const std::vector<double>& k, const FluctParams& p) {
  SpectrumGrid g;
  g.tau = tau;
  g.k = k;
  g.P0.assign(tau.size(), std::vector<SpectrumValue>(k.size()));
  g.k3P0.assign(tau.size(), std::vector<double>(k.size()));
  parallel_for(
      tau.size() * k.size(),
      [&](std::size_t idx) {
        const std::size_t i = idx / k.size(), j = idx % k.size();
        g.P0[i][j] = power_spectrum_P0(tau[i], k[j], p);
        g.k3P0[i][j] = k[j] * k[j] * k[j] * g.P0[i][j].value;
      },
      p.threads);
  return g;
}

double retarded_hat(double tau, double tau1, double k, double H) {
  const double t2 = tau1 * tau1;
  return -1.0 / (6 * H * H) * (tau * tau / (t2 * t2)) * (kSqrt3 / k) * std::sin(k * (tau - tau1) / kSqrt3);
}

double hyperbolic_operator(double tau, double k, double H, double phi, double dphi, double d2phi) {
  const double t2 = tau * tau;
  const double u = phi / t2;
  const double d2u = d2phi / t2 - 4 * dphi / (t2 * tau) + 6 * phi / (t2 * t2);
  return -6 * H * H * t2 * t2 * (d2u + k * k / 3 * u);
}

cplx minkowski_sq_kernel(double tau, double tau_prime, double k) {
  const double d = tau - tau_prime;
  if (d == 0.0) throw std::domain_error("minkowski_sq_kernel: coincident times are distributional");
  return std::polar(1.0, -k * d) / (cplx(0.0, d) * (128 * std::pow(kPi, 5)));
}

SpectrumValue P0_double_time(double tau, double k, const FluctParams& prm) {
  if (!(tau < 0.0) || !(k > 0.0)) throw std::domain_error("P0_double_time: need tau < 0 and k > 0");
  const double H = prm.H, kappa = k / kSqrt3;
  // G(p) = \int_{-inf}^{tau} Dret(tau, t1) t1^2 e^{-i p t1} dt1; t1 in [T, tau] numerically, below T by parts
  const double T = std::min(100.0 * tau, tau - 100.0 / kappa);
  numerics::QuadConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12 / (6 * H * H * kappa * kappa);  // |G| ~ |A| / (6 H^2 kappa^2)
  cfg.max_subdivisions = 100000;
  auto G = [&](double p) {
    auto f = [&](double t1) { return retarded_hat(tau, t1, k, H) * t1 * t1 * std::polar(1.0, -p * t1); };
    cplx inner = numerics::adaptive_quad_complex(f, T, tau, cfg).value;
    // Dret t1^2 = c sin(kappa (tau - t1)) / t1^2 with x = -t1 >= -T:
    // sin(kappa(tau + x)) e^{i p x} / x^2 split into e^{i (p + kappa) x} and e^{i (p - kappa) x}
    const double c = -tau * tau / (6 * H * H * kappa);
    numerics::Envelope env{[](double x) { return 1.0 / (x * x); }, [](double x) { return -2.0 / (x * x * x); },
                           [](double x) { return 6.0 / (x * x * x * x); }, 2.0};
    const cplx up = numerics::oscillatory_tail(env, p + kappa, -T).value;
    const cplx dn = numerics::oscillatory_tail(env, p - kappa, -T).value;
    const cplx i(0.0, 1.0);
    const cplx s = (std::polar(1.0, kappa * tau) * up - std::polar(1.0, -kappa * tau) * dn) / (2.0 * i);
    return inner + c * s;
  };
  auto g = [&](double p) { return std::norm(G(p)); };
  // |G|^2 = |A|^2 / (4 H^4 k^4), so the same split and limit tail apply
  FluctParams q = prm;
  q.rel_tol = std::max(prm.rel_tol, 1e-7);
  SpectrumValue v = p_integral(tau, k, q, g, 1.0 / (4 * std::pow(H, 4) * std::pow(k, 4)));
  // 2 H^4 m^4 \int |G|^2 (2 pi)^3 / (128 pi^5) dp
  const double pref = 2 * std::pow(H, 4) * std::pow(prm.m, 4) * 8 * std::pow(kPi, 3) / (128 * std::pow(kPi, 5));
  v.value *= pref;
  v.error *= pref;
  v.tail *= pref;
  v.tail_bound *= pref;
  return v;
}

cplx bispectrum_integrand(double tau, const Vec3& k1, const Vec3& k2, const Vec3& k3, const Vec3& p) {
  const Vec3* ks[3] = {&k1, &k2, &k3};
  const double r = norm(p);
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  cplx sum = 0.0;
  for (const auto& s : perms) {
    const Vec3& ka = *ks[s[0]];
    const Vec3& kb = *ks[s[1]];
    const Vec3& kc = *ks[s[2]];
    const double wa = norm(sub(p, ka));  // omega_p(-k_a)
    const double wc = norm(add(p, kc));  // omega_p(k_c)
    const double kap_a = norm(ka) / kSqrt3, kap_b = norm(kb) / kSqrt3, kap_c = norm(kc) / kSqrt3;
    sum += auxA(tau, kap_a, wa + r) * auxA(tau, kap_c, -wc - r) * auxA(tau, kap_b, wc - wa) / (wa * wc * r);
  }
  return sum;
}

namespace {

struct Cubature {
  cplx value;
  long evals = 0;
};

Cubature bispectrum_cubature(double tau, const Vec3& k1, const Vec3& k2, const Vec3& k3, const BispectrumGrid& g,
                             int threads) {
  if (g.radial < 2 || g.polar < 1 || g.azimuthal < 3) throw std::invalid_argument("bispectrum: grid too small");
  const double n1 = norm(k1), n2 = norm(k2), n3 = norm(k3);
  const double L = (n1 + n2 + n3) / 3;
  // frame with the polar axis normal to the plane of the triangle
  Vec3 nrm = cross(k1, k2);
  if (norm(nrm) < 1e-12 * n1 * n2) {
    Vec3 t = std::abs(k1[0]) < 0.9 * n1 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    nrm = cross(k1, t);
  }
  nrm = scale(nrm, 1 / norm(nrm));
  const Vec3 e1 = scale(k1, 1 / n1);
  const Vec3 e2 = cross(nrm, e1);
  const std::array<Vec3, 7> centers = {Vec3{0, 0, 0}, k1, scale(k1, -1), k2, scale(k2, -1), k3, scale(k3, -1)};

  std::vector<double> xr, wr, xt, wt;
  gauss_legendre(g.radial, xr, wr);
  gauss_legendre(g.polar, xt, wt);
  const int nphi = g.azimuthal;
  // polar nodes on [0, pi/2] and [pi/2, pi]
  std::vector<double> th, wth;
  for (int h = 0; h < 2; ++h)
    for (int i = 0; i < g.polar; ++i) {
      th.push_back(kPi / 4 * (xt[i] + 1) + h * kPi / 2);
      wth.push_back(kPi / 4 * wt[i]);
    }
  const std::size_t jobs = centers.size() * g.radial;
  std::vector<cplx> partial(jobs, 0.0);
  parallel_for(
      jobs,
      [&](std::size_t job) {
        const auto& c = centers[job / g.radial];
        const int ir = static_cast<int>(job % g.radial);
        const double s = 0.5 * (xr[ir] + 1);
        const double rad = L * s / (1 - s);
        const double wrad = 0.5 * wr[ir] * L / ((1 - s) * (1 - s));
        numerics::CompensatedSum<cplx> acc;
        for (std::size_t it = 0; it < th.size(); ++it) {
          const double st = std::sin(th[it]), ct = std::cos(th[it]);
          for (int ip = 0; ip < nphi; ++ip) {
            const double ph = 2 * kPi * (ip + 0.5) / nphi;
            const double cp = std::cos(ph), sp = std::sin(ph);
            Vec3 p;
            for (int d = 0; d < 3; ++d) p[d] = c[d] + rad * (st * cp * e1[d] + st * sp * e2[d] + ct * nrm[d]);
            double inv = 0.0, own = 0.0;
            for (const auto& q : centers) {
              const Vec3 dq = sub(p, q);
              const double d2 = dq[0] * dq[0] + dq[1] * dq[1] + dq[2] * dq[2];
              if (d2 == 0.0) {
                inv = -1.0;
                break;
              }
              inv += 1.0 / d2;
              if (&q == &c) own = 1.0 / d2;
            }
            if (inv < 0.0) continue;  // lands exactly on a center: measure zero
            const double w = own / inv;
            const cplx f = bispectrum_integrand(tau, k1, k2, k3, p);
            acc.add(w * f * rad * rad * st * wrad * wth[it] * (2 * kPi / nphi));
          }
        }
        partial[job] = acc.value();
      },
      threads);
  Cubature out;
  numerics::CompensatedSum<cplx> tot;
  for (const auto& v : partial) tot.add(v);
  out.value = tot.value();
  out.evals = static_cast<long>(jobs) * static_cast<long>(th.size()) * nphi;
  return out;
}

}  // namespace

BispectrumValue bispectrum_B0(double tau, const Vec3& k1, const Vec3& k2, const Vec3& k3, const FluctParams& prm) {
  if (!(tau < 0.0)) throw std::domain_error("bispectrum: tau must be negative");
  const double n1 = norm(k1), n2 = norm(k2), n3 = norm(k3);
  if (!(n1 > 0 && n2 > 0 && n3 > 0)) throw std::domain_error("bispectrum: momenta must be nonzero");
  const Vec3 s = add(add(k1, k2), k3);
  if (norm(s) > 1e-10 * (n1 + n2 + n3)) throw std::domain_error("bispectrum: k1 + k2 + k3 must vanish");
  const double pref = std::pow(prm.m, 6) / (32 * kSqrt3 * n1 * n1 * n2 * n2 * n3 * n3);
  BispectrumGrid coarse = prm.grid;
  coarse.radial = std::max(2, prm.grid.radial / 2);
  coarse.polar = std::max(1, prm.grid.polar / 2);
  coarse.azimuthal = std::max(3, prm.grid.azimuthal / 2);
  const Cubature fine = bispectrum_cubature(tau, k1, k2, k3, prm.grid, prm.threads);
  const Cubature crude = bispectrum_cubature(tau, k1, k2, k3, coarse, prm.threads);
  BispectrumValue v;
  v.value = pref * fine.value.real();
  v.imag = pref * fine.value.imag();
  v.coarse = pref * crude.value.real();
  v.error = std::abs(v.value - v.coarse);
  v.evaluations = fine.evals + crude.evals;
  v.degraded = v.error > prm.bispectrum_rel_tol * std::abs(v.value);
  return v;
}

}  // namespace scg::fluct
