#include "scg/modes.hpp"

#include "scg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace scg::modes {

using numerics::kEulerGamma;
using numerics::kPi;

double CosmoBackground::V(double tau) const {
  const double at = a(tau), a0v = a0();
  return mass * mass * (at - a0v) * (at + a0v);
}

double CosmoBackground::dV(double tau) const { return 2.0 * mass * mass * a(tau) * da(tau); }

double CosmoBackground::k0(double k) const {
  const double c = a0() * mass;
  return std::sqrt(k * k + c * c);
}

CosmoBackground CosmoBackground::static_universe(double a0, double mass, double tau0) {
  if (!(a0 > 0.0)) throw std::invalid_argument("static background: a0 must be positive");
  CosmoBackground bg;
  bg.a = [a0](double) { return a0; };
  bg.da = [](double) { return 0.0; };
  bg.tau0 = tau0;
  bg.mass = mass;
  bg.name = "static";
  return bg;
}

CosmoBackground CosmoBackground::power_law(double c, double p, double mass, double tau0) {
  if (!(c > 0.0) || !(tau0 > 0.0)) throw std::invalid_argument("power-law background: c, tau0 must be positive");
  CosmoBackground bg;
  bg.a = [c, p](double t) { return c * std::pow(t, p); };
  bg.da = [c, p](double t) { return c * p * std::pow(t, p - 1.0); };
  bg.tau0 = tau0;
  bg.mass = mass;
  bg.tau_min = 0.0;
  bg.tau_max = 1e300;
  bg.name = "powerlaw";
  return bg;
}

CosmoBackground CosmoBackground::de_sitter(double hubble, double mass, double tau0) {
  if (!(hubble > 0.0) || !(tau0 < 0.0)) throw std::invalid_argument("de Sitter background: need H > 0, tau0 < 0");
  CosmoBackground bg;
  bg.a = [hubble](double t) { return -1.0 / (hubble * t); };
  bg.da = [hubble](double t) { return 1.0 / (hubble * t * t); };
  bg.tau0 = tau0;
  bg.mass = mass;
  bg.tau_min = -1e300;
  bg.tau_max = 0.0;
  bg.name = "desitter";
  return bg;
}

CosmoBackground CosmoBackground::tabulated(std::vector<double> tau, std::vector<double> a,
                                           std::vector<double> da, double mass, double tau0) {
  const std::size_t n = tau.size();
  if (n < 2 || a.size() != n || da.size() != n) throw std::invalid_argument("tabulated background: need matching samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(tau[i] > tau[i - 1])) throw std::invalid_argument("tabulated background: tau must increase");
  for (double v : a)
    if (!(v > 0.0)) throw std::invalid_argument("tabulated background: a must be positive");
  struct Table {
    std::vector<double> t, a, d;
    std::size_t locate(double x) const {
      auto it = std::upper_bound(t.begin(), t.end(), x);
      std::size_t i = it == t.begin() ? 0 : std::size_t(it - t.begin()) - 1;
      return std::min(i, t.size() - 2);
    }
  };
  auto tab = std::make_shared<Table>(Table{std::move(tau), std::move(a), std::move(da)});
  CosmoBackground bg;
  bg.a = [tab](double x) {
    std::size_t i = tab->locate(x);
    const double h = tab->t[i + 1] - tab->t[i], s = (x - tab->t[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * tab->a[i] + h10 * h * tab->d[i] + h01 * tab->a[i + 1] + h11 * h * tab->d[i + 1];
  };
  bg.da = [tab](double x) {
    std::size_t i = tab->locate(x);
    const double h = tab->t[i + 1] - tab->t[i], s = (x - tab->t[i]) / h;
    const double d00 = 6 * s * (s - 1), d10 = (1 - s) * (1 - 3 * s);
    const double d01 = -6 * s * (s - 1), d11 = s * (3 * s - 2);
    return (d00 * tab->a[i] + d01 * tab->a[i + 1]) / h + d10 * tab->d[i] + d11 * tab->d[i + 1];
  };
  bg.tau0 = tau0;
  bg.mass = mass;
  bg.tau_min = tab->t.front();
  bg.tau_max = tab->t.back();
  bg.name = "tabulated";
  return bg;
}

namespace {

// Chebyshev-Lobatto nodes on [-1, 1] with the cumulative integration matrix
// Q[i][j] = \int_{-1}^{x_i} l_j.
struct Spectral {
  int p = 0;
  std::vector<double> x;
  std::vector<double> Q;  // row-major p x p
};

Spectral build_spectral(int p) {
  Spectral s;
  s.p = p;
  s.x.resize(p);
  for (int j = 0; j < p; ++j) s.x[j] = -std::cos(kPi * j / (p - 1));
  // Vandermonde in Chebyshev polynomials, V[i][k] = T_k(x_i)
  std::vector<double> V(p * p), W(p * p);
  auto cheb = [](int k, double x) { return std::cos(k * std::acos(std::clamp(x, -1.0, 1.0))); };
  auto cheb_int = [&](int k, double x) {
    // \int_{-1}^{x} T_k
    auto F = [&](double y) {
      if (k == 0) return y;
      if (k == 1) return 0.5 * y * y;
      return cheb(k + 1, y) / (2.0 * (k + 1)) - cheb(k - 1, y) / (2.0 * (k - 1));
    };
    return F(x) - F(-1.0);
  };
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < p; ++k) {
      V[i * p + k] = cheb(k, s.x[i]);
      W[i * p + k] = cheb_int(k, s.x[i]);
    }
  // Q = W V^{-1}: solve V^T Q^T = W^T column by column via Gauss-Jordan on V^T
  std::vector<double> A(p * p), B(p * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      A[i * p + j] = V[j * p + i];
      B[i * p + j] = W[j * p + i];
    }
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int r = c + 1; r < p; ++r)
      if (std::abs(A[r * p + c]) > std::abs(A[piv * p + c])) piv = r;
    for (int k = 0; k < p; ++k) {
      std::swap(A[c * p + k], A[piv * p + k]);
      std::swap(B[c * p + k], B[piv * p + k]);
    }
    const double d = A[c * p + c];
    for (int k = 0; k < p; ++k) {
      A[c * p + k] /= d;
      B[c * p + k] /= d;
    }
    for (int r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = A[r * p + c];
      if (f == 0.0) continue;
      for (int k = 0; k < p; ++k) {
        A[r * p + k] -= f * A[c * p + k];
        B[r * p + k] -= f * B[c * p + k];
      }
    }
  }
  s.Q.resize(p * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) s.Q[i * p + j] = B[j * p + i];
  return s;
}

const Spectral& spectral(int p) {
  static std::mutex mu;
  static std::map<int, Spectral> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, build_spectral(p)).first;
  return it->second;
}

struct Layout {
  int p = 0;
  std::vector<double> node;      // panel-major, p per panel
  std::vector<double> half_len;  // per panel
  std::vector<int> knot_node;    // node index of each requested grid time
};

Layout make_layout(const CosmoBackground& bg, double k0, const std::vector<double>& grid,
                   const ModeOptions& opt) {
  if (grid.empty()) throw std::invalid_argument("mode: empty time grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < bg.tau0) throw std::domain_error("mode: times before tau0 are not supported");
    if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument("mode: time grid must be sorted");
  }
  const Spectral& sp = spectral(opt.nodes_per_panel);
  Layout L;
  L.p = sp.p;
  double prev = bg.tau0;
  int last_node = 0;
  bool have_node = false;
  for (double t : grid) {
    if (t > prev) {
      const double len = t - prev;
      const int panels = std::max(1, static_cast<int>(std::ceil(k0 * len / opt.max_phase)));
      for (int q = 0; q < panels; ++q) {
        const double lo = prev + len * q / panels;
        const double hi = q + 1 == panels ? t : prev + len * (q + 1) / panels;
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int j = 0; j < sp.p; ++j) L.node.push_back(j == 0 ? lo : (j + 1 == sp.p ? hi : c + h * sp.x[j]));
        L.half_len.push_back(h);
      }
      last_node = static_cast<int>(L.node.size()) - 1;
      have_node = true;
      prev = t;
    }
    if (!have_node) {
      // grid point at tau0 itself: a degenerate panel keeps indexing uniform
      for (int j = 0; j < sp.p; ++j) L.node.push_back(bg.tau0);
      L.half_len.push_back(0.0);
      last_node = 0;
      have_node = true;
    }
    L.knot_node.push_back(last_node);
  }
  return L;
}

// Cumulative \int_{tau0}^{node} f over all nodes, panel by panel.
template <class T>
void cumulative(const Layout& L, const std::vector<T>& f, std::vector<T>& out) {
  const Spectral& sp = spectral(L.p);
  const int p = L.p;
  out.resize(f.size());
  T offset{};
  const std::size_t panels = L.half_len.size();
  for (std::size_t q = 0; q < panels; ++q) {
    const T* fq = f.data() + q * p;
    T* oq = out.data() + q * p;
    const double h = L.half_len[q];
    for (int i = 0; i < p; ++i) {
      T acc{};
      const double* row = sp.Q.data() + i * p;
      for (int j = 0; j < p; ++j) acc += row[j] * fq[j];
      oq[i] = offset + h * acc;
    }
    offset = oq[p - 1];
  }
}

struct Solution {
  Layout L;
  std::vector<std::vector<cplx>> terms;  // optional partial modes at nodes
  std::vector<cplx> chi, dchi, corr;
  int order = 0;
  double bound = 0.0, last = 0.0;
  bool converged = true;
};

double factorial_ratio_tail(double c, int N) {
  // sum_{n > N} c^n / n! <= c^{N+1}/(N+1)! e^c
  double t = 1.0;
  for (int n = 1; n <= N + 1; ++n) t *= c / n;
  return t * std::exp(c);
}

Solution solve(const CosmoBackground& bg, double k, const std::vector<double>& grid,
               const ModeOptions& opt, int fixed_order, bool keep_terms) {
  if (!(k >= 0.0)) throw std::invalid_argument("mode: k must be nonnegative");
  const double k0 = bg.k0(k);
  if (!(k0 > 0.0)) throw std::domain_error("mode: k0 must be positive (k = 0 with m = 0)");
  Solution S;
  S.L = make_layout(bg, k0, grid, opt);
  const Layout& L = S.L;
  const std::size_t n = L.node.size();
  std::vector<double> cs(n), sn(n), V(n);
  std::vector<cplx> chi0(n);
  const double norm = 1.0 / std::sqrt(2.0 * k0);
  const cplx phase0 = std::polar(norm, k0 * bg.tau0);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = L.node[j] - bg.tau0;
    cs[j] = std::cos(k0 * s);
    sn[j] = std::sin(k0 * s);
    V[j] = bg.V(L.node[j]);
    chi0[j] = phase0 * cplx(cs[j], sn[j]);
  }
  // a priori bound constants at the last time
  double X = 0.0, Y = 0.0;
  {
    std::vector<double> absV(n), wV(n), cum;
    const double tend = L.node.back();
    for (std::size_t j = 0; j < n; ++j) {
      absV[j] = std::abs(V[j]);
      wV[j] = (tend - L.node[j]) * absV[j];
    }
    cumulative(L, absV, cum);
    X = cum.back() / k0;
    cumulative(L, wV, cum);
    Y = cum.back();
  }
  const double c = std::min(X, Y);

  S.chi = chi0;
  S.corr.assign(n, 0.0);
  S.dchi.resize(n);
  std::vector<cplx> dcorr(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) S.dchi[j] = cplx(0.0, k0) * chi0[j];
  if (keep_terms) S.terms.push_back(chi0);

  std::vector<cplx> prev = chi0, gs(n), gc(n), Is, Ic, term(n);
  int negligible = 0;
  int N = 0;
  const int cap = fixed_order >= 0 ? fixed_order : opt.max_order;
  for (int order = 1; order <= cap; ++order) {
    if (fixed_order < 0) {
      if (factorial_ratio_tail(c, order - 1) < opt.tol) break;
      if (negligible >= 2) break;
    }
    bool all_zero = true;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx g = V[j] * prev[j];
      gs[j] = sn[j] * g;
      gc[j] = cs[j] * g;
      all_zero = all_zero && g == cplx(0.0);
    }
    double mx = 0.0;
    if (all_zero) {
      std::fill(term.begin(), term.end(), cplx(0.0));
    } else {
      cumulative(L, gs, Is);
      cumulative(L, gc, Ic);
      for (std::size_t j = 0; j < n; ++j) {
        term[j] = (cs[j] * Is[j] - sn[j] * Ic[j]) / k0;
        dcorr[j] -= cs[j] * Ic[j] + sn[j] * Is[j];
        S.corr[j] += term[j];
        mx = std::max(mx, std::abs(term[j]));
      }
    }
    if (keep_terms) S.terms.push_back(term);
    N = order;
    S.last = mx;
    negligible = mx < 1e-17 * norm ? negligible + 1 : 0;
    prev.swap(term);
    if (all_zero) {
      negligible = 2;
      if (fixed_order < 0) break;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    S.chi[j] = chi0[j] + S.corr[j];
    S.dchi[j] += dcorr[j];
  }
  S.order = N;
  S.bound = norm * factorial_ratio_tail(c, N);
  S.converged = fixed_order >= 0 || S.bound < opt.tol * norm || negligible >= 2;
  return S;
}

}  // namespace

std::vector<std::vector<cplx>> partial_modes(const CosmoBackground& bg, double k, int n,
                                             const std::vector<double>& tau_grid,
                                             const ModeOptions& opt) {
  if (n < 0) throw std::invalid_argument("partial_modes: n must be >= 0");
  Solution S = solve(bg, k, tau_grid, opt, n, true);
  std::vector<std::vector<cplx>> out;
  for (const auto& t : S.terms) {
    std::vector<cplx> row;
    for (int idx : S.L.knot_node) row.push_back(t[idx]);
    out.push_back(std::move(row));
  }
  while (static_cast<int>(out.size()) <= n) out.emplace_back(tau_grid.size(), cplx(0.0));
  return out;
}

ModeResult mode(const CosmoBackground& bg, double k, const std::vector<double>& tau_grid,
                const ModeOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("mode: tol must be positive");
  Solution S = solve(bg, k, tau_grid, opt, -1, false);
  ModeResult r;
  r.k = k;
  r.k0 = bg.k0(k);
  r.tau = tau_grid;
  for (int idx : S.L.knot_node) {
    r.chi.push_back(S.chi[idx]);
    r.dchi.push_back(S.dchi[idx]);
    r.correction.push_back(S.corr[idx]);
  }
  r.order = S.order;
  r.remainder_bound = S.bound;
  r.last_term = S.last;
  r.converged = S.converged;
  return r;
}

double partial_mode_bound(const CosmoBackground& bg, double k, int n, double tau) {
  const double k0 = bg.k0(k);
  auto absV = [&](double t) { return std::abs(bg.V(t)); };
  numerics::QuadConfig cfg;
  cfg.abs_tol = 1e-14;
  cfg.rel_tol = 1e-12;
  const double X = numerics::adaptive_quad(absV, bg.tau0, tau, cfg).value / k0;
  const double Y = numerics::adaptive_quad([&](double t) { return (tau - t) * absV(t); }, bg.tau0, tau, cfg).value;
  double b = 1.0 / std::sqrt(2.0 * k0);
  const double c = std::min(X, Y);
  for (int i = 1; i <= n; ++i) b *= c / i;
  return b;
}

double wronskian_residual(cplx chi, cplx dchi) {
  return std::abs(std::conj(chi) * dchi - std::conj(dchi) * chi - cplx(0.0, 1.0));
}

double max_wronskian_residual(const ModeResult& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.chi.size(); ++i) r = std::max(r, wronskian_residual(m.chi[i], m.dchi[i]));
  return r;
}

cplx energy_per_mode(const CosmoBackground& bg, double tau, double k, cplx S, cplx dS, cplx T,
                     cplx dT, double xi) {
  const double a = bg.a(tau), ch = bg.da(tau) / a;  // a H = a'/a
  const double c = 6.0 * xi - 1.0;
  const double m = bg.mass;
  return (dS * dT + c * ch * (dS * T + S * dT) + (k * k + a * a * m * m - c * ch * ch) * S * T) /
         (2.0 * a * a * a * a);
}

double energy_difference(const BogoliubovPair& p, double rho_diag, cplx rho_mixed) {
  return p.B * p.B * rho_diag + std::real(p.A * p.B * rho_mixed);
}

bool minimal_state_exists(const CosmoBackground& bg, double tau, double k, double xi) {
  const double a = bg.a(tau), H = bg.da(tau) / (a * a);
  return k * k + a * a * (bg.mass * bg.mass + 6.0 * (1.0 - 6.0 * xi) * xi * H * H) > 0.0;
}

BogoliubovResult low_energy_bogoliubov(const CosmoBackground& bg, const ModeResult& m,
                                       const std::vector<double>& weights, double xi) {
  if (m.chi.empty()) throw std::invalid_argument("low_energy_bogoliubov: empty mode");
  BogoliubovResult r;
  double diag = 0.0;
  cplx mixed = 0.0;
  if (weights.empty()) {
    const std::size_t j = m.chi.size() - 1;
    diag = std::real(energy_per_mode(bg, m.tau[j], m.k, m.chi[j], m.dchi[j], std::conj(m.chi[j]),
                                     std::conj(m.dchi[j]), xi));
    mixed = energy_per_mode(bg, m.tau[j], m.k, m.chi[j], m.dchi[j], m.chi[j], m.dchi[j], xi);
  } else {
    if (weights.size() != m.chi.size()) throw std::invalid_argument("low_energy_bogoliubov: weight count");
    for (std::size_t j = 0; j < weights.size(); ++j) {
      diag += weights[j] * std::real(energy_per_mode(bg, m.tau[j], m.k, m.chi[j], m.dchi[j],
                                                     std::conj(m.chi[j]), std::conj(m.dchi[j]), xi));
      mixed += weights[j] * energy_per_mode(bg, m.tau[j], m.k, m.chi[j], m.dchi[j], m.chi[j], m.dchi[j], xi);
    }
  }
  r.rho_diag = diag;
  r.rho_mixed = mixed;
  const double disc = diag * diag - std::norm(mixed);
  if (!(disc > 0.0) || !(diag > 0.0)) {
    r.condition_ok = false;
    r.pair = {1.0, 0.0};
    return r;
  }
  double B2 = diag / (2.0 * std::sqrt(disc)) - 0.5;
  const double B = std::sqrt(std::max(0.0, B2));
  const double argA = std::abs(mixed) > 0.0 ? kPi - std::arg(mixed) : 0.0;
  r.pair = {std::polar(std::sqrt(1.0 + B * B), argA), B};
  return r;
}

double default_lambda(double mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("default_lambda: mass must be positive");
  return std::sqrt(2.0) * std::exp(-kEulerGamma) / mass;
}

double wick_local_terms(const CosmoBackground& bg, double tau, double lambda) {
  const double m = bg.mass;
  if (m == 0.0) return 0.0;
  const double r = bg.a0() / bg.a(tau);
  return m * m / (16.0 * kPi * kPi) *
         (0.5 - r * r + 2.0 * std::log(r) + 2.0 * std::log(std::exp(kEulerGamma) * m * lambda / std::sqrt(2.0)));
}

std::vector<double> wick_integrand(const CosmoBackground& bg, const ModeResult& m) {
  std::vector<double> out(m.tau.size());
  const double k0 = m.k0;
  const double norm = 1.0 / std::sqrt(2.0 * k0);
  for (std::size_t j = 0; j < m.tau.size(); ++j) {
    const cplx chi0 = std::polar(norm, k0 * bg.tau0) * std::polar(1.0, k0 * (m.tau[j] - bg.tau0));
    const cplx d = m.correction[j];
    out[j] = 2.0 * std::real(std::conj(chi0) * d) + std::norm(d) + bg.V(m.tau[j]) / (4.0 * k0 * k0 * k0);
  }
  return out;
}

namespace {

constexpr std::array<double, 8> kGLx = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLw = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};

cplx exp_integral_E3(cplx z) {
  if (z == cplx(0.0)) return 0.5;
  return 0.5 * (std::exp(-z) - z * numerics::exp_integral_E2(z));
}

// \int_{K}^\infty k^2 (k^2 + c^2)^{-5/2} dk
double smooth_second_order_tail(double K, double c) {
  const double K0 = std::hypot(K, c);
  const double diff = (c * c / (K0 + K)) * (K0 * K0 + K0 * K + K * K);  // K0^3 - K^3
  return diff / (K0 * K0 * K0) / (3.0 * c * c);
}

// First-order contribution of k > K to \int k^2 f dk at time tau.
double first_order_tail(const CosmoBackground& bg, double tau, double K) {
  if (tau <= bg.tau0) return 0.0;
  const double c = bg.a0() * bg.mass;
  const double K0 = std::hypot(K, c);
  auto f = [&](double eta) {
    const double d = tau - eta;
    if (d <= 0.0) return 0.0;
    const cplx z(0.0, 2.0 * K0 * d);
    const double e1 = numerics::exp_integral_E1(z).real();
    const double e3 = exp_integral_E3(z).real();
    return bg.dV(eta) * (e1 - 0.5 * c * c * e3 / (K0 * K0));
  };
  numerics::QuadConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.rel_tol = 1e-10;
  cfg.max_subdivisions = 4000;
  return 0.25 * numerics::adaptive_quad(f, bg.tau0, tau, cfg).value;
}

}  // namespace

WickReport wick_square(const CosmoBackground& bg, const std::vector<double>& tau_grid,
                       const WickOptions& opt) {
  WickReport rep;
  rep.tau = tau_grid;
  const std::size_t nt = tau_grid.size();
  rep.value.assign(nt, 0.0);
  rep.integral.assign(nt, 0.0);
  rep.local.assign(nt, 0.0);
  rep.tail.assign(nt, 0.0);
  rep.error.assign(nt, 0.0);
  if (bg.mass == 0.0 || nt == 0) return rep;
  const double lambda = opt.lambda > 0.0 ? opt.lambda : default_lambda(bg.mass);
  if (!(lambda > 0.0)) throw std::invalid_argument("wick_square: lambda must be positive");

  const double c = bg.a0() * bg.mass;
  const double T = tau_grid.back() - bg.tau0;
  double vmax = 0.0;
  for (double t : tau_grid) vmax = std::max(vmax, std::abs(bg.V(t)));
  const double scale = std::max({c, std::sqrt(vmax), T > 0 ? 2.0 * kPi / T : 0.0});
  const double K = opt.k_max > 0.0 ? opt.k_max : 24.0 * scale;
  int panels = opt.k_panels;
  if (panels <= 0) {
    const double width = T > 0 ? std::min(kPi / (2.0 * T), K / 32.0) : K / 32.0;
    panels = static_cast<int>(std::ceil(K / width));
  }
  panels += panels % 2;  // K/2 must be a panel boundary
  rep.k_max = K;

  std::vector<double> ks, kw;
  for (int q = 0; q < panels; ++q) {
    const double lo = K * q / panels, hi = K * (q + 1) / panels;
    for (int i = 0; i < 8; ++i) {
      ks.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * kGLx[i]);
      kw.push_back(0.5 * (hi - lo) * kGLw[i]);
    }
  }
  rep.k_nodes = static_cast<int>(ks.size());
  const std::size_t half = ks.size() / 2;

  std::vector<std::vector<double>> f(ks.size());
  std::vector<char> ok(ks.size(), 1);
  parallel_for(
      ks.size(),
      [&](std::size_t i) {
        ModeResult m = mode(bg, ks[i], tau_grid, opt.modes);
        ok[i] = m.converged;
        f[i] = wick_integrand(bg, m);
      },
      opt.threads);
  for (char o : ok) rep.converged = rep.converged && o;

  std::vector<double> full(nt, 0.0), lower(nt, 0.0);
  for (std::size_t j = 0; j < nt; ++j) {
    numerics::CompensatedSum<double> s_lo, s_hi;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double v = kw[i] * ks[i] * ks[i] * f[i][j];
      (i < half ? s_lo : s_hi).add(v);
    }
    lower[j] = s_lo.value();
    full[j] = lower[j] + s_hi.value();
  }
  std::vector<double> tail_full(nt), tail_half(nt);
  parallel_for(
      nt,
      [&](std::size_t j) {
        const double t = tau_grid[j];
        const double v2 = bg.V(t) * bg.V(t) * 3.0 / 16.0;
        tail_full[j] = first_order_tail(bg, t, K) + v2 * smooth_second_order_tail(K, c);
        tail_half[j] = first_order_tail(bg, t, 0.5 * K) + v2 * smooth_second_order_tail(0.5 * K, c);
      },
      opt.threads);
  for (std::size_t j = 0; j < nt; ++j) {
    const double a = bg.a(tau_grid[j]);
    const double pref = 1.0 / (2.0 * kPi * kPi * a * a);
    rep.tail[j] = pref * tail_full[j];
    rep.integral[j] = pref * (full[j] + tail_full[j]);
    rep.error[j] = pref * std::abs((full[j] + tail_full[j]) - (lower[j] + tail_half[j]));
    rep.local[j] = wick_local_terms(bg, tau_grid[j], lambda);
    rep.value[j] = rep.integral[j] + rep.local[j];
  }
  return rep;
}

double wick_square_at(const CosmoBackground& bg, double tau, const WickOptions& opt) {
  return wick_square(bg, {tau}, opt).value.at(0);
}

double initial_energy_integrand(const CosmoBackground& bg, double k) {
  using ld = long double;
  const ld a0 = bg.a0(), da = bg.da(bg.tau0), m = bg.mass;
  const ld omega2 = (ld)k * k + m * m * a0 * a0;
  const ld omega = std::sqrt(omega2);
  const ld domega = m * m * a0 * da / omega;
  // chi(tau0) = (2 k0)^{-1/2} e^{i k0 tau0}, chi' = i k0 chi; k0 = omega at tau0
  const ld chi2 = 1.0L / (2.0L * omega);
  const ld chi_terms = omega2 * chi2 + omega2 * chi2;
  // W = (2 omega)^{-1/2} e^{i \int omega}, W' = (i omega - omega'/(2 omega)) W
  const ld w2 = 1.0L / (2.0L * omega);
  const ld dw2 = (omega2 + domega * domega / (4.0L * omega2)) * w2;
  const ld w_terms = dw2 + omega2 * w2;
  return static_cast<double>(chi_terms - w_terms);
}

double energy_density_initial(const CosmoBackground& bg) {
  const double a0 = bg.a0(), da = bg.da(bg.tau0), m = bg.mass;
  if (m == 0.0 || da == 0.0) return 0.0;
  return m * m * da * da / (96.0 * kPi * kPi * a0 * a0 * a0 * a0);
}

double energy_density_initial_numeric(const CosmoBackground& bg, const numerics::QuadConfig& cfg) {
  const double a0 = bg.a0(), c = a0 * bg.mass;
  if (c == 0.0) return 0.0;
  auto r = numerics::adaptive_quad_semi_infinite(
      [&](double k) { return -k * k * initial_energy_integrand(bg, k); }, 0.0, c, cfg);
  return r.value / (2.0 * kPi * kPi) / (2.0 * a0 * a0 * a0 * a0);
}

}  // namespace scg::modes
