#include "scg/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace scg::geodesy {

namespace {

using Exponents = JetPoly::Exponents;

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Series of exp(2 sum_{n>=1} l_n h^n) up to h^order, l = (l_1, l_2, ...).
std::vector<double> exp2_series(const std::vector<double>& l, int order) {
  std::vector<double> s(order + 1, 0.0), out(order + 1, 0.0);
  for (int n = 1; n <= order && n <= static_cast<int>(l.size()); ++n) s[n] = 2.0 * l[n - 1];
  // f' = s' f, so n f_n = sum_k k s_k f_{n-k}
  out[0] = 1.0;
  for (int n = 1; n <= order; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += k * s[k] * out[n - k];
    out[n] = acc / n;
  }
  return out;
}

JetPoly time_series(int dim, const std::vector<double>& coeffs) {
  JetPoly p(dim);
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    Exponents e(dim, 0);
    e[0] = static_cast<std::uint8_t>(n);
    p.add(e, coeffs[n]);
  }
  return p;
}

// l_n = H^{(n-1)} / n! from the chart's Hubble rate and its derivatives.
std::vector<double> log_scale_jet(const std::vector<double>& hubble, int order) {
  std::vector<double> l(order, 0.0);
  for (int n = 1; n <= order && n <= static_cast<int>(hubble.size()); ++n)
    l[n - 1] = hubble[n - 1] / factorial(n);
  return l;
}

MetricJet diagonal_flrw(double a, const std::vector<double>& l, int order, int dim, bool conformal) {
  if (!(a > 0.0)) throw std::invalid_argument("flrw metric: a must be positive");
  if (dim < 2) throw std::invalid_argument("flrw metric: dim must be >= 2");
  auto a2 = exp2_series(l, order);
  for (double& c : a2) c *= a * a;
  MetricJet jet;
  jet.dim = dim;
  jet.order = order;
  jet.base.assign(dim, 0.0);
  jet.g.assign(dim * dim, JetPoly(dim));
  JetPoly space = time_series(dim, a2);
  jet.g[0] = conformal ? space * -1.0 : JetPoly::constant(dim, -1.0);
  for (int i = 1; i < dim; ++i) jet.g[i * dim + i] = space;
  return jet;
}

std::vector<double> invert(std::vector<double> m, int d) {
  std::vector<double> inv(d * d, 0.0);
  for (int i = 0; i < d; ++i) inv[i * d + i] = 1.0;
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r)
      if (std::abs(m[r * d + c]) > std::abs(m[piv * d + c])) piv = r;
    if (std::abs(m[piv * d + c]) < 1e-300) throw std::domain_error("metric is singular at the base point");
    if (piv != c)
      for (int k = 0; k < d; ++k) {
        std::swap(m[c * d + k], m[piv * d + k]);
        std::swap(inv[c * d + k], inv[piv * d + k]);
      }
    const double p = m[c * d + c];
    for (int k = 0; k < d; ++k) {
      m[c * d + k] /= p;
      inv[c * d + k] /= p;
    }
    for (int r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = m[r * d + c];
      if (f == 0.0) continue;
      for (int k = 0; k < d; ++k) {
        m[r * d + k] -= f * m[c * d + k];
        inv[r * d + k] -= f * inv[c * d + k];
      }
    }
  }
  return inv;
}

// Fornberg weights for the k-th derivative on offsets -r..r (unit spacing).
std::vector<double> fd_weights(int k, int r) {
  const int n = 2 * r + 1;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = i - r;
  std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
  double c1 = 1.0, c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, k);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int s = mn; s >= 1; --s) c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int s = mn; s >= 1; --s) c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][k];
  return w;
}

void for_each_multi_index(int dim, int max_total, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> alpha(dim, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == dim) {
      f(alpha);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      alpha[i] = k;
      rec(i + 1, left - k);
    }
    alpha[i] = 0;
  };
  rec(0, max_total);
}

JetPoly embed(const JetPoly& p, int dim) {
  JetPoly r(2 * dim);
  for (const auto& [e, c] : p.terms()) {
    Exponents f(2 * dim, 0);
    std::copy(e.begin(), e.end(), f.begin());
    r.add(f, c);
  }
  return r;
}

}  // namespace

MetricJet MetricJet::minkowski(int dim, int order) {
  MetricJet jet;
  jet.dim = dim;
  jet.order = order;
  jet.base.assign(dim, 0.0);
  jet.g.assign(dim * dim, JetPoly(dim));
  jet.g[0] = JetPoly::constant(dim, -1.0);
  for (int i = 1; i < dim; ++i) jet.g[i * dim + i] = JetPoly::constant(dim, 1.0);
  return jet;
}

MetricJet MetricJet::flrw_conformal(double a, const std::vector<double>& conformal_hubble, int order,
                                    int dim) {
  return diagonal_flrw(a, log_scale_jet(conformal_hubble, order), order, dim, true);
}

MetricJet MetricJet::flrw_cosmological(double a, const std::vector<double>& hubble, int order,
                                       int dim) {
  return diagonal_flrw(a, log_scale_jet(hubble, order), order, dim, false);
}

MetricJet MetricJet::desitter_conformal(double hubble, double tau, int order, int dim) {
  if (!(tau < 0.0)) throw std::invalid_argument("desitter_conformal: tau must be negative");
  if (!(hubble > 0.0)) throw std::invalid_argument("desitter_conformal: H must be positive");
  // ln a(tau + h) - ln a(tau) = -ln(1 + h/tau)
  std::vector<double> l(order);
  for (int n = 1; n <= order; ++n) l[n - 1] = (n % 2 ? -1.0 : 1.0) / (n * std::pow(tau, n));
  auto jet = diagonal_flrw(-1.0 / (hubble * tau), l, order, dim, true);
  jet.base[0] = tau;
  return jet;
}

MetricJet MetricJet::from_partials(
    int dim, int order,
    const std::function<double(int, int, const std::vector<int>&)>& partial) {
  MetricJet jet;
  jet.dim = dim;
  jet.order = order;
  jet.base.assign(dim, 0.0);
  jet.g.assign(dim * dim, JetPoly(dim));
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = mu; nu < dim; ++nu) {
      JetPoly p(dim);
      for_each_multi_index(dim, order, [&](const std::vector<int>& alpha) {
        double den = 1.0;
        Exponents e(dim);
        for (int i = 0; i < dim; ++i) {
          den *= factorial(alpha[i]);
          e[i] = static_cast<std::uint8_t>(alpha[i]);
        }
        p.add(e, partial(mu, nu, alpha) / den);
      });
      jet.g[mu * dim + nu] = p;
      jet.g[nu * dim + mu] = p;
    }
  return jet;
}

MetricJet MetricJet::from_function(
    int dim, const std::function<std::vector<double>(const std::vector<double>&)>& metric,
    const std::vector<double>& x, int order, double rel_step) {
  if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("from_function: dimension mismatch");
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  auto partial_all = [&](const std::vector<int>& alpha) {
    int total = std::accumulate(alpha.begin(), alpha.end(), 0);
    std::vector<double> out(dim * dim, 0.0);
    if (total == 0) return metric(x);
    // step balancing truncation against roundoff for a derivative of this order
    const double h = scale * std::max(rel_step, std::pow(1e-16, 1.0 / (total + 2)));
    std::vector<std::vector<double>> w(dim);
    std::vector<int> r(dim);
    for (int i = 0; i < dim; ++i) {
      r[i] = alpha[i] == 0 ? 0 : (alpha[i] + 1) / 2 + 1;
      w[i] = alpha[i] == 0 ? std::vector<double>{1.0} : fd_weights(alpha[i], r[i]);
    }
    std::vector<int> off(dim, 0);
    std::function<void(int, double)> rec = [&](int i, double weight) {
      if (i == dim) {
        std::vector<double> y = x;
        for (int k = 0; k < dim; ++k) y[k] += off[k] * h;
        auto gy = metric(y);
        for (int k = 0; k < dim * dim; ++k) out[k] += weight * gy[k];
        return;
      }
      for (int s = -r[i]; s <= r[i]; ++s) {
        off[i] = s;
        rec(i + 1, weight * w[i][s + r[i]]);
      }
      off[i] = 0;
    };
    rec(0, 1.0);
    for (double& v : out) v /= std::pow(h, total);
    return out;
  };
  MetricJet jet;
  jet.dim = dim;
  jet.order = order;
  jet.base = x;
  jet.g.assign(dim * dim, JetPoly(dim));
  for_each_multi_index(dim, order, [&](const std::vector<int>& alpha) {
    auto d = partial_all(alpha);
    double den = 1.0;
    Exponents e(dim);
    for (int i = 0; i < dim; ++i) {
      den *= factorial(alpha[i]);
      e[i] = static_cast<std::uint8_t>(alpha[i]);
    }
    for (int mu = 0; mu < dim; ++mu)
      for (int nu = 0; nu < dim; ++nu)
        jet.g[mu * dim + nu].add(e, 0.5 * (d[mu * dim + nu] + d[nu * dim + mu]) / den);
  });
  return jet;
}

std::vector<JetPoly> inverse_metric_jet(const MetricJet& g, int order) {
  const int d = g.dim;
  const Exponents zero(d, 0);
  std::vector<double> g0(d * d);
  for (int i = 0; i < d * d; ++i) g0[i] = g.g[i].coefficient(zero);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(g0[i * d + j] - g0[j * d + i]) > 1e-12 * (std::abs(g0[i * d + j]) + 1.0))
        throw std::domain_error("metric is not symmetric");
  auto inv0 = invert(g0, d);
  auto keep = [&](const Exponents& e) { return JetPoly::degree(e, 0, d) <= order; };
  // N = -g0^{-1} E with E = g - g0; g^{-1} = sum_k N^k g0^{-1}
  std::vector<JetPoly> n(d * d, JetPoly(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        JetPoly e = g.g[k * d + j].filtered([&](const Exponents& x) { return x != zero; });
        n[i * d + j] += e * (-inv0[i * d + k]);
      }
  std::vector<JetPoly> term(d * d, JetPoly(d)), sum(d * d, JetPoly(d));
  for (int i = 0; i < d * d; ++i) {
    term[i] = JetPoly::constant(d, inv0[i]);
    sum[i] = term[i];
  }
  for (int k = 1; k <= order; ++k) {
    std::vector<JetPoly> next(d * d, JetPoly(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          if (n[i * d + l].is_zero() || term[l * d + j].is_zero()) continue;
          next[i * d + j] += n[i * d + l].multiply(term[l * d + j], keep);
        }
    term = std::move(next);
    for (int i = 0; i < d * d; ++i) sum[i] += term[i];
  }
  return sum;
}

SigmaCoefficients sigma_coeffs(const MetricJet& g, int order) {
  const int d = g.dim;
  const int M = order;
  if (M < 2) throw std::invalid_argument("sigma_coeffs: order must be >= 2");
  if (g.order < M - 2) throw std::invalid_argument("sigma_coeffs: metric jet order too low");
  if (static_cast<int>(g.g.size()) != d * d) throw std::invalid_argument("sigma_coeffs: malformed jet");

  auto hcap = [d](int cap) {
    return [d, cap](const Exponents& e) { return JetPoly::degree(e, 0, d) <= cap; };
  };
  const int nv = 2 * d;
  std::vector<JetPoly> ginv;
  for (const auto& p : inverse_metric_jet(g, std::max(M - 3, 0))) ginv.push_back(embed(p, d));

  SigmaCoefficients out;
  out.dim_ = d;
  out.order_ = M;
  out.terms_.assign(M + 1, JetPoly(nv));
  {
    const Exponents zero(d, 0);
    out.ginv0_.resize(d * d);
    for (int i = 0; i < d * d; ++i) out.ginv0_[i] = ginv[i].coefficient(Exponents(nv, 0));
  }
  JetPoly& p2 = out.terms_[2];
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      JetPoly gm = embed(g.component(mu, nu), d).filtered(hcap(M - 2));
      p2 += gm * JetPoly::variable(nv, d + mu) * JetPoly::variable(nv, d + nu) * 0.5;
    }

  // T_{a,nu} = d_nu P_a - dP_{a+1}/d dx^nu, kept to h-order M - a - 1
  std::vector<std::vector<JetPoly>> T(M + 1);
  auto build_T = [&](int a) {
    T[a].resize(d);
    for (int nu = 0; nu < d; ++nu)
      T[a][nu] = (out.terms_[a].derivative(nu) - out.terms_[a + 1].derivative(d + nu))
                     .filtered(hcap(M - a - 1));
  };

  for (int m = 3; m <= M; ++m) {
    const int cap = M - m;
    JetPoly acc(nv);
    for (int rho = 0; rho < d; ++rho)
      acc += (JetPoly::variable(nv, d + rho) * out.terms_[m - 1].derivative(rho)).filtered(hcap(cap)) * 2.0;
    if (m >= 4) build_T(m - 2);
    for (int a = 2; a <= m - 2; ++a)
      for (int nu = 0; nu < d; ++nu)
        for (int rho = 0; rho < d; ++rho) {
          const JetPoly& gi = ginv[nu * d + rho];
          if (gi.is_zero() || T[a][nu].is_zero() || T[m - a][rho].is_zero()) continue;
          acc -= gi.multiply(T[a][nu], hcap(cap)).multiply(T[m - a][rho], hcap(cap));
        }
    out.terms_[m] = acc * (1.0 / (2.0 * (m - 1)));
  }
  return out;
}

double SigmaCoefficients::coefficient(const std::vector<int>& indices) const {
  return partial(indices, std::vector<int>(dim_, 0));
}

double SigmaCoefficients::partial(const std::vector<int>& indices, const std::vector<int>& alpha) const {
  const int m = static_cast<int>(indices.size());
  if (m > order_) throw std::out_of_range("SigmaCoefficients: rank above expansion order");
  if (static_cast<int>(alpha.size()) != dim_) throw std::invalid_argument("SigmaCoefficients: alpha size");
  int total = 0;
  Exponents e(2 * dim_, 0);
  double w = 1.0;
  for (int i = 0; i < dim_; ++i) {
    total += alpha[i];
    e[i] = static_cast<std::uint8_t>(alpha[i]);
    w *= factorial(alpha[i]);
  }
  if (total > order_ - m) throw std::out_of_range("SigmaCoefficients: derivative not carried");
  for (int idx : indices) {
    if (idx < 0 || idx >= dim_) throw std::out_of_range("SigmaCoefficients: index");
    ++e[dim_ + idx];
  }
  for (int i = 0; i < dim_; ++i) w *= factorial(e[dim_ + i]);
  return terms_[m].coefficient(e) * w;
}

std::vector<double> SigmaCoefficients::tensor(int m) const {
  std::size_t n = 1;
  for (int k = 0; k < m; ++k) n *= dim_;
  std::vector<double> out(n);
  std::vector<int> idx(m);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t f = flat;
    for (int k = m - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(f % dim_);
      f /= dim_;
    }
    out[flat] = coefficient(idx);
  }
  return out;
}

double SigmaCoefficients::eval(const std::vector<double>& dx) const {
  if (static_cast<int>(dx.size()) != dim_) throw std::invalid_argument("sigma_eval: dimension mismatch");
  std::vector<double> pt(2 * dim_, 0.0);
  std::copy(dx.begin(), dx.end(), pt.begin() + dim_);
  double s = 0.0;
  for (int m = order_; m >= 2; --m) s += terms_[m].evaluate(pt);
  return s;
}

std::vector<double> SigmaCoefficients::gradient(const std::vector<double>& dx) const {
  if (static_cast<int>(dx.size()) != dim_) throw std::invalid_argument("gradient: dimension mismatch");
  std::vector<double> pt(2 * dim_, 0.0);
  std::copy(dx.begin(), dx.end(), pt.begin() + dim_);
  std::vector<double> grad(dim_, 0.0);
  for (int mu = 0; mu < dim_; ++mu)
    for (int m = 2; m <= order_; ++m)
      grad[mu] += terms_[m].derivative(mu).evaluate(pt) - terms_[m].derivative(dim_ + mu).evaluate(pt);
  return grad;
}

double SigmaCoefficients::transport_residual(const std::vector<double>& dx) const {
  auto gr = gradient(dx);
  double q = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) q += ginv0_[i * dim_ + j] * gr[i] * gr[j];
  return q - 2.0 * eval(dx);
}

double sigma_eval(const SigmaCoefficients& c, const std::vector<double>& dx) { return c.eval(dx); }

double flrw_sigma_reference(FlrwChart chart, const std::vector<double>& derivs, double a, double dt,
                            double dx2, int order) {
  if (order > 6) throw std::invalid_argument("flrw_sigma_reference: order must be <= 6");
  if (order < 2) throw std::invalid_argument("flrw_sigma_reference: order must be >= 2");
  std::vector<double> d(4, 0.0);
  std::copy_n(derivs.begin(), std::min<std::size_t>(4, derivs.size()), d.begin());
  const double H = d[0], H1 = d[1], H2 = d[2], H3 = d[3];
  const double t2 = dt * dt, t3 = t2 * dt, t4 = t3 * dt, t5 = t4 * dt, t6 = t5 * dt;
  const double x4 = dx2 * dx2, x6 = x4 * dx2;
  // by total degree in the separation
  double by_degree[7] = {0, 0, 0, 0, 0, 0, 0};
  if (chart == FlrwChart::conformal) {
    by_degree[2] = -t2 + dx2;
    by_degree[3] = -H * t3 + H * dt * dx2;
    by_degree[4] = -(7 * H * H + 4 * H1) / 12 * t4 + (3 * H * H + 2 * H1) / 6 * t2 * dx2 + H * H / 12 * x4;
    by_degree[5] = -(3 * H * H * H + 5 * H * H1 + H2) / 12 * t5 +
                   (2 * H * H * H + 4 * H * H1 + H2) / 12 * t3 * dx2 + H * (H * H + H1) / 12 * dt * x4;
    const double H4 = H * H * H * H;
    by_degree[6] = -(31 * H4 + 101 * H * H * H1 + 28 * H1 * H1 + 39 * H * H2 + 6 * H3) / 360 * t6 +
                   (15 * H4 + 61 * H * H * H1 + 20 * H1 * H1 + 30 * H * H2 + 6 * H3) / 360 * t4 * dx2 +
                   (15 * H4 + 37 * H * H * H1 + 8 * H1 * H1 + 9 * H * H2) / 360 * t2 * x4 +
                   (H4 + 3 * H * H * H1) / 360 * x6;
    double s = 0.0;
    for (int k = 2; k <= order; ++k) s += by_degree[k];
    return 0.5 * a * a * s;
  }
  const double a2 = a * a, H4 = H * H * H * H;
  by_degree[2] = -t2 + a2 * dx2;
  by_degree[3] = a2 * dx2 * H * dt;
  by_degree[4] = a2 * dx2 * ((H * H + H1) / 3 * t2 + a2 * H * H / 12 * dx2);
  by_degree[5] = a2 * dx2 * ((2 * H * H1 + H2) / 12 * t3 + a2 * H * (2 * H * H + H1) / 12 * dt * dx2);
  by_degree[6] = a2 * dx2 *
                 ((-4 * H4 - 8 * H * H * H1 + 2 * H1 * H1 + 6 * H * H2 + 3 * H3) / 180 * t4 +
                  a2 * (48 * H4 + 74 * H * H * H1 + 8 * H1 * H1 + 9 * H * H2) / 360 * t2 * dx2 +
                  a2 * a2 * H * H * (4 * H * H + 3 * H1) / 360 * x4);
  double s = 0.0;
  for (int k = 2; k <= order; ++k) s += by_degree[k];
  return 0.5 * s;
}

double desitter_Z(const DeSitterPair& p) {
  if (!(p.tau < 0.0) || !(p.tau_p < 0.0)) throw std::invalid_argument("desitter_Z: conformal times must be negative");
  if (p.x.size() != p.x_p.size()) throw std::invalid_argument("desitter_Z: dimension mismatch");
  double r2 = 0.0;
  for (std::size_t i = 0; i < p.x.size(); ++i) r2 += (p.x[i] - p.x_p[i]) * (p.x[i] - p.x_p[i]);
  return (p.tau * p.tau + p.tau_p * p.tau_p - r2) / (2.0 * p.tau * p.tau_p);
}

namespace {

double sigma_from_one_minus_Z(double u, double hubble) {
  // u = 1 - Z; arccos Z = 2 asin(sqrt(u/2)), arccosh Z = 2 asinh(sqrt(-u/2))
  if (u > 2.0) throw std::domain_error("desitter_sigma: Z < -1 has no connecting geodesic");
  if (u >= 0.0) {
    const double th = 2.0 * std::asin(std::sqrt(0.5 * u));
    return th * th / (2.0 * hubble * hubble);
  }
  const double th = 2.0 * std::asinh(std::sqrt(-0.5 * u));
  return -th * th / (2.0 * hubble * hubble);
}

}  // namespace

double desitter_sigma(double Z, double hubble) {
  if (!(hubble > 0.0)) throw std::invalid_argument("desitter_sigma: H must be positive");
  return sigma_from_one_minus_Z(1.0 - Z, hubble);
}

double desitter_sigma(const DeSitterPair& p) {
  if (!(p.hubble > 0.0)) throw std::invalid_argument("desitter_sigma: H must be positive");
  desitter_Z(p);  // validates
  double r2 = 0.0;
  for (std::size_t i = 0; i < p.x.size(); ++i) r2 += (p.x[i] - p.x_p[i]) * (p.x[i] - p.x_p[i]);
  const double dt = p.tau - p.tau_p;
  return sigma_from_one_minus_Z((r2 - dt * dt) / (2.0 * p.tau * p.tau_p), p.hubble);
}

}  // namespace scg::geodesy
