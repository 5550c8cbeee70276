#include "scg/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace scg::numerics {

namespace detail {

cplx e1_series(cplx z) {
  // -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
  cplx term = 1.0;
  CompensatedSum<cplx> acc;
  for (int k = 1; k < 200; ++k) {
    term *= -z / double(k);
    cplx t = term / double(k);
    acc.add(t);
    if (std::abs(t) < 1e-18 * std::max(1.0, std::abs(acc.value()))) break;
  }
  return -kEulerGamma - std::log(z) - acc.value();
}

cplx e1_continued_fraction(cplx z) {
  // Modified Lentz on e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))).
  const double tiny = 1e-300;
  cplx b = z + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 100000; ++i) {
    double an = -double(i) * double(i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

}  // namespace detail

namespace {

// Kronrod 21 / Gauss 10 abscissae and weights.
constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525614826, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk21(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  T resk = fc * wgk[10];
  T resg{};
  double resabs = magnitude(fc) * wgk[10];
  std::array<T, 10> f1, f2;
  const double lo = std::min(a, b), hi = std::max(a, b);
  // keep nodes off the endpoints, where integrable singularities live
  auto inside = [&](double x) {
    if (x <= lo) return std::nextafter(lo, hi);
    if (x >= hi) return std::nextafter(hi, lo);
    return x;
  };
  for (int j = 0; j < 10; ++j) {
    double dx = h * xgk[j];
    f1[j] = f(inside(c - dx));
    f2[j] = f(inside(c + dx));
    resk += wgk[j] * (f1[j] + f2[j]);
    resabs += wgk[j] * (magnitude(f1[j]) + magnitude(f2[j]));
    if (j % 2 == 1) resg += wg[j / 2] * (f1[j] + f2[j]);
  }
  T mean = resk * 0.5;
  double resasc = wgk[10] * magnitude(fc - mean);
  for (int j = 0; j < 10; ++j)
    resasc += wgk[j] * (magnitude(f1[j] - mean) + magnitude(f2[j] - mean));
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  T value = resk * h;
  double err = magnitude((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, value, err};
}

template <class T>
void resum(const std::priority_queue<Segment<T>>& heap, T& total, double& err) {
  CompensatedSum<T> vs;
  CompensatedSum<double> es;
  auto copy = heap;
  while (!copy.empty()) {
    vs.add(copy.top().value);
    es.add(copy.top().error);
    copy.pop();
  }
  total = vs.value();
  err = es.value();
}

template <class T, class F>
QuadResult<T> adaptive(const F& f, double a, double b, const QuadConfig& cfg) {
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0))
    throw std::invalid_argument("adaptive_quad: tolerances must be positive");
  QuadResult<T> out;
  if (a == b) return out;
  std::priority_queue<Segment<T>> heap;
  heap.push(gk21<T>(f, a, b));
  T total = heap.top().value;
  double err = heap.top().error;
  out.evaluations = 21;
  int intervals = 1;
  while (err > std::max(cfg.abs_tol, cfg.rel_tol * magnitude(total))) {
    if (intervals >= cfg.max_subdivisions) {
      out.converged = false;
      break;
    }
    Segment<T> s = heap.top();
    double m = 0.5 * (s.a + s.b);
    if (m <= std::min(s.a, s.b) || m >= std::max(s.a, s.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    auto l = gk21<T>(f, s.a, m);
    auto r = gk21<T>(f, m, s.b);
    out.evaluations += 42;
    ++intervals;
    heap.push(l);
    heap.push(r);
    total += (l.value + r.value) - s.value;
    err += (l.error + r.error) - s.error;
    if (intervals % 64 == 0 || err <= std::max(cfg.abs_tol, cfg.rel_tol * magnitude(total)))
      resum(heap, total, err);
  }
  resum(heap, total, err);
  out.value = total;
  out.error = err;
  out.intervals = intervals;
  return out;
}

}  // namespace

cplx exp_integral_E1(cplx z) {
  if (z == cplx(0.0, 0.0)) throw std::domain_error("exp_integral_E1: z = 0 is a logarithmic singularity");
  if (z.real() < 0.0) throw std::domain_error("exp_integral_E1: requires Re z >= 0");
  return std::abs(z) <= 2.0 ? detail::e1_series(z) : detail::e1_continued_fraction(z);
}

cplx exp_integral_E2(cplx z) {
  if (z.real() < 0.0) throw std::domain_error("exp_integral_E2: requires Re z >= 0");
  if (z == cplx(0.0, 0.0)) return 1.0;
  return std::exp(-z) - z * exp_integral_E1(z);
}

QuadResult<double> adaptive_quad(const std::function<double(double)>& f, double a, double b,
                                 const QuadConfig& cfg) {
  return adaptive<double>(f, a, b, cfg);
}

QuadResult<cplx> adaptive_quad_complex(const std::function<cplx(double)>& f, double a, double b,
                                       const QuadConfig& cfg) {
  return adaptive<cplx>(f, a, b, cfg);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadConfig& cfg) {
  auto r = adaptive_quad(f, a, b, cfg);
  if (!r.converged) throw QuadratureError("integrate: subdivision cap exceeded", r.value, r.error);
  return r.value;
}

QuadResult<double> adaptive_quad_semi_infinite(const std::function<double(double)>& f, double a,
                                               double scale, const QuadConfig& cfg) {
  auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    double u = 1.0 - t;
    return f(a + scale * t / u) * scale / (u * u);
  };
  return adaptive<double>(g, 0.0, 1.0, cfg);
}

QuadResult<cplx> adaptive_quad_semi_infinite_complex(const std::function<cplx(double)>& f,
                                                     double a, double scale,
                                                     const QuadConfig& cfg) {
  auto g = [&](double t) -> cplx {
    if (t >= 1.0) return 0.0;
    double u = 1.0 - t;
    return f(a + scale * t / u) * (scale / (u * u));
  };
  return adaptive<cplx>(g, 0.0, 1.0, cfg);
}

TailResult oscillatory_tail_inverse_p(double omega, double p_min) {
  if (!(p_min > 0.0)) throw std::domain_error("oscillatory_tail: p_min must be positive for 1/p");
  if (omega == 0.0) throw std::domain_error("oscillatory_tail: 1/p tail diverges at omega = 0");
  // \int_{p0}^\infty e^{i w p}/p dp = E1(-i w p0)
  return {exp_integral_E1(cplx(0.0, -omega * p_min)), 1e-12};
}

TailResult oscillatory_tail(const Envelope& env, double omega, double p_min) {
  if (!(env.decay_order > 0.0)) throw std::domain_error("oscillatory_tail: envelope must decay");
  if (omega == 0.0) {
    if (!(env.decay_order > 1.0))
      throw std::domain_error("oscillatory_tail: non-integrable envelope at omega = 0");
    auto r = adaptive_quad_semi_infinite(env.g, p_min, std::max(1.0, std::abs(p_min)));
    return {cplx(r.value, 0.0), r.error};
  }
  // \int g e^{iwp} = -g(p0) e^{iwp0}/(iw) + g'(p0) e^{iwp0}/(iw)^2 - \int g'' e^{iwp}/(iw)^2
  const cplx iw(0.0, omega);
  const cplx ph = std::exp(cplx(0.0, omega * p_min));
  cplx v = -env.g(p_min) * ph / iw + env.dg(p_min) * ph / (iw * iw);
  // Monotone |g''| gives |\int g'' e^{iwp}| <= 2|g''(p0)|/|w| after one more step.
  double rem = 2.0 * std::abs(env.d2g(p_min)) / std::pow(std::abs(omega), 3);
  return {v, rem};
}

}  // namespace scg::numerics
