#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace scg::numerics {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

struct QuadConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  // Breakpoints for the semi-infinite splits used by fluct, in units of the
  // characteristic scale of the integrand.
  double near_split = 2.0;
  double far_split = 10.0;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
  bool converged = true;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial, double err)
      : std::runtime_error(what), partial_value(partial), error_estimate(err) {}
  double partial_value;
  double error_estimate;
};

namespace detail {
cplx e1_series(cplx z);
cplx e1_continued_fraction(cplx z);
}  // namespace detail

// E1(z) = Gamma(0, z) for Re z >= 0, z != 0.
cplx exp_integral_E1(cplx z);
// E2(z) = exp(-z) - z E1(z), with E2(0) = 1.
cplx exp_integral_E2(cplx z);

// Adaptive 10/21-point Gauss-Kronrod, bisecting the interval with the
// largest error. A run that hits the subdivision cap returns converged = false
// with the partial value.
QuadResult<double> adaptive_quad(const std::function<double(double)>& f, double a, double b,
                                 const QuadConfig& cfg = {});
QuadResult<cplx> adaptive_quad_complex(const std::function<cplx(double)>& f, double a, double b,
                                       const QuadConfig& cfg = {});
// Same, throwing QuadratureError on failure.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadConfig& cfg = {});

// Integral over [a, inf) through x = a + s t/(1-t).
QuadResult<double> adaptive_quad_semi_infinite(const std::function<double(double)>& f, double a,
                                               double scale = 1.0, const QuadConfig& cfg = {});
QuadResult<cplx> adaptive_quad_semi_infinite_complex(const std::function<cplx(double)>& f,
                                                     double a, double scale = 1.0,
                                                     const QuadConfig& cfg = {});

// Envelope g with its first two derivatives, used by the integration-by-parts tail.
struct Envelope {
  std::function<double(double)> g;
  std::function<double(double)> dg;
  std::function<double(double)> d2g;
  double decay_order = 1.0;  // g ~ p^{-decay_order}
};

struct TailResult {
  cplx value;
  double remainder_bound = 0.0;
};

// \int_{p_min}^\infty g(p) e^{i omega p} dp. The 1/p envelope is handled in
// closed form through E1; others use two integration-by-parts terms.
TailResult oscillatory_tail(const Envelope& env, double omega, double p_min);
TailResult oscillatory_tail_inverse_p(double omega, double p_min);

// Neumaier compensated accumulator.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if constexpr (std::is_same_v<T, double>) {
      if (std::abs(sum_) >= std::abs(x))
        c_ += (sum_ - t) + x;
      else
        c_ += (x - t) + sum_;
    } else {
      c_ += comp(sum_, x, t);
    }
    sum_ = t;
  }
  T value() const { return sum_ + c_; }

 private:
  static T comp(T s, T x, T t) {
    auto part = [](double s1, double x1, double t1) {
      return std::abs(s1) >= std::abs(x1) ? (s1 - t1) + x1 : (x1 - t1) + s1;
    };
    return T(part(s.real(), x.real(), t.real()), part(s.imag(), x.imag(), t.imag()));
  }
  T sum_{};
  T c_{};
};

}  // namespace scg::numerics
