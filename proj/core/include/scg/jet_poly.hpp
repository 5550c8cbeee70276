#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace scg {

// Sparse polynomial in a fixed number of real variables. Used for truncated
// Taylor jets; coefficient keys are exponent vectors.
class JetPoly {
 public:
  using Exponents = std::vector<std::uint8_t>;
  using Terms = std::map<Exponents, double>;

  JetPoly() = default;
  explicit JetPoly(int nvars) : nvars_(nvars) {}
  static JetPoly constant(int nvars, double c);
  static JetPoly variable(int nvars, int i, double c = 1.0);

  int nvars() const { return nvars_; }
  const Terms& terms() const& { return terms_; }
  Terms terms() && { return std::move(terms_); }
  bool is_zero() const { return terms_.empty(); }

  double coefficient(const Exponents& e) const;
  void add(const Exponents& e, double c);

  JetPoly& operator+=(const JetPoly& o);
  JetPoly& operator-=(const JetPoly& o);
  JetPoly& operator*=(double s);
  friend JetPoly operator+(JetPoly a, const JetPoly& b) { return a += b; }
  friend JetPoly operator-(JetPoly a, const JetPoly& b) { return a -= b; }
  friend JetPoly operator*(JetPoly a, double s) { return a *= s; }
  friend JetPoly operator*(double s, JetPoly a) { return a *= s; }

  // Product keeping only monomials accepted by `keep`.
  JetPoly multiply(const JetPoly& o, const std::function<bool(const Exponents&)>& keep) const;
  JetPoly operator*(const JetPoly& o) const;

  JetPoly derivative(int var) const;
  JetPoly filtered(const std::function<bool(const Exponents&)>& keep) const;
  // Substitute zero for the listed variables.
  JetPoly zeroed(const std::vector<int>& vars) const;
  double evaluate(const std::vector<double>& x) const;

  // Sum of exponents over the variable range [first, first + count).
  static int degree(const Exponents& e, int first, int count);

 private:
  int nvars_ = 0;
  Terms terms_;
};

}  // namespace scg
