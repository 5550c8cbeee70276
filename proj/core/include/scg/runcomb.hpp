#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace scg::runcomb {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Multiset of positive integers, parts kept in non-increasing order.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int weight() const { return weight_; }
  int length() const { return static_cast<int>(parts_.size()); }
  // p(i): how many parts equal i
  int multiplicity(int i) const;
  bool empty() const { return parts_.empty(); }

  Partition with(int part) const;
  Partition without(int part) const;  // removes one copy; part must be present
  Partition joined(const Partition& other) const;

  std::string to_string() const;  // "x1^2 x3" style

  auto operator<=>(const Partition&) const = default;

 private:
  std::vector<int> parts_;
  int weight_ = 0;
};

// Polynomial in x_1, x_2, ... with each monomial keyed by its partition.
class RunPolynomial {
 public:
  using Terms = std::map<Partition, BigInt>;

  RunPolynomial() = default;
  static RunPolynomial constant(const BigInt& c);
  static RunPolynomial monomial(const Partition& p, const BigInt& c = 1);

  const Terms& terms() const& { return terms_; }
  // by value on temporaries so range-for over f().terms() stays valid
  Terms terms() && { return std::move(terms_); }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  BigInt coefficient(const Partition& p) const;

  void add(const Partition& p, const BigInt& c);
  RunPolynomial& operator+=(const RunPolynomial& o);
  RunPolynomial operator+(const RunPolynomial& o) const;
  RunPolynomial operator*(const RunPolynomial& o) const;
  RunPolynomial scaled(const BigInt& c) const;
  bool operator==(const RunPolynomial& o) const { return terms_ == o.terms_; }

  // Part of the polynomial whose monomials have exactly `degree` factors.
  RunPolynomial degree_part(int degree) const;
  std::string to_string() const;

 private:
  Terms terms_;
};

enum class RunKind { atomic, circular, linear };
enum class WordKind { linear, circular };

// D = D0 + D+ with D0 = sum x_{i+1} d/dx_i and D+ = sum_{i,j} x_1 x_i x_j d/dx_{i+j}.
RunPolynomial apply_D(const RunPolynomial& p);

RunPolynomial atomic_poly(int n);    // n >= 1
RunPolynomial circular_poly(int n);  // n >= 2
RunPolynomial circular_from_atomic(int n);
RunPolynomial linear_poly(int n);  // n >= 0
// Same polynomial from the sum over partitions of 2^{|p|}/ord(p) multinom(n;p) prod A_{p_i}.
RunPolynomial linear_poly_from_partitions(int n);
RunPolynomial atomic_third_degree(int n);  // n >= 3

// Univariate polynomial in kappa; index = power.
using KappaPolynomial = std::vector<BigInt>;
KappaPolynomial valley_poly(int n);
KappaPolynomial valley_from_circular(int n);

BigInt run_count(const Partition& p, RunKind kind);

// Lengths of maximal monotone segments. Circular words must start with their
// minimum and close with sigma(n+1) = sigma(1).
Partition run_structure(const std::vector<int>& word, WordKind kind);

using Assignment = std::map<int, Rational>;
Rational eval_poly(const RunPolynomial& p, const Assignment& values);
Rational eval_poly_uniform(const RunPolynomial& p, const Rational& value);

std::vector<BigInt> cumulant_weights(int n);

struct WickGraph {
  std::vector<std::vector<int>> lambda;  // symmetric, zero diagonal, rows sum to 2
  BigInt multiplicity;                   // graphs with this exponent matrix
  BigInt pairing_weight;                 // Wick contractions: 2^n / prod lambda_ij!
};

// Loopless multigraphs on n labelled vertices with every vertex of degree two,
// edges oriented towards the larger label. 2 <= n <= 6.
std::vector<WickGraph> wick_moment_graphs(int n);

std::string to_string(const BigInt& v);
std::string to_string(const Rational& v);

}  // namespace scg::runcomb
