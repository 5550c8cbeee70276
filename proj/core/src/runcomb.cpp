#include "scg/runcomb.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace scg::runcomb {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (int p : parts_)
    if (p <= 0) throw std::invalid_argument("Partition: parts must be positive");
  std::sort(parts_.begin(), parts_.end(), std::greater<>());
  weight_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

int Partition::multiplicity(int i) const {
  return static_cast<int>(std::count(parts_.begin(), parts_.end(), i));
}

Partition Partition::with(int part) const {
  auto v = parts_;
  v.push_back(part);
  return Partition(std::move(v));
}

Partition Partition::without(int part) const {
  auto v = parts_;
  auto it = std::find(v.begin(), v.end(), part);
  if (it == v.end()) throw std::invalid_argument("Partition::without: part not present");
  v.erase(it);
  return Partition(std::move(v));
}

Partition Partition::joined(const Partition& other) const {
  auto v = parts_;
  v.insert(v.end(), other.parts_.begin(), other.parts_.end());
  return Partition(std::move(v));
}

std::string Partition::to_string() const {
  if (parts_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < parts_.size();) {
    std::size_t j = i;
    while (j < parts_.size() && parts_[j] == parts_[i]) ++j;
    if (!first) os << ' ';
    first = false;
    os << 'x' << parts_[i];
    if (j - i > 1) os << '^' << (j - i);
    i = j;
  }
  return os.str();
}

RunPolynomial RunPolynomial::constant(const BigInt& c) { return monomial(Partition{}, c); }

RunPolynomial RunPolynomial::monomial(const Partition& p, const BigInt& c) {
  RunPolynomial r;
  r.add(p, c);
  return r;
}

BigInt RunPolynomial::coefficient(const Partition& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? BigInt(0) : it->second;
}

void RunPolynomial::add(const Partition& p, const BigInt& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(p, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

RunPolynomial& RunPolynomial::operator+=(const RunPolynomial& o) {
  for (const auto& [p, c] : o.terms_) add(p, c);
  return *this;
}

RunPolynomial RunPolynomial::operator+(const RunPolynomial& o) const {
  RunPolynomial r = *this;
  r += o;
  return r;
}

RunPolynomial RunPolynomial::operator*(const RunPolynomial& o) const {
  RunPolynomial r;
  for (const auto& [p, c] : terms_)
    for (const auto& [q, d] : o.terms_) r.add(p.joined(q), c * d);
  return r;
}

RunPolynomial RunPolynomial::scaled(const BigInt& c) const {
  RunPolynomial r;
  for (const auto& [p, d] : terms_) r.add(p, c * d);
  return r;
}

RunPolynomial RunPolynomial::degree_part(int degree) const {
  RunPolynomial r;
  for (const auto& [p, c] : terms_)
    if (p.length() == degree) r.add(p, c);
  return r;
}

std::string RunPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    if (p.empty()) {
      os << c;
    } else {
      if (c != 1) os << c << ' ';
      os << p.to_string();
    }
  }
  return os.str();
}

RunPolynomial apply_D(const RunPolynomial& poly) {
  RunPolynomial out;
  for (const auto& [p, c] : poly.terms()) {
    const auto& parts = p.parts();
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k > 0 && parts[k] == parts[k - 1]) continue;
      const int s = parts[k];
      const BigInt coeff = c * p.multiplicity(s);
      Partition rest = p.without(s);
      out.add(rest.with(s + 1), coeff);
      // ordered pairs (i, j) with i + j = s
      for (int i = 1; i < s; ++i) out.add(rest.joined(Partition({1, i, s - i})), coeff);
    }
  }
  return out;
}

RunPolynomial atomic_poly(int n) {
  if (n < 1) throw std::invalid_argument("atomic_poly: n must be >= 1");
  RunPolynomial a = RunPolynomial::monomial(Partition({1}));
  for (int k = 2; k <= n; ++k) a = apply_D(a);
  return a;
}

RunPolynomial circular_poly(int n) {
  if (n < 2) throw std::invalid_argument("circular_poly: n must be >= 2");
  RunPolynomial c = RunPolynomial::monomial(Partition({1, 1}));
  for (int k = 3; k <= n; ++k) c = apply_D(c);
  return c;
}

namespace {

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<RunPolynomial> atomic_table(int n) {
  std::vector<RunPolynomial> a(n + 1);
  if (n >= 1) a[1] = RunPolynomial::monomial(Partition({1}));
  for (int k = 2; k <= n; ++k) a[k] = apply_D(a[k - 1]);
  return a;
}

void for_each_partition(int n, int max_part, std::vector<int>& cur,
                        const std::function<void(const std::vector<int>&)>& f) {
  if (n == 0) {
    f(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    for_each_partition(n - p, p, cur, f);
    cur.pop_back();
  }
}

}  // namespace

RunPolynomial circular_from_atomic(int n) {
  if (n < 2) throw std::invalid_argument("circular_from_atomic: n must be >= 2");
  auto a = atomic_table(n - 1);
  RunPolynomial c;
  for (int m = 1; m <= n - 1; ++m) c += (a[m] * a[n - m]).scaled(binomial(n - 2, m - 1));
  return c;
}

RunPolynomial linear_poly(int n) {
  if (n < 0) throw std::invalid_argument("linear_poly: n must be >= 0");
  auto a = atomic_table(n);
  std::vector<RunPolynomial> l(n + 1);
  l[0] = RunPolynomial::constant(1);
  for (int k = 1; k <= n; ++k)
    for (int m = 1; m <= k; ++m) l[k] += (a[m] * l[k - m]).scaled(2 * binomial(k - 1, m - 1));
  return l[n];
}

RunPolynomial linear_poly_from_partitions(int n) {
  if (n < 0) throw std::invalid_argument("linear_poly_from_partitions: n must be >= 0");
  auto a = atomic_table(n);
  RunPolynomial out;
  std::vector<int> cur;
  for_each_partition(n, n, cur, [&](const std::vector<int>& parts) {
    // 2^{|p|} n! / (ord p * prod p_i!), ord p = prod p(i)!
    BigInt num = factorial(n) << parts.size();
    BigInt den = 1;
    for (int part : parts) den *= factorial(part);
    for (std::size_t i = 0; i < parts.size();) {
      std::size_t j = i;
      while (j < parts.size() && parts[j] == parts[i]) ++j;
      den *= factorial(static_cast<int>(j - i));
      i = j;
    }
    RunPolynomial prod = RunPolynomial::constant(num / den);
    for (int part : parts) prod = prod * a[part];
    out += prod;
  });
  return out;
}

RunPolynomial atomic_third_degree(int n) {
  if (n < 3) throw std::invalid_argument("atomic_third_degree: n must be >= 3");
  std::map<Partition, Rational> acc;
  for (int i = 1; i <= n - 2; ++i)
    for (int j = 1; i + j <= n - 1; ++j) {
      const int k = n - i - j;
      for (int q = 1; q <= k; ++q) {
        const int top = n - q - 2;
        Rational w(BigInt(n - q - 1), BigInt(n - q - j));
        BigInt multinom = factorial(top) / (factorial(i - 1) * factorial(j - 1) * factorial(k - q));
        acc[Partition({i, j, k})] += w * Rational(multinom);
      }
    }
  RunPolynomial out;
  for (const auto& [p, v] : acc) {
    if (denominator(v) != 1) throw std::logic_error("atomic_third_degree: non-integral coefficient");
    out.add(p, numerator(v));
  }
  return out;
}

KappaPolynomial valley_poly(int n) {
  if (n < 0) throw std::invalid_argument("valley_poly: n must be >= 0");
  KappaPolynomial k{1};
  for (int m = 2; m <= n; ++m) {
    // K_m = 2 kappa (1 - kappa) K'_{m-1} + (2 + (m - 2) kappa) K_{m-1}
    KappaPolynomial next(k.size() + 1, 0);
    for (std::size_t d = 0; d < k.size(); ++d) {
      const BigInt& c = k[d];
      if (d >= 1) {
        next[d] += 2 * int(d) * c;
        next[d + 1] -= 2 * int(d) * c;
      }
      next[d] += 2 * c;
      next[d + 1] += (m - 2) * c;
    }
    while (next.size() > 1 && next.back() == 0) next.pop_back();
    k = std::move(next);
  }
  return k;
}

KappaPolynomial valley_from_circular(int n) {
  if (n < 0) throw std::invalid_argument("valley_from_circular: n must be >= 0");
  if (n == 0) return {1};
  KappaPolynomial k;
  for (const auto& [p, c] : circular_poly(n + 1).terms()) {
    const int d = p.length() / 2 - 1;
    if (static_cast<int>(k.size()) <= d) k.resize(d + 1, 0);
    k[d] += c;
  }
  return k;
}

BigInt run_count(const Partition& p, RunKind kind) {
  const int n = p.weight();
  switch (kind) {
    case RunKind::atomic:
      if (n < 1) throw std::invalid_argument("run_count: atomic partitions need weight >= 1");
      return atomic_poly(n).coefficient(p);
    case RunKind::circular:
      if (n < 2) throw std::invalid_argument("run_count: circular partitions need weight >= 2");
      return circular_poly(n).coefficient(p);
    case RunKind::linear:
      return linear_poly(n).coefficient(p);
  }
  return 0;
}

Partition run_structure(const std::vector<int>& word, WordKind kind) {
  {
    auto sorted = word;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("run_structure: repeated entries");
  }
  std::vector<int> w = word;
  if (kind == WordKind::circular) {
    if (w.empty()) return {};
    if (*std::min_element(w.begin(), w.end()) != w.front())
      throw std::invalid_argument("run_structure: circular word must start with its minimum");
    w.push_back(w.front());
  }
  std::vector<int> lengths;
  if (w.size() < 2) return {};
  std::size_t start = 0;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    const bool up_before = w[i] > w[i - 1];
    const bool up_after = w[i + 1] > w[i];
    if (up_before != up_after) {
      lengths.push_back(static_cast<int>(i - start));
      start = i;
    }
  }
  lengths.push_back(static_cast<int>(w.size() - 1 - start));
  return Partition(std::move(lengths));
}

Rational eval_poly(const RunPolynomial& p, const Assignment& values) {
  Rational total = 0;
  for (const auto& [part, c] : p.terms()) {
    Rational term(c);
    for (int i : part.parts()) {
      auto it = values.find(i);
      if (it == values.end())
        throw std::invalid_argument("eval_poly: no value for x" + std::to_string(i));
      term *= it->second;
    }
    total += term;
  }
  return total;
}

Rational eval_poly_uniform(const RunPolynomial& p, const Rational& value) {
  Rational total = 0;
  for (const auto& [part, c] : p.terms()) {
    Rational term(c);
    for (int k = 0; k < part.length(); ++k) term *= value;
    total += term;
  }
  return total;
}

std::vector<BigInt> cumulant_weights(int n) {
  if (n < 1) throw std::invalid_argument("cumulant_weights: n must be >= 1");
  std::vector<BigInt> y;
  for (int m = 1; m <= n; ++m) {
    // dist[r]: summed products over the outer indices, the innermost being r
    // the outermost index behaves as if the index above it were 0
    std::vector<BigInt> dist{1};
    for (int level = m - 1; level >= 1; --level) {
      std::vector<BigInt> next(dist.size() + 2, 0);
      for (int r = 0; r < static_cast<int>(dist.size()); ++r) {
        if (dist[r] == 0) continue;
        for (int s = 0; s <= 2 + r; ++s) next[s] += dist[r] * (1 + s);
      }
      while (next.size() > 1 && next.back() == 0) next.pop_back();
      dist = std::move(next);
    }
    BigInt sum = 0;
    for (const auto& d : dist) sum += d;
    y.push_back(sum << m);
  }
  return y;
}

std::string to_string(const BigInt& v) { return v.str(); }

std::string to_string(const Rational& v) {
  std::ostringstream os;
  os << numerator(v);
  if (denominator(v) != 1) os << '/' << denominator(v);
  return os.str();
}

}  // namespace scg::runcomb
