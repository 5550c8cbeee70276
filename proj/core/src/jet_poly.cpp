#include "scg/jet_poly.hpp"

#include <cmath>
#include <stdexcept>

namespace scg {

JetPoly JetPoly::constant(int nvars, double c) {
  JetPoly p(nvars);
  p.add(Exponents(nvars, 0), c);
  return p;
}

JetPoly JetPoly::variable(int nvars, int i, double c) {
  JetPoly p(nvars);
  Exponents e(nvars, 0);
  e.at(i) = 1;
  p.add(e, c);
  return p;
}

double JetPoly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void JetPoly::add(const Exponents& e, double c) {
  if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("JetPoly: arity mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

JetPoly& JetPoly::operator+=(const JetPoly& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) add(e, c);
  return *this;
}

JetPoly& JetPoly::operator-=(const JetPoly& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) add(e, -c);
  return *this;
}

JetPoly& JetPoly::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

JetPoly JetPoly::multiply(const JetPoly& o, const std::function<bool(const Exponents&)>& keep) const {
  JetPoly r(std::max(nvars_, o.nvars_));
  Exponents e(r.nvars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (int i = 0; i < r.nvars_; ++i) e[i] = ea[i] + eb[i];
      if (!keep || keep(e)) r.add(e, ca * cb);
    }
  return r;
}

JetPoly JetPoly::operator*(const JetPoly& o) const { return multiply(o, nullptr); }

JetPoly JetPoly::derivative(int var) const {
  JetPoly r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents f = e;
    --f[var];
    r.add(f, c * e[var]);
  }
  return r;
}

JetPoly JetPoly::filtered(const std::function<bool(const Exponents&)>& keep) const {
  JetPoly r(nvars_);
  for (const auto& [e, c] : terms_)
    if (keep(e)) r.terms_.emplace(e, c);
  return r;
}

JetPoly JetPoly::zeroed(const std::vector<int>& vars) const {
  return filtered([&](const Exponents& e) {
    for (int v : vars)
      if (e[v] != 0) return false;
    return true;
  });
}

double JetPoly::evaluate(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("JetPoly: arity mismatch");
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

int JetPoly::degree(const Exponents& e, int first, int count) {
  int d = 0;
  for (int i = first; i < first + count; ++i) d += e[i];
  return d;
}

}  // namespace scg
