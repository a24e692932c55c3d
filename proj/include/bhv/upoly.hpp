#pragma once

#include <string>
#include <vector>

#include "bhv/errors.hpp"
#include "bhv/param_scalar.hpp"

namespace bhv {

/// Dense univariate polynomial with rational coefficients, lowest degree first.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

  /// Extracts p as a polynomial in v; every other variable must be absent.
  static UPoly from_poly(const Poly& p, Var v) {
    std::vector<Rational> c;
    for (const auto& [k, coef] : p.terms()) {
      for (int w = 0; w < kNumVars; ++w)
        if (w != static_cast<int>(v) && detail::exponent(k, w) != 0)
          throw ParameterRange("polynomial still depends on " + std::string(var_name(static_cast<Var>(w))) + ": " + p.str());
      const auto e = static_cast<std::size_t>(detail::exponent(k, static_cast<int>(v)));
      if (c.size() <= e) c.resize(e + 1);
      c[e] += coef;
    }
    return UPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& lead() const { return c_.back(); }

  Rational operator()(const Rational& x) const {
    Rational r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }
  double operator()(double x) const {
    double r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + it->get_d();
    return r;
  }

  UPoly derivative() const {
    std::vector<Rational> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long>(i));
    return UPoly(std::move(d));
  }

  friend UPoly operator-(const UPoly& p) {
    std::vector<Rational> c = p.c_;
    for (auto& x : c) x = -x;
    return UPoly(std::move(c));
  }
  friend UPoly operator-(const UPoly& x, const UPoly& y) {
    std::vector<Rational> c(std::max(x.c_.size(), y.c_.size()));
    for (std::size_t i = 0; i < x.c_.size(); ++i) c[i] += x.c_[i];
    for (std::size_t i = 0; i < y.c_.size(); ++i) c[i] -= y.c_[i];
    return UPoly(std::move(c));
  }
  friend bool operator==(const UPoly& x, const UPoly& y) { return x.c_ == y.c_; }

  /// Quotient and remainder of division by d.
  std::pair<UPoly, UPoly> divmod(const UPoly& d) const {
    if (d.is_zero()) throw SingularSystem("polynomial division by zero");
    std::vector<Rational> r = c_;
    std::vector<Rational> q(c_.size() >= d.c_.size() ? c_.size() - d.c_.size() + 1 : 0);
    for (int i = degree(); i >= d.degree(); --i) {
      const Rational f = r[static_cast<std::size_t>(i)] / d.lead();
      if (f == 0) continue;
      q[static_cast<std::size_t>(i - d.degree())] = f;
      for (int j = 0; j <= d.degree(); ++j) r[static_cast<std::size_t>(i - d.degree() + j)] -= f * d.c_[static_cast<std::size_t>(j)];
    }
    return {UPoly(std::move(q)), UPoly(std::move(r))};
  }

  std::string str(const char* var = "x") const {
    if (c_.empty()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
      const Rational& c = c_[static_cast<std::size_t>(i)];
      if (c == 0) continue;
      if (!s.empty()) s += c > 0 ? " + " : " - ";
      else if (c < 0) s += "-";
      const Rational a = abs(c);
      if (i == 0 || a != 1) s += a.get_str() + (i > 0 ? "*" : "");
      if (i > 0) s += std::string(var) + (i > 1 ? "^" + std::to_string(i) : "");
    }
    return s;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

inline int sign_of(const Rational& r) { return sgn(r); }

/// p/q in lowest terms (the two-argument mpq constructor does not reduce).
inline Rational ratio(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

/// Sturm chain p, p', -rem(p, p'), ... for the square-free part of p.
inline std::vector<UPoly> sturm_chain(const UPoly& p) {
  std::vector<UPoly> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    const UPoly r = chain[chain.size() - 2].divmod(chain.back()).second;
    chain.push_back(-r);
  }
  chain.pop_back();
  return chain;
}

/// Sign changes of the chain at x, zeros skipped.
inline int sign_variations(const std::vector<UPoly>& chain, const Rational& x) {
  int v = 0, last = 0;
  for (const auto& q : chain) {
    const int s = sign_of(q(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

/// Distinct real roots of p in the open interval (lo, hi), with p(lo), p(hi) != 0.
inline int count_roots_open(const std::vector<UPoly>& chain, const Rational& lo, const Rational& hi) {
  return sign_variations(chain, lo) - sign_variations(chain, hi);
}

/// Removes the factor (x - r) as often as it divides p; returns the multiplicity.
inline int deflate(UPoly& p, const Rational& r) {
  int m = 0;
  while (!p.is_zero() && p(r) == 0) {
    p = p.divmod(UPoly({-r, Rational(1)})).first;
    ++m;
  }
  return m;
}

}  // namespace bhv
