#pragma once

#include <array>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "bhv/errors.hpp"
#include "bhv/poly.hpp"

namespace bhv {

/// Exact rational function in the formal parameters (n, alpha, a, b, x).
///
/// Normal form: numerator and denominator coprime, denominator an integer
/// polynomial with unit content and positive leading coefficient. Equal
/// values therefore have identical representations.
class ParamScalar {
 public:
  ParamScalar() : den_(1) {}
  ParamScalar(long long c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  ParamScalar(const Rational& c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  explicit ParamScalar(Poly p) : num_(std::move(p)), den_(1) {}

  static ParamScalar var(Var v) { return ParamScalar(Poly::var(v)); }
  static ParamScalar rational(long num, long den) {
    if (den == 0) throw MalformedCoefficient("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return ParamScalar(q);
  }

  /// Builds the normalized representative of num/den.
  static ParamScalar fraction(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw MalformedCoefficient("denominator is the zero polynomial");
    ParamScalar r;
    r.num_ = num;
    r.den_ = den;
    r.reduce();
    return r;
  }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }
  int var_mask() const { return num_.var_mask() | den_.var_mask(); }

  ParamScalar operator-() const {
    ParamScalar r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend ParamScalar operator+(const ParamScalar& x, const ParamScalar& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    if (x.den_ == y.den_) return fraction(x.num_ + y.num_, x.den_);
    if (x.den_.is_constant() && y.den_.is_constant())
      return fraction(x.num_.scaled(y.den_.constant_value()) + y.num_.scaled(x.den_.constant_value()),
                      Poly(x.den_.constant_value() * y.den_.constant_value()));
    const Poly g = gcd(x.den_, y.den_);
    const Poly xd = divide_exact(x.den_, g), yd = divide_exact(y.den_, g);
    return fraction(x.num_ * yd + y.num_ * xd, x.den_ * yd);
  }
  friend ParamScalar operator-(const ParamScalar& x, const ParamScalar& y) { return x + (-y); }

  friend ParamScalar operator*(const ParamScalar& x, const ParamScalar& y) {
    if (x.is_zero() || y.is_zero()) return {};
    if (x.is_constant()) return y.scaled(x.constant_value());
    if (y.is_constant()) return x.scaled(y.constant_value());
    const Poly g1 = gcd(x.num_, y.den_), g2 = gcd(y.num_, x.den_);
    ParamScalar r;
    r.num_ = divide_exact(x.num_, g1) * divide_exact(y.num_, g2);
    r.den_ = divide_exact(x.den_, g2) * divide_exact(y.den_, g1);
    r.fix_content();
    return r;
  }

  friend ParamScalar operator/(const ParamScalar& x, const ParamScalar& y) {
    if (y.is_zero()) throw MalformedCoefficient("division by the zero coefficient");
    return x * y.inverse();
  }

  ParamScalar inverse() const {
    if (is_zero()) throw MalformedCoefficient("inverse of zero");
    ParamScalar r;
    r.num_ = den_;
    r.den_ = num_;
    r.fix_content();
    return r;
  }

  ParamScalar scaled(const Rational& s) const {
    if (s == 0) return {};
    ParamScalar r = *this;
    r.num_ = r.num_.scaled(s);
    return r;
  }

  ParamScalar pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    ParamScalar r(1);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  ParamScalar& operator+=(const ParamScalar& o) { return *this = *this + o; }
  ParamScalar& operator-=(const ParamScalar& o) { return *this = *this - o; }
  ParamScalar& operator*=(const ParamScalar& o) { return *this = *this * o; }

  friend bool operator==(const ParamScalar& x, const ParamScalar& y) {
    return x.num_ == y.num_ && x.den_ == y.den_;
  }

  /// Replace variable `v` by `value` and renormalize.
  ParamScalar substitute(Var v, const ParamScalar& value) const {
    if (!(var_mask() & (1 << static_cast<int>(v)))) return *this;
    return horner(num_, v, value) / horner(den_, v, value);
  }

  /// Exact evaluation; throws PoleError at a denominator root.
  Rational evaluate(const std::array<Rational, kNumVars>& at) const {
    const Rational d = den_.evaluate(at);
    if (d == 0) throw PoleError("coefficient denominator vanishes at evaluation point: " + den_.str());
    return num_.evaluate(at) / d;
  }

  double evaluate(const std::array<double, kNumVars>& at) const {
    const double d = den_.evaluate(at);
    if (d == 0.0) throw PoleError("coefficient denominator vanishes at evaluation point: " + den_.str());
    return num_.evaluate(at) / d;
  }

  std::string str() const {
    if (den_.is_constant() && den_.constant_value() == 1) {
      if (num_.size() <= 1) return num_.str();
      return "(" + num_.str() + ")";
    }
    return "(" + num_.str() + ")/(" + den_.str() + ")";
  }

 private:
  static ParamScalar horner(const Poly& p, Var v, const ParamScalar& value) {
    auto coeffs = p.coefficients_in(v);
    ParamScalar r;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * value + ParamScalar(*it);
    return r;
  }

  void reduce() {
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    if (!den_.is_constant() && !num_.is_constant()) {
      const Poly g = gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = divide_exact(num_, g);
        den_ = divide_exact(den_, g);
      }
    }
    fix_content();
  }

  void fix_content() {
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    if (den_.is_constant()) {
      num_ = num_.scaled(1 / den_.constant_value());
      den_ = Poly(1);
      return;
    }
    auto [s, prim] = integer_primitive(den_);
    den_ = std::move(prim);
    num_ = num_.scaled(1 / s);
  }

  Poly num_;
  Poly den_;
};

inline const ParamScalar& n_sym() {
  static const ParamScalar v = ParamScalar::var(Var::n);
  return v;
}
inline const ParamScalar& alpha_sym() {
  static const ParamScalar v = ParamScalar::var(Var::alpha);
  return v;
}

/// Parses arithmetic over integers and the parameter names
/// `n`, `alpha`, `a`, `b`, `x` with + - * / ^ and parentheses.
class ParamParser {
 public:
  explicit ParamParser(std::string_view text) : s_(text) {}

  ParamScalar parse() {
    ParamScalar r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at position " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ParamScalar expr() {
    ParamScalar r = term();
    for (;;) {
      if (eat('+'))
        r = r + term();
      else if (eat('-'))
        r = r - term();
      else
        return r;
    }
  }

  ParamScalar term() {
    ParamScalar r = unary();
    for (;;) {
      if (eat('*'))
        r = r * unary();
      else if (eat('/'))
        r = r / unary();
      else
        return r;
    }
  }

  ParamScalar unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  ParamScalar power() {
    ParamScalar base = atom();
    if (eat('^')) {
      bool neg = eat('-');
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      const int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
      return base.pow(neg ? -e : e);
    }
    return base;
  }

  ParamScalar atom() {
    skip();
    if (eat('(')) {
      ParamScalar r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return ParamScalar(Rational(mpz_class(std::string(s_.substr(start, pos_ - start)))));
    }
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      for (int v = 0; v < kNumVars; ++v)
        if (name == var_name(static_cast<Var>(v))) return ParamScalar::var(static_cast<Var>(v));
      fail("unknown symbol '" + std::string(name) + "'");
    }
    fail("unexpected character");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

/// Shorthand used throughout for coefficients written as formulas.
inline ParamScalar P(std::string_view text) { return ParamParser(text).parse(); }

}  // namespace bhv
