#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bhv/errors.hpp"

namespace bhv {

using Rational = mpq_class;

/// Formal parameters. `x` is an auxiliary variable for the univariate
/// polynomials f1, f2, f3 whose coefficients depend on n.
enum class Var : int { n = 0, alpha = 1, a = 2, b = 3, x = 4 };
inline constexpr int kNumVars = 5;

inline const char* var_name(Var v) {
  static constexpr const char* names[kNumVars] = {"n", "alpha", "a", "b", "x"};
  return names[static_cast<int>(v)];
}

/// Exponent vectors are packed into one integer, n in the most significant
/// byte, so integer order is lexicographic order n > alpha > a > b > x.
using ExpKey = std::uint64_t;

namespace detail {
inline constexpr int shift_of(int v) { return 8 * (kNumVars - 1 - v); }
inline int exponent(ExpKey k, int v) { return static_cast<int>((k >> shift_of(v)) & 0xFF); }
inline ExpKey with_exponent(ExpKey k, int v, int e) {
  return (k & ~(ExpKey{0xFF} << shift_of(v))) | (ExpKey(e) << shift_of(v));
}
inline bool divides(ExpKey d, ExpKey k) {
  for (int v = 0; v < kNumVars; ++v)
    if (exponent(d, v) > exponent(k, v)) return false;
  return true;
}
inline ExpKey multiply(ExpKey x, ExpKey y) {
  for (int v = 0; v < kNumVars; ++v)
    if (exponent(x, v) + exponent(y, v) > 255) throw Error("polynomial degree overflow");
  return x + y;
}
}  // namespace detail

/// Sparse multivariate polynomial with exact rational coefficients.
/// Terms are kept sorted by descending exponent key with no zero coefficient.
class Poly {
 public:
  using Term = std::pair<ExpKey, Rational>;

  Poly() = default;
  Poly(long long c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_.emplace_back(0, Rational(static_cast<long>(c)));
  }
  Poly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_.emplace_back(0, c);
  }

  static Poly var(Var v, int power = 1) {
    Poly p;
    p.terms_.emplace_back(detail::with_exponent(0, static_cast<int>(v), power), Rational(1));
    return p;
  }

  static Poly from_terms(std::vector<Term> terms) {
    Poly p;
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
  Rational constant_value() const {
    return (!terms_.empty() && terms_.back().first == 0) ? terms_.back().second : Rational(0);
  }
  const Rational& leading_coefficient() const { return terms_.front().second; }
  ExpKey leading_key() const { return terms_.front().first; }
  std::size_t size() const { return terms_.size(); }

  int var_mask() const {
    int mask = 0;
    for (const auto& [k, c] : terms_)
      for (int v = 0; v < kNumVars; ++v)
        if (detail::exponent(k, v) > 0) mask |= 1 << v;
    return mask;
  }

  int degree(Var v) const {
    int d = -1;
    for (const auto& [k, c] : terms_) d = std::max(d, detail::exponent(k, static_cast<int>(v)));
    return d;
  }

  /// Coefficients as a polynomial in `v`; entry k multiplies v^k.
  std::vector<Poly> coefficients_in(Var v) const {
    const int vi = static_cast<int>(v);
    std::vector<std::vector<Term>> buckets(static_cast<std::size_t>(std::max(degree(v), 0) + 1));
    for (const auto& [k, c] : terms_)
      buckets[static_cast<std::size_t>(detail::exponent(k, vi))].emplace_back(detail::with_exponent(k, vi, 0), c);
    std::vector<Poly> out;
    out.reserve(buckets.size());
    for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
    return out;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  friend Poly operator+(const Poly& x, const Poly& y) { return merge(x, y, false); }
  friend Poly operator-(const Poly& x, const Poly& y) { return merge(x, y, true); }

  friend Poly operator*(const Poly& x, const Poly& y) {
    if (x.is_zero() || y.is_zero()) return {};
    if (x.is_constant()) return y.scaled(x.leading_coefficient());
    if (y.is_constant()) return x.scaled(y.leading_coefficient());
    std::vector<Term> acc;
    acc.reserve(x.size() * y.size());
    for (const auto& [kx, cx] : x.terms_)
      for (const auto& [ky, cy] : y.terms_) acc.emplace_back(detail::multiply(kx, ky), cx * cy);
    return from_terms(std::move(acc));
  }

  Poly scaled(const Rational& s) const {
    if (s == 0) return {};
    Poly r = *this;
    for (auto& t : r.terms_) t.second *= s;
    return r;
  }

  Poly shifted(Var v, int power) const {
    Poly r = *this;
    const ExpKey m = detail::with_exponent(0, static_cast<int>(v), power);
    for (auto& t : r.terms_) t.first = detail::multiply(t.first, m);
    return r;
  }

  Poly pow(int e) const {
    Poly r(1);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& x, const Poly& y) { return x.terms_ == y.terms_; }

  /// Exact rational evaluation.
  Rational evaluate(const std::array<Rational, kNumVars>& at) const {
    Rational sum = 0;
    for (const auto& [k, c] : terms_) {
      Rational t = c;
      for (int v = 0; v < kNumVars; ++v)
        for (int e = detail::exponent(k, v); e > 0; --e) t *= at[static_cast<std::size_t>(v)];
      sum += t;
    }
    return sum;
  }

  double evaluate(const std::array<double, kNumVars>& at) const {
    double sum = 0;
    for (const auto& [k, c] : terms_) {
      double t = c.get_d();
      for (int v = 0; v < kNumVars; ++v) {
        const int e = detail::exponent(k, v);
        for (int i = 0; i < e; ++i) t *= at[static_cast<std::size_t>(v)];
      }
      sum += t;
    }
    return sum;
  }

  /// Polynomial composition v -> q.
  Poly substitute(Var v, const Poly& q) const {
    auto coeffs = coefficients_in(v);
    Poly r;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * q + *it;
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      Rational mag = abs(c);
      const bool neg = c < 0;
      if (first) {
        if (neg) os << "-";
      } else {
        os << (neg ? " - " : " + ");
      }
      first = false;
      bool wrote = false;
      if (mag != 1 || k == 0) {
        os << mag.get_str();
        wrote = true;
      }
      for (int v = 0; v < kNumVars; ++v) {
        const int e = detail::exponent(k, v);
        if (e == 0) continue;
        if (wrote) os << "*";
        os << var_name(static_cast<Var>(v));
        if (e > 1) os << "^" << e;
        wrote = true;
      }
    }
    return os.str();
  }

 private:
  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& l, const Term& r) { return l.first > r.first; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && out.back().first == t.first)
        out.back().second += t.second;
      else
        out.push_back(std::move(t));
    }
    std::erase_if(out, [](const Term& t) { return t.second == 0; });
    terms_ = std::move(out);
  }

  static Poly merge(const Poly& x, const Poly& y, bool subtract) {
    Poly r;
    r.terms_.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.terms_.size() || j < y.terms_.size()) {
      if (j == y.terms_.size() || (i < x.terms_.size() && x.terms_[i].first > y.terms_[j].first)) {
        r.terms_.push_back(x.terms_[i++]);
      } else if (i == x.terms_.size() || y.terms_[j].first > x.terms_[i].first) {
        r.terms_.emplace_back(y.terms_[j].first, subtract ? Rational(-y.terms_[j].second) : y.terms_[j].second);
        ++j;
      } else {
        Rational c = subtract ? Rational(x.terms_[i].second - y.terms_[j].second)
                              : Rational(x.terms_[i].second + y.terms_[j].second);
        if (c != 0) r.terms_.emplace_back(x.terms_[i].first, std::move(c));
        ++i;
        ++j;
      }
    }
    return r;
  }

  std::vector<Term> terms_;
};

/// Quotient x / y when y divides x exactly, nullopt otherwise.
inline std::optional<Poly> try_divide(const Poly& x, const Poly& y) {
  if (y.is_zero()) throw MalformedCoefficient("polynomial division by zero");
  if (y.is_constant()) return x.scaled(1 / y.leading_coefficient());
  for (int v = 0; v < kNumVars; ++v)
    if (y.degree(static_cast<Var>(v)) > std::max(x.degree(static_cast<Var>(v)), 0) && !x.is_zero()) return std::nullopt;
  std::vector<Poly::Term> quotient;
  Poly rem = x;
  const ExpKey ly = y.leading_key();
  const Rational& cy = y.leading_coefficient();
  while (!rem.is_zero()) {
    const ExpKey lr = rem.leading_key();
    if (!detail::divides(ly, lr)) return std::nullopt;
    Poly::Term t{lr - ly, rem.leading_coefficient() / cy};
    quotient.push_back(t);
    rem -= y * Poly::from_terms({t});
  }
  return Poly::from_terms(std::move(quotient));
}

/// Exact quotient x / y. Throws if y does not divide x.
inline Poly divide_exact(const Poly& x, const Poly& y) {
  auto q = try_divide(x, y);
  if (!q) throw Error("inexact polynomial division");
  return std::move(*q);
}

/// Scale to integer coefficients with gcd 1 and a positive leading coefficient.
/// Returns the factor s with p == s * result.
inline std::pair<Rational, Poly> integer_primitive(const Poly& p) {
  if (p.is_zero()) return {Rational(1), p};
  mpz_class den_lcm = 1, num_gcd = 0;
  for (const auto& [k, c] : p.terms()) {
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num_mpz_t());
  }
  Rational s(num_gcd, den_lcm);
  s.canonicalize();
  if (p.leading_coefficient() < 0) s = -s;
  return {s, p.scaled(1 / s)};
}

inline Poly gcd(const Poly& x, const Poly& y);

namespace detail {

inline int highest_var(int mask) {
  for (int v = kNumVars - 1; v >= 0; --v)
    if (mask & (1 << v)) return v;
  return -1;
}

inline Poly content_in(const Poly& p, Var v) {
  Poly g;
  for (const auto& c : p.coefficients_in(v)) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) return Poly(1);
  }
  return g;
}

/// Primitive part with respect to `v`, also stripped of its numeric content.
inline Poly primitive_part_in(const Poly& p, Var v) {
  if (p.degree(v) <= 0) return Poly(1);
  return integer_primitive(divide_exact(p, content_in(p, v))).second;
}

inline Poly leading_coefficient_in(const Poly& p, Var v) { return p.coefficients_in(v).back(); }

inline Poly pseudo_remainder(Poly x, const Poly& y, Var v) {
  const int dy = y.degree(v);
  const Poly ly = leading_coefficient_in(y, v);
  while (!x.is_zero() && x.degree(v) >= dy) {
    const int d = x.degree(v) - dy;
    x = ly * x - (leading_coefficient_in(x, v) * y).shifted(v, d);
  }
  return x;
}

}  // namespace detail

namespace detail {

/// Primitive remainder sequence; the slow but unconditional route.
inline Poly prs_gcd(const Poly& x, const Poly& y) {
  if (x.is_zero()) return y.is_zero() ? Poly() : integer_primitive(y).second;
  if (y.is_zero()) return integer_primitive(x).second;
  if (x.is_constant() || y.is_constant()) return Poly(1);
  const int mx = x.var_mask(), my = y.var_mask();
  // A variable present in only one argument is eliminated through contents.
  if (const int only = (mx ^ my); only != 0) {
    const Var v = static_cast<Var>(highest_var(only));
    return (mx & (1 << static_cast<int>(v))) ? gcd(content_in(x, v), y) : gcd(x, content_in(y, v));
  }
  // Main variable of smallest degree keeps the remainder sequence short.
  Var v = Var::n;
  int best = 1 << 20;
  for (int k = 0; k < kNumVars; ++k) {
    if (!(mx & (1 << k))) continue;
    const int d = std::max(x.degree(static_cast<Var>(k)), y.degree(static_cast<Var>(k)));
    if (d < best) {
      best = d;
      v = static_cast<Var>(k);
    }
  }

  const Poly cx = content_in(x, v), cy = content_in(y, v);
  Poly px = integer_primitive(divide_exact(x, cx)).second, py = integer_primitive(divide_exact(y, cy)).second;
  const Poly c = gcd(cx, cy);
  if (px.degree(v) < py.degree(v)) std::swap(px, py);
  while (!py.is_zero()) {
    Poly r = pseudo_remainder(px, py, v);
    px = std::move(py);
    if (r.is_zero()) break;
    if (r.degree(v) == 0) {
      px = Poly(1);
      break;
    }
    py = primitive_part_in(r, v);
  }
  return integer_primitive(c * primitive_part_in(px, v)).second;
}

inline mpz_class max_norm(const Poly& p) {
  mpz_class m = 0;
  for (const auto& [k, c] : p.terms()) {
    mpz_class a = abs(c.get_num());
    if (a > m) m = a;
  }
  return m;
}

inline mpz_class int_content(const Poly& p) {
  mpz_class g = 0;
  for (const auto& [k, c] : p.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
  return g;
}

/// Undo evaluation at v = xi by balanced xi-adic expansion of the coefficients.
inline Poly interpolate(Poly h, const mpz_class& xi, Var v) {
  std::vector<Poly::Term> out;
  const mpz_class half = xi / 2;
  for (int i = 0; !h.is_zero(); ++i) {
    std::vector<Poly::Term> digit;
    for (const auto& [k, c] : h.terms()) {
      mpz_class r;
      mpz_fdiv_r(r.get_mpz_t(), c.get_num_mpz_t(), xi.get_mpz_t());
      if (r > half) r -= xi;
      if (r != 0) digit.emplace_back(k, Rational(r));
    }
    Poly g = Poly::from_terms(digit);
    for (const auto& [k, c] : g.terms()) out.emplace_back(with_exponent(k, static_cast<int>(v), i), c);
    h = (h - g).scaled(Rational(1, 1) / Rational(xi));
  }
  return Poly::from_terms(std::move(out));
}

/// Heuristic gcd over Z[n, alpha, a, b, x] by evaluation at large integers and
/// interpolation, checked by trial division. Inputs have integer coefficients.
inline std::optional<Poly> heuristic_gcd(const Poly& f, const Poly& g) {
  const mpz_class cf = int_content(f), cg = int_content(g);
  mpz_class c;
  mpz_gcd(c.get_mpz_t(), cf.get_mpz_t(), cg.get_mpz_t());
  if (f.is_constant() || g.is_constant()) return Poly(Rational(c));
  const int mask = f.var_mask() | g.var_mask();
  int vi = 0;
  while (!(mask & (1 << vi))) ++vi;
  const Var v = static_cast<Var>(vi);
  const Poly pf = f.scaled(Rational(1) / Rational(cf)), pg = g.scaled(Rational(1) / Rational(cg));

  const mpz_class nf = max_norm(pf), ng = max_norm(pg);
  const mpz_class b = 2 * std::min(nf, ng) + 29;
  mpz_class xi = sqrt(b) * 99;
  if (b < xi) xi = b;
  const mpz_class lf = abs(pf.leading_coefficient().get_num()), lg = abs(pg.leading_coefficient().get_num());
  const mpz_class alt = 2 * std::min(nf / lf, ng / lg) + 2;
  if (alt > xi) xi = alt;

  for (int attempt = 0; attempt < 6; ++attempt) {
    const Poly ff = pf.substitute(v, Poly(Rational(xi))), gg = pg.substitute(v, Poly(Rational(xi)));
    if (!ff.is_zero() && !gg.is_zero()) {
      auto h = heuristic_gcd(ff, gg);
      if (!h) return std::nullopt;
      Poly cand = interpolate(*h, xi, v);
      if (!cand.is_zero()) {
        cand = integer_primitive(cand).second;
        if (try_divide(pf, cand) && try_divide(pg, cand)) return cand.scaled(Rational(c));
      }
    }
    xi = xi * 73794 * sqrt(sqrt(xi)) / 27011;
  }
  return std::nullopt;
}

}  // namespace detail

/// Greatest common divisor over Q, normalized by integer_primitive.
inline Poly gcd(const Poly& x, const Poly& y) {
  if (x.is_zero()) return y.is_zero() ? Poly() : integer_primitive(y).second;
  if (y.is_zero()) return integer_primitive(x).second;
  if (x.is_constant() || y.is_constant()) return Poly(1);
  const Poly px = integer_primitive(x).second, py = integer_primitive(y).second;
  if (px == py) return px;
  if (auto h = detail::heuristic_gcd(px, py)) return integer_primitive(*h).second;
  return detail::prs_gcd(px, py);
}

}  // namespace bhv
