#pragma once

#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bhv/errors.hpp"
#include "bhv/monomial.hpp"
#include "bhv/param_scalar.hpp"

namespace bhv {

inline TensorMonomial mono(int u_power, std::initializer_list<Factor> fs) { return TensorMonomial(u_power, fs); }

namespace detail {

inline TensorMonomial shift_labels(const TensorMonomial& m, int offset) {
  TensorMonomial r = m;
  for (auto& f : r.mutable_factors())
    for (int k = 0; k < rank_of(f.sym); ++k) f.idx[static_cast<std::size_t>(k)] += offset;
  return r;
}

inline TensorMonomial rename_label(const TensorMonomial& m, int from, int to) {
  TensorMonomial r = m;
  for (auto& f : r.mutable_factors())
    for (int k = 0; k < rank_of(f.sym); ++k)
      if (f.idx[static_cast<std::size_t>(k)] == from) f.idx[static_cast<std::size_t>(k)] = to;
  return r;
}

inline int free_label_of(const TensorMonomial& m) {
  for (const auto& [label, c] : m.label_counts())
    if (c == 1) return label;
  return -1;
}

/// Raw product of two monomials with the second one's labels moved clear.
inline TensorMonomial raw_product(const TensorMonomial& x, const TensorMonomial& y) {
  TensorMonomial shifted = shift_labels(y, x.max_label() + 1);
  std::vector<Factor> fs = x.factors();
  fs.insert(fs.end(), shifted.factors().begin(), shifted.factors().end());
  return TensorMonomial(x.u_power() + y.u_power(), std::move(fs));
}

}  // namespace detail

/// Linear combination of canonical monomials of one valence (0 = scalar,
/// 1 = vector with free index i). The zero expression is the empty map.
class Expr {
 public:
  using Terms = std::map<TensorMonomial, ParamScalar>;

  explicit Expr(int valence = 0) : valence_(valence) {
    if (valence < 0 || valence > 1) throw MalformedMonomial("expression valence must be 0 or 1");
  }

  static Expr constant(const ParamScalar& c) {
    Expr e(0);
    e.add(TensorMonomial(), c);
    return e;
  }

  static Expr term(const ParamScalar& c, const TensorMonomial& m) {
    const TensorMonomial cm = canonicalize(m);
    Expr e(cm.valence());
    e.add(cm, c);
    return e;
  }
  static Expr term(const TensorMonomial& m) { return term(ParamScalar(1), m); }

  int valence() const { return valence_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Terms& terms() const { return terms_; }

  bool contains(Sym s) const {
    for (const auto& [m, c] : terms_)
      if (m.contains(s)) return true;
    return false;
  }

  /// Adds c * m after canonicalization; traces of E drop out.
  void add(const TensorMonomial& m, const ParamScalar& c) {
    if (c.is_zero()) return;
    const TensorMonomial cm = canonicalize(m);
    if (cm.vanishes()) return;
    if (cm.valence() != valence_)
      throw ValenceMismatch("adding a valence-" + std::to_string(cm.valence()) + " monomial to a valence-" +
                            std::to_string(valence_) + " expression: " + cm.str());
    auto [it, inserted] = terms_.try_emplace(cm, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Expr operator-() const { return scaled(ParamScalar(-1)); }

  friend Expr operator+(const Expr& x, const Expr& y) {
    check_same(x, y);
    Expr r = x;
    for (const auto& [m, c] : y.terms_) r.add_canonical(m, c);
    return r;
  }
  friend Expr operator-(const Expr& x, const Expr& y) {
    check_same(x, y);
    Expr r = x;
    for (const auto& [m, c] : y.terms_) r.add_canonical(m, -c);
    return r;
  }
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }

  Expr scaled(const ParamScalar& s) const {
    Expr r(valence_);
    if (s.is_zero()) return r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
    return r;
  }

  /// Multiplies by u^k.
  Expr times_u(int k) const {
    Expr r(valence_);
    for (const auto& [m, c] : terms_) {
      TensorMonomial t = m;
      t.set_u_power(m.u_power() + k);
      r.terms_.emplace(std::move(t), c);
    }
    return r;
  }

  /// Product; at most one factor may be a vector.
  friend Expr operator*(const Expr& x, const Expr& y) {
    if (x.valence_ + y.valence_ > 1) throw ValenceMismatch("product of two vector expressions (use dot)");
    Expr r(x.valence_ + y.valence_);
    for (const auto& [mx, cx] : x.terms_)
      for (const auto& [my, cy] : y.terms_) r.add(detail::raw_product(mx, my), cx * cy);
    return r;
  }
  friend Expr operator*(const ParamScalar& s, const Expr& e) { return e.scaled(s); }

  /// Replace a formal parameter in every coefficient.
  Expr substitute(Var v, const ParamScalar& value) const {
    Expr r(valence_);
    for (const auto& [m, c] : terms_) r.add_canonical(m, c.substitute(v, value));
    return r;
  }

  friend bool operator==(const Expr& x, const Expr& y) { return x.valence_ == y.valence_ && x.terms_ == y.terms_; }

  /// One line per term: `coefficient * monomial`.
  std::vector<std::string> serialize() const {
    std::vector<std::string> out;
    out.reserve(terms_.size());
    for (const auto& [m, c] : terms_) out.push_back(c.str() + " * " + m.str());
    return out;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& line : serialize()) {
      if (!s.empty()) s += "\n";
      s += line;
    }
    return s;
  }

 private:
  static void check_same(const Expr& x, const Expr& y) {
    if (x.valence_ != y.valence_) throw ValenceMismatch("combining scalar and vector expressions");
  }

  void add_canonical(const TensorMonomial& m, const ParamScalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  int valence_;
  Terms terms_;
};

inline Expr combine(const Expr& e1, const ParamScalar& c1, const Expr& e2, const ParamScalar& c2) {
  if (e1.valence() != e2.valence()) throw ValenceMismatch("combine: valence mismatch");
  return e1.scaled(c1) + e2.scaled(c2);
}

/// Contraction v_i w^i of two vector expressions.
inline Expr dot(const Expr& v, const Expr& w) {
  if (v.valence() != 1 || w.valence() != 1) throw ValenceMismatch("dot needs two vector expressions");
  Expr r(0);
  for (const auto& [mv, cv] : v.terms())
    for (const auto& [mw, cw] : w.terms()) {
      const int offset = mv.max_label() + 1;
      const TensorMonomial sw = detail::shift_labels(mw, offset);
      const int joint = sw.max_label() + 1;
      TensorMonomial a = detail::rename_label(mv, detail::free_label_of(mv), joint);
      TensorMonomial b = detail::rename_label(sw, detail::free_label_of(sw), joint);
      std::vector<Factor> fs = a.factors();
      fs.insert(fs.end(), b.factors().begin(), b.factors().end());
      r.add(TensorMonomial(mv.u_power() + mw.u_power(), std::move(fs)), cv * cw);
    }
  return r;
}

/// Building blocks, in canonical labelling.
namespace ex {
inline Expr num(const ParamScalar& c) { return Expr::constant(c); }
inline Expr u(int p) { return Expr::term(mono(p, {})); }
inline Expr du() { return Expr::term(mono(0, {fac(Sym::Grad, 0)})); }
inline Expr lap() { return Expr::term(mono(0, {fac(Sym::Lap)})); }
inline Expr bilap() { return Expr::term(mono(0, {fac(Sym::BiLap)})); }
inline Expr dlap() { return Expr::term(mono(0, {fac(Sym::GradLap, 0)})); }
/// |grad u|^2
inline Expr grad_sq() { return Expr::term(mono(0, {fac(Sym::Grad, 1), fac(Sym::Grad, 1)})); }
/// u_{ij} u^j
inline Expr hess_du() { return Expr::term(mono(0, {fac(Sym::Hess, 0, 1), fac(Sym::Grad, 1)})); }
/// u_{ij} u^i u^j
inline Expr hess_du_du() { return Expr::term(mono(0, {fac(Sym::Hess, 1, 2), fac(Sym::Grad, 1), fac(Sym::Grad, 2)})); }
/// u_{ij} u^{ij}
inline Expr hess_sq() { return Expr::term(mono(0, {fac(Sym::Hess, 1, 2), fac(Sym::Hess, 1, 2)})); }
/// R_{ij} u^i u^j
inline Expr ric_du_du() { return Expr::term(mono(0, {fac(Sym::Ric, 1, 2), fac(Sym::Grad, 1), fac(Sym::Grad, 2)})); }
/// E_{ij} u^j, F_i, G as raw symbols.
inline Expr e_du() { return Expr::term(mono(0, {fac(Sym::E, 0, 1), fac(Sym::Grad, 1)})); }
inline Expr f_sym() { return Expr::term(mono(0, {fac(Sym::F, 0)})); }
inline Expr g_sym() { return Expr::term(mono(0, {fac(Sym::G)})); }
}  // namespace ex

/// Symmetric 2-tensors spanned by the Hessian, du (x) du, the metric, Ric and
/// the symbol E, with scalar expression coefficients.
enum class Basis2 { Hess, GradGrad, Metric, Ric, E };

class SymTensor2 {
 public:
  SymTensor2() = default;
  static SymTensor2 of(Basis2 b, Expr coeff = Expr::constant(ParamScalar(1))) {
    if (coeff.valence() != 0) throw ValenceMismatch("tensor coefficient must be scalar");
    SymTensor2 t;
    t.parts_.emplace(b, std::move(coeff));
    return t;
  }

  const std::map<Basis2, Expr>& parts() const { return parts_; }

  friend SymTensor2 operator+(SymTensor2 x, const SymTensor2& y) {
    for (const auto& [b, c] : y.parts_) x.accumulate(b, c);
    return x;
  }
  friend SymTensor2 operator-(SymTensor2 x, const SymTensor2& y) {
    for (const auto& [b, c] : y.parts_) x.accumulate(b, -c);
    return x;
  }
  friend SymTensor2 operator*(const Expr& s, const SymTensor2& t) {
    SymTensor2 r;
    for (const auto& [b, c] : t.parts_) r.accumulate(b, s * c);
    return r;
  }

  /// T_{ij} v^j as a vector with free index i.
  Expr contract(const Expr& v) const {
    Expr r(1);
    for (const auto& [b, c] : parts_) r += c * apply(b, v);
    return r;
  }

  Expr trace() const {
    Expr r(0);
    for (const auto& [b, c] : parts_) r += c * pair(b, Basis2::Metric);
    return r;
  }

  friend Expr double_contract(const SymTensor2& x, const SymTensor2& y) {
    Expr r(0);
    for (const auto& [bx, cx] : x.parts_)
      for (const auto& [by, cy] : y.parts_) r += (cx * cy) * pair(bx, by);
    return r;
  }

  /// B_{ij} v^j for one basis element.
  static Expr apply(Basis2 b, const Expr& v) {
    if (v.valence() != 1) throw ValenceMismatch("tensor must act on a vector");
    if (b == Basis2::Metric) return v;
    Expr r(1);
    for (const auto& [m, c] : v.terms()) {
      TensorMonomial t = detail::shift_labels(m, 2);
      t = detail::rename_label(t, detail::free_label_of(t), 1);
      std::vector<Factor> fs = t.factors();
      switch (b) {
        case Basis2::Hess: fs.push_back(fac(Sym::Hess, 0, 1)); break;
        case Basis2::GradGrad:
          fs.push_back(fac(Sym::Grad, 0));
          fs.push_back(fac(Sym::Grad, 1));
          break;
        case Basis2::Ric: fs.push_back(fac(Sym::Ric, 0, 1)); break;
        case Basis2::E: fs.push_back(fac(Sym::E, 0, 1)); break;
        case Basis2::Metric: break;
      }
      r.add(TensorMonomial(m.u_power(), std::move(fs)), c);
    }
    return r;
  }

  /// Full contraction x_{ij} y^{ij} of two basis elements.
  static Expr pair(Basis2 x, Basis2 y) {
    if (x == Basis2::Metric && y == Basis2::Metric) return Expr::constant(n_sym());
    if (y == Basis2::Metric) std::swap(x, y);
    auto slots = [](Basis2 b, int i, int j) -> std::vector<Factor> {
      switch (b) {
        case Basis2::Hess: return {fac(Sym::Hess, i, j)};
        case Basis2::GradGrad: return {fac(Sym::Grad, i), fac(Sym::Grad, j)};
        case Basis2::Ric: return {fac(Sym::Ric, i, j)};
        case Basis2::E: return {fac(Sym::E, i, j)};
        case Basis2::Metric: break;
      }
      return {};
    };
    if (x == Basis2::Metric) return Expr::term(TensorMonomial(0, slots(y, 1, 1)));
    std::vector<Factor> fs = slots(x, 1, 2), gs = slots(y, 1, 2);
    fs.insert(fs.end(), gs.begin(), gs.end());
    return Expr::term(TensorMonomial(0, std::move(fs)));
  }

 private:
  void accumulate(Basis2 b, const Expr& c) {
    auto it = parts_.find(b);
    if (it == parts_.end()) {
      if (!c.is_zero()) parts_.emplace(b, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) parts_.erase(it);
  }

  std::map<Basis2, Expr> parts_;
};

}  // namespace bhv
