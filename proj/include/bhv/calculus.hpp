#pragma once

#include <string>
#include <vector>

#include "bhv/errors.hpp"
#include "bhv/expr.hpp"

namespace bhv {

/// FREE assumes no equation. ON_SHELL uses the gradient of the equation,
/// (Delta^2 u)_{,i} = alpha (Delta^2 u / u) u_i; the symbol Delta^2 u itself
/// is kept so that identities stay polynomial in u.
enum class SubstitutionMode { Free, OnShell };

inline const char* mode_name(SubstitutionMode m) { return m == SubstitutionMode::Free ? "free" : "onshell"; }

/// u^w V with a symbolic exponent w.
struct WeightedVectorField {
  ParamScalar weight;
  Expr field{1};
};

namespace detail {

/// Covariant derivative of one monomial along a new slot labelled d.
/// The result may contain contracted third derivatives, which are commuted
/// into dlap + Ric terms when the derivative slot meets the Hessian's own slot.
inline void differentiate(const TensorMonomial& m, const ParamScalar& c, int d, SubstitutionMode mode, Expr& out) {
  const auto& fs = m.factors();
  const int fresh = std::max(m.max_label(), d) + 1;
  auto emit = [&](std::size_t pos, std::vector<Factor> replacement, int u_shift, const ParamScalar& k) {
    std::vector<Factor> nf;
    nf.reserve(fs.size() + replacement.size());
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (i != pos) nf.push_back(fs[i]);
    nf.insert(nf.end(), replacement.begin(), replacement.end());
    out.add(TensorMonomial(m.u_power() + u_shift, std::move(nf)), c * k);
  };
  const std::size_t none = fs.size();
  if (m.u_power() != 0) emit(none, {fac(Sym::Grad, d)}, -1, ParamScalar(m.u_power()));

  for (std::size_t pos = 0; pos < fs.size(); ++pos) {
    const Factor& f = fs[pos];
    const int s = f.idx[0], t = f.idx[1];
    switch (f.sym) {
      case Sym::Grad: emit(pos, {fac(Sym::Hess, s, d)}, 0, 1); break;
      case Sym::Hess:
        if (d == s || d == t) {
          // nabla^k u_{jk} = (Delta u)_{,j} + R_{jk} u^k
          const int other = (d == s) ? t : s;
          emit(pos, {fac(Sym::GradLap, other)}, 0, 1);
          emit(pos, {fac(Sym::Ric, other, fresh), fac(Sym::Grad, fresh)}, 0, 1);
        } else {
          emit(pos, {fac(Sym::Third, s, t, d)}, 0, 1);
        }
        break;
      case Sym::Lap: emit(pos, {fac(Sym::GradLap, d)}, 0, 1); break;
      case Sym::GradLap:
        if (d != s) throw OrderOverflow("second derivative of Delta u beyond its trace: " + m.str());
        emit(pos, {fac(Sym::BiLap)}, 0, 1);
        break;
      case Sym::BiLap:
        if (mode == SubstitutionMode::Free)
          throw OrderOverflow("gradient of Delta^2 u needs the equation (ON_SHELL): " + m.str());
        emit(none, {fac(Sym::Grad, d)}, -1, alpha_sym());
        break;
      case Sym::Third: throw OrderOverflow("derivative of a third-order jet: " + m.str());
      case Sym::Ric: throw UnsupportedCurvature("derivative of Ric: " + m.str());
      case Sym::E:
      case Sym::F:
      case Sym::G: throw Error("expand E, F, G before differentiating: " + m.str());
    }
  }
}

}  // namespace detail

/// Gradient of a scalar expression (free index i).
inline Expr grad(const Expr& e, SubstitutionMode mode = SubstitutionMode::Free) {
  if (e.valence() != 0) throw ValenceMismatch("grad expects a scalar expression");
  Expr r(1);
  // Canonical scalar monomials use labels >= 1, so 0 is available for the new slot.
  for (const auto& [m, c] : e.terms()) detail::differentiate(m, c, 0, mode, r);
  return r;
}

/// div V of a vector expression.
inline Expr div(const Expr& v, SubstitutionMode mode = SubstitutionMode::Free) {
  if (v.valence() != 1) throw ValenceMismatch("divergence expects a vector expression");
  Expr r(0);
  for (const auto& [m, c] : v.terms()) {
    const int label = m.max_label() + 1;
    detail::differentiate(detail::rename_label(m, 0, label), c, label, mode, r);
  }
  return r;
}

/// u^{-w} div(u^w V) = div V + w u^{-1} <grad u, V>.
inline Expr divergence(const WeightedVectorField& f, SubstitutionMode mode) {
  Expr r = div(f.field, mode);
  if (!f.weight.is_zero()) r += dot(ex::du(), f.field).times_u(-1).scaled(f.weight);
  return r;
}

inline Expr laplacian(const Expr& e, SubstitutionMode mode = SubstitutionMode::Free) { return div(grad(e, mode), mode); }

/// nabla^i T_{ij}, the divergence of a symmetric 2-tensor.
inline Expr div(const SymTensor2& t, SubstitutionMode mode = SubstitutionMode::Free) {
  Expr r(1);
  for (const auto& [b, c] : t.parts()) {
    r += SymTensor2::apply(b, grad(c, mode));
    switch (b) {
      case Basis2::Hess:
        r += c * (ex::dlap() + Expr::term(mono(0, {fac(Sym::Ric, 0, 1), fac(Sym::Grad, 1)})));
        break;
      case Basis2::GradGrad: r += c * (ex::lap() * ex::du() + ex::hess_du()); break;
      case Basis2::Metric: break;
      case Basis2::Ric: throw UnsupportedCurvature("divergence of Ric");
      case Basis2::E: throw Error("expand E before taking its divergence");
    }
  }
  return r;
}

/// The invariant-tensor definitions for a given value of b (formal or specialized).
struct Definitions {
  ParamScalar b;

  ParamScalar n() const { return n_sym(); }
  /// b (1 + (n-2) b / n), the recurring coefficient of F and G.
  ParamScalar kappa() const { return b * (ParamScalar(1) + (n() - 2) * b / n()); }

  /// E_{ij} = u_ij + b u_i u_j / u - (1/n)(Delta u + b |du|^2 / u) g_ij, in jet form.
  SymTensor2 e_tensor() const {
    return SymTensor2::of(Basis2::Hess) + SymTensor2::of(Basis2::GradGrad, ex::u(-1).scaled(b)) -
           SymTensor2::of(Basis2::Metric, (ex::lap() + ex::grad_sq().times_u(-1).scaled(b)).scaled(n().inverse()));
  }
  /// Delta u + b |du|^2 / u, the trace term of E.
  Expr trace_part() const { return ex::lap() + ex::grad_sq().times_u(-1).scaled(b); }

  /// Correction such that F_j = (Delta u)_{,j} + f_rest.
  Expr f_rest() const {
    return (ex::lap() * ex::du()).times_u(-1).scaled((n() + 2) / n() * b) -
           (ex::grad_sq() * ex::du()).times_u(-2).scaled(kappa());
  }
  /// Correction such that G = Delta^2 u + g_rest.
  Expr g_rest() const {
    const ParamScalar nn = n();
    return (ex::lap() * ex::lap()).times_u(-1).scaled((nn + 2) / nn * b) -
           (ex::lap() * ex::grad_sq()).times_u(-2).scaled(2 * (nn + 2) / nn * b * (ParamScalar(1) + b)) +
           (ex::grad_sq() * ex::grad_sq()).times_u(-3).scaled(b * (3 * b + 2) * (ParamScalar(1) + (nn - 2) * b / nn));
  }

  /// Jet forms of E_j = E_{ij}u^i/u, F_j, G, E = E_iu^i/u, F = F_iu^i/u.
  Expr e_vec() const { return e_tensor().contract(ex::du()).times_u(-1); }
  Expr f_vec() const { return ex::dlap() + f_rest(); }
  Expr g_scalar() const { return ex::bilap() + g_rest(); }
  Expr e_scalar() const { return dot(e_vec(), ex::du()).times_u(-1); }
  Expr f_scalar() const { return dot(f_vec(), ex::du()).times_u(-1); }
  /// E_{ij}E^{ij} in jet form.
  Expr e_sq() const { return double_contract(e_tensor(), e_tensor()); }
};

/// The value of b that removes (Delta u)^2 u^i / u^2 from the gradient of G.
inline ParamScalar specialized_b() { return P("-(1 + n*alpha/(n+4))/2"); }

enum class Direction { Forward, Backward };

namespace detail {

/// One term of a replacement template. Slot placeholders are -1 and -2;
/// `metric` marks a g_{-1,-2} factor realised by merging the two labels.
struct TemplateTerm {
  ParamScalar coeff;
  int u_shift = 0;
  std::vector<Factor> factors;
  bool metric = false;
};

inline std::vector<TemplateTerm> expansion_template(Sym s, const Definitions& d, Direction dir) {
  const ParamScalar n = n_sym(), b = d.b, one(1);
  const ParamScalar sign = dir == Direction::Forward ? ParamScalar(1) : ParamScalar(-1);
  std::vector<TemplateTerm> t;
  switch (s) {
    case Sym::Hess:
    case Sym::E: {
      // u_ij = E_ij - b u_iu_j/u + (1/n)(Lap + bP/u) g_ij, and the inverse.
      t.push_back({one, 0, {fac(s == Sym::Hess ? Sym::E : Sym::Hess, -1, -2)}, false});
      t.push_back({-sign * b, -1, {fac(Sym::Grad, -1), fac(Sym::Grad, -2)}, false});
      t.push_back({sign / n, 0, {fac(Sym::Lap)}, true});
      t.push_back({sign * b / n, -1, {fac(Sym::Grad, 1000), fac(Sym::Grad, 1000)}, true});
      break;
    }
    case Sym::GradLap:
    case Sym::F: {
      t.push_back({one, 0, {fac(s == Sym::GradLap ? Sym::F : Sym::GradLap, -1)}, false});
      t.push_back({-sign * (n + 2) / n * b, -1, {fac(Sym::Lap), fac(Sym::Grad, -1)}, false});
      t.push_back({sign * d.kappa(), -2, {fac(Sym::Grad, 1000), fac(Sym::Grad, 1000), fac(Sym::Grad, -1)}, false});
      break;
    }
    case Sym::BiLap:
    case Sym::G: {
      t.push_back({one, 0, {fac(s == Sym::BiLap ? Sym::G : Sym::BiLap)}, false});
      const Expr rest = d.g_rest();
      for (const auto& [m, c] : rest.terms()) t.push_back({-sign * c, m.u_power(), m.factors(), false});
      break;
    }
    default: break;
  }
  return t;
}

}  // namespace detail

/// Forward: u_ij, (Delta u)_{,i}, Delta^2 u -> E, F, G forms. Backward: the inverse.
inline Expr substitute_defs(const Expr& e, Direction dir, const Definitions& d) {
  const std::vector<Sym> targets = dir == Direction::Forward ? std::vector<Sym>{Sym::Hess, Sym::GradLap, Sym::BiLap}
                                                             : std::vector<Sym>{Sym::E, Sym::F, Sym::G};
  std::vector<std::vector<detail::TemplateTerm>> templates;
  for (Sym s : targets) templates.push_back(detail::expansion_template(s, d, dir));

  Expr out(e.valence());
  // Work list of raw (non-canonical) monomials still holding target symbols.
  std::vector<std::pair<TensorMonomial, ParamScalar>> work(e.terms().begin(), e.terms().end());
  while (!work.empty()) {
    auto [m, c] = std::move(work.back());
    work.pop_back();
    const auto& fs = m.factors();
    std::size_t pos = fs.size();
    std::size_t which = 0;
    for (std::size_t i = 0; i < fs.size() && pos == fs.size(); ++i)
      for (std::size_t k = 0; k < targets.size(); ++k)
        if (fs[i].sym == targets[k]) {
          pos = i;
          which = k;
          break;
        }
    if (pos == fs.size()) {
      out.add(m, c);
      continue;
    }
    const Factor target = fs[pos];
    const int fresh = m.max_label() + 1;
    for (const auto& tt : templates[which]) {
      std::vector<Factor> nf;
      for (std::size_t i = 0; i < fs.size(); ++i)
        if (i != pos) nf.push_back(fs[i]);
      for (Factor f : tt.factors) {
        for (int k = 0; k < rank_of(f.sym); ++k) {
          int& l = f.idx[static_cast<std::size_t>(k)];
          if (l == -1) l = target.idx[0];
          else if (l == -2) l = target.idx[1];
          else if (l >= 1000) l = fresh + (l - 1000);
          else l += 2 * fresh + 2;  // labels internal to a template
        }
        nf.push_back(f);
      }
      TensorMonomial nm(m.u_power() + tt.u_shift, std::move(nf));
      ParamScalar k = c * tt.coeff;
      if (tt.metric) {
        if (target.idx[0] == target.idx[1]) k *= n_sym();  // g^a_a = n
        else nm = detail::rename_label(nm, target.idx[1], target.idx[0]);
      }
      work.emplace_back(std::move(nm), k);
    }
  }
  return out;
}

}  // namespace bhv
