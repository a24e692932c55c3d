#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bhv/calculus.hpp"

namespace bhv {

/// Coefficients of the identity and of the quadratic form built from it.
namespace coeff {
inline ParamScalar k() { return P("1 + n*alpha/(n+4)"); }
inline ParamScalar q() { return P("(n+2)/n - (n-2)*alpha/(n+4)"); }
inline ParamScalar m() { return P("1 - (n-4)*alpha/(n+4)"); }
/// Weight exponent of the divergence identities.
inline ParamScalar w() { return P("-2*alpha/(n+4)"); }
/// Coefficient of |du|^4 u_i / u^3 in the master bracket.
inline ParamScalar kappa() { return P("n*alpha/(2*(n+4))") * k() * m(); }

inline ParamScalar c1() {
  return P("-n^2*(3*n-10)*alpha^2/(4*(n-1)*(n+4)^2) + 2*(n+2)*alpha/((n-1)*(n+4)) + 3*(n+2)/(4*(n-1))");
}
inline ParamScalar c2() { return P("(n^2+2*n+4)*alpha/((n-1)*(n+4)) + (n+2)/(n-1)"); }
inline ParamScalar a12() { return P("(n^2-8)*alpha/(2*(n-1)*(n+4)) - (n+2)/(2*(n-1))"); }
inline ParamScalar a13() { return P("alpha/(n+4)*(n^2*alpha/(n+4) + n + 1)") * m(); }
inline ParamScalar a23() { return P("-alpha/4") * m(); }
inline ParamScalar a33() { return P("n*(n-2)*alpha^2/(2*(n+4)^2)") * k() * m(); }
/// A11 through n/(n-1) (c1 + 2 c2/(n-4)) + 2 c1.
inline ParamScalar a11_route() { return P("n/(n-1)") * (c1() + P("2/(n-4)") * c2()) + 2 * c1(); }
/// A11 as the expanded quadratic in alpha.
inline ParamScalar a11_display() {
  return P("-n^2*(3*n-2)*(3*n-10)*alpha^2/(4*(n-1)^2*(n+4)^2) + 4*(2*n^3-3*n^2-8*n+8)*alpha/((n-1)^2*(n-4)*(n+4)) "
           "+ (n+2)*(9*n^2-34*n+24)/(4*(n-1)^2*(n-4))");
}

/// f1, f2, f3 as polynomials in x with coefficients in n.
inline ParamScalar f1() { return P("-(5*n^4-18*n^3+2*n^2+32)*x^2 + (n^3+16*n^2-8*n-64)*x + 4*(n+2)*(n-4)"); }
inline ParamScalar f2() {
  return P("-n*(n-4)*(9*n^5-48*n^4+148*n^3-112*n^2+448*n-256)*x^3 - n*(7*n^5-224*n^4+972*n^3-1936*n^2+1088*n+256)*x^2 "
           "+ (n-2)*(9*n^4+118*n^3-288*n^2+96*n+512)*x + (n-2)^2*(n-4)*(7*n+32)");
}
inline ParamScalar f3() {
  return P("-16*n^2*(n-12)*(n^2-3*n+4)*x^2 + (9*n^4+118*n^3-288*n^2+96*n+512)*x + (n-2)*(n-4)*(7*n+32)");
}
/// Leading (cubic) coefficient of f2.
inline ParamScalar f2_cubic() { return P("-n*(n-4)*(9*n^5-48*n^4+148*n^3-112*n^2+448*n-256)"); }
}  // namespace coeff

/// Named objects: coefficients, scalar/vector invariants (jet form) and E_ij.
struct NamedExpression {
  std::string name;
  std::variant<ParamScalar, Expr, SymTensor2> body;
};

inline std::vector<std::string> named_catalog() {
  return {"Z_a", "E_ij", "E_i", "F_i", "G", "E", "F", "|E|^2", "c1", "c2", "A11", "A12", "A13", "A23", "A33", "k", "q", "m", "f1", "f2", "f3"};
}

/// Builds a catalog entry. With `specialized`, b = -(1 + n alpha/(n+4))/2.
inline NamedExpression build_named(std::string_view name, bool specialized = false) {
  const Definitions d{specialized ? specialized_b() : ParamScalar::var(Var::b)};
  const std::string s(name);
  if (s == "Z_a") return {s, ex::lap().times_u(-1) + ex::grad_sq().times_u(-2).scaled(P("a"))};
  if (s == "E_ij") return {s, d.e_tensor()};
  if (s == "E_i") return {s, d.e_vec()};
  if (s == "F_i") return {s, d.f_vec()};
  if (s == "G") return {s, d.g_scalar()};
  if (s == "E") return {s, d.e_scalar()};
  if (s == "F") return {s, d.f_scalar()};
  if (s == "|E|^2") return {s, d.e_sq()};
  if (s == "c1") return {s, coeff::c1()};
  if (s == "c2") return {s, coeff::c2()};
  if (s == "A11") return {s, coeff::a11_display()};
  if (s == "A12") return {s, coeff::a12()};
  if (s == "A13") return {s, coeff::a13()};
  if (s == "A23") return {s, coeff::a23()};
  if (s == "A33") return {s, coeff::a33()};
  if (s == "k") return {s, coeff::k()};
  if (s == "q") return {s, coeff::q()};
  if (s == "m") return {s, coeff::m()};
  if (s == "f1") return {s, coeff::f1()};
  if (s == "f2") return {s, coeff::f2()};
  if (s == "f3") return {s, coeff::f3()};
  throw UnknownName("no catalog entry named '" + s + "'");
}

}  // namespace bhv
