#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bhv/named.hpp"
#include "bhv/upoly.hpp"

namespace bhv {

/// The symmetric coefficient matrix of the quadratic form (E_i, F_i, |du|^2 u_i / u^2).
struct MatrixA {
  ParamScalar a11, a12, a13, a22, a23, a33;
  /// A11 built from c1, c2 agrees with the expanded quadratic.
  bool a11_routes_agree = false;

  ParamScalar at(int i, int j) const {
    const ParamScalar* e[3][3] = {{&a11, &a12, &a13}, {&a12, &a22, &a23}, {&a13, &a23, &a33}};
    return *e[i][j];
  }
  ParamScalar minor2() const { return a11 * a22 - a12 * a12; }
  ParamScalar det() const {
    return a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) + a13 * (a12 * a23 - a22 * a13);
  }
  MatrixA substitute(Var v, const ParamScalar& value) const {
    return {a11.substitute(v, value), a12.substitute(v, value), a13.substitute(v, value),
            a22.substitute(v, value), a23.substitute(v, value), a33.substitute(v, value), a11_routes_agree};
  }
};

inline MatrixA build_matrix_A() {
  MatrixA m{coeff::a11_display(), coeff::a12(), coeff::a13(), ParamScalar(1), coeff::a23(), coeff::a33()};
  m.a11_routes_agree = coeff::a11_route() == coeff::a11_display();
  return m;
}

inline MatrixA build_matrix_A(int n) {
  if (n < 5) throw ParameterRange("matrix A needs n >= 5, got " + std::to_string(n));
  return build_matrix_A().substitute(Var::n, ParamScalar(n));
}

/// Right end of the subcritical range, (n+4)/(n-4).
inline Rational critical_alpha(int n) { return ratio(n + 4, n - 4); }

/// One exact "display == expansion" comparison.
struct FormulaCheck {
  std::string name;
  bool ok = false;
  std::string residual;
  std::string note;
  /// False for checks of a printed display that the argument does not rely on.
  bool mandatory = true;
};

inline FormulaCheck compare(std::string name, const ParamScalar& lhs, const ParamScalar& rhs) {
  const ParamScalar d = lhs - rhs;
  return {std::move(name), d.is_zero(), d.is_zero() ? "" : d.str()};
}

/// f1, f2, f3 as polynomials in x; exposed so tests can plant defects.
struct MinorPolys {
  ParamScalar f1 = coeff::f1(), f2 = coeff::f2(), f3 = coeff::f3();
};

/// The factorizations of the leading minors and the endpoint evaluations, as
/// exact identities in formal n and alpha.
inline std::vector<FormulaCheck> check_minor_formulas(const MinorPolys& f = {}) {
  const MatrixA a = build_matrix_A();
  const ParamScalar x = ParamScalar::var(Var::x);
  std::vector<FormulaCheck> out;
  out.push_back(compare("A11: n/(n-1)(c1 + 2c2/(n-4)) + 2c1 equals the expanded quadratic", coeff::a11_route(), coeff::a11_display()));
  out.push_back(compare("A22 = 1", a.a22, ParamScalar(1)));
  out.push_back(compare("minor2 = (n-2)^2/(2(n-1)^2(n-4)^2) f1((n-4)alpha/((n-2)(n+4)))", a.minor2(),
                        P("(n-2)^2/(2*(n-1)^2*(n-4)^2)") * f.f1.substitute(Var::x, P("(n-4)*alpha/((n-2)*(n+4))"))));
  out.push_back(compare("det A = n alpha^2/(64(n-1)^2(n+4)^2) (1/(n-4) - alpha/(n+4)) f2(alpha/(n+4))", a.det(),
                        P("n*alpha^2/(64*(n-1)^2*(n+4)^2)*(1/(n-4) - alpha/(n+4))") * f.f2.substitute(Var::x, P("alpha/(n+4)"))));
  out.push_back(compare("f2 - (n-2) f3 = [x^3 coefficient of f2] (x^3 - x^2/(n-4))", f.f2 - (n_sym() - 2) * f.f3,
                        coeff::f2_cubic() * (x.pow(3) - x.pow(2) / (n_sym() - 4))));
  out.push_back(compare("f1(0) = 4(n+2)(n-4)", f.f1.substitute(Var::x, ParamScalar(0)), P("4*(n+2)*(n-4)")));
  out.push_back(compare("f1(1/(n-2)) = (8n^3-26n^2+48n-32)/(n-2)^2", f.f1.substitute(Var::x, P("1/(n-2)")),
                        P("(8*n^3-26*n^2+48*n-32)/(n-2)^2")));
  out.push_back(compare("f3(0) = (n-2)(n-4)(7n+32)", f.f3.substitute(Var::x, ParamScalar(0)), P("(n-2)*(n-4)*(7*n+32)")));
  out.push_back(compare("f3(1/(n-4)) = 64(n-2)^2(4n^3-13n^2+24n-16)/(n-4)^2", f.f3.substitute(Var::x, P("1/(n-4)")),
                        P("64*(n-2)^2*(4*n^3-13*n^2+24*n-16)/(n-4)^2")));
  out.back().note = "printed value carries (n-2)^2; the expansion gives a single factor (n-2), still positive for n >= 5";
  out.back().mandatory = false;
  out.push_back(compare("f3(1/(n-4)) = 64(n-2)(4n^3-13n^2+24n-16)/(n-4)^2", f.f3.substitute(Var::x, P("1/(n-4)")),
                        P("64*(n-2)*(4*n^3-13*n^2+24*n-16)/(n-4)^2")));
  out.push_back(compare("A33 vanishes at alpha = (n+4)/(n-4)", a.a33.substitute(Var::alpha, P("(n+4)/(n-4)")), ParamScalar(0)));
  return out;
}

/// Exact sign evidence for a rational function of one variable on an open interval.
struct SignCertificate {
  std::string poly;
  int n = 0;
  std::string variable;
  Rational lo, hi;
  UPoly numerator, denominator;
  /// Multiplicity of the endpoint roots removed before counting.
  int lo_multiplicity = 0, hi_multiplicity = 0;
  std::vector<UPoly> chain;
  int root_count = 0;
  int pole_count = 0;
  std::optional<Rational> lo_value, hi_value;
  Rational sample, sample_value;
  std::string verdict;  // positive | negative | not one-signed

  bool positive() const { return verdict == "positive"; }
};

namespace detail {

inline int interior_roots(UPoly p, const Rational& lo, const Rational& hi, int* lo_mult, int* hi_mult,
                          std::vector<UPoly>* chain_out) {
  const int ml = deflate(p, lo), mh = deflate(p, hi);
  if (lo_mult) *lo_mult = ml;
  if (hi_mult) *hi_mult = mh;
  if (p.degree() <= 0) {
    if (chain_out) *chain_out = {p};
    return 0;
  }
  auto chain = sturm_chain(p);
  const int count = count_roots_open(chain, lo, hi);
  if (chain_out) *chain_out = std::move(chain);
  return count;
}

inline std::optional<Rational> value_at(const UPoly& num, const UPoly& den, const Rational& x) {
  const Rational d = den(x);
  if (d == 0) return std::nullopt;
  return num(x) / d;
}

}  // namespace detail

/// Sturm certificate for num/den on (lo, hi). Roots at the endpoints are
/// divided out first so the chain is evaluated at non-roots.
inline SignCertificate certify_sign(std::string name, int n, const UPoly& num, const UPoly& den, const Rational& lo,
                                    const Rational& hi, std::string variable = "x") {
  if (!(lo < hi)) throw ParameterRange("empty interval for " + name);
  if (num.is_zero()) throw DegenerateCertificate(name + " vanishes identically");
  SignCertificate c;
  c.poly = std::move(name);
  c.n = n;
  c.variable = std::move(variable);
  c.lo = lo;
  c.hi = hi;
  c.numerator = num;
  c.denominator = den;
  c.root_count = detail::interior_roots(num, lo, hi, &c.lo_multiplicity, &c.hi_multiplicity, &c.chain);
  c.pole_count = detail::interior_roots(den, lo, hi, nullptr, nullptr, nullptr);
  c.lo_value = detail::value_at(num, den, lo);
  c.hi_value = detail::value_at(num, den, hi);
  c.sample = (lo + hi) / 2;
  c.sample.canonicalize();
  // A rational midpoint can hit a root only when roots exist inside.
  const Rational dv = den(c.sample);
  c.sample_value = dv == 0 ? Rational(0) : num(c.sample) / dv;
  if (c.root_count == 0 && c.pole_count == 0) c.verdict = sgn(c.sample_value) > 0 ? "positive" : "negative";
  else c.verdict = "not one-signed";
  return c;
}

inline SignCertificate certify_sign(std::string name, int n, const ParamScalar& f, Var v, const Rational& lo, const Rational& hi) {
  return certify_sign(std::move(name), n, UPoly::from_poly(f.numerator(), v), UPoly::from_poly(f.denominator(), v), lo, hi,
                      var_name(v));
}

enum class PolyId { F1, F3, DetA, Minor2, A11 };

inline const char* poly_name(PolyId id) {
  switch (id) {
    case PolyId::F1: return "f1";
    case PolyId::F3: return "f3";
    case PolyId::DetA: return "detA";
    case PolyId::Minor2: return "minor2";
    case PolyId::A11: return "A11";
  }
  return "?";
}

/// Default domain: f1 on (0, 1/(n-2)), f3 on (0, 1/(n-4)) in x; A11, minor2,
/// det A on alpha in (0, (n+4)/(n-4)).
inline std::pair<Rational, Rational> default_interval(PolyId id, int n) {
  switch (id) {
    case PolyId::F1: return {0, ratio(1, n - 2)};
    case PolyId::F3: return {0, ratio(1, n - 4)};
    default: return {0, critical_alpha(n)};
  }
}

inline SignCertificate positivity_certificate(PolyId id, int n, std::optional<std::pair<Rational, Rational>> interval = std::nullopt) {
  if (n < 5) throw ParameterRange("certificates need n >= 5, got " + std::to_string(n));
  const auto [lo, hi] = interval.value_or(default_interval(id, n));
  const ParamScalar nn(n);
  switch (id) {
    case PolyId::F1: return certify_sign("f1", n, coeff::f1().substitute(Var::n, nn), Var::x, lo, hi);
    case PolyId::F3: return certify_sign("f3", n, coeff::f3().substitute(Var::n, nn), Var::x, lo, hi);
    default: break;
  }
  const MatrixA a = build_matrix_A(n);
  switch (id) {
    case PolyId::A11: return certify_sign("A11", n, a.a11, Var::alpha, lo, hi);
    case PolyId::Minor2: return certify_sign("minor2", n, a.minor2(), Var::alpha, lo, hi);
    default: return certify_sign("detA", n, a.det(), Var::alpha, lo, hi);
  }
}

/// Sylvester's criterion for A on the whole subcritical alpha range.
struct SylvesterCertificate {
  int n = 0;
  SignCertificate a11, minor2, det;
  bool positive_definite() const { return a11.positive() && minor2.positive() && det.positive(); }
};

inline SylvesterCertificate sylvester_certificate(int n) {
  return {n, positivity_certificate(PolyId::A11, n), positivity_certificate(PolyId::Minor2, n), positivity_certificate(PolyId::DetA, n)};
}

/// Eigenvalues of a symmetric 3x3 matrix, ascending (closed form via the characteristic cubic).
inline std::array<double, 3> symmetric_eigenvalues(const std::array<std::array<double, 3>, 3>& m) {
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double q = (m[0][0] + m[1][1] + m[2][2]) / 3;
  if (p1 == 0) {
    std::array<double, 3> d{m[0][0], m[1][1], m[2][2]};
    std::sort(d.begin(), d.end());
    return d;
  }
  const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) + (m[2][2] - q) * (m[2][2] - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6);
  std::array<std::array<double, 3>, 3> b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0)) / p;
  const double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(detb / 2, -1.0, 1.0);
  const double phi = std::acos(r) / 3;
  const double pi = std::acos(-1.0);
  const double e_max = q + 2 * p * std::cos(phi);
  const double e_min = q + 2 * p * std::cos(phi + 2 * pi / 3);
  return {e_min, 3 * q - e_max - e_min, e_max};
}

enum class Definiteness { PositiveDefinite, PositiveSemidefinite, Indefinite };

inline const char* definiteness_name(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "positive definite";
    case Definiteness::PositiveSemidefinite: return "positive semidefinite";
    case Definiteness::Indefinite: return "not positive semidefinite";
  }
  return "?";
}

/// Exact classification of A(n, alpha) from its principal minors.
inline Definiteness classify(const MatrixA& a, const Rational& alpha) {
  std::array<Rational, kNumVars> at{};
  at[static_cast<int>(Var::alpha)] = alpha;
  Rational e[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e[i][j] = a.at(i, j).evaluate(at);
  auto m2 = [&](int i, int j) -> Rational { return e[i][i] * e[j][j] - e[i][j] * e[i][j]; };
  const Rational det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[1][2]) - e[0][1] * (e[0][1] * e[2][2] - e[1][2] * e[0][2]) +
                       e[0][2] * (e[0][1] * e[1][2] - e[1][1] * e[0][2]);
  if (e[0][0] > 0 && m2(0, 1) > 0 && det > 0) return Definiteness::PositiveDefinite;
  const bool psd = e[0][0] >= 0 && e[1][1] >= 0 && e[2][2] >= 0 && m2(0, 1) >= 0 && m2(0, 2) >= 0 && m2(1, 2) >= 0 && det >= 0;
  return psd ? Definiteness::PositiveSemidefinite : Definiteness::Indefinite;
}

struct PDReport {
  int n = 0;
  std::size_t points = 0;
  std::size_t agreements = 0;
  double min_lambda = 0;
  double argmin_alpha = 0;
  /// lambda_min at the grid point nearest to (n+4)/(n-4).
  double lambda_near_end = 0;
  bool all_positive() const { return agreements == points && min_lambda > 0; }
};

/// lambda_min(A) on alpha_j = j (n+4)/((n-4)(grid+1)), j = 1..grid, checked
/// against Sylvester's criterion evaluated exactly at the same points.
inline PDReport numeric_pd_scan(int n, int grid) {
  if (grid < 1) throw ParameterRange("grid must be positive");
  const MatrixA a = build_matrix_A(n);
  const Rational hi = critical_alpha(n);
  PDReport rep;
  rep.n = n;
  rep.min_lambda = INFINITY;
  for (int j = 1; j <= grid; ++j) {
    Rational alpha = hi * j / (grid + 1);
    alpha.canonicalize();
    std::array<double, kNumVars> atd{};
    atd[static_cast<int>(Var::alpha)] = alpha.get_d();
    std::array<std::array<double, 3>, 3> m{};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) m[i][k] = a.at(i, k).evaluate(atd);
    const double lambda = symmetric_eigenvalues(m)[0];
    const bool exact_pd = classify(a, alpha) == Definiteness::PositiveDefinite;
    if ((lambda > 0) != exact_pd)
      throw EngineInconsistency("n=" + std::to_string(n) + " alpha=" + alpha.get_str() + ": lambda_min=" + std::to_string(lambda) +
                                " but Sylvester says " + (exact_pd ? "positive definite" : "not positive definite"));
    ++rep.points;
    ++rep.agreements;
    if (lambda < rep.min_lambda) {
      rep.min_lambda = lambda;
      rep.argmin_alpha = alpha.get_d();
    }
    if (j == grid) rep.lambda_near_end = lambda;
  }
  return rep;
}

inline double lambda_min(int n, double alpha) {
  const MatrixA a = build_matrix_A(n);
  std::array<double, kNumVars> at{};
  at[static_cast<int>(Var::alpha)] = alpha;
  std::array<std::array<double, 3>, 3> m{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m[i][k] = a.at(i, k).evaluate(at);
  return symmetric_eigenvalues(m)[0];
}

/// Coefficient a(1+2a)(2-(n-4)a)/n of the |du|^4/u^4 term in the Z_a lower bound.
inline Rational est_coefficient(int n, const Rational& a) {
  Rational r = a * (1 + 2 * a) * (2 - (n - 4) * a) / n;
  r.canonicalize();
  return r;
}

/// Exponent arithmetic of the final radius limit for (n, alpha).
struct ExponentCheck {
  int n = 0;
  Rational alpha;
  Rational gamma;
  /// ((n^2-2n-16)alpha - (n+2)(n+4)) / ((n+4)(alpha-1))
  Rational exponent;
  /// -8/((n-4)(alpha-1))
  Rational bound;
  bool gamma_ok = false;
  bool exponent_below_bound = false;
  bool bound_negative = false;
  bool exponent_negative = false;
  bool chain_holds() const { return exponent_below_bound && bound_negative; }
};

inline ExponentCheck exponent_check(int n, const Rational& alpha) {
  if (n < 5) throw ParameterRange("n must be >= 5");
  if (!(alpha > 1 && alpha < critical_alpha(n)))
    throw ParameterRange("alpha=" + alpha.get_str() + " outside (1, (n+4)/(n-4)) for n=" + std::to_string(n));
  ExponentCheck c;
  c.n = n;
  c.alpha = alpha;
  const Rational candidate = (ratio(6 * n + 16, n + 4) * alpha - 2) / (alpha - 1);
  c.gamma = candidate > 6 ? candidate : Rational(6);
  c.gamma.canonicalize();
  c.exponent = (Rational(n * n - 2 * n - 16) * alpha - (n + 2) * (n + 4)) / ((n + 4) * (alpha - 1));
  c.exponent.canonicalize();
  c.bound = Rational(-8) / ((n - 4) * (alpha - 1));
  c.bound.canonicalize();
  c.gamma_ok = c.gamma >= 6;
  c.exponent_below_bound = c.exponent < c.bound;
  c.bound_negative = c.bound < 0;
  c.exponent_negative = c.exponent < 0;
  return c;
}

/// After clearing the positive factor (n+4)(alpha-1), "exponent < bound" reads
/// L(alpha) = (n^2-2n-16) alpha - (n+2)(n+4) + 8(n+4)/(n-4) < 0.
struct LinearReduction {
  int n = 0;
  Rational slope, intercept;
  Rational value_at_1, value_at_end;
  bool negative_on_range = false;
};

inline LinearReduction exponent_linear_reduction(int n) {
  LinearReduction r;
  r.n = n;
  r.slope = n * n - 2 * n - 16;
  r.intercept = Rational(-(n + 2) * (n + 4)) + ratio(8 * (n + 4), n - 4);
  r.intercept.canonicalize();
  r.value_at_1 = r.slope + r.intercept;
  r.value_at_end = r.slope * critical_alpha(n) + r.intercept;
  r.value_at_end.canonicalize();
  // Linear on [1, (n+4)/(n-4)]: negative inside iff both ends are <= 0 and not both zero.
  r.negative_on_range = r.value_at_1 <= 0 && r.value_at_end <= 0 && !(r.value_at_1 == 0 && r.value_at_end == 0);
  return r;
}

/// Formal identities behind the exponent arithmetic.
inline std::vector<FormulaCheck> check_exponent_formulas() {
  std::vector<FormulaCheck> out;
  out.push_back(compare("n - ((6n+16)alpha/(n+4) + 2)/(alpha-1) = ((n^2-2n-16)alpha - (n+2)(n+4))/((n+4)(alpha-1))",
                        n_sym() - (P("(6*n+16)*alpha/(n+4)") + 2) / (alpha_sym() - 1),
                        P("((n^2-2*n-16)*alpha - (n+2)*(n+4))/((n+4)*(alpha-1))")));
  out.push_back(compare("(n^2-2n-16)alpha - (n+2)(n+4) + 8(n+4)/(n-4) = (n^2-2n-16)(alpha - (n+4)/(n-4))",
                        P("(n^2-2*n-16)*alpha - (n+2)*(n+4) + 8*(n+4)/(n-4)"), P("(n^2-2*n-16)*(alpha - (n+4)/(n-4))")));
  return out;
}

/// Statements whose forms disagree and are reported rather than resolved.
inline std::vector<std::string> homogeneity_notes() {
  return {
      "The Z_a bound is proved as lap u + (2/(n-4)) |du|^2/u <= 0, while the lower-bound step for A11 uses "
      "-lap u >= (2/(n-4)) |du|^2/u^2; the powers of u differ. The engine uses the first form.",
      "The cited trace-free inequality is |du|^2 E_ij E^ij >= (4/3) E_i E^i, while A11 is built with the constant n/(n-1); "
      "with E_i = E_ij u^j/u the printed form is also inhomogeneous in u. The jet oracle measures the sharp constant of "
      "|E|^2 |v|^2 >= c |Ev|^2 instead.",
  };
}

}  // namespace bhv
