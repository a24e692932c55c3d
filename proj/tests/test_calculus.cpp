#include "support.hpp"

#include <random>

#include "bhv/calculus.hpp"
#include "bhv/named.hpp"

using namespace bhv;

namespace {

const SubstitutionMode kFree = SubstitutionMode::Free;

Expr grad_of_grad_sq() { return ex::hess_du().scaled(2); }

/// Random vector field built from factors whose divergence stays in the supported jet order.
Expr random_field(std::mt19937_64& rng) {
  const std::vector<Expr> scalars = {ex::num(1), ex::u(1), ex::u(-2), ex::grad_sq(), ex::lap(), ex::hess_du_du().times_u(-1),
                                     ex::hess_sq()};
  const std::vector<Expr> vectors = {ex::du(), ex::hess_du(), ex::dlap(), ex::lap() * ex::du()};
  std::uniform_int_distribution<int> ps(0, static_cast<int>(scalars.size()) - 1), pv(0, static_cast<int>(vectors.size()) - 1),
      coef(-4, 4), terms(1, 3);
  Expr v(1);
  for (int t = terms(rng); t > 0; --t) {
    const Expr& vec = vectors[static_cast<std::size_t>(pv(rng))];
    // d(Delta u) may only be hit along its own slot.
    const Expr& s = vec == ex::dlap() ? scalars[static_cast<std::size_t>(ps(rng) % 3)] : scalars[static_cast<std::size_t>(ps(rng))];
    v += (s * vec).scaled(ParamScalar(coef(rng)) + P("alpha"));
  }
  return v;
}

}  // namespace

TEST_CASE("gradient examples", "[calculus]") {
  SECTION("grad |du|^2 = 2 u_ij u^j") { REQUIRE(grad(ex::grad_sq()) == grad_of_grad_sq()); }
  SECTION("grad Z_a matches the four-term expansion") {
    const Expr za = std::get<Expr>(build_named("Z_a").body);
    const Expr expected = (ex::lap() * ex::du()).times_u(-2).scaled(-1) + ex::dlap().times_u(-1) +
                          (ex::grad_sq() * ex::du()).times_u(-3).scaled(P("-2*a")) + ex::hess_du().times_u(-2).scaled(P("2*a"));
    REQUIRE(grad(za) == expected);
  }
  SECTION("product rule on u lap") { REQUIRE(grad(ex::u(1) * ex::lap()) == ex::lap() * ex::du() + ex::dlap().times_u(1)); }
  SECTION("grad of a constant is zero") { REQUIRE(grad(ex::num(P("n+alpha"))).is_zero()); }
  SECTION("grad of u^k") { REQUIRE(grad(ex::u(3)) == ex::du().times_u(2).scaled(3)); }
}

TEST_CASE("divergence examples", "[calculus]") {
  REQUIRE(divergence({ParamScalar(0), ex::du()}, kFree) == ex::lap());
  REQUIRE(laplacian(ex::u(1)) == ex::lap());
  SECTION("Bochner: lap |du|^2 = 2|ddu|^2 + 2<du, d lap u> + 2 Ric(du, du)") {
    const Expr expected = ex::hess_sq().scaled(2) + dot(ex::du(), ex::dlap()).scaled(2) + ex::ric_du_du().scaled(2);
    REQUIRE(laplacian(ex::grad_sq()) == expected);
  }
  SECTION("weighted divergence of du") {
    REQUIRE(divergence({P("a"), ex::du()}, kFree) == ex::lap() + ex::grad_sq().times_u(-1).scaled(P("a")));
  }
  SECTION("div of the Hessian tensor") {
    REQUIRE(div(SymTensor2::of(Basis2::Hess)) == ex::dlap() + Expr::term(mono(0, {fac(Sym::Ric, 0, 1), fac(Sym::Grad, 1)})));
  }
}

TEST_CASE("order and curvature errors", "[calculus]") {
  REQUIRE_THROWS_AS(grad(ex::bilap()), OrderOverflow);
  REQUIRE_NOTHROW(grad(ex::bilap(), SubstitutionMode::OnShell));
  REQUIRE(grad(ex::bilap(), SubstitutionMode::OnShell) == (ex::bilap() * ex::du()).times_u(-1).scaled(P("alpha")));
  REQUIRE_THROWS_AS(grad(dot(ex::du(), ex::dlap())), OrderOverflow);
  REQUIRE_THROWS_AS(grad(ex::ric_du_du()), UnsupportedCurvature);
  REQUIRE_THROWS_AS(div(ex::grad_sq()), ValenceMismatch);
  REQUIRE_THROWS_AS(grad(ex::du()), ValenceMismatch);
  // A traced third derivative folds to d(lap u), whose gradient off its own slot is out of range.
  const Expr third = Expr::term(mono(0, {fac(Sym::Third, 1, 1, 2), fac(Sym::Grad, 2)}));
  REQUIRE(third == dot(ex::dlap(), ex::du()));
  REQUIRE_THROWS_AS(grad(third), OrderOverflow);
  const Expr raw_third = Expr::term(mono(0, {fac(Sym::Third, 1, 2, 3), fac(Sym::Hess, 1, 2), fac(Sym::Grad, 3)}));
  REQUIRE_THROWS_AS(grad(raw_third), OrderOverflow);
}

TEST_CASE("divergence is linear and shifts weights consistently", "[calculus][property]") {
  std::mt19937_64 rng(17);
  const ParamScalar w1 = P("-2*alpha/(n+4)"), w2 = P("a - 1");
  for (int trial = 0; trial < 100; ++trial) {
    const Expr v = random_field(rng), x = random_field(rng);
    const ParamScalar c = P("n - alpha/3");
    REQUIRE(divergence({w1, v.scaled(c)}, kFree) == divergence({w1, v}, kFree).scaled(c));
    REQUIRE(divergence({w1, v + x}, kFree) == divergence({w1, v}, kFree) + divergence({w1, x}, kFree));
    // u^{-(w1+w2)} div(u^{w1+w2} V) = u^{-w1} div(u^{w1} V) + w2 <du, V>/u
    REQUIRE(divergence({w1 + w2, v}, kFree) == divergence({w1, v}, kFree) + dot(ex::du(), v).times_u(-1).scaled(w2));
    // Moving an integer power of u between the weight and the field.
    REQUIRE(divergence({w1, v.times_u(2)}, kFree) == divergence({w1 + ParamScalar(2), v}, kFree).times_u(2));
  }
}

TEST_CASE("gradient is linear and obeys Leibniz", "[calculus][property]") {
  const std::vector<Expr> atoms = {ex::grad_sq(), ex::lap(), ex::u(-1), ex::hess_du_du(), ex::hess_sq(), ex::u(2)};
  for (const auto& x : atoms)
    for (const auto& y : atoms) {
      REQUIRE(grad(x + y.scaled(P("a"))) == grad(x) + grad(y).scaled(P("a")));
      REQUIRE(grad(x * y) == x * grad(y) + y * grad(x));
    }
}

TEST_CASE("definition substitution", "[calculus]") {
  const Definitions d{ParamScalar::var(Var::b)};
  SECTION("E is trace free") { REQUIRE(d.e_tensor().trace().is_zero()); }
  SECTION("forward image of u_ij u^i u^j") {
    const Expr fwd = substitute_defs(ex::hess_du_du(), Direction::Forward, d);
    const Expr p = ex::grad_sq();
    const Expr expected = Expr::term(mono(0, {fac(Sym::E, 1, 2), fac(Sym::Grad, 1), fac(Sym::Grad, 2)})) -
                          (p * p).times_u(-1).scaled(d.b) + (p * d.trace_part()).scaled(n_sym().inverse());
    REQUIRE(fwd == expected);
  }
  SECTION("forward image of lap is lap, of the Hessian trace is lap") {
    REQUIRE(substitute_defs(ex::lap(), Direction::Forward, d) == ex::lap());
    REQUIRE(substitute_defs(ex::hess_sq(), Direction::Forward, d).contains(Sym::E));
  }
  SECTION("round trip on random expressions") {
    std::mt19937_64 rng(5);
    const std::vector<Expr> atoms = {ex::hess_du_du(), ex::hess_sq(), dot(ex::dlap(), ex::du()), ex::bilap(), ex::lap(),
                                     ex::grad_sq().times_u(-1), dot(ex::hess_du(), ex::dlap())};
    std::uniform_int_distribution<int> pick(0, static_cast<int>(atoms.size()) - 1), coef(-3, 3);
    for (int t = 0; t < 40; ++t) {
      const Expr e = atoms[static_cast<std::size_t>(pick(rng))] * atoms[static_cast<std::size_t>(pick(rng))].scaled(coef(rng)) +
                     atoms[static_cast<std::size_t>(pick(rng))].scaled(P("b - n"));
      const Expr fwd = substitute_defs(e, Direction::Forward, d);
      REQUIRE_FALSE(fwd.contains(Sym::Hess));
      REQUIRE_FALSE(fwd.contains(Sym::GradLap));
      REQUIRE_FALSE(fwd.contains(Sym::BiLap));
      REQUIRE(substitute_defs(fwd, Direction::Backward, d) == e);
    }
  }
  SECTION("vector round trip") {
    const Expr v = ex::hess_du() + ex::dlap().scaled(P("b")) + (ex::bilap() * ex::du()).times_u(-1);
    REQUIRE(substitute_defs(substitute_defs(v, Direction::Forward, d), Direction::Backward, d) == v);
  }
}

TEST_CASE("specialized invariants", "[calculus]") {
  const ParamScalar k = P("1 + n*alpha/(n+4)");
  SECTION("F_j display") {
    const Expr f = std::get<Expr>(build_named("F_i", true).body);
    const Expr expected = ex::dlap() - (ex::lap() * ex::du()).times_u(-1).scaled(P("(n+2)/(2*n)") * k) +
                          (ex::grad_sq() * ex::du()).times_u(-2).scaled(k * P("(n+2)/n - (n-2)*alpha/(n+4)") / 4);
    REQUIRE(f == expected);
  }
  SECTION("kappa at the specialized b") {
    REQUIRE(Definitions{specialized_b()}.kappa() == -k * P("(n+2)/n - (n-2)*alpha/(n+4)") / 4);
  }
  SECTION("specialized b is the root of the lap^2 u_i/u^2 coefficient") {
    const Definitions d{ParamScalar::var(Var::b)};
    const Expr gg = substitute_defs(grad(d.g_scalar(), SubstitutionMode::OnShell), Direction::Forward, d);
    const TensorMonomial target = canonicalize(mono(-2, {fac(Sym::Lap), fac(Sym::Lap), fac(Sym::Grad, 0)}));
    const auto it = gg.terms().find(target);
    REQUIRE(it != gg.terms().end());
    REQUIRE(it->second.substitute(Var::b, specialized_b()).is_zero());
    REQUIRE_FALSE(it->second.substitute(Var::b, ParamScalar(1)).is_zero());
  }
}
