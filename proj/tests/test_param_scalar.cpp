#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bhv/param_scalar.hpp"

using namespace bhv;

TEST_CASE("normalize_param reduces to the canonical representative", "[symcore]") {
  SECTION("gcd reduction") { REQUIRE(ParamScalar::fraction(Poly::var(Var::alpha).scaled(2), Poly(2)) == alpha_sym()); }
  SECTION("polynomial cancellation") {
    const Poly n = Poly::var(Var::n);
    REQUIRE(ParamScalar::fraction(n * n - Poly(16), n - Poly(4)) == P("n+4"));
  }
  SECTION("c2 at n=5, alpha=2") {
    const ParamScalar c2 = P("(n^2+2*n+4)*alpha/((n-1)*(n+4)) + (n+2)/(n-1)");
    const ParamScalar v = c2.substitute(Var::n, 5).substitute(Var::alpha, 2);
    REQUIRE(v == ParamScalar::rational(47, 12));
  }
  SECTION("zero denominator is rejected") {
    REQUIRE_THROWS_AS(ParamScalar::fraction(Poly(1), Poly()), MalformedCoefficient);
    REQUIRE_THROWS_AS(P("1/(n-n)"), MalformedCoefficient);
  }
  SECTION("idempotent") {
    const ParamScalar x = P("(3*n^2-3)/(6*n+6)*alpha");
    REQUIRE(ParamScalar::fraction(x.numerator(), x.denominator()) == x);
    REQUIRE(x == P("(n-1)*alpha/2"));
  }
  SECTION("sign convention on the denominator") {
    const ParamScalar x = P("1/(4-n)");
    REQUIRE(x.denominator().leading_coefficient() > 0);
    REQUIRE(x == P("-1/(n-4)"));
  }
}

TEST_CASE("multivariate gcd", "[symcore]") {
  const Poly n = Poly::var(Var::n), al = Poly::var(Var::alpha), b = Poly::var(Var::b);
  const Poly f = (n * al - Poly(3)) * (b + n);
  const Poly g = (n * al - Poly(3)) * (al * al - b);
  REQUIRE(gcd(f, g) == n * al - Poly(3));
  REQUIRE(gcd(f.scaled(Rational(2, 3)), g).size() == 2);
  REQUIRE(gcd(n + Poly(1), n - Poly(1)) == Poly(1));
}

namespace {
// Random rational functions drawn from a small pool of factors so that
// cancellations actually happen.
ParamScalar random_param(std::mt19937_64& rng) {
  static const char* pool[] = {"n+4", "n-1", "alpha", "a+b", "n*alpha-2", "b^2-a", "2*n+alpha*b", "3"};
  std::uniform_int_distribution<int> pick(0, 7), len(0, 3), sign(0, 1);
  ParamScalar num(1), den(1);
  for (int i = len(rng); i > 0; --i) num *= P(pool[pick(rng)]);
  for (int i = len(rng); i > 0; --i) den *= P(pool[pick(rng)]);
  if (sign(rng)) num = -num;
  return num / den + ParamScalar(static_cast<long long>(pick(rng)) - 3);
}
}  // namespace

TEST_CASE("normalized equality agrees with numeric equality", "[symcore][property]") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> small(-40, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    const ParamScalar x = random_param(rng), y = random_param(rng), z = random_param(rng);
    // (x + y) * z against x*z + y*z; and a deliberately unequal pair.
    const ParamScalar lhs = (x + y) * z, rhs = x * z + y * z, off = rhs + ParamScalar::rational(1, 7);
    REQUIRE(lhs == rhs);
    std::array<Rational, kNumVars> at;
    for (auto& v : at) v = Rational(small(rng), 7 + (small(rng) & 7));
    for (auto& v : at) v.canonicalize();
    Rational l, r, o;
    try {
      l = lhs.evaluate(at);
      r = rhs.evaluate(at);
      o = off.evaluate(at);
    } catch (const PoleError&) {
      continue;
    }
    REQUIRE(l == r);
    REQUIRE(l != o);
  }
}

TEST_CASE("heuristic gcd agrees with the remainder sequence", "[symcore][property]") {
  std::mt19937_64 rng(7);
  static const char* pool[] = {"n+4", "n-1", "alpha", "a+b", "n*alpha-2", "b^2-a", "2*n+alpha*b", "3*x^2-n"};
  std::uniform_int_distribution<int> pick(0, 7), len(1, 3);
  auto product = [&] {
    ParamScalar p(1);
    for (int i = len(rng); i > 0; --i) p *= P(pool[pick(rng)]);
    return p.numerator();
  };
  for (int trial = 0; trial < 200; ++trial) {
    const Poly common = product(), f = common * product(), g = common * product();
    const Poly h = gcd(f, g);
    REQUIRE(h == detail::prs_gcd(integer_primitive(f).second, integer_primitive(g).second));
    REQUIRE(try_divide(h, integer_primitive(common).second));
  }
}
