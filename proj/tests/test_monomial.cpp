#include "support.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "bhv/expr.hpp"

using namespace bhv;

namespace {

TensorMonomial random_monomial(std::mt19937_64& rng) {
  static const Sym pool[] = {Sym::Grad, Sym::Hess, Sym::Third, Sym::Lap, Sym::GradLap, Sym::BiLap, Sym::Ric, Sym::E, Sym::F};
  std::uniform_int_distribution<int> count(1, 6), pick(0, 8), coin(0, 1), power(-4, 4);
  for (;;) {
    std::vector<Factor> fs;
    int slots = 0;
    for (int i = count(rng); i > 0; --i) {
      fs.push_back(fac(pool[pick(rng)]));
      slots += rank_of(fs.back().sym);
    }
    const bool vector = coin(rng) == 1;
    if ((slots % 2 == 1) != vector) continue;
    std::vector<int> order(static_cast<std::size_t>(slots));
    for (int k = 0; k < slots; ++k) order[static_cast<std::size_t>(k)] = vector ? (k + 1) / 2 : k / 2 + 1;
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t pos = 0;
    for (auto& f : fs)
      for (int k = 0; k < rank_of(f.sym); ++k) f.idx[static_cast<std::size_t>(k)] = order[pos++];
    // Skip traced Ric (scalar curvature is outside the supported algebra).
    if (std::any_of(fs.begin(), fs.end(), [](const Factor& f) { return f.sym == Sym::Ric && f.idx[0] == f.idx[1]; }))
      continue;
    return TensorMonomial(power(rng), fs);
  }
}

/// Random relabelling, factor shuffle and symmetric slot swaps.
TensorMonomial scramble(const TensorMonomial& m, std::mt19937_64& rng) {
  std::vector<int> fresh(64);
  std::iota(fresh.begin(), fresh.end(), 100);
  std::shuffle(fresh.begin(), fresh.end(), rng);
  std::vector<Factor> fs = m.factors();
  std::uniform_int_distribution<int> coin(0, 1);
  for (auto& f : fs) {
    for (int k = 0; k < rank_of(f.sym); ++k) f.idx[static_cast<std::size_t>(k)] = fresh[static_cast<std::size_t>(f.idx[static_cast<std::size_t>(k)])];
    if (swaps_first_two(f.sym) && coin(rng)) std::swap(f.idx[0], f.idx[1]);
  }
  std::shuffle(fs.begin(), fs.end(), rng);
  return TensorMonomial(m.u_power(), fs);
}

}  // namespace

TEST_CASE("canonical form is invariant under relabelling", "[symcore][property]") {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 10000; ++trial) {
    const TensorMonomial m = random_monomial(rng);
    const TensorMonomial c = canonicalize(m);
    REQUIRE(canonicalize(scramble(m, rng)) == c);
    REQUIRE(canonicalize(c) == c);
  }
}

TEST_CASE("canonicalize examples", "[symcore]") {
  SECTION("u_ij u^i u^j under renaming") {
    const auto a = mono(0, {fac(Sym::Hess, 1, 2), fac(Sym::Grad, 1), fac(Sym::Grad, 2)});
    const auto b = mono(0, {fac(Sym::Grad, 7), fac(Sym::Hess, 9, 7), fac(Sym::Grad, 9)});
    REQUIRE(canonicalize(a) == canonicalize(b));
  }
  SECTION("commutativity") {
    const auto a = mono(0, {fac(Sym::Lap), fac(Sym::Grad, 1), fac(Sym::Grad, 1)});
    const auto b = mono(0, {fac(Sym::Grad, 3), fac(Sym::Grad, 3), fac(Sym::Lap)});
    REQUIRE(canonicalize(a) == canonicalize(b));
  }
  SECTION("tr(H^3) differs from Lap |H|^2") {
    const auto cubic = mono(0, {fac(Sym::Hess, 1, 2), fac(Sym::Hess, 2, 3), fac(Sym::Hess, 3, 1)});
    const auto mixed = mono(0, {fac(Sym::Lap), fac(Sym::Hess, 1, 2), fac(Sym::Hess, 1, 2)});
    REQUIRE_FALSE(canonicalize(cubic) == canonicalize(mixed));
  }
  SECTION("traces fold") {
    REQUIRE(canonicalize(mono(0, {fac(Sym::Hess, 4, 4)})) == mono(0, {fac(Sym::Lap)}));
    REQUIRE(canonicalize(mono(0, {fac(Sym::Third, 4, 4, 2), fac(Sym::Grad, 2)})) ==
            canonicalize(mono(0, {fac(Sym::GradLap, 1), fac(Sym::Grad, 1)})));
    REQUIRE(canonicalize(mono(0, {fac(Sym::E, 3, 3)})).vanishes());
  }
  SECTION("third derivatives are symmetric only in the first two slots") {
    const auto a = mono(0, {fac(Sym::Third, 0, 1, 2), fac(Sym::Grad, 1), fac(Sym::Hess, 2, 3), fac(Sym::Grad, 3)});
    const auto b = mono(0, {fac(Sym::Third, 1, 0, 2), fac(Sym::Grad, 1), fac(Sym::Hess, 2, 3), fac(Sym::Grad, 3)});
    const auto c = mono(0, {fac(Sym::Third, 0, 2, 1), fac(Sym::Grad, 1), fac(Sym::Hess, 2, 3), fac(Sym::Grad, 3)});
    REQUIRE(canonicalize(a) == canonicalize(b));
    REQUIRE_FALSE(canonicalize(a) == canonicalize(c));
  }
  SECTION("malformed slot structure") {
    REQUIRE_THROWS_AS(canonicalize(mono(0, {fac(Sym::Grad, 1), fac(Sym::Grad, 2)})), MalformedMonomial);
    REQUIRE_THROWS_AS(canonicalize(mono(0, {fac(Sym::Ric, 1, 1)})), UnsupportedCurvature);
  }
}

namespace {

/// Cycle type of a perfect matching on the slots of k Hessians, i.e. the
/// isomorphism class of the 2-regular multigraph it defines.
std::multiset<int> cycle_type(const std::vector<int>& partner, int k) {
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  std::multiset<int> type;
  for (int start = 0; start < k; ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    int len = 0, v = start, slot = 2 * start;
    while (!seen[static_cast<std::size_t>(v)]) {
      seen[static_cast<std::size_t>(v)] = true;
      ++len;
      const int other = partner[static_cast<std::size_t>(slot + 1 - 2 * (slot % 2))];
      v = other / 2;
      slot = other;
    }
    type.insert(len);
  }
  return type;
}

void all_matchings(std::vector<int>& partner, std::vector<std::vector<int>>& out) {
  auto it = std::find(partner.begin(), partner.end(), -1);
  if (it == partner.end()) {
    out.push_back(partner);
    return;
  }
  const int a = static_cast<int>(it - partner.begin());
  for (int b = a + 1; b < static_cast<int>(partner.size()); ++b) {
    if (partner[static_cast<std::size_t>(b)] != -1) continue;
    partner[static_cast<std::size_t>(a)] = b;
    partner[static_cast<std::size_t>(b)] = a;
    all_matchings(partner, out);
    partner[static_cast<std::size_t>(a)] = partner[static_cast<std::size_t>(b)] = -1;
  }
}

}  // namespace

TEST_CASE("contraction classes of Hessian products match the multigraph enumeration", "[symcore]") {
  for (int k : {2, 3}) {
    std::vector<int> partner(static_cast<std::size_t>(2 * k), -1);
    std::vector<std::vector<int>> matchings;
    all_matchings(partner, matchings);
    std::map<std::multiset<int>, std::set<std::string>> by_type;
    std::set<std::string> canon_all;
    for (const auto& p : matchings) {
      std::vector<Factor> fs;
      for (int h = 0; h < k; ++h) {
        auto label = [&](int slot) { return std::min(slot, p[static_cast<std::size_t>(slot)]) + 1; };
        fs.push_back(fac(Sym::Hess, label(2 * h), label(2 * h + 1)));
      }
      const std::string c = canonicalize(TensorMonomial(0, fs)).str();
      by_type[cycle_type(p, k)].insert(c);
      canon_all.insert(c);
    }
    // Each multigraph class maps to exactly one canonical form and vice versa.
    for (const auto& [type, forms] : by_type) REQUIRE(forms.size() == 1);
    REQUIRE(canon_all.size() == by_type.size());
    REQUIRE(by_type.size() == (k == 2 ? 2u : 3u));
  }
}

TEST_CASE("expression arithmetic", "[symcore]") {
  const Expr p = ex::grad_sq(), l = ex::lap();
  SECTION("x - x is empty") { REQUIRE(combine(p, 1, p, -1).is_zero()); }
  SECTION("scaling by zero") { REQUIRE(p.scaled(0).is_zero()); }
  SECTION("valence mismatch") {
    REQUIRE_THROWS_AS(combine(p, 1, ex::du(), 1), ValenceMismatch);
    REQUIRE_THROWS_AS(ex::du() * ex::du(), ValenceMismatch);
  }
  SECTION("Z_a from combine") {
    const Expr za = combine(l, 1, p.times_u(-1), P("a")).times_u(-1);
    Expr direct(0);
    direct.add(mono(-1, {fac(Sym::Lap)}), 1);
    direct.add(mono(-2, {fac(Sym::Grad, 5), fac(Sym::Grad, 5)}), P("a"));
    REQUIRE(za == direct);
  }
  SECTION("dot and products commute") {
    REQUIRE(dot(ex::du(), ex::du()) == p);
    REQUIRE(dot(ex::hess_du(), ex::du()) == ex::hess_du_du());
    REQUIRE(l * p == p * l);
    REQUIRE((l * ex::du()) == (ex::du() * l));
  }
  SECTION("ring axioms on random combinations") {
    std::mt19937_64 rng(3);
    const std::vector<Expr> atoms = {p, l, ex::hess_sq(), ex::hess_du_du(), ex::u(-1), ex::bilap()};
    std::uniform_int_distribution<int> pick(0, static_cast<int>(atoms.size()) - 1), coef(-5, 5);
    for (int t = 0; t < 100; ++t) {
      const Expr x = atoms[static_cast<std::size_t>(pick(rng))].scaled(coef(rng));
      const Expr y = atoms[static_cast<std::size_t>(pick(rng))].scaled(P("n+1"));
      const Expr z = atoms[static_cast<std::size_t>(pick(rng))].scaled(P("alpha"));
      REQUIRE((x + y) + z == x + (y + z));
      REQUIRE(x + y == y + x);
      REQUIRE((x + y) * z == x * z + y * z);
    }
  }
  SECTION("serialization is deterministic") {
    const Expr e = p * l + ex::hess_du_du().scaled(P("(n-2)/n"));
    REQUIRE(e.str() == (ex::hess_du_du().scaled(P("(n-2)/n")) + l * p).str());
  }
}

TEST_CASE("symmetric 2-tensor contractions", "[symcore]") {
  const SymTensor2 h = SymTensor2::of(Basis2::Hess), g = SymTensor2::of(Basis2::Metric),
                   gg = SymTensor2::of(Basis2::GradGrad);
  REQUIRE(h.trace() == ex::lap());
  REQUIRE(g.trace() == Expr::constant(n_sym()));
  REQUIRE(double_contract(h, h) == ex::hess_sq());
  REQUIRE(double_contract(h, gg) == ex::hess_du_du());
  REQUIRE(double_contract(gg, gg) == ex::grad_sq() * ex::grad_sq());
  REQUIRE(h.contract(ex::du()) == ex::hess_du());
  REQUIRE(SymTensor2::of(Basis2::E).trace().is_zero());
}
