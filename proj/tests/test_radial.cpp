#include <catch2/catch_amalgamated.hpp>

#include "bhv/radial.hpp"

using namespace bhv;

TEST_CASE("series start", "[radial]") {
  const RadialState s = series_start(6, 2, 1.5, -2, 1e-6);
  REQUIRE(s.p / s.r == Catch::Approx(-2.0 / 6).epsilon(1e-8));
  REQUIRE(s.q / s.r == Catch::Approx(2.25 / 6).epsilon(1e-8));
  // Constant data is not a solution: the forcing u^alpha bends v immediately.
  const RadialState c = series_start(6, 2, 1, 0, 1e-3);
  REQUIRE(c.q > 0);
  REQUIRE(c.v > 0);
}

TEST_CASE("single trajectories", "[radial]") {
  SECTION("v0 = 0 leaves the hypothesis at once") {
    const auto r = shoot(6, 2, 1, 0);
    REQUIRE(r.verdict == Verdict::SubharmonicityViolated);
    REQUIRE(r.r_end <= 1e-6);
  }
  SECTION("u0 = 1, v0 = -1 stops before rmax") {
    const auto r = shoot(6, 2, 1, -1);
    REQUIRE_FALSE(r.survived());
    REQUIRE(r.r_end < 50);
    REQUIRE(r.last.u == Catch::Approx(0).margin(1e-9));
    for (std::size_t i = 1; i < r.checkpoints.size(); ++i) REQUIRE(r.checkpoints[i].r > r.checkpoints[i - 1].r);
    const auto m = monitor_z(r);
    REQUIRE(std::isfinite(m.max_z));
    REQUIRE(m.window_points > 10);
    REQUIRE(m.r_at_max <= r.r_end);
  }
  SECTION("halving the tolerance barely moves the stopping radius") {
    ShootingOptions fine;
    fine.atol = fine.rtol = 5e-11;
    const auto a = shoot(6, 2, 1, -1), b = shoot(6, 2, 1, -1, fine);
    REQUIRE(a.verdict == b.verdict);
    REQUIRE(std::abs(a.r_end - b.r_end) / a.r_end < 1e-6);
  }
  SECTION("deterministic") {
    const auto a = shoot(8, 2, 3, -4), b = shoot(8, 2, 3, -4);
    REQUIRE(a.r_end == b.r_end);
    REQUIRE(a.checkpoints.size() == b.checkpoints.size());
  }
  SECTION("positive v0 runs only with the override and blow up") {
    REQUIRE_THROWS_AS(shoot(6, 2, 1, 1), ParameterRange);
    ShootingOptions o;
    o.allow_positive_v0 = true;
    const auto r = shoot(6, 2, 1, 1, o);
    REQUIRE(r.out_of_hypothesis);
    REQUIRE(r.verdict == Verdict::BlowUp);
  }
  SECTION("parameter errors") {
    REQUIRE_THROWS_AS(shoot(4, 2, 1, -1), ParameterRange);
    REQUIRE_THROWS_AS(shoot(6, 1, 1, -1), ParameterRange);
    REQUIRE_THROWS_AS(shoot(6, 2, 0, -1), ParameterRange);
  }
  SECTION("csv dump") {
    const auto r = shoot(6, 2, 1, -1);
    const std::string csv = trajectory_csv(r);
    REQUIRE(csv.rfind("r,u,p,v,q,Z\n", 0) == 0);
    REQUIRE(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.checkpoints.size() + 1);
  }
}

TEST_CASE("Z monitor", "[radial]") {
  ShootingResult r;
  r.n = 6;
  for (int i = 1; i <= 5; ++i) r.checkpoints.push_back({0.1 * i, 1.0 + i, 0.0, -0.5 * i, 0.0});
  SECTION("p = 0 and v < 0 give Z < 0") { REQUIRE(monitor_z(r).max_z < 0); }
  SECTION("a = 0 is v/u") {
    r.checkpoints[2].p = 5;
    const auto m = monitor_z(r, 0.0);
    REQUIRE(m.max_z <= 0);
    REQUIRE_FALSE(m.positive);
    REQUIRE(monitor_z(r).positive);
  }
  SECTION("empty window") {
    for (auto& s : r.checkpoints) s.v = 1;
    REQUIRE_THROWS_AS(monitor_z(r), ParameterRange);
  }
}

TEST_CASE("grids", "[radial]") {
  const auto g = log_grid(0.1, 10, 10);
  REQUIRE(g.size() == 10);
  REQUIRE(g.front() == Catch::Approx(0.1));
  REQUIRE(g.back() == Catch::Approx(10));
  REQUIRE(g[5] / g[4] == Catch::Approx(g[1] / g[0]));
  const auto l = linear_grid(-10, 0, 10);
  REQUIRE(l.front() == -10);
  REQUIRE(l.back() == 0);
  const auto empty = scan_shooting(6, 2, {}, l);
  REQUIRE(empty.cells.empty());
  REQUIRE(empty.survival_fraction() == 0);
}

TEST_CASE("shooting scans find no survivors", "[radial][scan]") {
  const auto u0s = log_grid(0.1, 10, 10);
  const auto v0s = linear_grid(-10, 0, 10);
  for (auto [n, alpha] : std::vector<std::pair<int, double>>{{5, 2}, {6, 2}, {6, 3}, {8, 2}}) {
    INFO("n=" << n << " alpha=" << alpha);
    const auto s = scan_shooting(n, alpha, u0s, v0s);
    REQUIRE(s.cells.size() == 100);
    REQUIRE(s.errors == 0);
    REQUIRE(s.survivors == 0);
    REQUIRE(s.survival_fraction() == 0);
    REQUIRE(s.seconds < 60);
  }
}

TEST_CASE("verdicts are stable under tiny perturbations", "[radial][property]") {
  for (double u0 : log_grid(0.1, 10, 10))
    for (double v0 : linear_grid(-10, -1, 10)) {
      const auto a = shoot(6, 2, u0, v0);
      const auto b = shoot(6, 2, u0 * (1 + 1e-9), v0 - 1e-9);
      if (a.near_boundary || b.near_boundary) continue;
      INFO(u0 << " " << v0);
      REQUIRE(a.verdict == b.verdict);
    }
}
