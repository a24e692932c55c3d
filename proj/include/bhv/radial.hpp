#pragma once

#include <array>
#include <chrono>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bhv/errors.hpp"

namespace bhv {

/// Radial state at radius r: u, p = u', v = Delta u, q = v'.
struct RadialState {
  double r = 0, u = 0, p = 0, v = 0, q = 0;
};

enum class Verdict { PositivityViolated, SubharmonicityViolated, BlowUp, ReachedMaxRadius };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::PositivityViolated: return "positivity-violated";
    case Verdict::SubharmonicityViolated: return "subharmonicity-violated";
    case Verdict::BlowUp: return "blow-up";
    case Verdict::ReachedMaxRadius: return "reached-max-radius";
  }
  return "?";
}

struct ShootingOptions {
  double rmax = 50;
  double atol = 1e-10;
  double rtol = 1e-10;
  double r0 = 1e-6;
  double blowup = 1e12;
  /// Runs with v0 > 0 are refused unless set; such runs are marked out of hypothesis.
  bool allow_positive_v0 = false;
  bool keep_trajectory = true;
  std::size_t max_steps = 2'000'000;
};

struct ShootingResult {
  int n = 0;
  double alpha = 0, u0 = 0, v0 = 0;
  double rmax = 0;
  double r_end = 0;
  Verdict verdict = Verdict::ReachedMaxRadius;
  RadialState last;
  /// Accepted steps, increasing in r.
  std::vector<RadialState> checkpoints;
  std::size_t steps = 0;
  bool out_of_hypothesis = false;
  /// The other threshold was within 1e-6 when the run stopped.
  bool near_boundary = false;
  std::string note;

  bool survived() const { return verdict == Verdict::ReachedMaxRadius; }
};

/// Z_a = v/u + a p^2/u^2.
inline double z_value(const RadialState& s, double a) { return s.v / s.u + a * s.p * s.p / (s.u * s.u); }

namespace detail {

using RadialVec = std::array<double, 4>;

inline RadialState to_state(double r, const RadialVec& y) { return {r, y[0], y[1], y[2], y[3]}; }

}  // namespace detail

/// Series start at r0: u = u0 + v0 r^2/(2n), v = v0 + u0^alpha r^2/(2n).
inline RadialState series_start(int n, double alpha, double u0, double v0, double r0) {
  const double f = std::pow(u0, alpha);
  return {r0, u0 + v0 * r0 * r0 / (2 * n), v0 * r0 / n, v0 + f * r0 * r0 / (2 * n), f * r0 / n};
}

/// Integrates Delta^2 u = u^alpha radially from (u0, v0) until u <= 0, v > 0,
/// |u| > blowup or r = rmax, whichever comes first.
inline ShootingResult shoot(int n, double alpha, double u0, double v0, const ShootingOptions& opt = {}) {
  if (n < 5) throw ParameterRange("radial shooting needs n >= 5");
  if (!(alpha > 1)) throw ParameterRange("radial shooting needs alpha > 1");
  if (!(u0 > 0)) throw ParameterRange("u0 must be positive");
  if (v0 > 0 && !opt.allow_positive_v0) throw ParameterRange("v0 > 0 is outside the hypothesis Delta u <= 0");
  if (!(opt.rmax > opt.r0)) throw ParameterRange("rmax must exceed the start radius");

  namespace odeint = boost::numeric::odeint;
  using detail::RadialVec;
  ShootingResult res;
  res.n = n;
  res.alpha = alpha;
  res.u0 = u0;
  res.v0 = v0;
  res.rmax = opt.rmax;
  res.out_of_hypothesis = v0 > 0;

  const double nm1 = n - 1;
  auto rhs = [&](const RadialVec& y, RadialVec& dy, double r) {
    dy[0] = y[1];
    dy[1] = y[2] - nm1 * y[1] / r;
    dy[2] = y[3];
    dy[3] = (y[0] > 0 ? std::pow(y[0], alpha) : 0.0) - nm1 * y[3] / r;
  };
  // Which threshold, if any, the state has crossed.
  auto crossed = [&](const RadialVec& y) -> std::optional<Verdict> {
    if (!std::isfinite(y[0]) || !std::isfinite(y[2]) || std::abs(y[0]) > opt.blowup) return Verdict::BlowUp;
    if (y[0] <= 0) return Verdict::PositivityViolated;
    if (y[2] > 0 && !res.out_of_hypothesis) return Verdict::SubharmonicityViolated;
    return std::nullopt;
  };
  auto finish = [&](double r, const RadialVec& y, Verdict v) {
    res.r_end = r;
    res.last = detail::to_state(r, y);
    res.verdict = v;
    const double eps = 1e-6;
    res.near_boundary = (v != Verdict::PositivityViolated && std::abs(y[0]) < eps) ||
                        (v != Verdict::SubharmonicityViolated && std::abs(y[2]) < eps) ||
                        (v != Verdict::ReachedMaxRadius && opt.rmax - r < eps * opt.rmax);
    if (opt.keep_trajectory && (res.checkpoints.empty() || res.checkpoints.back().r < r)) res.checkpoints.push_back(res.last);
  };

  const RadialState s0 = series_start(n, alpha, u0, v0, opt.r0);
  RadialVec y{s0.u, s0.p, s0.v, s0.q};
  if (opt.keep_trajectory) res.checkpoints.push_back(s0);
  if (auto v = crossed(y)) {
    finish(opt.r0, y, *v);
    return res;
  }

  auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<RadialVec>());
  stepper.initialize(y, opt.r0, std::min(1e-3, opt.r0));
  RadialVec probe{};
  try {
    while (true) {
      if (++res.steps > opt.max_steps) {
        res.note = "step budget exhausted";
        finish(stepper.current_time(), stepper.current_state(), Verdict::BlowUp);
        return res;
      }
      const auto [t0, t1raw] = stepper.do_step(rhs);
      const double t1 = std::min(t1raw, opt.rmax);
      // Look for the first crossing inside the step on a few dense-output
      // samples, then bisect the bracket that contains it.
      constexpr int kProbes = 8;
      double lo = t0;
      for (int k = 1; k <= kProbes; ++k) {
        const double t = t0 + (t1 - t0) * k / kProbes;
        stepper.calc_state(t, probe);
        if (!crossed(probe)) {
          lo = t;
          continue;
        }
        double hi = t;
        for (int it = 0; it < 80 && hi - lo > 1e-15 * hi; ++it) {
          const double mid = (lo + hi) / 2;
          stepper.calc_state(mid, probe);
          (crossed(probe) ? hi : lo) = mid;
        }
        stepper.calc_state(hi, probe);
        finish(hi, probe, *crossed(probe));
        return res;
      }
      if (t1raw >= opt.rmax) {
        stepper.calc_state(opt.rmax, probe);
        finish(opt.rmax, probe, Verdict::ReachedMaxRadius);
        return res;
      }
      if (opt.keep_trajectory) res.checkpoints.push_back(detail::to_state(t1, stepper.current_state()));
      if (stepper.current_time_step() < 1e-14 * t1) {
        res.note = "step size underflow";
        finish(t1, stepper.current_state(), Verdict::BlowUp);
        return res;
      }
    }
  } catch (const odeint::step_adjustment_error& e) {
    res.note = std::string("step size underflow: ") + e.what();
    finish(stepper.current_time(), stepper.current_state(), Verdict::BlowUp);
  }
  return res;
}

/// Monitor of Z_a along the part of a trajectory with u > 0 and v <= 0.
struct ZMonitor {
  double a = 0;
  double max_z = 0;
  double r_at_max = 0;
  std::size_t window_points = 0;
  /// A positive value is logged, not treated as a counterexample: the estimate
  /// is a statement about global solutions.
  bool positive = false;
};

/// Max of Z_a over the validity window; a defaults to 2/(n-4).
inline ZMonitor monitor_z(const ShootingResult& r, std::optional<double> a = std::nullopt) {
  ZMonitor m;
  m.a = a.value_or(2.0 / (r.n - 4));
  m.max_z = -INFINITY;
  for (const auto& s : r.checkpoints) {
    if (!(s.u > 0 && s.v <= 0)) continue;
    ++m.window_points;
    const double z = z_value(s, m.a);
    if (z > m.max_z) {
      m.max_z = z;
      m.r_at_max = s.r;
    }
  }
  if (m.window_points == 0) throw ParameterRange("trajectory has an empty validity window");
  m.positive = m.max_z > 0;
  return m;
}

/// Checkpoints as CSV with columns r,u,p,v,q,Z (Z with a = 2/(n-4)).
inline std::string trajectory_csv(const ShootingResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "r,u,p,v,q,Z\n";
  const double a = 2.0 / (r.n - 4);
  for (const auto& s : r.checkpoints) os << s.r << ',' << s.u << ',' << s.p << ',' << s.v << ',' << s.q << ',' << z_value(s, a) << '\n';
  return os.str();
}

inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return g;
}

struct ScanCell {
  double u0 = 0, v0 = 0;
  std::optional<Verdict> verdict;
  double r_end = 0;
  bool near_boundary = false;
  std::optional<double> max_z;
  std::string error;
};

struct ScanSummary {
  int n = 0;
  double alpha = 0, rmax = 0;
  std::vector<ScanCell> cells;
  std::size_t survivors = 0;
  std::size_t errors = 0;
  double seconds = 0;

  double survival_fraction() const { return cells.empty() ? 0.0 : static_cast<double>(survivors) / cells.size(); }
};

/// Shoots every (u0, v0) cell, u0 outer, v0 inner. Cell errors are recorded
/// and do not stop the scan.
inline ScanSummary scan_shooting(int n, double alpha, const std::vector<double>& u0s, const std::vector<double>& v0s,
                                 ShootingOptions opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  ScanSummary s;
  s.n = n;
  s.alpha = alpha;
  s.rmax = opt.rmax;
  opt.keep_trajectory = true;
  for (double u0 : u0s)
    for (double v0 : v0s) {
      ScanCell c{u0, v0, std::nullopt, 0, false, std::nullopt, ""};
      try {
        const ShootingResult r = shoot(n, alpha, u0, v0, opt);
        c.verdict = r.verdict;
        c.r_end = r.r_end;
        c.near_boundary = r.near_boundary;
        if (r.survived()) ++s.survivors;
        try {
          c.max_z = monitor_z(r).max_z;
        } catch (const ParameterRange&) {
        }
      } catch (const Error& e) {
        c.error = e.what();
        ++s.errors;
      }
      s.cells.push_back(std::move(c));
    }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

}  // namespace bhv
