#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bhv/registry.hpp"
#include "json.hpp"

namespace bhv {

/// Flat-space 4-jet of a positive function at a point. Dense arrays are
/// row-major; g2, g3, g4 are totally symmetric.
struct JetSample {
  int n = 0;
  std::uint64_t seed = 0;
  SubstitutionMode mode = SubstitutionMode::Free;
  double alpha = 0;
  double u = 1;
  std::vector<double> g1, g2, g3, g4;
  /// Delta^2 u and its gradient. On shell w4 = u^alpha and dw4 = alpha w4 g1 / u.
  double w4 = 0;
  std::vector<double> dw4;
};

/// Numeric values substituted for the formal parameters.
struct OracleParams {
  double alpha = 2;
  double a = 1;
  /// Defaults to -(1 + n alpha/(n+4))/2.
  std::optional<double> b;

  double b_at(int n) const { return b.value_or(-(1 + n * alpha / (n + 4)) / 2); }
};

namespace detail {

inline std::size_t ipow(int n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

/// Dense tensor with one label per axis, every axis of length n.
struct NTensor {
  std::vector<int> labels;
  std::vector<double> v;
};

/// Sums the product of `ts` over every label that occurs twice in total;
/// labels occurring once index the result, in order of first appearance.
inline NTensor einsum(const std::vector<const NTensor*>& ts, int n) {
  std::vector<int> all;
  std::vector<int> count;
  for (const auto* t : ts)
    for (int l : t->labels) {
      const auto it = std::find(all.begin(), all.end(), l);
      if (it == all.end()) {
        all.push_back(l);
        count.push_back(1);
      } else {
        ++count[static_cast<std::size_t>(it - all.begin())];
      }
    }
  NTensor out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (count[i] == 1) out.labels.push_back(all[i]);
  out.v.assign(ipow(n, static_cast<int>(out.labels.size())), 0.0);

  // Strides of every label in every input and in the output.
  const std::size_t L = all.size(), T = ts.size();
  std::vector<std::size_t> stride(L * (T + 1), 0);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& lab = ts[t]->labels;
    std::size_t s = 1;
    for (std::size_t k = lab.size(); k-- > 0;) {
      const auto pos = static_cast<std::size_t>(std::find(all.begin(), all.end(), lab[k]) - all.begin());
      stride[pos * (T + 1) + t] += s;
      s *= static_cast<std::size_t>(n);
    }
  }
  {
    std::size_t s = 1;
    for (std::size_t k = out.labels.size(); k-- > 0;) {
      const auto pos = static_cast<std::size_t>(std::find(all.begin(), all.end(), out.labels[k]) - all.begin());
      stride[pos * (T + 1) + T] = s;
      s *= static_cast<std::size_t>(n);
    }
  }
  std::vector<int> digit(L, 0);
  std::vector<std::size_t> off(T + 1, 0);
  const std::size_t total = ipow(n, static_cast<int>(L));
  for (std::size_t iter = 0; iter < total; ++iter) {
    double p = 1;
    for (std::size_t t = 0; t < T; ++t) p *= ts[t]->v[off[t]];
    out.v[off[T]] += p;
    for (std::size_t k = L; k-- > 0;) {
      if (++digit[k] < n) {
        for (std::size_t t = 0; t <= T; ++t) off[t] += stride[k * (T + 1) + t];
        break;
      }
      digit[k] = 0;
      for (std::size_t t = 0; t <= T; ++t) off[t] -= stride[k * (T + 1) + t] * static_cast<std::size_t>(n - 1);
    }
  }
  return out;
}

/// Contracts a list of factors pairwise, joining the pair that shares the most
/// labels (then the smallest result) first.
inline NTensor contract_all(std::vector<NTensor> ts, int n) {
  double scalar = 1;
  auto absorb = [&](std::vector<NTensor>& list) {
    std::erase_if(list, [&](const NTensor& t) {
      if (!t.labels.empty()) return false;
      scalar *= t.v[0];
      return true;
    });
  };
  for (auto& t : ts) {
    std::vector<int> sorted = t.labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) t = einsum({&t}, n);
  }
  absorb(ts);
  while (ts.size() > 1 && scalar != 0) {
    std::size_t bi = 0, bj = 1;
    int best_shared = -1;
    std::size_t best_rank = SIZE_MAX;
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        int shared = 0;
        for (int l : ts[i].labels) shared += std::count(ts[j].labels.begin(), ts[j].labels.end(), l) > 0;
        const std::size_t rank = ts[i].labels.size() + ts[j].labels.size() - 2 * static_cast<std::size_t>(shared);
        if (shared > best_shared || (shared == best_shared && rank < best_rank)) {
          best_shared = shared;
          best_rank = rank;
          bi = i;
          bj = j;
        }
      }
    NTensor c = einsum({&ts[bi], &ts[bj]}, n);
    ts.erase(ts.begin() + static_cast<std::ptrdiff_t>(bj));
    ts[bi] = std::move(c);
    absorb(ts);
  }
  if (ts.empty()) return {{}, {scalar}};
  for (auto& x : ts[0].v) x *= scalar;
  return std::move(ts[0]);
}

/// Per-evaluation numeric values of every symbol and of its first derivative.
struct JetContext {
  const JetSample& jet;
  double lap = 0, e_g = 0;
  std::vector<double> dlap, ddlap, e, f;
  std::array<double, kNumVars> at{};

  JetContext(const JetSample& j, const OracleParams& p) : jet(j) {
    const int n = j.n;
    const auto N = static_cast<std::size_t>(n);
    at[static_cast<int>(Var::n)] = n;
    at[static_cast<int>(Var::alpha)] = p.alpha;
    at[static_cast<int>(Var::a)] = p.a;
    const double b = p.b_at(n);
    at[static_cast<int>(Var::b)] = b;
    dlap.assign(N, 0.0);
    ddlap.assign(N * N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      lap += j.g2[i * N + i];
      for (std::size_t k = 0; k < N; ++k) {
        dlap[k] += j.g3[(i * N + i) * N + k];
        for (std::size_t l = 0; l < N; ++l) ddlap[k * N + l] += j.g4[((i * N + i) * N + k) * N + l];
      }
    }
    double p2 = 0;
    for (double x : j.g1) p2 += x * x;
    const double tr = (lap + b * p2 / j.u) / n;
    e.assign(N * N, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) e[i * N + k] = j.g2[i * N + k] + b * j.g1[i] * j.g1[k] / j.u - (i == k ? tr : 0.0);
    const double kap = b * (1 + (n - 2) * b / n);
    f.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      f[i] = dlap[i] + (n + 2.0) / n * b * lap * j.g1[i] / j.u - kap * p2 * j.g1[i] / (j.u * j.u);
    e_g = j.w4 + (n + 2.0) / n * b * lap * lap / j.u - 2.0 * (n + 2) / n * b * (1 + b) * lap * p2 / (j.u * j.u) +
          b * (3 * b + 2) * (1 + (n - 2) * b / n) * p2 * p2 / (j.u * j.u * j.u);
  }

  /// Value of factor f; nullopt for curvature (zero in flat space).
  std::optional<NTensor> value(const Factor& x) const {
    const auto lab = [&](int k) { return std::vector<int>(x.idx.begin(), x.idx.begin() + k); };
    switch (x.sym) {
      case Sym::Grad: return NTensor{lab(1), jet.g1};
      case Sym::Hess: return NTensor{lab(2), jet.g2};
      case Sym::Third: return NTensor{lab(3), jet.g3};
      case Sym::Lap: return NTensor{{}, {lap}};
      case Sym::GradLap: return NTensor{lab(1), dlap};
      case Sym::BiLap: return NTensor{{}, {jet.w4}};
      case Sym::Ric: return std::nullopt;
      case Sym::E: return NTensor{lab(2), e};
      case Sym::F: return NTensor{lab(1), f};
      case Sym::G: return NTensor{{}, {e_g}};
    }
    return std::nullopt;
  }

  /// Partial derivative of factor x along the axis labelled d.
  std::optional<NTensor> derivative(const Factor& x, int d) const {
    auto lab = [&](int k) {
      std::vector<int> l(x.idx.begin(), x.idx.begin() + k);
      l.push_back(d);
      return l;
    };
    switch (x.sym) {
      case Sym::Grad: return NTensor{lab(1), jet.g2};
      case Sym::Hess: return NTensor{lab(2), jet.g3};
      case Sym::Third: return NTensor{lab(3), jet.g4};
      case Sym::Lap: return NTensor{lab(0), dlap};
      case Sym::GradLap: return NTensor{lab(1), ddlap};
      case Sym::BiLap: return NTensor{lab(0), jet.dw4};
      case Sym::Ric: return std::nullopt;
      case Sym::E:
      case Sym::F:
      case Sym::G: throw OrderOverflow(std::string("numeric derivative of ") + sym_name(x.sym) + " is not available");
    }
    return std::nullopt;
  }
};

inline void accumulate(std::vector<double>& acc, const NTensor& t, double c) {
  if (acc.empty()) acc.assign(t.v.size(), 0.0);
  for (std::size_t i = 0; i < t.v.size(); ++i) acc[i] += c * t.v[i];
}

/// Value of u^p times the factors, or nullopt when a curvature factor kills it.
inline std::optional<NTensor> monomial_value(const TensorMonomial& m, const JetContext& cx) {
  std::vector<NTensor> ts;
  for (const auto& f : m.factors()) {
    auto v = cx.value(f);
    if (!v) return std::nullopt;
    ts.push_back(std::move(*v));
  }
  NTensor r = contract_all(std::move(ts), cx.jet.n);
  const double up = std::pow(cx.jet.u, m.u_power());
  for (auto& x : r.v) x *= up;
  return r;
}

/// d/dx^d of the monomial by the product rule; d is either a fresh label
/// (gradient) or the monomial's own free label (divergence).
inline void monomial_derivative(const TensorMonomial& m, int d, const JetContext& cx, double c, std::vector<double>& acc) {
  const auto& fs = m.factors();
  std::vector<std::optional<NTensor>> vals;
  for (const auto& f : fs) {
    vals.push_back(cx.value(f));
    if (!vals.back() && f.sym == Sym::Ric) return;
  }
  const double up = std::pow(cx.jet.u, m.u_power());
  for (std::size_t j = 0; j < fs.size(); ++j) {
    auto df = cx.derivative(fs[j], d);
    if (!df) continue;
    std::vector<NTensor> ts;
    for (std::size_t k = 0; k < fs.size(); ++k) ts.push_back(k == j ? std::move(*df) : *vals[k]);
    accumulate(acc, contract_all(std::move(ts), cx.jet.n), c * up);
  }
  if (m.u_power() != 0) {
    std::vector<NTensor> ts;
    for (const auto& v : vals) ts.push_back(*v);
    ts.push_back({{d}, cx.jet.g1});
    accumulate(acc, contract_all(std::move(ts), cx.jet.n), c * m.u_power() * up / cx.jet.u);
  }
}

inline std::vector<double> zero_value(int valence, int n) { return std::vector<double>(valence == 0 ? 1 : static_cast<std::size_t>(n), 0.0); }

inline std::vector<double> eval_in(const Expr& e, const JetContext& cx) {
  std::vector<double> acc = zero_value(e.valence(), cx.jet.n);
  for (const auto& [m, c] : e.terms()) {
    auto v = monomial_value(m, cx);
    if (v) accumulate(acc, *v, c.evaluate(cx.at));
  }
  return acc;
}

/// u^{-w} d_i (u^w V^i) computed from first derivatives of the jet.
inline std::vector<double> numeric_divergence(const WeightedVectorField& f, const JetContext& cx) {
  std::vector<double> acc = zero_value(0, cx.jet.n);
  for (const auto& [m, c] : f.field.terms()) monomial_derivative(m, free_label_of(m), cx, c.evaluate(cx.at), acc);
  const std::vector<double> v = eval_in(f.field, cx);
  double dot = 0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += cx.jet.g1[i] * v[i];
  acc[0] += f.weight.evaluate(cx.at) * dot / cx.jet.u;
  return acc;
}

inline std::vector<double> numeric_gradient(const Expr& s, const JetContext& cx) {
  if (s.valence() != 0) throw ValenceMismatch("numeric gradient of a vector");
  std::vector<double> acc = zero_value(1, cx.jet.n);
  for (const auto& [m, c] : s.terms()) monomial_derivative(m, m.max_label() + 1, cx, c.evaluate(cx.at), acc);
  return acc;
}

inline double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t n, std::uint64_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32), static_cast<std::uint32_t>(n),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace detail

/// Random flat jet, deterministic in (seed, n, mode, alpha). Entries are
/// uniform in [-1, 1], u in [1/4, 7/4]; the double trace of g4 is forced to w4.
inline JetSample sample_jet(std::uint64_t seed, int n, SubstitutionMode mode = SubstitutionMode::Free, double alpha = 2) {
  if (n < 2) throw ParameterRange("jet dimension must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  JetSample j;
  j.n = n;
  j.seed = seed;
  j.mode = mode;
  j.alpha = alpha;
  const auto N = static_cast<std::size_t>(n);
  j.u = 1 + 0.75 * U(rng);
  j.g1.resize(N);
  for (auto& x : j.g1) x = U(rng);
  j.g2.assign(N * N, 0.0);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a; b < N; ++b) j.g2[a * N + b] = j.g2[b * N + a] = U(rng);
  auto fill = [&](std::vector<double>& t, int rank) {
    t.assign(detail::ipow(n, rank), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(rank), 0);
    while (true) {
      const double val = U(rng);
      std::vector<int> p = idx;
      do {
        std::size_t off = 0;
        for (int k : p) off = off * N + static_cast<std::size_t>(k);
        t[off] = val;
      } while (std::next_permutation(p.begin(), p.end()));
      // Next nondecreasing index tuple.
      int k = rank - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - 1) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (int q = k + 1; q < rank; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(k)];
    }
  };
  fill(j.g3, 3);
  fill(j.g4, 4);
  const double free_w4 = U(rng);
  j.dw4.resize(N);
  for (auto& x : j.dw4) x = U(rng);
  j.w4 = mode == SubstitutionMode::OnShell ? std::pow(j.u, alpha) : free_w4;
  double tt = 0;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) tt += j.g4[((a * N + a) * N + b) * N + b];
  // Add c (d_ij d_kl + d_ik d_jl + d_il d_jk), whose double trace is c (n^2 + 2n).
  const double c = (j.w4 - tt) / (n * n + 2.0 * n);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = 0; l < N; ++l)
          j.g4[((a * N + b) * N + k) * N + l] += c * ((a == b && k == l) + (a == k && b == l) + (a == l && b == k));
  if (mode == SubstitutionMode::OnShell)
    for (std::size_t a = 0; a < N; ++a) j.dw4[a] = alpha * j.w4 * j.g1[a] / j.u;
  return j;
}

/// The jet of lambda u.
inline JetSample scale_jet(JetSample j, double lambda) {
  j.u *= lambda;
  j.w4 *= lambda;
  for (auto* v : {&j.g1, &j.g2, &j.g3, &j.g4, &j.dw4})
    for (auto& x : *v) x *= lambda;
  return j;
}

/// Numeric value of e at the jet: one entry for a scalar, n for a vector.
inline std::vector<double> eval_expr(const Expr& e, const JetSample& jet, const OracleParams& p = {}) {
  return detail::eval_in(e, detail::JetContext(jet, p));
}

inline double eval_scalar(const Expr& e, const JetSample& jet, const OracleParams& p = {}) {
  if (e.valence() != 0) throw ValenceMismatch("eval_scalar on a vector expression");
  return eval_expr(e, jet, p)[0];
}

/// Numeric left side of an identity: divergence or gradient taken on the jet.
inline std::vector<double> numeric_lhs(const Identity& id, const JetSample& jet, const OracleParams& p) {
  const detail::JetContext cx(jet, p);
  if (const auto* d = std::get_if<DivergenceLhs>(&id.lhs)) return detail::numeric_divergence(d->field, cx);
  return detail::numeric_gradient(std::get<GradientLhs>(id.lhs).scalar, cx);
}

inline std::vector<double> numeric_rhs(const Identity& id, const JetSample& jet, const OracleParams& p) {
  return eval_expr(rhs_value(id.rhs, lhs_valence(id)), jet, p);
}

/// |LHS - RHS| / (1 + |LHS| + |RHS|), Euclidean norms for vectors.
inline double relative_residual(const std::vector<double>& l, const std::vector<double>& r) {
  std::vector<double> d(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) d[i] = l[i] - r[i];
  return detail::norm(d) / (1 + detail::norm(l) + detail::norm(r));
}

inline double identity_residual(const Identity& id, const JetSample& jet, const OracleParams& p) {
  return relative_residual(numeric_lhs(id, jet, p), numeric_rhs(id, jet, p));
}

inline nlohmann::json jet_to_json(const JetSample& j, const OracleParams& p) {
  nlohmann::json o;
  o["n"] = j.n;
  o["seed"] = j.seed;
  o["mode"] = mode_name(j.mode);
  o["alpha"] = j.alpha;
  o["u"] = j.u;
  o["g1"] = j.g1;
  o["g2"] = j.g2;
  o["g3"] = j.g3;
  o["g4"] = j.g4;
  o["w4"] = j.w4;
  o["dw4"] = j.dw4;
  o["params"] = {{"alpha", p.alpha}, {"a", p.a}, {"b", p.b_at(j.n)}};
  return o;
}

inline std::pair<JetSample, OracleParams> jet_from_json(const nlohmann::json& o) {
  JetSample j;
  j.n = o.at("n").get<int>();
  j.seed = o.at("seed").get<std::uint64_t>();
  j.mode = o.at("mode").get<std::string>() == "onshell" ? SubstitutionMode::OnShell : SubstitutionMode::Free;
  j.alpha = o.at("alpha").get<double>();
  j.u = o.at("u").get<double>();
  j.g1 = o.at("g1").get<std::vector<double>>();
  j.g2 = o.at("g2").get<std::vector<double>>();
  j.g3 = o.at("g3").get<std::vector<double>>();
  j.g4 = o.at("g4").get<std::vector<double>>();
  j.w4 = o.at("w4").get<double>();
  j.dw4 = o.at("dw4").get<std::vector<double>>();
  const auto& pp = o.at("params");
  OracleParams p{pp.at("alpha").get<double>(), pp.at("a").get<double>(), pp.at("b").get<double>()};
  return {std::move(j), p};
}

/// Parameter points for dimension n: (alpha, a) = (2, 1) first, then
/// alpha in (1, (n+4)/(n-4)) and a in (0, 2/(n-4)) drawn from the seed.
inline std::vector<OracleParams> sample_params(int n, std::size_t count, std::uint64_t seed) {
  std::vector<OracleParams> out;
  if (count == 0) return out;
  out.push_back({2, 1, std::nullopt});
  std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(n), 0xa1fa));
  std::uniform_real_distribution<double> U(0.05, 0.95);
  const double hi = n > 4 ? (n + 4.0) / (n - 4.0) : 3.0;
  const double amax = n > 4 ? 2.0 / (n - 4) : 1.0;
  while (out.size() < count) out.push_back({1 + (hi - 1) * U(rng), amax * U(rng), std::nullopt});
  return out;
}

struct OracleReport {
  std::string id;
  int n = 0;
  std::size_t samples = 0;
  double tol = 0;
  double max_residual = 0;
  std::uint64_t worst_seed = 0;
  OracleParams worst_params;
  /// Replay record of the worst jet when the tolerance is exceeded.
  std::optional<nlohmann::json> failing_jet;
  std::string error;

  bool passed() const { return error.empty() && max_residual <= tol; }
};

/// Evaluates both sides of `id` at `samples` random jets of dimension n.
inline OracleReport numeric_check_identity(const Identity& id, int n, std::size_t samples, double tol, std::uint64_t seed = 1,
                                           std::size_t param_points = 8) {
  OracleReport rep;
  rep.id = id.id;
  rep.n = n;
  rep.samples = samples;
  rep.tol = tol;
  try {
    const auto params = sample_params(n, std::min(param_points, std::max<std::size_t>(samples, 1)), seed);
    const Expr rhs = rhs_value(id.rhs, lhs_valence(id));
    for (std::size_t i = 0; i < samples; ++i) {
      const OracleParams& p = params[i % params.size()];
      const std::uint64_t s = detail::mix_seed(seed, static_cast<std::uint64_t>(n), i);
      const JetSample jet = sample_jet(s, n, id.mode, p.alpha);
      const double r = relative_residual(numeric_lhs(id, jet, p), eval_expr(rhs, jet, p));
      if (!(r <= rep.max_residual) || i == 0) {
        rep.max_residual = std::isnan(r) ? INFINITY : r;
        rep.worst_seed = s;
        rep.worst_params = p;
        if (!(r <= tol)) rep.failing_jet = jet_to_json(jet, p);
      }
    }
  } catch (const Error& e) {
    rep.error = e.what();
  }
  return rep;
}

/// Replays a serialized jet against an identity.
inline double replay(const Identity& id, const nlohmann::json& record) {
  const auto [jet, p] = jet_from_json(record);
  return identity_residual(id, jet, p);
}

/// Scaling degree of a homogeneous expression under u -> lambda u
/// (u power plus the number of u-linear factors); nullopt if mixed.
inline std::optional<int> homogeneity_degree(const Expr& e) {
  std::optional<int> deg;
  for (const auto& [m, c] : e.terms()) {
    int d = m.u_power();
    for (const auto& f : m.factors()) d += f.sym != Sym::Ric;
    if (deg && *deg != d) return std::nullopt;
    deg = d;
  }
  return deg;
}

struct SharpConstantResult {
  int n = 0;
  double minimum = 0;
  /// n/(n-1), attained at diag(1, -1/(n-1), ..., -1/(n-1)) with v = e1.
  double candidate = 0;
  double cited = 4.0 / 3.0;
  bool below_cited = false;
  /// Eigenvalues of the best E scaled so the largest in modulus is 1, descending.
  std::vector<double> extremizer_spectrum;
  /// |<v, top eigenvector of E^2>| for the best pair.
  double alignment = 0;
  std::size_t restarts = 0;
  std::size_t skipped = 0;

  std::string extremizer() const {
    std::string s = "E ~ diag(";
    for (std::size_t i = 0; i < extremizer_spectrum.size(); ++i) s += (i ? ", " : "") + std::to_string(extremizer_spectrum[i]);
    return s + "), v along the top eigenvector (|cos| = " + std::to_string(alignment) + ")";
  }
};

/// Minimizes |E|^2 |v|^2 / |Ev|^2 over trace-free symmetric E and vectors v by
/// projected gradient descent from random starts.
inline SharpConstantResult sharp_constant_search(int n, std::size_t restarts = 64, std::uint64_t seed = 7) {
  if (n < 2) throw ParameterRange("sharp constant needs n >= 2");
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  SharpConstantResult res;
  res.n = n;
  res.candidate = static_cast<double>(n) / (n - 1);
  res.minimum = INFINITY;
  res.restarts = restarts;
  auto project = [n](MatrixXd m) {
    m = (m + m.transpose()) / 2;
    m.diagonal().array() -= m.trace() / n;
    return m;
  };
  auto ratio = [](const MatrixXd& e, const VectorXd& v) {
    const double c = (e * v).squaredNorm();
    return c > 0 ? e.squaredNorm() * v.squaredNorm() / c : INFINITY;
  };
  MatrixXd best_e;
  VectorXd best_v;
  for (std::size_t r = 0; r < restarts; ++r) {
    MatrixXd e(n, n);
    VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      v(i) = N01(rng);
      for (int k = 0; k < n; ++k) e(i, k) = N01(rng);
    }
    e = project(e);
    e /= e.norm();
    v.normalize();
    double f = ratio(e, v);
    if (!std::isfinite(f)) {
      ++res.skipped;
      continue;
    }
    double step = 0.1;
    for (int it = 0; it < 4000 && step > 1e-14; ++it) {
      const VectorXd w = e * v;
      const double a = e.squaredNorm(), b = v.squaredNorm(), c = w.squaredNorm();
      const MatrixXd ge = project(f * (2 * e / a - (w * v.transpose() + v * w.transpose()) / c));
      const VectorXd gv = f * (2 * v / b - 2 * (e * w) / c);
      const double g2 = ge.squaredNorm() + gv.squaredNorm();
      if (g2 < 1e-26) break;
      while (step > 1e-14) {
        MatrixXd e2 = e - step * ge;
        VectorXd v2 = v - step * gv;
        e2 /= e2.norm();
        v2.normalize();
        const double f2 = ratio(e2, v2);
        if (f2 < f - 1e-4 * step * g2) {
          e = std::move(e2);
          v = std::move(v2);
          f = f2;
          step *= 1.5;
          break;
        }
        step /= 2;
      }
    }
    // Polish v: the best direction for fixed E is the top eigenvector of E^2.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(e * e);
    const VectorXd top = es.eigenvectors().col(n - 1);
    if (ratio(e, top) < f) {
      f = ratio(e, top);
      v = top;
    }
    if (f < res.minimum) {
      res.minimum = f;
      best_e = e;
      best_v = v;
    }
  }
  if (best_e.size() > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(best_e);
    VectorXd ev = es.eigenvalues();
    double big = 0;
    for (int i = 0; i < n; ++i)
      if (std::abs(ev(i)) > std::abs(big)) big = ev(i);
    for (int i = 0; i < n; ++i) res.extremizer_spectrum.push_back(ev(i) / big);
    std::sort(res.extremizer_spectrum.rbegin(), res.extremizer_spectrum.rend());
    Eigen::SelfAdjointEigenSolver<MatrixXd> sq(best_e * best_e);
    res.alignment = std::abs(sq.eigenvectors().col(n - 1).dot(best_v.normalized()));
  }
  res.below_cited = res.minimum < res.cited;
  return res;
}

}  // namespace bhv
