#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "bhv/errors.hpp"

namespace bhv {

/// Tensor symbols a monomial may contain. Order here is the canonical
/// factor order.
///
/// Slot conventions: Hess[i,j] = u_{ij}; Third[i,j,k] = u_{ijk} = nabla_k u_{ij},
/// symmetric in (i,j) only; GradLap[i] = (Delta u)_{,i}. E, F, G are the
/// invariant-tensor symbols produced by forward substitution.
enum class Sym : std::uint8_t { Grad, Hess, Third, Lap, GradLap, BiLap, Ric, E, F, G };
inline constexpr int kNumSyms = 10;

inline constexpr int rank_of(Sym s) {
  constexpr int ranks[kNumSyms] = {1, 2, 3, 0, 1, 0, 2, 2, 1, 0};
  return ranks[static_cast<int>(s)];
}

/// Number of leading slots that may be swapped (2 for symmetric pairs).
inline constexpr bool swaps_first_two(Sym s) {
  return s == Sym::Hess || s == Sym::Third || s == Sym::Ric || s == Sym::E;
}

inline const char* sym_name(Sym s) {
  static constexpr const char* names[kNumSyms] = {"du", "ddu", "dddu", "lap", "dlap", "bilap", "ric", "E", "F", "G"};
  return names[static_cast<int>(s)];
}

struct Factor {
  Sym sym;
  std::array<int, 3> idx{};  // only the first rank_of(sym) entries are meaningful

  friend bool operator==(const Factor& x, const Factor& y) {
    if (x.sym != y.sym) return false;
    for (int k = 0; k < rank_of(x.sym); ++k)
      if (x.idx[static_cast<std::size_t>(k)] != y.idx[static_cast<std::size_t>(k)]) return false;
    return true;
  }
};

inline Factor fac(Sym s) { return {s, {}}; }
inline Factor fac(Sym s, int i) { return {s, {i, 0, 0}}; }
inline Factor fac(Sym s, int i, int j) { return {s, {i, j, 0}}; }
inline Factor fac(Sym s, int i, int j, int k) { return {s, {i, j, k}}; }

/// Product u^power times a list of tensor factors whose slots carry integer
/// index labels. A label occurring twice is summed; a label occurring once is
/// the free index. In canonical form the free label is 0 and summed labels
/// are 1, 2, ... in order of first appearance.
class TensorMonomial {
 public:
  TensorMonomial() = default;
  TensorMonomial(int u_power, std::vector<Factor> factors) : u_power_(u_power), factors_(std::move(factors)) {}

  int u_power() const { return u_power_; }
  const std::vector<Factor>& factors() const { return factors_; }
  std::vector<Factor>& mutable_factors() { return factors_; }
  void set_u_power(int p) { u_power_ = p; }

  int slot_count() const {
    int s = 0;
    for (const auto& f : factors_) s += rank_of(f.sym);
    return s;
  }

  /// Label multiplicities; throws MalformedMonomial on a label used > 2 times.
  std::map<int, int> label_counts() const {
    std::map<int, int> counts;
    for (const auto& f : factors_)
      for (int k = 0; k < rank_of(f.sym); ++k)
        if (++counts[f.idx[static_cast<std::size_t>(k)]] > 2)
          throw MalformedMonomial("index label used more than twice");
    return counts;
  }

  /// Number of free slots (0 = scalar, 1 = vector).
  int valence() const {
    int free = 0;
    for (const auto& [label, c] : label_counts()) free += (c == 1);
    return free;
  }

  int max_label() const {
    int m = 0;
    for (const auto& f : factors_)
      for (int k = 0; k < rank_of(f.sym); ++k) m = std::max(m, f.idx[static_cast<std::size_t>(k)]);
    return m;
  }

  bool contains(Sym s) const {
    return std::any_of(factors_.begin(), factors_.end(), [s](const Factor& f) { return f.sym == s; });
  }

  /// Trace of the trace-free symbol E makes the monomial identically zero.
  bool vanishes() const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [](const Factor& f) { return f.sym == Sym::E && f.idx[0] == f.idx[1]; });
  }

  friend bool operator==(const TensorMonomial& x, const TensorMonomial& y) {
    return x.u_power_ == y.u_power_ && x.factors_ == y.factors_;
  }

  /// Order on canonical monomials (fewer factors first, then lexicographic).
  friend bool operator<(const TensorMonomial& x, const TensorMonomial& y) {
    if (x.factors_.size() != y.factors_.size()) return x.factors_.size() < y.factors_.size();
    for (std::size_t i = 0; i < x.factors_.size(); ++i) {
      const auto& fx = x.factors_[i];
      const auto& fy = y.factors_[i];
      if (fx.sym != fy.sym) return fx.sym < fy.sym;
    }
    for (std::size_t i = 0; i < x.factors_.size(); ++i) {
      const auto& fx = x.factors_[i];
      const auto& fy = y.factors_[i];
      for (int k = 0; k < rank_of(fx.sym); ++k)
        if (fx.idx[static_cast<std::size_t>(k)] != fy.idx[static_cast<std::size_t>(k)])
          return fx.idx[static_cast<std::size_t>(k)] < fy.idx[static_cast<std::size_t>(k)];
    }
    return x.u_power_ < y.u_power_;
  }

  /// Deterministic text form, e.g. `u^-2 ddu(a,i) du(a)`; the free index is `i`.
  std::string str() const {
    static constexpr char dummy[] = "abcdefghjklmopqrstvwxyz";
    auto name = [](int label) -> std::string {
      if (label == 0) return "i";
      if (label - 1 < static_cast<int>(sizeof(dummy) - 1)) return std::string(1, dummy[label - 1]);
      return "z" + std::to_string(label);
    };
    std::string out;
    if (u_power_ != 0) out += "u^" + std::to_string(u_power_);
    for (const auto& f : factors_) {
      if (!out.empty()) out += " ";
      out += sym_name(f.sym);
      const int r = rank_of(f.sym);
      if (r > 0) {
        out += "(";
        for (int k = 0; k < r; ++k) {
          if (k) out += ",";
          out += name(f.idx[static_cast<std::size_t>(k)]);
        }
        out += ")";
      }
    }
    return out.empty() ? "1" : out;
  }

 private:
  int u_power_ = 0;
  std::vector<Factor> factors_;
};

namespace detail {

/// Replace trivially-traced symbols: ddu(a,a) -> lap, dddu(a,a,k) -> dlap(k).
inline void fold_traces(std::vector<Factor>& fs) {
  for (auto& f : fs) {
    if (f.sym == Sym::Hess && f.idx[0] == f.idx[1]) {
      f = fac(Sym::Lap);
    } else if (f.sym == Sym::Third && f.idx[0] == f.idx[1]) {
      f = fac(Sym::GradLap, f.idx[2]);
    } else if (f.sym == Sym::Ric && f.idx[0] == f.idx[1]) {
      throw UnsupportedCurvature("scalar curvature (traced Ric) is not supported");
    }
  }
}

/// Search for the lexicographically smallest relabeled slot sequence over
/// permutations within each symbol group and over the slot symmetries of each
/// factor. Factors are placed one at a time; only candidates whose relabeled
/// slots are minimal at the current position are expanded, and branches that
/// fall behind the best sequence found so far are cut.
class Canonicalizer {
 public:
  Canonicalizer(std::vector<Factor> fs, int free_label) : fs_(std::move(fs)), free_label_(free_label) {
    std::stable_sort(fs_.begin(), fs_.end(), [](const Factor& x, const Factor& y) { return x.sym < y.sym; });
    int max_label = 0;
    for (const auto& f : fs_)
      for (int k = 0; k < rank_of(f.sym); ++k) max_label = std::max(max_label, f.idx[static_cast<std::size_t>(k)]);
    map_.assign(static_cast<std::size_t>(max_label) + 1, -1);
    used_.assign(fs_.size(), false);
  }

  std::vector<Factor> run() {
    search(0, 1);
    return best_;
  }

 private:
  struct Choice {
    std::size_t factor;
    bool flip;
    std::array<int, 3> chunk;
  };

  int slot_label(const Factor& f, int k, bool flip) const {
    const int slot = (flip && k < 2) ? 1 - k : k;
    return f.idx[static_cast<std::size_t>(slot)];
  }

  std::array<int, 3> chunk_of(const Factor& f, bool flip, int next) const {
    std::array<int, 3> c{0, 0, 0};
    std::array<int, 3> fresh_from{-1, -1, -1};
    for (int k = 0; k < rank_of(f.sym); ++k) {
      const int label = slot_label(f, k, flip);
      int mapped;
      if (label == free_label_) {
        mapped = 0;
      } else if (map_[static_cast<std::size_t>(label)] >= 0) {
        mapped = map_[static_cast<std::size_t>(label)];
      } else {
        mapped = -1;
        for (int j = 0; j < k; ++j)
          if (fresh_from[static_cast<std::size_t>(j)] == label) mapped = c[static_cast<std::size_t>(j)];
        if (mapped < 0) {
          mapped = next++;
          fresh_from[static_cast<std::size_t>(k)] = label;
        }
      }
      c[static_cast<std::size_t>(k)] = mapped;
    }
    return c;
  }

  /// Compares current_ with best_ on the first len factors.
  int compare_prefix(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (current_[i].idx != best_[i].idx) return current_[i].idx < best_[i].idx ? -1 : 1;
    return 0;
  }

  void search(std::size_t pos, int next) {
    if (pos == fs_.size()) {
      if (best_.empty() || compare_prefix(pos) < 0) best_ = current_;
      return;
    }
    const Sym sym = fs_[pos].sym;
    const int r = rank_of(sym);
    std::vector<Choice> choices;
    for (std::size_t i = 0; i < fs_.size(); ++i) {
      if (used_[i] || fs_[i].sym != sym) continue;
      // Identical unused factors lead to identical subtrees.
      bool duplicate = false;
      for (std::size_t j = 0; j < i && !duplicate; ++j) duplicate = !used_[j] && fs_[j] == fs_[i];
      if (duplicate) continue;
      const bool can_flip = swaps_first_two(sym) && fs_[i].idx[0] != fs_[i].idx[1];
      for (int fl = 0; fl < (can_flip ? 2 : 1); ++fl) choices.push_back({i, fl == 1, chunk_of(fs_[i], fl == 1, next)});
    }
    std::array<int, 3> best_chunk = choices.front().chunk;
    for (const auto& c : choices) best_chunk = std::min(best_chunk, c.chunk);

    for (const auto& c : choices) {
      if (c.chunk != best_chunk) continue;
      const Factor& f = fs_[c.factor];
      Factor out = f;
      out.idx = c.chunk;
      current_.push_back(out);
      if (!best_.empty() && compare_prefix(pos + 1) > 0) {
        current_.pop_back();
        return;  // every sibling has the same chunk
      }
      std::vector<int> assigned;
      int nx = next;
      for (int k = 0; k < r; ++k) {
        const int label = slot_label(f, k, c.flip);
        if (label != free_label_ && map_[static_cast<std::size_t>(label)] < 0) {
          map_[static_cast<std::size_t>(label)] = c.chunk[static_cast<std::size_t>(k)];
          assigned.push_back(label);
          ++nx;
        }
      }
      used_[c.factor] = true;
      search(pos + 1, nx);
      used_[c.factor] = false;
      for (int label : assigned) map_[static_cast<std::size_t>(label)] = -1;
      current_.pop_back();
    }
  }

  std::vector<Factor> fs_;
  int free_label_;
  std::vector<int> map_;
  std::vector<bool> used_;
  std::vector<Factor> current_;
  std::vector<Factor> best_;
};

}  // namespace detail

/// Canonical representative of a monomial: equal invariants give identical
/// results regardless of factor order or index names.
inline TensorMonomial canonicalize(const TensorMonomial& m) {
  std::vector<Factor> fs = m.factors();
  detail::fold_traces(fs);
  const TensorMonomial folded(m.u_power(), fs);
  int free_label = -1, free_count = 0;
  for (const auto& [label, c] : folded.label_counts())
    if (c == 1) {
      free_label = label;
      ++free_count;
    }
  if (free_count > 1)
    throw MalformedMonomial("monomial has " + std::to_string(free_count) + " free slots: " + m.str());
  if (fs.empty()) return folded;

  thread_local std::unordered_map<std::string, std::vector<Factor>> cache;
  std::string key;
  key.reserve(fs.size() * 4 + 4);
  key.push_back(static_cast<char>(free_label + 1));
  {
    std::vector<Factor> sorted = fs;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Factor& x, const Factor& y) { return x.sym < y.sym; });
    for (const auto& f : sorted) {
      key.push_back(static_cast<char>('A' + static_cast<int>(f.sym)));
      for (int k = 0; k < rank_of(f.sym); ++k) key.push_back(static_cast<char>(f.idx[static_cast<std::size_t>(k)] + 1));
    }
  }
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(std::move(key), detail::Canonicalizer(fs, free_label).run()).first;
  }
  return TensorMonomial(m.u_power(), it->second);
}

}  // namespace bhv
