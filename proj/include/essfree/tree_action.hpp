#pragma once

// Action of group words on the binary tree: images, sections, the word
// problem, level permutations, orders, transitivity, exact fixed-point
// measures and spherically homogeneous profiles.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "essfree/errors.hpp"
#include "essfree/group.hpp"
#include "essfree/mealy.hpp"
#include "essfree/perm_group.hpp"
#include "essfree/word.hpp"

namespace essfree {

using Rational = boost::multiprecision::cpp_rational;
using Vertex = std::vector<unsigned>;

enum class Decision { yes, no, exhausted };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::yes: return "true";
    case Decision::no: return "false";
    case Decision::exhausted: return "budget_exhausted";
  }
  return "?";
}

inline Vertex parse_vertex(const std::string& text, bool one_based = false) {
  Vertex v;
  for (char c : text) {
    if (c == ' ' || c == ',' || c == '[' || c == ']') continue;
    int x = c - '0';
    if (one_based) --x;
    if (x != 0 && x != 1) throw ParseError("vertex letters must be " + std::string(one_based ? "1/2" : "0/1"));
    v.push_back(static_cast<unsigned>(x));
  }
  return v;
}

inline Vertex act(const SelfSimilarGroup& g, const Word& w, const Vertex& v) {
  Vertex out;
  Word cur = g.strip(w);
  for (unsigned x : v) {
    out.push_back(g.act_letter(cur, x));
    cur = g.section_at(cur, x);
  }
  return out;
}

inline SelfSimilarGroup::Decomposition wreath_decompose(const SelfSimilarGroup& g, const Word& w) {
  return g.decompose(g.strip(w));
}

inline Word section(const SelfSimilarGroup& g, const Word& w, const Vertex& v) {
  Word cur = g.strip(w);
  for (unsigned x : v) cur = g.section_at(cur, x);
  return cur;
}

namespace detail {

// An element as a minimized automaton: state 0 is the element itself.
struct ElementMachine {
  std::vector<Perm> root;
  std::vector<std::array<std::uint32_t, 2>> next;
};

inline ElementMachine minimize_machine(const ElementMachine& m) {
  const std::size_t n = m.root.size();
  std::vector<std::uint32_t> block(n);
  std::size_t count = 0;
  {
    std::map<Perm, std::uint32_t> ids;
    for (std::size_t q = 0; q < n; ++q)
      block[q] = ids.emplace(m.root[q], static_cast<std::uint32_t>(ids.size())).first->second;
    count = ids.size();
  }
  while (true) {
    std::map<std::array<std::uint32_t, 3>, std::uint32_t> ids;
    std::vector<std::uint32_t> refined(n);
    for (std::size_t q = 0; q < n; ++q) {
      const std::array<std::uint32_t, 3> key{block[q], block[m.next[q][0]], block[m.next[q][1]]};
      refined[q] = ids.emplace(key, static_cast<std::uint32_t>(ids.size())).first->second;
    }
    block = std::move(refined);
    if (ids.size() == count) break;
    count = ids.size();
  }
  // renumber reachable blocks from the start state in BFS order
  std::vector<std::int64_t> order(count, -1);
  std::vector<std::size_t> rep;
  order[block[0]] = 0;
  rep.push_back(0);
  ElementMachine out;
  for (std::size_t i = 0; i < rep.size(); ++i) {
    const std::size_t q = rep[i];
    out.root.push_back(m.root[q]);
    std::array<std::uint32_t, 2> nx{};
    for (unsigned x = 0; x < 2; ++x) {
      const std::uint32_t b = block[m.next[q][x]];
      if (order[b] < 0) {
        order[b] = static_cast<std::int64_t>(rep.size());
        rep.push_back(m.next[q][x]);
      }
      nx[x] = static_cast<std::uint32_t>(order[b]);
    }
    out.next.push_back(nx);
  }
  return out;
}

// Word problem for automaton groups: the product automaton of the word is
// built letter by letter and minimized after every step, so its size never
// exceeds the number of distinct sections of a prefix.
inline Decision machine_is_identity(const SelfSimilarGroup& g, const Word& w) {
  const std::size_t letters = 2 * g.generator_count();
  auto letter_next = [&](Letter l, unsigned x) -> Letter {
    const auto& r = g.recursion(generator_of(l));
    if (!is_inverted(l)) return (x == 0 ? r.section0 : r.section1)[0];
    const unsigned pre = apply(r.root, x);
    return inverse_letter((pre == 0 ? r.section0 : r.section1)[0]);
  };
  ElementMachine e{{Perm::identity}, {{0, 0}}};
  for (Letter first : w) {
    // states of the product: pairs (state of e, letter state)
    std::map<std::pair<std::uint32_t, Letter>, std::uint32_t> index;
    std::vector<std::pair<std::uint32_t, Letter>> states;
    auto id_of = [&](std::uint32_t q, Letter l) {
      auto [it, inserted] = index.emplace(std::pair{q, l}, static_cast<std::uint32_t>(states.size()));
      if (inserted) states.emplace_back(q, l);
      return it->second;
    };
    id_of(0, first);
    ElementMachine prod;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto [q, l] = states[i];
      prod.root.push_back(e.root[q] * g.root(l));
      std::array<std::uint32_t, 2> nx{};
      for (unsigned x = 0; x < 2; ++x) nx[x] = id_of(e.next[q][x], letter_next(l, apply(e.root[q], x)));
      prod.next.push_back(nx);
      if (states.size() > g.budget().node_cap * letters) return Decision::exhausted;
    }
    e = minimize_machine(prod);
    if (e.root.size() > g.budget().node_cap) return Decision::exhausted;
  }
  for (Perm p : e.root)
    if (p != Perm::identity) return Decision::no;
  return Decision::yes;
}

}  // namespace detail

namespace detail {

inline Decision closure_is_identity(const SelfSimilarGroup& g, const Word& start, std::size_t cap) {
  std::unordered_set<Word, WordHash> seen{start};
  std::deque<Word> queue{start};
  try {
    while (!queue.empty()) {
      Word u = std::move(queue.front());
      queue.pop_front();
      if (g.root(u) != Perm::identity) return Decision::no;
      for (unsigned x = 0; x < 2; ++x) {
        Word s = g.section_at(u, x).cyclic_canonical();
        if (s.empty() || seen.count(s)) continue;
        seen.insert(s);
        queue.push_back(std::move(s));
        if (seen.size() > cap) return Decision::exhausted;
      }
    }
  } catch (const BudgetExceeded&) {
    return Decision::exhausted;
  }
  return Decision::yes;
}

}  // namespace detail

// Word problem by closure over sections. Each node may be replaced by any
// conjugate (a conjugate of g is trivial iff g is, and acts nontrivially on
// the same levels), so nodes are cyclically reduced and rotated to a
// canonical form. For automaton groups a closure that grows large is
// abandoned for the minimized product automaton.
inline Decision is_identity(const SelfSimilarGroup& g, const Word& w) {
  constexpr std::size_t quick_cap = 2048;
  const Word start = g.strip(w).cyclic_canonical();
  if (start.empty()) return Decision::yes;
  if (!g.is_length_preserving()) return detail::closure_is_identity(g, start, g.budget().node_cap);
  const Decision quick = detail::closure_is_identity(g, start, std::min(quick_cap, g.budget().node_cap));
  if (quick != Decision::exhausted) return quick;
  return detail::machine_is_identity(g, start);
}

inline Decision equal(const SelfSimilarGroup& g, const Word& u, const Word& v) {
  return is_identity(g, u * v.inverse());
}

// Throws BudgetExceeded instead of returning an undecided answer.
inline bool is_identity_strict(const SelfSimilarGroup& g, const Word& w) {
  const Decision d = is_identity(g, w);
  if (d == Decision::exhausted)
    throw BudgetExceeded("node_cap", "word problem undecided within the closure budget");
  return d == Decision::yes;
}

inline PointPerm perm_on_level(const SelfSimilarGroup& g, const Word& w, std::size_t n) {
  if (n == 0) throw std::invalid_argument("level must be at least 1");
  const auto& perms = g.letter_perms(n);
  PointPerm p = identity_perm(std::size_t{1} << n);
  for (Letter l : g.strip(w))
    for (auto& x : p) x = perms[l][x];
  return p;
}

inline std::vector<PointPerm> generator_perms(const SelfSimilarGroup& g, std::size_t n) {
  std::vector<PointPerm> gens;
  for (std::size_t i = 0; i < g.generator_count(); ++i) gens.push_back(perm_on_level(g, Word::generator(i), n));
  return gens;
}

struct LevelGroupOrder {
  BigInt order;
  BigInt derived_order;
};

inline LevelGroupOrder level_group_order(const SelfSimilarGroup& g, std::size_t n) {
  const auto gens = generator_perms(g, n);
  const std::size_t degree = std::size_t{1} << n;
  PermGroup group(degree, gens);
  return {group.order(), derived_subgroup(degree, gens).order()};
}

inline std::size_t fixed_vertex_count(const SelfSimilarGroup& g, const Word& w, std::size_t n) {
  const PointPerm p = perm_on_level(g, w, n);
  std::size_t c = 0;
  for (std::size_t v = 0; v < p.size(); ++v)
    if (p[v] == v) ++c;
  return c;
}

// ---------------------------------------------------------------------------
// Spherical transitivity. rho_n(g) = sum over level-n vertices v of the root
// of g|_v (mod 2) is a homomorphism to Z/2, and g is transitive on level n+1
// iff rho_0(g), ..., rho_n(g) are all odd. On generators rho_n obeys a linear
// recursion over (Z/2)^k, so the sequence is eventually periodic and the
// check is exact on all levels.

struct Transitivity {
  enum class Kind { all_levels, up_to, intransitive_at } kind;
  std::size_t level;  // first failing level, or levels checked
};

struct ParitySequence {
  std::vector<std::vector<std::uint8_t>> values;  // values[n][gen] = rho_n(gen)
  std::size_t period_start;                       // values[n] repeats from here
};

inline ParitySequence level_parities(const SelfSimilarGroup& g) {
  const std::size_t k = g.generator_count();
  std::vector<std::vector<std::uint8_t>> counts(k * 2, std::vector<std::uint8_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (unsigned x = 0; x < 2; ++x)
      for (Letter l : x == 0 ? g.recursion(i).section0 : g.recursion(i).section1)
        counts[2 * i + x][generator_of(l)] ^= 1;
  ParitySequence seq;
  std::map<std::vector<std::uint8_t>, std::size_t> seen;
  std::vector<std::uint8_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = g.recursion(i).root == Perm::swap ? 1 : 0;
  while (true) {
    auto [it, inserted] = seen.emplace(cur, seq.values.size());
    if (!inserted) {
      seq.period_start = it->second;
      return seq;
    }
    seq.values.push_back(cur);
    std::vector<std::uint8_t> next(k, 0);
    for (std::size_t i = 0; i < k; ++i)
      for (unsigned x = 0; x < 2; ++x)
        for (std::size_t j = 0; j < k; ++j)
          if (counts[2 * i + x][j]) next[i] ^= cur[j];
    cur = std::move(next);
  }
}

inline Transitivity level_transitive_element(const SelfSimilarGroup& g, const Word& w, std::size_t n_max) {
  const auto seq = level_parities(g);
  std::vector<std::uint8_t> parity(g.generator_count(), 0);
  for (Letter l : g.strip(w)) parity[generator_of(l)] ^= 1;
  auto rho = [&](std::size_t n) {
    std::uint8_t r = 0;
    for (std::size_t j = 0; j < parity.size(); ++j) r ^= parity[j] & seq.values[n][j];
    return r;
  };
  for (std::size_t n = 0; n < seq.values.size(); ++n) {
    if (n >= n_max) return {Transitivity::Kind::up_to, n_max};
    if (!rho(n)) return {Transitivity::Kind::intransitive_at, n + 1};
  }
  return {Transitivity::Kind::all_levels, seq.values.size()};
}

struct ElementOrder {
  enum class Kind { finite, infinite, unknown } kind;
  std::uint64_t order = 0;
  std::string certificate;  // how infiniteness was established
};

inline std::vector<Vertex> vertices_up_to(std::size_t depth) {
  std::vector<Vertex> out{{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() == depth) continue;
    for (unsigned x = 0; x < 2; ++x) {
      Vertex v = out[i];
      v.push_back(x);
      out.push_back(std::move(v));
    }
  }
  return out;
}

inline std::string format_vertex(const Vertex& v) {
  std::string s;
  for (unsigned x : v) s += static_cast<char>('0' + x);
  return s.empty() ? "root" : s;
}

inline ElementOrder element_order(const SelfSimilarGroup& g, const Word& w_in, std::size_t max_level = 0) {
  const Word w = g.strip(w_in);
  if (max_level == 0) max_level = g.budget().max_level;
  std::vector<std::uint64_t> orders;
  for (std::size_t n = 1; n <= max_level; ++n) {
    orders.push_back(perm_order(perm_on_level(g, w, n)));
    const std::size_t k = orders.size();
    if (k >= 3 && orders[k - 1] == orders[k - 2] && orders[k - 2] == orders[k - 3]) {
      if (is_identity(g, w.pow(static_cast<long long>(orders.back()))) == Decision::yes)
        return {ElementOrder::Kind::finite, orders.back(), {}};
    }
  }
  const auto verts = vertices_up_to(4);
  for (long long power = 1; power <= 4; ++power) {
    const Word h = w.pow(power);
    for (const auto& v : verts) {
      if (act(g, h, v) != v) continue;
      const Word s = section(g, h, v);
      if (level_transitive_element(g, s, SIZE_MAX).kind == Transitivity::Kind::all_levels) {
        return {ElementOrder::Kind::infinite, 0,
                "power " + std::to_string(power) + " fixes vertex " + format_vertex(v) +
                    " with a spherically transitive section"};
      }
    }
  }
  return {ElementOrder::Kind::unknown, 0, {}};
}

// ---------------------------------------------------------------------------
// Exact measure of the fixed-point set on the boundary.

// Finite automaton of the exact sections of w; state 0 is w itself.
struct SectionAutomaton {
  std::vector<Word> words;
  MealyAutomaton automaton;
};

inline SectionAutomaton section_automaton(const SelfSimilarGroup& g, const Word& w) {
  std::vector<Word> words{g.strip(w)};
  std::unordered_map<Word, std::size_t, WordHash> index{{words[0], 0}};
  std::vector<State> tr;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Word u = words[i];
    const Perm r = g.root(u);
    for (unsigned x = 0; x < 2; ++x) {
      Word s = g.section_at(u, x);
      auto [it, inserted] = index.emplace(s, words.size());
      if (inserted) {
        words.push_back(std::move(s));
        if (!g.is_length_preserving() && words.size() > g.budget().node_cap)
          throw BudgetExceeded("node_cap", "section closure exceeds " + std::to_string(g.budget().node_cap) +
                                               " nodes");
      }
      tr.push_back(it->second);
      out.push_back(apply(r, x));
    }
  }
  const std::size_t n = words.size();
  return {std::move(words), MealyAutomaton(n, 2, std::move(tr), std::move(out))};
}

// Let M[s][t] = #{fixed letters x of s leading to t} / 2 over non-identity
// states and b[s] = #{fixed letters leading to the identity} / 2. Then the
// measures solve (I - M) mu = b. In a minimized automaton every closed class of
// non-identity states moves some letter, so I - M is invertible; a singular
// system means that argument failed and is reported as an internal error.
inline Rational fixed_point_measure(const SelfSimilarGroup& g, const Word& w) {
  const auto sa = section_automaton(g, w);
  const auto mini = minimize_with_map(sa.automaton);
  const MealyAutomaton& m = mini.automaton;
  const State start = mini.block_of[0];
  const auto ident = identity_states(m);
  if (ident[start]) return Rational(1);

  std::vector<std::size_t> idx(m.state_count(), SIZE_MAX);
  std::size_t k = 0;
  for (State q = 0; q < m.state_count(); ++q)
    if (!ident[q]) idx[q] = k++;

  std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k + 1, Rational(0)));
  const Rational half(1, 2);
  for (State q = 0; q < m.state_count(); ++q) {
    if (ident[q]) continue;
    auto& row = a[idx[q]];
    row[idx[q]] += 1;
    for (std::size_t x = 0; x < 2; ++x) {
      if (m.out(q, x) != x) continue;
      const State t = m.next(q, x);
      if (ident[t])
        row[k] += half;
      else
        row[idx[t]] -= half;
    }
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    while (pivot < k && a[pivot][col] == 0) ++pivot;
    if (pivot == k)
      throw InternalError("fixed-point system is singular at column " + std::to_string(col) + " (" +
                          std::to_string(k) + " non-identity states); the spectral-radius argument failed");
    std::swap(a[pivot], a[col]);
    const Rational inv = 1 / a[col][col];
    for (std::size_t j = col; j <= k; ++j) a[col][j] *= inv;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t j = col; j <= k; ++j) a[r][j] -= f * a[col][j];
    }
  }
  const Rational mu = a[idx[start]][k];
  if (mu < 0 || mu > 1) throw InternalError("fixed-point measure outside [0,1]");
  return mu;
}

// ---------------------------------------------------------------------------
// Level-by-level section sets.

// Distinct exact sections of w on each level 0..depth.
class LevelSections {
 public:
  LevelSections(const SelfSimilarGroup& g, const Word& w) : g_(g) { current_.insert(g.strip(w)); }

  const std::set<Word>& current() const noexcept { return current_; }
  std::size_t level() const noexcept { return level_; }

  void advance() {
    std::set<Word> next;
    for (const auto& u : current_) {
      next.insert(g_.section_at(u, 0));
      next.insert(g_.section_at(u, 1));
      if (next.size() > g_.budget().node_cap)
        throw BudgetExceeded("node_cap", "more than " + std::to_string(g_.budget().node_cap) +
                                             " distinct sections on level " + std::to_string(level_ + 1));
    }
    current_ = std::move(next);
    ++level_;
  }

 private:
  const SelfSimilarGroup& g_;
  std::set<Word> current_;
  std::size_t level_ = 0;
};

struct SHProfile {
  std::vector<Perm> prefix;                 // common root permutation on levels 0, 1, ...
  std::optional<std::size_t> period_start;  // section sets repeat: prefix[period_start..] repeats forever
  std::optional<std::size_t> period_length;
  std::optional<std::size_t> refuted_at;    // level with two differently acting sections
};

inline std::string format_profile(const SHProfile& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.prefix.size(); ++i) {
    if (i) s += ",";
    s += p.prefix[i] == Perm::swap ? "s" : "1";
  }
  s += "]";
  if (p.refuted_at) s += " refuted_at_level " + std::to_string(*p.refuted_at);
  if (p.period_start)
    s += " periodic from level " + std::to_string(*p.period_start) + " with period " + std::to_string(*p.period_length);
  return s;
}

inline SHProfile sh_profile(const SelfSimilarGroup& g, const Word& w, std::size_t depth) {
  SHProfile profile;
  LevelSections sections(g, w);
  std::map<std::set<Word>, std::size_t> history;
  for (std::size_t level = 0; level <= depth; ++level) {
    if (level > 0) sections.advance();
    const auto& words = sections.current();
    const Perm first = g.root(*words.begin());
    for (const auto& u : words) {
      if (g.root(u) != first) {
        profile.refuted_at = level;
        return profile;
      }
    }
    profile.prefix.push_back(first);
    if (!profile.period_start) {
      auto [it, inserted] = history.emplace(words, level);
      if (!inserted) {
        profile.period_start = it->second;
        profile.period_length = level - it->second;
      }
    }
  }
  return profile;
}

struct DepthResult {
  std::optional<std::size_t> depth;  // empty: not reached within the bound
  std::size_t bound;
};

inline DepthResult finitary_depth(const SelfSimilarGroup& g, const Word& w, std::size_t max_depth) {
  LevelSections sections(g, w);
  for (std::size_t level = 0; level <= max_depth; ++level) {
    if (level > 0) sections.advance();
    bool all_trivial = true;
    for (const auto& u : sections.current()) {
      if (!is_identity_strict(g, u)) {
        all_trivial = false;
        break;
      }
    }
    if (all_trivial) return {level, max_depth};
  }
  return {std::nullopt, max_depth};
}

// Least level on which every section equals s = (s,s) sigma.
inline DepthResult antidepth(const SelfSimilarGroup& g, const Word& w, std::size_t max_depth) {
  const auto [extended, s_index] = g.with_swap_generator();
  const Word s = Word::generator(s_index);
  LevelSections sections(extended, w);
  for (std::size_t level = 0; level <= max_depth; ++level) {
    if (level > 0) sections.advance();
    bool all_swap = true;
    for (const auto& u : sections.current()) {
      // sections with a trivial root cannot be s; skip the word problem
      if (extended.root(u) != Perm::swap || !is_identity_strict(extended, u * s.inverse())) {
        all_swap = false;
        break;
      }
    }
    if (all_swap) return {level, max_depth};
  }
  return {std::nullopt, max_depth};
}

}  // namespace essfree
