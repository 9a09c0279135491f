#pragma once

// Free-group side of the level-1 stabilizer: Schreier generators of the
// index-2 subgroup of the free group, their wreath decomposition into pairs,
// Nielsen reduction driven by first coordinates, Mikhailova systems, the
// diagonal-type endomorphism and its verification on relators.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "essfree/errors.hpp"
#include "essfree/group.hpp"
#include "essfree/mealy.hpp"
#include "essfree/text_format.hpp"
#include "essfree/tree_action.hpp"
#include "essfree/word.hpp"

namespace essfree {

// The free group mapping onto G. In the reduced form the automaton is first
// minimized and states acting trivially are sent to the empty word, so free
// generators correspond to distinct nontrivial states.
class FreeCover {
 public:
  enum class Mode { raw, reduced };

  explicit FreeCover(const MealyAutomaton& a, Mode mode = Mode::reduced) : mode_(mode) {
    if (!is_invertible(a)) throw std::invalid_argument("automaton is not invertible");
    if (mode == Mode::reduced) {
      auto m = minimize_with_map(a);
      automaton_ = std::move(m.automaton);
      block_of_ = std::move(m.block_of);
      group_ = SelfSimilarGroup::from_automaton(automaton_);
    } else {
      automaton_ = a;
      for (State q = 0; q < a.state_count(); ++q) block_of_.push_back(q);
      std::vector<Recursion> gens;
      for (State q = 0; q < a.state_count(); ++q)
        gens.push_back({a.name(q), Word::generator(a.next(q, 0)), Word::generator(a.next(q, 1)), a.root(q)});
      group_ = SelfSimilarGroup(std::move(gens), Budget{}, /*strip_trivial=*/false);
    }
    original_names_ = a.names();
  }

  Mode mode() const noexcept { return mode_; }
  const MealyAutomaton& automaton() const noexcept { return automaton_; }
  const SelfSimilarGroup& group() const noexcept { return group_; }
  std::vector<std::string> names() const { return group_.names(); }

  // Generators of the free group, in state order.
  std::vector<std::size_t> free_generators() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < group_.generator_count(); ++i)
      if (!group_.trivial_generators()[i]) out.push_back(i);
    return out;
  }

  // Resolves the names of the original automaton's states.
  NameResolver resolver() const {
    return [this](const std::string& name) -> std::optional<Word> {
      for (std::size_t q = 0; q < original_names_.size(); ++q)
        if (original_names_[q] == name) return group_.strip(Word::generator(block_of_[q]));
      return std::nullopt;
    };
  }

  Word word(std::string_view text) const { return group_.strip(parse_word(text, resolver())); }
  std::string format(const Word& w) const { return format_word(w, group_.names()); }

 private:
  Mode mode_;
  MealyAutomaton automaton_;
  std::vector<State> block_of_;
  std::vector<std::string> original_names_;
  SelfSimilarGroup group_;
};

struct PairedWord {
  Word first;
  Word second;
  friend bool operator==(const PairedWord&, const PairedWord&) = default;
};

struct StabilizerGenerators {
  std::optional<std::size_t> transversal;  // the generator g0 in {1, g0}; none if St(1) = G
  std::vector<Word> generators;
};

inline StabilizerGenerators stabilizer1_generators(const FreeCover& cover) {
  const auto& g = cover.group();
  const auto gens = cover.free_generators();
  StabilizerGenerators out;
  for (std::size_t x : gens)
    if (g.recursion(x).root == Perm::swap) {
      out.transversal = x;
      break;
    }
  auto add = [&](Word w) {
    if (w.empty()) return;
    if (std::find(out.generators.begin(), out.generators.end(), w) == out.generators.end())
      out.generators.push_back(std::move(w));
  };
  if (!out.transversal) {
    for (std::size_t x : gens) add(Word::generator(x));
    return out;
  }
  const Word t = Word::generator(*out.transversal);
  // coset 1
  for (std::size_t x : gens) {
    const Word wx = Word::generator(x);
    add(g.recursion(x).root == Perm::swap ? wx * t.inverse() : wx);
  }
  // coset t
  for (std::size_t x : gens) {
    const Word wx = Word::generator(x);
    add(g.recursion(x).root == Perm::swap ? t * wx : t * wx * t.inverse());
  }
  return out;
}

inline PairedWord wreath_decompose_free(const FreeCover& cover, const Word& w) {
  const auto& g = cover.group();
  if (g.root(w) != Perm::identity)
    throw std::invalid_argument("word " + cover.format(w) + " does not fix the first level");
  return {g.section_at(w, 0), g.section_at(w, 1)};
}

// ---------------------------------------------------------------------------
// Nielsen reduction of a tuple of pairs, driven by the first coordinates.

struct NielsenMove {
  enum class Kind { right, left } kind;  // right: u_i <- u_i u_j^e, left: u_i <- u_j^e u_i
  std::size_t target;
  std::size_t source;
  int exponent;
};

// Tuple entries carry the pair and the stabilizer element producing it.
struct TrackedPair {
  Word first;
  Word second;
  Word element;
};

inline Word power_sign(const Word& w, int e) { return e > 0 ? w : w.inverse(); }

inline void apply_move(std::vector<TrackedPair>& tuple, const NielsenMove& m) {
  if (m.target == m.source) throw InternalError("Nielsen move with equal target and source");
  TrackedPair& t = tuple.at(m.target);
  const TrackedPair& s = tuple.at(m.source);
  if (m.kind == NielsenMove::Kind::right) {
    t.first *= power_sign(s.first, m.exponent);
    t.second *= power_sign(s.second, m.exponent);
    t.element *= power_sign(s.element, m.exponent);
  } else {
    t.first = power_sign(s.first, m.exponent) * t.first;
    t.second = power_sign(s.second, m.exponent) * t.second;
    t.element = power_sign(s.element, m.exponent) * t.element;
  }
}

inline NielsenMove inverse_move(NielsenMove m) {
  m.exponent = -m.exponent;
  return m;
}

struct NielsenResult {
  std::vector<TrackedPair> input;
  std::vector<TrackedPair> output;  // same positions as the input
  std::vector<NielsenMove> moves;
  std::vector<std::size_t> basis;   // positions with nontrivial first coordinate, shortlex order
  std::vector<std::size_t> kernel;  // positions with trivial first and nontrivial second coordinate
};

namespace detail {

inline bool starts_with(const Word& w, const Word& prefix) {
  if (prefix.size() > w.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), w.begin());
}

inline Word prefix(const Word& w, std::size_t n) {
  return Word(std::vector<Letter>(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n)));
}

}  // namespace detail

inline NielsenResult nielsen_reduce_tracked(std::vector<TrackedPair> tuple, std::size_t generator_count) {
  NielsenResult result;
  result.input = tuple;
  const std::size_t n = tuple.size();
  auto active = [&](std::size_t i) { return !tuple[i].first.empty(); };
  auto less = [&](const Word& a, const Word& b) { return shortlex_less(a, b, generator_count); };

  while (true) {
    // Length-reducing moves: pick the largest reduction, ties by the
    // shortlex-least resulting first coordinate.
    std::optional<NielsenMove> best;
    std::size_t best_gain = 0;
    Word best_word;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active(i)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !active(j)) continue;
        for (int e : {1, -1}) {
          const Word sj = power_sign(tuple[j].first, e);
          for (auto kind : {NielsenMove::Kind::right, NielsenMove::Kind::left}) {
            const Word w = kind == NielsenMove::Kind::right ? tuple[i].first * sj : sj * tuple[i].first;
            if (w.size() >= tuple[i].first.size()) continue;
            const std::size_t gain = tuple[i].first.size() - w.size();
            if (!best || gain > best_gain || (gain == best_gain && less(w, best_word))) {
              best = NielsenMove{kind, i, j, e};
              best_gain = gain;
              best_word = w;
            }
          }
        }
      }
    }
    if (best) {
      apply_move(tuple, *best);
      result.moves.push_back(*best);
      continue;
    }

    // Half-cancellation conflicts: y = y1 y2 with |y1| = |y2|, some a != y
    // starting with y1 and some z != y^-1 starting with y2^-1. Replace
    // whichever of a, z starts with the lexicographically larger half.
    std::optional<NielsenMove> fix;
    for (std::size_t j = 0; j < n && !fix; ++j) {
      if (!active(j) || tuple[j].first.size() % 2 != 0) continue;
      for (int e : {1, -1}) {
        const Word y = power_sign(tuple[j].first, e);
        const std::size_t m = y.size() / 2;
        const Word y1 = detail::prefix(y, m);
        const Word y2inv = detail::prefix(y.inverse(), m);
        std::optional<std::pair<std::size_t, int>> a;
        std::optional<std::pair<std::size_t, int>> z;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == j || !active(i)) continue;
          for (int f : {1, -1}) {
            const Word u = power_sign(tuple[i].first, f);
            if (!a && detail::starts_with(u, y1)) a = std::pair{i, f};
            if (!z && detail::starts_with(u, y2inv)) z = std::pair{i, f};
          }
        }
        if (!a || !z) continue;
        bool y2inv_smaller = false;
        for (std::size_t k = 0; k < m; ++k) {
          if (y2inv[k] != y1[k]) {
            y2inv_smaller = letter_rank(y2inv[k], generator_count) < letter_rank(y1[k], generator_count);
            break;
          }
        }
        if (y2inv_smaller) {
          // a <- y^-1 a
          const auto [i, f] = *a;
          fix = f > 0 ? NielsenMove{NielsenMove::Kind::left, i, j, -e} : NielsenMove{NielsenMove::Kind::right, i, j, e};
        } else {
          // z <- y z
          const auto [i, f] = *z;
          fix = f > 0 ? NielsenMove{NielsenMove::Kind::left, i, j, e} : NielsenMove{NielsenMove::Kind::right, i, j, -e};
        }
        break;
      }
    }
    if (!fix) break;
    const std::size_t before = tuple[fix->target].first.size();
    apply_move(tuple, *fix);
    result.moves.push_back(*fix);
    if (tuple[fix->target].first.size() != before) throw InternalError("half-cancellation move changed a length");
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!tuple[i].first.empty())
      result.basis.push_back(i);
    else if (!tuple[i].second.empty())
      result.kernel.push_back(i);
  }
  std::stable_sort(result.basis.begin(), result.basis.end(),
                   [&](std::size_t x, std::size_t y) { return less(tuple[x].first, tuple[y].first); });
  result.output = std::move(tuple);
  return result;
}

inline NielsenResult nielsen_reduce_paired(const std::vector<PairedWord>& pairs, std::size_t generator_count) {
  std::vector<TrackedPair> tuple;
  for (const auto& p : pairs) tuple.push_back({p.first, p.second, {}});
  return nielsen_reduce_tracked(std::move(tuple), generator_count);
}

// Nielsen-reduced generating set of the subgroup generated by words.
inline std::vector<Word> nielsen_reduce(const std::vector<Word>& words, std::size_t generator_count) {
  std::vector<PairedWord> pairs;
  for (const auto& w : words) pairs.push_back({w, {}});
  const auto r = nielsen_reduce_paired(pairs, generator_count);
  std::vector<Word> out;
  for (std::size_t i : r.basis) out.push_back(r.output[i].first);
  return out;
}

// True when a Nielsen-reduced set is a free basis of the group on `gens`:
// exactly one of x, x^-1 for each generator.
inline bool is_letter_basis(const std::vector<Word>& reduced, const std::vector<std::size_t>& gens) {
  if (reduced.size() != gens.size()) return false;
  std::vector<std::size_t> seen;
  for (const auto& w : reduced) {
    if (w.size() != 1) return false;
    seen.push_back(generator_of(w[0]));
  }
  std::sort(seen.begin(), seen.end());
  return seen == gens;
}

// ---------------------------------------------------------------------------
// Mikhailova systems

struct MikhailovaSystem {
  StabilizerGenerators stabilizer;
  NielsenResult reduction;

  std::vector<PairedWord> basis_pairs() const {
    std::vector<PairedWord> out;
    for (std::size_t i : reduction.basis) out.push_back({reduction.output[i].first, reduction.output[i].second});
    return out;
  }
  std::vector<Word> kernel_words() const {
    std::vector<Word> out;
    for (std::size_t i : reduction.kernel) out.push_back(reduction.output[i].second);
    return out;
  }
};

inline MikhailovaSystem mikhailova_system(const FreeCover& cover) {
  MikhailovaSystem sys;
  sys.stabilizer = stabilizer1_generators(cover);
  std::vector<TrackedPair> tuple;
  for (const auto& s : sys.stabilizer.generators) {
    const auto p = wreath_decompose_free(cover, s);
    tuple.push_back({p.first, p.second, s});
  }
  sys.reduction = nielsen_reduce_tracked(std::move(tuple), cover.group().generator_count());
  return sys;
}

struct MikhailovaWitness {
  Word element;  // stabilizer word acting as (1, kernel)
  Word kernel;
};

// First kernel word that is nontrivial in G, with the element producing it.
inline std::optional<MikhailovaWitness> mikhailova_witness(const FreeCover& cover, const MikhailovaSystem& sys) {
  for (std::size_t i : sys.reduction.kernel) {
    const auto& entry = sys.reduction.output[i];
    if (!is_identity_strict(cover.group(), entry.second)) return MikhailovaWitness{entry.element, entry.second};
  }
  return std::nullopt;
}

inline std::optional<MikhailovaWitness> mikhailova_witness(const MealyAutomaton& a) {
  const FreeCover cover(a);
  return mikhailova_witness(cover, mikhailova_system(cover));
}

// ---------------------------------------------------------------------------
// Diagonal type

struct EndoMap {
  std::vector<Word> images;  // indexed by generator; trivial generators map to 1

  Word apply(const Word& w) const { return w.substitute(images); }
};

// True when the basis first coordinates are the free generators (H = F).
inline bool first_coordinates_full(const FreeCover& cover, const MikhailovaSystem& sys) {
  std::vector<Word> firsts;
  for (const auto& p : sys.basis_pairs()) firsts.push_back(p.first);
  return is_letter_basis(firsts, cover.free_generators());
}

inline std::optional<EndoMap> diagonal_type_map(const FreeCover& cover, const MikhailovaSystem& sys) {
  if (!first_coordinates_full(cover, sys)) return std::nullopt;
  const auto& g = cover.group();
  EndoMap phi;
  phi.images.assign(g.generator_count(), Word{});
  std::vector<Word> seconds;
  for (const auto& p : sys.basis_pairs()) {
    const Letter l = p.first[0];
    phi.images[generator_of(l)] = is_inverted(l) ? p.second.inverse() : p.second;
    seconds.push_back(phi.images[generator_of(l)]);
  }
  if (!is_letter_basis(nielsen_reduce(seconds, g.generator_count()), cover.free_generators())) return std::nullopt;
  return phi;
}

inline std::optional<EndoMap> diagonal_type_map(const MealyAutomaton& a) {
  const FreeCover cover(a);
  return diagonal_type_map(cover, mikhailova_system(cover));
}

// ---------------------------------------------------------------------------
// Relator verification

struct RelatorCheck {
  std::string relator;   // text as given, family exponent marked {i}
  long long instance;    // family exponent, 0 for plain relators
  Decision result;
  bool in_image;         // false when the relator itself fails in G
};

struct RelatorVerdict {
  bool all_pass = true;
  std::size_t checked = 0;
  long long family_bound = 0;
  bool truncated_family = false;  // some relator was a family cut at family_bound
  std::optional<RelatorCheck> first_failure;
};

// Instantiates families for i = 1..family_bound, checks that each relator
// holds in G, maps it through phi and tests the image in G.
inline RelatorVerdict verify_endo_on_relators(const FreeCover& cover, const EndoMap& phi,
                                              const std::vector<std::string>& relators, long long family_bound) {
  RelatorVerdict verdict;
  verdict.family_bound = family_bound;
  for (const auto& text : relators) {
    const bool family = is_family(text);
    verdict.truncated_family = verdict.truncated_family || family;
    const long long lo = family ? 1 : 0;
    const long long hi = family ? family_bound : 0;
    for (long long i = lo; i <= hi; ++i) {
      const Word r = cover.word(family ? substitute_family(text, i) : text);
      ++verdict.checked;
      for (const bool image : {false, true}) {
        const Decision d = is_identity(cover.group(), image ? phi.apply(r) : r);
        if (d != Decision::yes) {
          verdict.all_pass = false;
          verdict.first_failure = RelatorCheck{text, i, d, image};
          return verdict;
        }
      }
    }
  }
  return verdict;
}

}  // namespace essfree
