#pragma once

// A self-similar group given by wreath recursions g = (g|0, g|1) sigma^e,
// where the sections are words over the generators. Groups generated by Mealy
// automata are the special case where every section is a single generator.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "essfree/errors.hpp"
#include "essfree/mealy.hpp"
#include "essfree/perm.hpp"
#include "essfree/word.hpp"

namespace essfree {

struct Budget {
  std::size_t node_cap = 200000;       // closure nodes, recursion bases
  std::size_t word_length_cap = 10000;  // section word length, recursion bases
  std::size_t max_level = 12;           // perm_on_level and friends
};

struct Recursion {
  std::string name;
  Word section0;
  Word section1;
  Perm root = Perm::identity;
};

class SelfSimilarGroup {
 public:
  SelfSimilarGroup() = default;

  // With strip_trivial, generators acting trivially are erased from words;
  // without it they behave as ordinary letters.
  explicit SelfSimilarGroup(std::vector<Recursion> gens, Budget budget = {}, bool strip_trivial = true)
      : gens_(std::move(gens)), budget_(budget), strip_trivial_(strip_trivial) {
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      for (const Word* w : {&gens_[i].section0, &gens_[i].section1})
        for (Letter l : *w)
          if (generator_of(l) >= gens_.size())
            throw std::invalid_argument("recursion of " + gens_[i].name +
                                        " refers to an undefined generator");
      for (std::size_t j = 0; j < i; ++j)
        if (gens_[j].name == gens_[i].name)
          throw std::invalid_argument("duplicate generator name " + gens_[i].name);
    }
    finish();
  }

  static SelfSimilarGroup from_automaton(const MealyAutomaton& a, Budget budget = {}) {
    if (a.alphabet_size() != 2) throw std::invalid_argument("binary alphabet required");
    if (!is_invertible(a)) throw std::invalid_argument("automaton is not invertible");
    std::vector<Recursion> gens;
    for (State q = 0; q < a.state_count(); ++q)
      gens.push_back({a.name(q), Word::generator(a.next(q, 0)), Word::generator(a.next(q, 1)),
                      a.root(q)});
    SelfSimilarGroup g(std::move(gens), budget);
    return g;
  }

  std::size_t generator_count() const noexcept { return gens_.size(); }
  const Recursion& recursion(std::size_t gen) const { return gens_.at(gen); }
  const std::vector<Recursion>& recursions() const noexcept { return gens_; }
  const Budget& budget() const noexcept { return budget_; }
  void set_budget(Budget b) { budget_ = b; }

  // True when every section is a single generator letter (sections of words
  // never get longer, so closures are finite).
  bool is_length_preserving() const noexcept { return length_preserving_; }

  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& g : gens_) n.push_back(g.name);
    return n;
  }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < gens_.size(); ++i)
      if (gens_[i].name == name) return i;
    return std::nullopt;
  }

  // Generators known to act trivially (all reachable generators have trivial
  // root and single-letter sections staying in that set).
  const std::vector<bool>& trivial_generators() const noexcept { return trivial_; }

  // Drops letters of trivial generators and reduces.
  Word strip(const Word& w) const {
    if (!any_trivial_) return w;
    Word r;
    for (Letter l : w)
      if (!trivial_[generator_of(l)]) r.push_back(l);
    return r;
  }

  Perm root(Letter l) const { return gens_[generator_of(l)].root; }

  Perm root(const Word& w) const {
    Perm p = Perm::identity;
    for (Letter l : w) p *= root(l);
    return p;
  }

  // Section of a single letter at x. For an inverse letter,
  // (g^-1)|x = (g|_{g^-1(x)})^-1.
  const Word& letter_section(Letter l, unsigned x) const { return letter_sections_[l][x]; }

  // Image of a letter under a word: leftmost letter acts first.
  unsigned act_letter(const Word& w, unsigned x) const {
    for (Letter l : w) x = apply(root(l), x);
    return x;
  }

  // Section at a single letter via the product rule.
  Word section_at(const Word& w, unsigned x) const {
    Word r;
    for (Letter l : w) {
      r *= letter_section(l, x);
      x = apply(root(l), x);
    }
    if (!length_preserving_ && r.size() > budget_.word_length_cap)
      throw BudgetExceeded("word_length_cap", "section word longer than " +
                                                  std::to_string(budget_.word_length_cap));
    return strip(r);
  }

  struct Decomposition {
    Word section0;
    Word section1;
    Perm root;
  };

  Decomposition decompose(const Word& w) const { return {section_at(w, 0), section_at(w, 1), root(w)}; }

  // A copy extended by the all-swapping automorphism s = (s,s) sigma, unless a
  // generator named s already exists; returns the index of s as well.
  std::pair<SelfSimilarGroup, std::size_t> with_swap_generator() const {
    std::vector<Recursion> gens = gens_;
    std::string name = "s";
    while (find(name)) name += "'";
    const std::size_t idx = gens.size();
    gens.push_back({name, Word::generator(idx), Word::generator(idx), Perm::swap});
    return {SelfSimilarGroup(std::move(gens), budget_, strip_trivial_), idx};
  }

  // Permutation induced by each generator letter on level n, indexed by
  // letter. Cached per level.
  const std::vector<std::vector<std::uint32_t>>& letter_perms(std::size_t n) const;

 private:
  void finish() {
    length_preserving_ = true;
    for (const auto& g : gens_)
      if (g.section0.size() != 1 || g.section1.size() != 1) length_preserving_ = false;

    letter_sections_.assign(2 * gens_.size(), {});
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      const auto& g = gens_[i];
      letter_sections_[make_letter(i)] = {g.section0, g.section1};
      const unsigned pre0 = apply(g.root, 0);
      const unsigned pre1 = apply(g.root, 1);
      const Word& s0 = pre0 == 0 ? g.section0 : g.section1;
      const Word& s1 = pre1 == 0 ? g.section0 : g.section1;
      letter_sections_[make_letter(i, true)] = {s0.inverse(), s1.inverse()};
    }

    // Greatest fixed point: generators with trivial root whose sections are
    // words over generators in the set.
    trivial_.assign(gens_.size(), strip_trivial_);
    bool changed = strip_trivial_;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (!trivial_[i]) continue;
        const auto& g = gens_[i];
        if (g.root != Perm::identity || !g.section0.uses_only(trivial_) ||
            !g.section1.uses_only(trivial_)) {
          trivial_[i] = false;
          changed = true;
        }
      }
    }
    any_trivial_ = false;
    for (bool t : trivial_) any_trivial_ = any_trivial_ || t;
    for (auto& secs : letter_sections_)
      for (auto& w : secs) w = strip(w);

    cache_ = std::make_shared<Cache>();
  }

  struct Cache {
    std::mutex mutex;
    std::map<std::size_t, std::vector<std::vector<std::uint32_t>>> perms;
  };

  std::vector<Recursion> gens_;
  Budget budget_;
  bool strip_trivial_ = true;
  bool length_preserving_ = true;
  std::vector<std::array<Word, 2>> letter_sections_;
  std::vector<bool> trivial_;
  bool any_trivial_ = false;
  std::shared_ptr<Cache> cache_;
};

// Level-n permutation arrays: p[v] is the image index of vertex v, with the
// leftmost letter most significant.
inline const std::vector<std::vector<std::uint32_t>>& SelfSimilarGroup::letter_perms(std::size_t n) const {
  if (n > budget_.max_level)
    throw BudgetExceeded("max_level", "level " + std::to_string(n) + " exceeds the configured maximum " +
                                          std::to_string(budget_.max_level));
  {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->perms.find(n);
    if (it != cache_->perms.end()) return it->second;
  }
  const std::size_t letters = 2 * gens_.size();
  std::vector<std::vector<std::uint32_t>> result(letters);
  if (n == 0) {
    for (auto& p : result) p.assign(1, 0);
  } else {
    const auto& lower = letter_perms(n - 1);
    const std::size_t half = std::size_t{1} << (n - 1);
    auto word_perm = [&](const Word& w) {
      std::vector<std::uint32_t> p(half);
      for (std::size_t v = 0; v < half; ++v) p[v] = static_cast<std::uint32_t>(v);
      for (Letter l : w)
        for (auto& x : p) x = lower[l][x];
      return p;
    };
    for (Letter l = 0; l < letters; ++l) {
      std::vector<std::uint32_t> p(2 * half);
      for (unsigned x = 0; x < 2; ++x) {
        const auto sub = word_perm(letter_section(l, x));
        const std::size_t image_top = apply(root(l), x);
        for (std::size_t v = 0; v < half; ++v)
          p[x * half + v] = static_cast<std::uint32_t>(image_top * half + sub[v]);
      }
      result[l] = std::move(p);
    }
  }
  std::lock_guard lock(cache_->mutex);
  return cache_->perms.emplace(n, std::move(result)).first->second;
}

}  // namespace essfree
