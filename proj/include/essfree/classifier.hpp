#pragma once

// The census pipeline over class representatives: Mikhailova witnesses,
// short rigid-stabilizer words, bireversibility, finite closure, diagonal-type
// endomorphisms checked on relators, and citations for the rest.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "essfree/errors.hpp"
#include "essfree/free_group.hpp"
#include "essfree/group.hpp"
#include "essfree/known_ids.hpp"
#include "essfree/mealy.hpp"
#include "essfree/text_format.hpp"
#include "essfree/tree_action.hpp"
#include "essfree/word.hpp"

namespace essfree {

// A first-level rigid stabilizer element: fixes level 1, trivial section at
// one vertex, nontrivial section at the other (side).
struct RistWitness {
  Word element;
  unsigned side = 1;
  Word section;
};

// Checks the rigid-stabilizer condition for w; nullopt if it fails or the
// word problem is undecided.
inline std::optional<RistWitness> check_rist1(const SelfSimilarGroup& g, const Word& w) {
  const Word e = g.strip(w);
  if (g.root(e) != Perm::identity) return std::nullopt;
  const auto d = g.decompose(e);
  const Decision t0 = is_identity(g, d.section0);
  const Decision t1 = is_identity(g, d.section1);
  if (t0 == Decision::yes && t1 == Decision::no) return RistWitness{e, 1, d.section1};
  if (t1 == Decision::yes && t0 == Decision::no) return RistWitness{e, 0, d.section0};
  return std::nullopt;
}

namespace detail {

// Elements of a group bucketed by their action on a fixed level; membership
// is decided exactly with the word problem.
class ElementTable {
 public:
  ElementTable(const SelfSimilarGroup& g, std::size_t level) : g_(g), level_(level) {}

  // Inserts w unless an equal element is present; returns true if inserted.
  bool insert(const Word& w) {
    auto& bucket = buckets_[perm_on_level(g_, w, level_)];
    for (const auto& u : bucket) {
      const Decision d = equal(g_, w, u);
      if (d == Decision::yes) return false;
      if (d == Decision::exhausted)
        throw BudgetExceeded("node_cap", "could not compare " + format_word(w, g_.names()) + " with " +
                                             format_word(u, g_.names()));
    }
    bucket.push_back(w);
    ++size_;
    return true;
  }

  bool contains(const Word& w) const {
    auto it = buckets_.find(perm_on_level(g_, w, level_));
    if (it == buckets_.end()) return false;
    for (const auto& u : it->second)
      if (equal(g_, w, u) == Decision::yes) return true;
    return false;
  }

  std::size_t size() const noexcept { return size_; }

 private:
  const SelfSimilarGroup& g_;
  std::size_t level_;
  std::map<PointPerm, std::vector<Word>> buckets_;
  std::size_t size_ = 0;
};

}  // namespace detail

// Shortlex search (a < b < c < a^-1 < b^-1 < c^-1) over reduced words up to
// max_len for a first-level rigid stabilizer element. Words equal in G to an
// earlier word are not extended.
inline std::optional<RistWitness> brute_force_rist1(const MealyAutomaton& a, std::size_t max_len = 5) {
  constexpr std::size_t signature_level = 6;
  const auto g = SelfSimilarGroup::from_automaton(a);
  const std::size_t n = g.generator_count();
  std::vector<Letter> letters;
  for (std::size_t r = 0; r < 2 * n; ++r) letters.push_back(make_letter(r % n, r >= n));

  std::map<PointPerm, std::vector<Word>> seen;
  auto is_new = [&](const Word& w, const PointPerm& sig) {
    auto& bucket = seen[sig];
    for (const auto& u : bucket)
      if (equal(g, w, u) == Decision::yes) return false;
    bucket.push_back(w);
    return true;
  };

  const std::size_t half = std::size_t{1} << (signature_level - 1);
  auto section_moves = [&](const PointPerm& p, unsigned x) {
    for (std::size_t v = 0; v < half; ++v)
      if (p[x * half + v] != x * half + v) return true;
    return false;
  };

  is_new(Word{}, perm_on_level(g, Word{}, signature_level));
  std::vector<Word> frontier{Word{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const auto& base : frontier) {
      for (Letter l : letters) {
        if (!base.empty() && base[base.size() - 1] == inverse_letter(l)) continue;
        Word w = base;
        w.push_back(l);
        const PointPerm sig = perm_on_level(g, w, signature_level);
        if (!is_new(w, sig)) continue;
        next.push_back(w);
        if (g.root(w) != Perm::identity) continue;
        // cheap screen: some section must act trivially on the next levels
        if (section_moves(sig, 0) && section_moves(sig, 1)) continue;
        if (auto hit = check_rist1(g, w)) return hit;
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

struct FiniteGroupCertificate {
  std::size_t order = 0;
  std::size_t elements_checked = 0;  // nonidentity elements tested against the rigid stabilizer
};

// Closes the generators under right multiplication up to element_cap
// elements. A certificate is returned when the closure is finite, closed
// under inversion, and no nonidentity element lies in the first-level rigid
// stabilizer.
inline std::optional<FiniteGroupCertificate> finite_group_certificate(const MealyAutomaton& a,
                                                                      std::size_t element_cap = 256) {
  constexpr std::size_t signature_level = 6;
  const auto g = SelfSimilarGroup::from_automaton(a);
  detail::ElementTable table(g, signature_level);
  std::vector<Word> elements{Word{}};
  table.insert(Word{});
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t gen = 0; gen < g.generator_count(); ++gen) {
      Word w = g.strip(elements[i] * Word::generator(gen));
      if (table.insert(w)) {
        if (table.size() > element_cap) return std::nullopt;
        elements.push_back(std::move(w));
      }
    }
  }
  for (const auto& e : elements)
    if (!table.contains(e.inverse())) throw InternalError("finite closure is not closed under inversion");
  FiniteGroupCertificate cert{elements.size(), 0};
  for (std::size_t i = 1; i < elements.size(); ++i) {
    ++cert.elements_checked;
    if (check_rist1(g, elements[i])) return std::nullopt;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Classes under minimal symmetry

// All 5832 automata grouped by canonical key; classes and their members are
// in increasing order of id.
inline const std::vector<std::vector<int>>& symmetry_classes() {
  static const std::vector<std::vector<int>> classes = [] {
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<int>> out;
    for (int id = 1; id <= kAutomatonCount; ++id) {
      const auto key = canonical_key(automaton_from_number(AutomatonId(id)));
      auto [it, inserted] = index.emplace(key, out.size());
      if (inserted) out.emplace_back();
      out[it->second].push_back(id);
    }
    return out;
  }();
  return classes;
}

// Least id in the class of id.
inline int class_representative(int id) {
  static const std::vector<int> rep = [] {
    std::vector<int> r(kAutomatonCount + 1, 0);
    for (const auto& c : symmetry_classes())
      for (int member : c) r[member] = c.front();
    return r;
  }();
  return rep.at(AutomatonId(id).value());
}

inline std::size_t class_size(int id) {
  const int rep = class_representative(id);
  for (const auto& c : symmetry_classes())
    if (c.front() == rep) return c.size();
  return 0;
}

// ---------------------------------------------------------------------------
// Hints and certificates

struct Hint {
  enum class Kind { diagonal, manual, witness };
  Kind kind = Kind::manual;
  std::map<std::string, std::string> phi;        // expected images, compared in G
  std::map<std::string, std::string> preimages;  // generator -> word whose image is that generator
  std::vector<std::string> relators;
  long long family_bound = 20;
  std::string cite;
  std::string element;  // witness kind: a rigid-stabilizer word
  std::string note;     // carried into the certificate
};

using Hints = std::map<int, Hint>;

enum class Verdict { not_free, free, unresolved };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::not_free: return "NotFree";
    case Verdict::free: return "Free";
    case Verdict::unresolved: return "Unresolved";
  }
  return "?";
}

enum class Stage { mikhailova, brute_force, hint_witness, bireversible, finite_group, diagonal, manual, none };

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::mikhailova: return "mikhailova";
    case Stage::brute_force: return "brute_force";
    case Stage::hint_witness: return "hint_witness";
    case Stage::bireversible: return "bireversible";
    case Stage::finite_group: return "finite_group";
    case Stage::diagonal: return "diagonal";
    case Stage::manual: return "manual";
    case Stage::none: return "none";
  }
  return "?";
}

struct Certificate {
  Verdict verdict = Verdict::unresolved;
  Stage stage = Stage::none;
  bool verified = false;  // every claim was checked by the library

  // not free
  std::string element;
  unsigned side = 1;
  std::string section0;
  std::string section1;
  std::string kernel;  // mikhailova kernel word

  // finite group
  std::size_t order = 0;
  std::size_t elements_checked = 0;

  // diagonal
  std::vector<std::pair<std::string, std::string>> phi;
  std::size_t relators_checked = 0;
  long long family_bound = 0;
  bool truncated_family = false;

  std::string cite;
  std::string note;
  std::vector<std::string> diagnostics;
};

struct ClassifyOptions {
  std::size_t max_len = 5;
  std::size_t element_cap = 256;
  long long family_bound = 20;  // used when a hint does not set its own
  bool require_self_replicating = true;
  Budget budget{};
};

class StageCollision : public InternalError {
 public:
  using InternalError::InternalError;
};

namespace detail {

inline Certificate not_free_certificate(const SelfSimilarGroup& g, Stage stage, const RistWitness& w) {
  Certificate c;
  c.verdict = Verdict::not_free;
  c.stage = stage;
  c.verified = true;
  const auto names = g.names();
  const auto d = g.decompose(w.element);
  c.element = format_word(w.element, names);
  c.side = w.side;
  c.section0 = format_word(d.section0, names);
  c.section1 = format_word(d.section1, names);
  return c;
}

// Re-parses the witness text over the unminimized automaton and checks it.
inline RistWitness reverify(const SelfSimilarGroup& g, const std::string& text) {
  const Word w = g.strip(parse_word(text, [&](const std::string& n) -> std::optional<Word> {
    if (auto i = g.find(n)) return Word::generator(*i);
    return std::nullopt;
  }));
  auto r = check_rist1(g, w);
  if (!r) throw InternalError("witness " + text + " does not lie in the first-level rigid stabilizer");
  return *r;
}

}  // namespace detail

// Stage 1 verdict: a Mikhailova kernel word nontrivial in G. With
// require_self_replicating the first coordinates must reduce to the free
// generators, which is the setting the method is designed for.
inline std::optional<MikhailovaWitness> mikhailova_stage(const MealyAutomaton& a, bool require_self_replicating) {
  const FreeCover cover(a);
  const auto sys = mikhailova_system(cover);
  if (require_self_replicating && !first_coordinates_full(cover, sys)) return std::nullopt;
  return mikhailova_witness(cover, sys);
}

struct MikhailovaFilter {
  std::vector<std::pair<int, MikhailovaWitness>> eliminated;
  std::vector<int> remaining;
  std::vector<std::pair<int, std::string>> failures;  // budget problems, kept in remaining
};

inline MikhailovaFilter mikhailova_filter(const std::vector<int>& ids, bool require_self_replicating = true) {
  MikhailovaFilter out;
  for (int id : ids) {
    try {
      if (auto w = mikhailova_stage(automaton_from_number(AutomatonId(id)), require_self_replicating)) {
        out.eliminated.emplace_back(id, *w);
        continue;
      }
    } catch (const BudgetExceeded& e) {
      out.failures.emplace_back(id, e.what());
    }
    out.remaining.push_back(id);
  }
  return out;
}

namespace detail {

inline std::optional<Certificate> diagonal_certificate(const MealyAutomaton& a, const Hint& hint,
                                                       const ClassifyOptions& opt,
                                                       std::vector<std::string>& diagnostics) {
  const FreeCover cover(a);
  const auto sys = mikhailova_system(cover);
  const auto& g = cover.group();
  std::optional<EndoMap> phi = diagonal_type_map(cover, sys);
  bool surjective_in_free_group = phi.has_value();
  if (!phi) {
    if (!first_coordinates_full(cover, sys)) {
      diagnostics.push_back("first coordinates do not reduce to the generators");
      return std::nullopt;
    }
    // second coordinates are not a free basis; surjectivity in G must come
    // from the hint's preimages
    phi = EndoMap{std::vector<Word>(g.generator_count())};
    for (const auto& p : sys.basis_pairs()) {
      const Letter l = p.first[0];
      phi->images[generator_of(l)] = is_inverted(l) ? p.second.inverse() : p.second;
    }
  }
  if (!surjective_in_free_group) {
    for (std::size_t gen : cover.free_generators()) {
      const auto& name = g.recursion(gen).name;
      auto it = hint.preimages.find(name);
      if (it == hint.preimages.end()) {
        diagnostics.push_back("no preimage given for " + name);
        return std::nullopt;
      }
      if (equal(g, phi->apply(cover.word(it->second)), Word::generator(gen)) != Decision::yes) {
        diagnostics.push_back("preimage of " + name + " does not map onto it");
        return std::nullopt;
      }
    }
  }
  for (const auto& [name, text] : hint.phi) {
    const auto gen = g.find(name);
    if (!gen) continue;  // a state merged away by minimization
    if (equal(g, phi->images[*gen], cover.word(text)) != Decision::yes) {
      diagnostics.push_back("computed image of " + name + " differs in G from the expected " + text);
      return std::nullopt;
    }
  }
  const long long bound = hint.family_bound > 0 ? hint.family_bound : opt.family_bound;
  const auto verdict = verify_endo_on_relators(cover, *phi, hint.relators, bound);
  if (!verdict.all_pass) {
    const auto& f = *verdict.first_failure;
    const std::string what = f.result == Decision::no ? "a nonidentity element" : "an undecided word";
    diagnostics.push_back("relator " + f.relator + (f.instance ? " (i=" + std::to_string(f.instance) + ")" : "") +
                          (f.in_image ? " maps to " + what : " is itself " + what + " in G"));
    return std::nullopt;
  }
  Certificate c;
  c.verdict = Verdict::free;
  c.stage = Stage::diagonal;
  c.verified = true;
  for (std::size_t gen : cover.free_generators())
    c.phi.emplace_back(g.recursion(gen).name, cover.format(phi->images[gen]));
  c.relators_checked = verdict.checked;
  c.family_bound = bound;
  c.truncated_family = verdict.truncated_family;
  return c;
}

}  // namespace detail

// Runs the stages in order. NotFree ids are also checked against the
// certificate stages for freeness; a hit there throws StageCollision.
inline Certificate classify_automaton(int id, const Hints& hints, const ClassifyOptions& opt = {}) {
  const MealyAutomaton a = automaton_from_number(AutomatonId(id));
  const auto g = SelfSimilarGroup::from_automaton(a, opt.budget);
  const Hint* hint = nullptr;
  if (auto it = hints.find(id); it != hints.end()) hint = &it->second;
  std::vector<std::string> diagnostics;

  std::optional<Certificate> not_free;
  try {
    if (auto w = mikhailova_stage(a, opt.require_self_replicating)) {
      const FreeCover cover(a);
      auto r = detail::reverify(g, cover.format(w->element));
      not_free = detail::not_free_certificate(g, Stage::mikhailova, r);
      not_free->kernel = cover.format(w->kernel);
    }
  } catch (const BudgetExceeded& e) {
    diagnostics.push_back(std::string("mikhailova: ") + e.what());
  }
  if (!not_free) {
    try {
      if (auto w = brute_force_rist1(a, opt.max_len)) {
        auto r = detail::reverify(g, format_word(w->element, g.names()));
        not_free = detail::not_free_certificate(g, Stage::brute_force, r);
      }
    } catch (const BudgetExceeded& e) {
      diagnostics.push_back(std::string("brute_force: ") + e.what());
    }
  }
  if (!not_free && hint && hint->kind == Hint::Kind::witness) {
    auto r = detail::reverify(g, hint->element);
    not_free = detail::not_free_certificate(g, Stage::hint_witness, r);
  }

  std::optional<Certificate> free;
  if (is_bireversible(a)) {
    free = Certificate{};
    free->verdict = Verdict::free;
    free->stage = Stage::bireversible;
    free->verified = true;
  }
  if (!free) {
    try {
      if (auto f = finite_group_certificate(a, opt.element_cap)) {
        free = Certificate{};
        free->verdict = Verdict::free;
        free->stage = Stage::finite_group;
        free->verified = true;
        free->order = f->order;
        free->elements_checked = f->elements_checked;
      }
    } catch (const BudgetExceeded& e) {
      diagnostics.push_back(std::string("finite_group: ") + e.what());
    }
  }
  if (!free && hint && hint->kind == Hint::Kind::diagonal) {
    try {
      free = detail::diagonal_certificate(a, *hint, opt, diagnostics);
    } catch (const BudgetExceeded& e) {
      diagnostics.push_back(std::string("diagonal: ") + e.what());
    }
  }

  if (not_free && free)
    throw StageCollision("automaton " + std::to_string(id) + " has a " + to_string(not_free->stage) +
                         " witness " + not_free->element + " and a " + to_string(free->stage) + " certificate");

  Certificate result;
  if (not_free) {
    result = *not_free;
  } else if (free) {
    result = *free;
  } else if (hint && hint->kind == Hint::Kind::manual) {
    result.verdict = Verdict::free;
    result.stage = Stage::manual;
    result.verified = false;
    result.cite = hint->cite;
  }
  if (hint && result.stage != Stage::none) result.note = hint->note;
  result.diagnostics = std::move(diagnostics);
  return result;
}

struct ReportEntry {
  int id = 0;
  int representative = 0;
  Certificate certificate;
  double ms = 0;
};

struct ClassificationReport {
  std::vector<ReportEntry> entries;

  std::map<std::string, std::size_t> count_by_verdict() const {
    std::map<std::string, std::size_t> out;
    for (const auto& e : entries) ++out[to_string(e.certificate.verdict)];
    return out;
  }
  std::map<std::string, std::size_t> count_by_stage() const {
    std::map<std::string, std::size_t> out;
    for (const auto& e : entries) ++out[to_string(e.certificate.stage)];
    return out;
  }
  std::vector<int> ids_with(Stage s) const {
    std::vector<int> out;
    for (const auto& e : entries)
      if (e.certificate.stage == s) out.push_back(e.id);
    return out;
  }
  // ids that passed both elimination stages
  std::vector<int> survivors() const {
    std::vector<int> out;
    for (const auto& e : entries)
      if (e.certificate.stage != Stage::mikhailova && e.certificate.stage != Stage::brute_force)
        out.push_back(e.id);
    return out;
  }
};

// Hints are written for class representatives. A non-representative whose
// own stages are inconclusive takes the representative's hinted certificate,
// marked unverified for this id.
inline ReportEntry classify_entry(int id, const Hints& hints, const ClassifyOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  ReportEntry e;
  e.id = id;
  e.representative = class_representative(id);
  e.certificate = classify_automaton(id, hints, opt);
  if (e.representative != id && e.certificate.verdict == Verdict::unresolved &&
      hints.count(e.representative)) {
    auto diagnostics = std::move(e.certificate.diagnostics);
    e.certificate = classify_automaton(e.representative, hints, opt);
    e.certificate.verified = false;
    e.certificate.note = "certificate of representative " + std::to_string(e.representative);
    e.certificate.diagnostics = std::move(diagnostics);
  }
  e.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return e;
}

inline ClassificationReport classify_all(const Hints& hints, const ClassifyOptions& opt = {}) {
  ClassificationReport report;
  for (int id : known::class_list()) report.entries.push_back(classify_entry(id, hints, opt));
  return report;
}

// Free verdicts whose system has the self-replicating shape, excluding
// finite groups and free products. The reason is "finite", "trivial",
// "free_product", "not_self_replicating", "not_free" or "" when the flag is set.
struct ScaleFlag {
  bool scale_invariant = false;
  std::string reason;
};

inline std::map<int, ScaleFlag> scale_invariance_flags(const ClassificationReport& report) {
  std::map<int, ScaleFlag> out;
  for (const auto& e : report.entries) {
    ScaleFlag f;
    if (e.certificate.verdict != Verdict::free) {
      f.reason = "not_free";
    } else if (e.certificate.stage == Stage::finite_group) {
      f.reason = e.certificate.order == 1 ? "trivial" : "finite";
    } else if (e.certificate.stage == Stage::bireversible) {
      // infinite bireversible groups here are free products, which are excluded
      const auto fin = finite_group_certificate(automaton_from_number(AutomatonId(e.id)));
      f.reason = fin ? "finite" : "free_product";
    } else {
      const FreeCover cover(automaton_from_number(AutomatonId(e.id)));
      if (first_coordinates_full(cover, mikhailova_system(cover)))
        f.scale_invariant = true;
      else
        f.reason = "not_self_replicating";
    }
    out.emplace(e.id, f);
  }
  return out;
}

}  // namespace essfree
