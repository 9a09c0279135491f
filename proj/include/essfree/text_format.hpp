#pragma once

// Text syntax for words and wreath recursions.
//
//   words:       a*b^-1*c^2, (a*c^-1)^a (conjugation), [a,b] (commutator)
//   recursions:  a=(c,b)(0,1), b=(a,a)(0,1), c=(a,a)
//                x=(y,x^-1)(1,2), y=(y^-1,x)
//   aliases:     t := a*c^-1
//
// Entries are separated by commas or newlines; '#' starts a comment. A
// literal {i} inside a word is replaced by a family exponent before parsing.

#include <cctype>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "essfree/errors.hpp"
#include "essfree/group.hpp"
#include "essfree/mealy.hpp"
#include "essfree/word.hpp"

namespace essfree {

// Resolves a name to a word; returns nullopt for unknown names.
using NameResolver = std::function<std::optional<Word>(const std::string&)>;

namespace detail {

class WordParser {
 public:
  WordParser(std::string_view text, const NameResolver& resolve) : text_(text), resolve_(resolve) {}

  Word parse() {
    Word w = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return w;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("word \"" + std::string(text_) + "\" at position " + std::to_string(pos_) + ": " + msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Word expr() {
    Word w = term();
    while (accept('*')) w *= term();
    return w;
  }

  std::optional<long long> integer() {
    skip_space();
    std::size_t p = pos_;
    bool neg = false;
    if (p < text_.size() && (text_[p] == '-' || text_[p] == '+')) {
      neg = text_[p] == '-';
      ++p;
    }
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    if (p >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[p]))) return std::nullopt;
    long long v = 0;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
      v = v * 10 + (text_[p] - '0');
      if (v > 1000000) fail("exponent too large");
      ++p;
    }
    pos_ = p;
    return neg ? -v : v;
  }

  Word term() {
    Word w = factor();
    while (accept('^')) {
      if (auto k = integer()) {
        w = w.pow(*k);
      } else if (accept('-')) {
        // g^-h is read as (g^h)^-1
        w = w.conjugate(factor()).inverse();
      } else {
        w = w.conjugate(factor());
      }
    }
    return w;
  }

  Word factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Word w = expr();
      expect(')');
      return w;
    }
    if (c == '[') {
      ++pos_;
      Word g = expr();
      expect(',');
      Word h = expr();
      expect(']');
      return commutator(g, h);
    }
    if (c == '1') {
      ++pos_;
      return {};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '\''))
        ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      if (auto w = resolve_(name)) return *w;
      pos_ = start;
      fail("unknown generator '" + name + "'");
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  const NameResolver& resolve_;
  std::size_t pos_ = 0;
};

inline std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Splits on commas and newlines outside brackets, dropping comments and
// blank entries.
inline std::vector<std::string> split_entries(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  bool comment = false;
  for (char c : text) {
    if (comment) {
      if (c == '\n') comment = false;
      else continue;
    }
    if (c == '#') {
      comment = true;
      continue;
    }
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == '\n' || (c == ',' && depth == 0)) {
      if (auto t = trim(cur); !t.empty()) out.push_back(t);
      cur.clear();
      if (c == '\n') depth = 0;
      continue;
    }
    cur += c;
  }
  if (auto t = trim(cur); !t.empty()) out.push_back(t);
  return out;
}

// Splits "(u,v)" into u and v at the top-level comma.
inline std::pair<std::string, std::string> split_pair(std::string_view inner) {
  int depth = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const char c = inner[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) return {trim(inner.substr(0, i)), trim(inner.substr(i + 1))};
  }
  throw ParseError("expected a pair of sections in \"(" + std::string(inner) + ")\"");
}

// Matching close paren for the '(' at position open.
inline std::size_t matching_paren(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '(' || s[i] == '[') ++depth;
    if (s[i] == ')' || s[i] == ']') {
      if (--depth == 0) return i;
    }
  }
  throw ParseError("unbalanced parentheses in \"" + std::string(s) + "\"");
}

inline Perm parse_root(std::string_view text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty() || t == "()" || t == "1") return Perm::identity;
  if (t == "(0,1)" || t == "(1,2)" || t == "s" || t == "sigma") return Perm::swap;
  throw ParseError("unknown root permutation \"" + std::string(text) + "\"");
}

}  // namespace detail

inline std::string substitute_family(std::string_view text, long long i) {
  std::string out;
  const std::string token = "{i}";
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = text.find(token, pos);
    if (hit == std::string_view::npos) {
      out += text.substr(pos);
      return out;
    }
    out += text.substr(pos, hit - pos);
    out += std::to_string(i);
    pos = hit + token.size();
  }
}

inline bool is_family(std::string_view text) { return text.find("{i}") != std::string_view::npos; }

inline Word parse_word(std::string_view text, const NameResolver& resolve) {
  return detail::WordParser(text, resolve).parse();
}

// A group together with named aliases for words, as loaded from a recursion
// file or built from a numbered automaton.
struct GroupSpec {
  SelfSimilarGroup group;
  std::map<std::string, std::string> alias_text;  // alias -> defining text
  std::vector<std::string> alias_order;
  std::map<std::string, Word> aliases;

  NameResolver resolver() const {
    return [this](const std::string& name) -> std::optional<Word> {
      if (auto g = group.find(name)) return Word::generator(*g);
      if (auto it = aliases.find(name); it != aliases.end()) return it->second;
      return std::nullopt;
    };
  }

  Word word(std::string_view text) const { return group.strip(parse_word(text, resolver())); }
};

inline GroupSpec group_spec_from_automaton(const MealyAutomaton& a, Budget budget = {}) {
  return GroupSpec{SelfSimilarGroup::from_automaton(a, budget), {}, {}, {}};
}

inline GroupSpec parse_group_spec(std::string_view text, Budget budget = {}) {
  struct Pending {
    std::string name;
    std::string s0;
    std::string s1;
    Perm root;
  };
  std::vector<Pending> pending;
  std::vector<std::pair<std::string, std::string>> alias_defs;
  for (const auto& entry : detail::split_entries(text)) {
    if (const auto p = entry.find(":="); p != std::string::npos) {
      alias_defs.emplace_back(detail::trim(entry.substr(0, p)), detail::trim(entry.substr(p + 2)));
      continue;
    }
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw ParseError("expected name=(u,v)perm in \"" + entry + "\"");
    const std::string name = detail::trim(entry.substr(0, eq));
    const std::string rhs = detail::trim(entry.substr(eq + 1));
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0])))
      throw ParseError("bad generator name in \"" + entry + "\"");
    if (rhs.empty() || rhs[0] != '(') throw ParseError("expected '(' after '=' in \"" + entry + "\"");
    const std::size_t close = detail::matching_paren(rhs, 0);
    auto [s0, s1] = detail::split_pair(std::string_view(rhs).substr(1, close - 1));
    pending.push_back({name, s0, s1, detail::parse_root(std::string_view(rhs).substr(close + 1))});
  }
  if (pending.empty()) throw ParseError("no generators defined");

  std::vector<std::string> names;
  for (const auto& p : pending) names.push_back(p.name);
  NameResolver gens_only = [&](const std::string& n) -> std::optional<Word> {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return Word::generator(i);
    return std::nullopt;
  };
  std::vector<Recursion> recs;
  for (const auto& p : pending)
    recs.push_back({p.name, parse_word(p.s0, gens_only), parse_word(p.s1, gens_only), p.root});

  GroupSpec spec{SelfSimilarGroup(std::move(recs), budget), {}, {}, {}};
  for (const auto& [alias, def] : alias_defs) {
    if (spec.group.find(alias) || spec.aliases.count(alias))
      throw ParseError("alias " + alias + " shadows an existing name");
    spec.aliases.emplace(alias, spec.word(def));
    spec.alias_text.emplace(alias, def);
    spec.alias_order.push_back(alias);
  }
  return spec;
}

inline std::string format_recursion(const SelfSimilarGroup& g) {
  std::string out;
  const auto names = g.names();
  for (std::size_t i = 0; i < g.generator_count(); ++i) {
    const auto& r = g.recursion(i);
    if (i) out += ", ";
    out += r.name + "=(" + format_word(r.section0, names) + "," + format_word(r.section1, names) + ")";
    if (r.root == Perm::swap) out += "(0,1)";
  }
  return out;
}

inline std::string format_automaton(const MealyAutomaton& a) {
  if (a.alphabet_size() != 2) throw std::invalid_argument("only binary automata have a text form");
  std::string out;
  for (State q = 0; q < a.state_count(); ++q) {
    if (q) out += ", ";
    out += a.name(q) + "=(" + a.name(a.next(q, 0)) + "," + a.name(a.next(q, 1)) + ")";
    if (a.root(q) == Perm::swap) out += "(0,1)";
  }
  return out;
}

// Parses a text recursion whose sections are single states into an automaton.
inline MealyAutomaton parse_automaton(std::string_view text) {
  const GroupSpec spec = parse_group_spec(text);
  if (!spec.aliases.empty()) throw ParseError("aliases are not part of an automaton");
  std::vector<BinaryRow> rows;
  std::vector<std::string> names;
  for (const auto& r : spec.group.recursions()) {
    for (const Word* w : {&r.section0, &r.section1})
      if (w->size() != 1 || is_inverted((*w)[0]))
        throw ParseError("section of " + r.name + " is not a single state");
    rows.push_back({generator_of(r.section0[0]), generator_of(r.section1[0]), r.root});
    names.push_back(r.name);
  }
  return make_binary(rows, names);
}

}  // namespace essfree
