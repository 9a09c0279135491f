#pragma once

// Finite Mealy automata: numbering of the 3-state binary automata, inversion,
// duality, minimization, symmetry operations and the minimal-symmetry key.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "essfree/perm.hpp"

namespace essfree {

using State = std::size_t;

inline std::string default_state_name(State q) {
  if (q < 26) return std::string(1, static_cast<char>('a' + q));
  return "q" + std::to_string(q);
}

class MealyAutomaton {
 public:
  MealyAutomaton() = default;

  // transition/output are state-major: entry [q * alphabet_size + x].
  MealyAutomaton(std::size_t state_count, std::size_t alphabet_size, std::vector<State> transition,
                 std::vector<std::size_t> output, std::vector<std::string> names = {})
      : states_(state_count),
        alphabet_(alphabet_size),
        transition_(std::move(transition)),
        output_(std::move(output)),
        names_(std::move(names)) {
    if (state_count == 0 || alphabet_size == 0)
      throw std::invalid_argument("automaton needs at least one state and one letter");
    if (transition_.size() != states_ * alphabet_ || output_.size() != states_ * alphabet_)
      throw std::invalid_argument("transition/output tables are not total");
    for (State t : transition_)
      if (t >= states_) throw std::invalid_argument("transition target out of range");
    for (std::size_t y : output_)
      if (y >= alphabet_) throw std::invalid_argument("output letter out of range");
    if (names_.empty()) {
      for (State q = 0; q < states_; ++q) names_.push_back(default_state_name(q));
    } else if (names_.size() != states_) {
      throw std::invalid_argument("state name count mismatch");
    }
  }

  std::size_t state_count() const noexcept { return states_; }
  std::size_t alphabet_size() const noexcept { return alphabet_; }

  State next(State q, std::size_t x) const { return transition_[q * alphabet_ + x]; }
  std::size_t out(State q, std::size_t x) const { return output_[q * alphabet_ + x]; }

  const std::string& name(State q) const { return names_[q]; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  const std::vector<State>& transitions() const noexcept { return transition_; }
  const std::vector<std::size_t>& outputs() const noexcept { return output_; }

  // Root permutation of a state; binary alphabet only.
  Perm root(State q) const { return out(q, 0) == 0 ? Perm::identity : Perm::swap; }

  // Structural equality: names are labels only.
  friend bool operator==(const MealyAutomaton& lhs, const MealyAutomaton& rhs) {
    return lhs.states_ == rhs.states_ && lhs.alphabet_ == rhs.alphabet_ &&
           lhs.transition_ == rhs.transition_ && lhs.output_ == rhs.output_;
  }

 private:
  std::size_t states_ = 0;
  std::size_t alphabet_ = 0;
  std::vector<State> transition_;
  std::vector<std::size_t> output_;
  std::vector<std::string> names_;
};

// Builds a binary automaton from wreath-recursion rows (section at 0, section
// at 1, root permutation).
struct BinaryRow {
  State section0;
  State section1;
  Perm root;
};

inline MealyAutomaton make_binary(const std::vector<BinaryRow>& rows,
                                  std::vector<std::string> names = {}) {
  std::vector<State> tr;
  std::vector<std::size_t> out;
  for (const auto& row : rows) {
    tr.push_back(row.section0);
    tr.push_back(row.section1);
    out.push_back(apply(row.root, 0));
    out.push_back(apply(row.root, 1));
  }
  return MealyAutomaton(rows.size(), 2, std::move(tr), std::move(out), std::move(names));
}

// ---------------------------------------------------------------------------
// Numbering of 3-state automata over {0,1}

inline constexpr int kAutomatonCount = 5832;

class AutomatonId {
 public:
  explicit AutomatonId(int value) : value_(value) {
    if (value < 1 || value > kAutomatonCount)
      throw std::out_of_range("automaton number must lie in [1, 5832], got " +
                              std::to_string(value));
  }
  int value() const noexcept { return value_; }
  friend auto operator<=>(AutomatonId, AutomatonId) = default;

 private:
  int value_;
};

inline MealyAutomaton automaton_from_number(AutomatonId id) {
  int n = id.value() - 1;
  std::array<int, 6> sec{};
  for (int k = 0; k < 6; ++k) {
    sec[k] = n % 3;
    n /= 3;
  }
  const int perms = n;  // a13 + 2 a23 + 4 a33
  std::vector<BinaryRow> rows;
  for (int q = 0; q < 3; ++q) {
    rows.push_back({static_cast<State>(sec[2 * q]), static_cast<State>(sec[2 * q + 1]),
                    ((perms >> q) & 1) ? Perm::swap : Perm::identity});
  }
  return make_binary(rows);
}

inline bool is_invertible(const MealyAutomaton& a) {
  std::vector<char> seen(a.alphabet_size());
  for (State q = 0; q < a.state_count(); ++q) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t x = 0; x < a.alphabet_size(); ++x) {
      if (seen[a.out(q, x)]) return false;
      seen[a.out(q, x)] = 1;
    }
  }
  return true;
}

inline AutomatonId number_of(const MealyAutomaton& a) {
  if (a.state_count() != 3 || a.alphabet_size() != 2)
    throw std::invalid_argument("numbering is defined for 3-state binary automata only");
  if (!is_invertible(a)) throw std::invalid_argument("numbering requires an invertible automaton");
  int n = 0;
  int weight = 1;
  for (State q = 0; q < 3; ++q) {
    for (std::size_t x = 0; x < 2; ++x) {
      n += weight * static_cast<int>(a.next(q, x));
      weight *= 3;
    }
  }
  for (State q = 0; q < 3; ++q) n += 729 * (is_swap(a.root(q)) ? (1 << q) : 0);
  return AutomatonId(n + 1);
}

// ---------------------------------------------------------------------------
// Inverse and dual

inline MealyAutomaton inverse_automaton(const MealyAutomaton& a) {
  if (!is_invertible(a)) throw std::invalid_argument("inverse of a non-invertible automaton");
  const std::size_t d = a.alphabet_size();
  std::vector<State> tr(a.state_count() * d);
  std::vector<std::size_t> out(a.state_count() * d);
  for (State q = 0; q < a.state_count(); ++q) {
    for (std::size_t x = 0; x < d; ++x) {
      const std::size_t y = a.out(q, x);
      tr[q * d + y] = a.next(q, x);
      out[q * d + y] = x;
    }
  }
  return MealyAutomaton(a.state_count(), d, std::move(tr), std::move(out), a.names());
}

inline MealyAutomaton dual_automaton(const MealyAutomaton& a) {
  const std::size_t states = a.alphabet_size();
  const std::size_t letters = a.state_count();
  std::vector<State> tr(states * letters);
  std::vector<std::size_t> out(states * letters);
  std::vector<std::string> names;
  for (std::size_t x = 0; x < states; ++x) {
    names.push_back(std::to_string(x));
    for (State q = 0; q < letters; ++q) {
      tr[x * letters + q] = a.out(q, x);
      out[x * letters + q] = a.next(q, x);
    }
  }
  return MealyAutomaton(states, letters, std::move(tr), std::move(out), std::move(names));
}

inline bool is_bireversible(const MealyAutomaton& a) {
  if (!is_invertible(a)) return false;
  return is_invertible(dual_automaton(a)) && is_invertible(dual_automaton(inverse_automaton(a)));
}

// ---------------------------------------------------------------------------
// Minimization

struct Minimization {
  MealyAutomaton automaton;
  std::vector<State> block_of;  // original state -> state of the quotient
};

// Moore partition refinement. Blocks are numbered by their least member.
inline Minimization minimize_with_map(const MealyAutomaton& a) {
  const std::size_t n = a.state_count();
  const std::size_t d = a.alphabet_size();
  std::vector<State> block(n);

  auto renumber = [&](const std::vector<std::vector<std::size_t>>& signature) {
    std::map<std::vector<std::size_t>, State> ids;
    std::vector<State> result(n);
    for (State q = 0; q < n; ++q) {
      auto [it, inserted] = ids.emplace(signature[q], ids.size());
      result[q] = it->second;
    }
    return std::pair{result, ids.size()};
  };

  std::vector<std::vector<std::size_t>> sig(n);
  for (State q = 0; q < n; ++q)
    for (std::size_t x = 0; x < d; ++x) sig[q].push_back(a.out(q, x));
  auto [initial, count] = renumber(sig);
  block = std::move(initial);

  while (true) {
    for (State q = 0; q < n; ++q) {
      sig[q].assign(1, block[q]);
      for (std::size_t x = 0; x < d; ++x) sig[q].push_back(block[a.next(q, x)]);
    }
    auto [refined, refined_count] = renumber(sig);
    block = std::move(refined);
    if (refined_count == count) break;
    count = refined_count;
  }

  // First-seen numbering in state order is already "ordered by least member".
  std::vector<State> representative(count, n);
  for (State q = 0; q < n; ++q)
    if (representative[block[q]] == n) representative[block[q]] = q;

  std::vector<State> tr(count * d);
  std::vector<std::size_t> out(count * d);
  std::vector<std::string> names(count);
  for (State b = 0; b < count; ++b) {
    const State q = representative[b];
    names[b] = a.name(q);
    for (std::size_t x = 0; x < d; ++x) {
      tr[b * d + x] = block[a.next(q, x)];
      out[b * d + x] = a.out(q, x);
    }
  }
  return {MealyAutomaton(count, d, std::move(tr), std::move(out), std::move(names)),
          std::move(block)};
}

inline MealyAutomaton minimize(const MealyAutomaton& a) { return minimize_with_map(a).automaton; }

// States acting as the identity: every state reachable from them has a
// trivial output map.
inline std::vector<bool> identity_states(const MealyAutomaton& a) {
  const std::size_t n = a.state_count();
  std::vector<bool> trivial_output(n, true);
  for (State q = 0; q < n; ++q)
    for (std::size_t x = 0; x < a.alphabet_size(); ++x)
      if (a.out(q, x) != x) trivial_output[q] = false;
  std::vector<bool> result(n, false);
  for (State q = 0; q < n; ++q) {
    std::vector<bool> seen(n, false);
    std::vector<State> stack{q};
    seen[q] = true;
    bool ok = true;
    while (!stack.empty() && ok) {
      const State p = stack.back();
      stack.pop_back();
      if (!trivial_output[p]) ok = false;
      for (std::size_t x = 0; x < a.alphabet_size(); ++x) {
        const State r = a.next(p, x);
        if (!seen[r]) {
          seen[r] = true;
          stack.push_back(r);
        }
      }
    }
    result[q] = ok;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Symmetry operations: relabel states, conjugate by a letter permutation,
// optionally pass to the inverse automaton.

struct SymmetryOp {
  std::vector<State> state_perm;  // old state q becomes state state_perm[q]
  Perm letter_perm = Perm::identity;
  bool invert = false;

  static SymmetryOp identity(std::size_t degree) {
    SymmetryOp op;
    op.state_perm.resize(degree);
    std::iota(op.state_perm.begin(), op.state_perm.end(), State{0});
    return op;
  }

  friend bool operator==(const SymmetryOp&, const SymmetryOp&) = default;
};

// Result of applying `first` and then `second`.
inline SymmetryOp compose(const SymmetryOp& first, const SymmetryOp& second) {
  if (first.state_perm.size() != second.state_perm.size())
    throw std::invalid_argument("symmetry degree mismatch");
  SymmetryOp r;
  r.state_perm.resize(first.state_perm.size());
  for (State q = 0; q < first.state_perm.size(); ++q)
    r.state_perm[q] = second.state_perm[first.state_perm[q]];
  r.letter_perm = first.letter_perm * second.letter_perm;
  r.invert = first.invert != second.invert;
  return r;
}

inline std::vector<SymmetryOp> all_symmetries(std::size_t degree) {
  std::vector<State> perm(degree);
  std::iota(perm.begin(), perm.end(), State{0});
  std::vector<SymmetryOp> ops;
  do {
    for (Perm lp : {Perm::identity, Perm::swap})
      for (bool inv : {false, true}) ops.push_back({perm, lp, inv});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return ops;
}

inline MealyAutomaton apply_symmetry(const MealyAutomaton& a, const SymmetryOp& s) {
  if (s.state_perm.size() != a.state_count())
    throw std::invalid_argument("symmetry degree does not match the automaton");
  if (a.alphabet_size() != 2 && s.letter_perm != Perm::identity)
    throw std::invalid_argument("letter permutations are supported on the binary alphabet only");
  const std::size_t n = a.state_count();
  const std::size_t d = a.alphabet_size();
  std::vector<State> tr(n * d);
  std::vector<std::size_t> out(n * d);
  std::vector<std::string> names(n);
  auto tau = [&](std::size_t x) { return d == 2 ? apply(s.letter_perm, static_cast<unsigned>(x)) : x; };
  for (State q = 0; q < n; ++q) {
    const State p = s.state_perm[q];
    names[p] = a.name(q);
    for (std::size_t x = 0; x < d; ++x) {
      tr[p * d + x] = s.state_perm[a.next(q, tau(x))];
      out[p * d + x] = tau(a.out(q, tau(x)));
    }
  }
  MealyAutomaton b(n, d, std::move(tr), std::move(out), std::move(names));
  return s.invert ? inverse_automaton(b) : b;
}

// State-major, letter-minor listing of (target, output), prefixed by the sizes.
inline std::string serialize(const MealyAutomaton& a) {
  std::string key;
  key.push_back(static_cast<char>(a.state_count()));
  key.push_back(static_cast<char>(a.alphabet_size()));
  for (State q = 0; q < a.state_count(); ++q) {
    for (std::size_t x = 0; x < a.alphabet_size(); ++x) {
      key.push_back(static_cast<char>(a.next(q, x)));
      key.push_back(static_cast<char>(a.out(q, x)));
    }
  }
  return key;
}

// Two automata are minimally symmetric iff their keys coincide.
inline std::string canonical_key(const MealyAutomaton& a) {
  if (!is_invertible(a)) throw std::invalid_argument("canonical key of a non-invertible automaton");
  const MealyAutomaton m = minimize(a);
  std::optional<std::string> best;
  for (const auto& op : all_symmetries(m.state_count())) {
    std::string k = serialize(apply_symmetry(m, op));
    if (!best || k < *best) best = std::move(k);
  }
  return *best;
}

}  // namespace essfree
