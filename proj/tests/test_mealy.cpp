#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "essfree/classifier.hpp"
#include "essfree/mealy.hpp"
#include "essfree/text_format.hpp"
#include "essfree/tree_action.hpp"

using namespace essfree;

namespace {

// Number from the wreath recursion, read off the section/root table directly.
int number_oracle(const MealyAutomaton& a) {
  const int weights[3][2] = {{1, 3}, {9, 27}, {81, 243}};
  int n = 1;
  for (State q = 0; q < 3; ++q) {
    n += weights[q][0] * static_cast<int>(a.next(q, 0)) + weights[q][1] * static_cast<int>(a.next(q, 1));
    if (a.out(q, 0) == 1) n += 729 << q;
  }
  return n;
}

// Image of a finite input word under state q, simulated letter by letter.
std::vector<std::size_t> run(const MealyAutomaton& a, State q, const std::vector<std::size_t>& input) {
  std::vector<std::size_t> out;
  for (std::size_t x : input) {
    out.push_back(a.out(q, x));
    q = a.next(q, x);
  }
  return out;
}

std::vector<std::vector<std::size_t>> all_inputs(std::size_t len) {
  std::vector<std::vector<std::size_t>> words{{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& w : words)
      for (std::size_t x : {0u, 1u}) {
        auto v = w;
        v.push_back(x);
        next.push_back(v);
      }
    words = next;
  }
  return words;
}

}  // namespace

TEST_CASE("numbering round-trips and matches the table formula", "[mealy]") {
  for (int n = 1; n <= kAutomatonCount; ++n) {
    const auto a = automaton_from_number(AutomatonId(n));
    REQUIRE(number_of(a).value() == n);
    REQUIRE(number_oracle(a) == n);
  }
}

TEST_CASE("decoded recursions of 2193 and 2372", "[mealy]") {
  CHECK(format_automaton(automaton_from_number(AutomatonId(2193))) == "a=(c,b)(0,1), b=(a,a)(0,1), c=(a,a)");
  CHECK(format_automaton(automaton_from_number(AutomatonId(2372))) == "a=(b,b)(0,1), b=(c,a)(0,1), c=(c,a)");
  CHECK(format_automaton(automaton_from_number(AutomatonId(1))) == "a=(a,a), b=(a,a), c=(a,a)");
}

TEST_CASE("automaton ids outside the range are rejected", "[mealy]") {
  CHECK_THROWS_AS(AutomatonId(0), std::out_of_range);
  CHECK_THROWS_AS(AutomatonId(5833), std::out_of_range);
  CHECK_THROWS_AS(MealyAutomaton(2, 2, {0, 1, 2, 0}, {0, 1, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(MealyAutomaton(1, 2, {0}, {0}), std::invalid_argument);
}

TEST_CASE("non-invertible automata are detected", "[mealy]") {
  const MealyAutomaton collapse(1, 2, {0, 0}, {0, 0});
  CHECK_FALSE(is_invertible(collapse));
  CHECK_THROWS_AS(canonical_key(collapse), std::invalid_argument);
  CHECK_THROWS_AS(SelfSimilarGroup::from_automaton(collapse), std::invalid_argument);
}

TEST_CASE("minimization preserves the action of every state", "[mealy]") {
  for (int n : {1, 730, 771, 803, 2193, 2372, 2388, 5832}) {
    const auto a = automaton_from_number(AutomatonId(n));
    const auto m = minimize_with_map(a);
    for (State q = 0; q < a.state_count(); ++q)
      for (const auto& w : all_inputs(6)) REQUIRE(run(a, q, w) == run(m.automaton, m.block_of[q], w));
    for (State p = 0; p < m.automaton.state_count(); ++p)
      for (State r = p + 1; r < m.automaton.state_count(); ++r) {
        bool differ = false;
        for (const auto& w : all_inputs(6)) differ = differ || run(m.automaton, p, w) != run(m.automaton, r, w);
        CHECK(differ);
      }
  }
  CHECK(minimize(automaton_from_number(AutomatonId(1))).state_count() == 1);
}

TEST_CASE("inverse automaton inverts every state", "[mealy]") {
  const auto a = automaton_from_number(AutomatonId(2193));
  const auto inv = inverse_automaton(a);
  for (State q = 0; q < 3; ++q)
    for (const auto& w : all_inputs(5)) CHECK(run(inv, q, run(a, q, w)) == w);
}

TEST_CASE("dual and bireversibility", "[mealy]") {
  const auto a = automaton_from_number(AutomatonId(846));
  CHECK(is_bireversible(a));
  const auto d = dual_automaton(a);
  CHECK(d.state_count() == 2);
  CHECK(d.alphabet_size() == 3);
  for (std::size_t x = 0; x < 2; ++x)
    for (State q = 0; q < 3; ++q) {
      CHECK(d.out(x, q) == a.next(q, x));
      CHECK(d.next(x, q) == a.out(q, x));
    }
  CHECK(dual_automaton(d) == a);
  CHECK_FALSE(is_bireversible(automaton_from_number(AutomatonId(2193))));
}

TEST_CASE("symmetry operations compose", "[mealy]") {
  const auto a = automaton_from_number(AutomatonId(2372));
  const auto ops = all_symmetries(3);
  CHECK(ops.size() == 24);
  for (const auto& f : ops)
    for (const auto& s : {ops[5], ops[13], ops[22]})
      CHECK(serialize(apply_symmetry(apply_symmetry(a, f), s)) == serialize(apply_symmetry(a, compose(f, s))));
}

TEST_CASE("symmetric automata share the canonical key and the level action", "[mealy][property]") {
  // Minimally symmetric automata generate conjugate actions, so finite
  // quotients and bireversibility agree inside a class.
  const auto& classes = symmetry_classes();
  std::size_t members = 0;
  for (const auto& c : classes) members += c.size();
  CHECK(members == static_cast<std::size_t>(kAutomatonCount));
  for (std::size_t k = 0; k < classes.size(); k += 7) {
    const auto& c = classes[k];
    const auto rep = automaton_from_number(AutomatonId(c.front()));
    const auto rep_order = level_group_order(SelfSimilarGroup::from_automaton(rep), 4).order;
    for (std::size_t i = 0; i < c.size(); i += 1 + c.size() / 5) {
      const auto a = automaton_from_number(AutomatonId(c[i]));
      CHECK(canonical_key(a) == canonical_key(rep));
      CHECK(is_bireversible(a) == is_bireversible(rep));
      CHECK(level_group_order(SelfSimilarGroup::from_automaton(a), 4).order == rep_order);
    }
  }
}

TEST_CASE("every listed representative is the least id of its class", "[mealy]") {
  std::set<int> reps;
  for (int id : known::class_list()) {
    CHECK(class_representative(id) == id);
    reps.insert(class_representative(id));
  }
  CHECK(reps.size() == known::class_list().size());
}
