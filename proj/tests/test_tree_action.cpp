#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "essfree/text_format.hpp"
#include "essfree/tree_action.hpp"

using namespace essfree;

namespace {

// Tree action computed straight from the recursion table: a generator writes
// its root image and hands the tail to its section; an inverse generator
// undoes the root first and then applies the inverse of that section.
Vertex oracle_act(const std::vector<Recursion>& gens, const Word& w, Vertex v, std::size_t from = 0);

Vertex oracle_letter(const std::vector<Recursion>& gens, Letter l, Vertex v, std::size_t from) {
  if (from >= v.size()) return v;
  const Recursion& r = gens[generator_of(l)];
  const unsigned x = v[from];
  const unsigned y = r.root == Perm::swap ? 1 - x : x;
  if (!is_inverted(l)) {
    v[from] = y;
    return oracle_act(gens, x == 0 ? r.section0 : r.section1, v, from + 1);
  }
  v[from] = y;
  return oracle_act(gens, (y == 0 ? r.section0 : r.section1).inverse(), v, from + 1);
}

Vertex oracle_act(const std::vector<Recursion>& gens, const Word& w, Vertex v, std::size_t from) {
  for (Letter l : w) v = oracle_letter(gens, l, std::move(v), from);
  return v;
}

std::vector<Vertex> level(std::size_t n) {
  std::vector<Vertex> out;
  for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) {
    Vertex v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (k >> (n - 1 - i)) & 1u;
    out.push_back(v);
  }
  return out;
}

bool oracle_trivial_to(const SelfSimilarGroup& g, const Word& w, std::size_t n) {
  for (const auto& v : level(n))
    if (oracle_act(g.recursions(), w, v) != v) return false;
  return true;
}

std::size_t oracle_fixed(const SelfSimilarGroup& g, const Word& w, std::size_t n) {
  std::size_t count = 0;
  for (const auto& v : level(n)) count += oracle_act(g.recursions(), w, v) == v;
  return count;
}

using Table = std::vector<std::uint32_t>;

Table oracle_table(const SelfSimilarGroup& g, const Word& w, std::size_t n) {
  Table t;
  for (const auto& v : level(n)) {
    const Vertex u = oracle_act(g.recursions(), w, v);
    std::uint32_t k = 0;
    for (unsigned x : u) k = 2 * k + x;
    t.push_back(k);
  }
  return t;
}

// Closure of a set of permutations under composition.
std::set<Table> oracle_closure(const std::vector<Table>& gens, std::size_t degree) {
  Table id(degree);
  for (std::size_t i = 0; i < degree; ++i) id[i] = static_cast<std::uint32_t>(i);
  std::set<Table> seen{id};
  std::vector<Table> queue{id};
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& s : gens) {
      Table t(degree);
      for (std::size_t p = 0; p < degree; ++p) t[p] = s[queue[i][p]];
      if (seen.insert(t).second) queue.push_back(t);
    }
  return seen;
}

Table inverse_table(const Table& t) {
  Table r(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) r[t[i]] = static_cast<std::uint32_t>(i);
  return r;
}

Table then(const Table& first, const Table& second) {
  Table r(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) r[i] = second[first[i]];
  return r;
}

GroupSpec load_fixture(const std::string& name) {
  std::ifstream in(std::string(ESSFREE_DATA) + "/fixtures/" + name);
  std::stringstream text;
  text << in.rdbuf();
  return parse_group_spec(text.str());
}

Word random_word(std::mt19937& rng, std::size_t gens, std::size_t len) {
  std::uniform_int_distribution<std::size_t> pick(0, 2 * gens - 1);
  Word w;
  while (w.size() < len) w.push_back(static_cast<Letter>(pick(rng)));
  return w;
}

}  // namespace

TEST_CASE("act follows the recursion", "[tree_action]") {
  const auto g = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(2193)));
  const auto spec = group_spec_from_automaton(automaton_from_number(AutomatonId(2193)));
  CHECK(act(g, Word{}, parse_vertex("0110")) == parse_vertex("0110"));
  CHECK(act(g, spec.word("a"), parse_vertex("00")) == parse_vertex("10"));
  CHECK(parse_vertex("1,2,2", true) == parse_vertex("011"));
  CHECK_THROWS_AS(parse_vertex("012"), ParseError);
}

TEST_CASE("act, perm_on_level and section agree with the table oracle", "[tree_action][property]") {
  std::mt19937 rng(2193);
  for (int id : {2193, 2372, 821, 741}) {
    const auto g = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(id)));
    for (int trial = 0; trial < 40; ++trial) {
      const Word u = random_word(rng, 3, 1 + trial % 7);
      const Word w = random_word(rng, 3, 1 + trial % 5);
      const auto vs = level(6);
      const Vertex& v = vs[(trial * 37) % vs.size()];
      REQUIRE(act(g, u, v) == oracle_act(g.recursions(), u, v));
      CHECK(act(g, u * w, v) == act(g, w, act(g, u, v)));
      CHECK(perm_on_level(g, u, 5) == oracle_table(g, u, 5));
      CHECK(perm_on_level(g, u * w, 5) == then(perm_on_level(g, u, 5), perm_on_level(g, w, 5)));
      const Vertex head(v.begin(), v.begin() + 2);
      const Vertex tail(v.begin() + 2, v.end());
      const Vertex image = act(g, u, v);
      const Vertex image_tail(image.begin() + 2, image.end());
      CHECK(act(g, section(g, u, head), tail) == image_tail);
      CHECK(equal(g, section(g, u, v), section(g, section(g, u, head), tail)) == Decision::yes);
    }
  }
}

TEST_CASE("wreath decomposition examples", "[tree_action]") {
  const auto s2372 = group_spec_from_automaton(automaton_from_number(AutomatonId(2372)));
  const auto d = wreath_decompose(s2372.group, s2372.word("b^-1*c^2*b^-1*c"));
  CHECK(d.root == Perm::identity);
  CHECK(equal(s2372.group, d.section0, s2372.word("a")) == Decision::yes);
  CHECK(equal(s2372.group, d.section1, s2372.word("c")) == Decision::yes);

  const auto s821 = group_spec_from_automaton(automaton_from_number(AutomatonId(821)));
  const auto e = wreath_decompose(s821.group, s821.word("b^-1*a*b*a^-1*b"));
  CHECK(e.root == Perm::identity);
  CHECK(equal(s821.group, e.section0, s821.word("a")) == Decision::yes);
  CHECK(equal(s821.group, e.section1, s821.word("b")) == Decision::yes);

  const auto empty = wreath_decompose(s821.group, Word{});
  CHECK(empty.section0.empty());
  CHECK(empty.section1.empty());
  CHECK(empty.root == Perm::identity);
  CHECK(section(s821.group, Word{}, parse_vertex("0101")).empty());
}

TEST_CASE("word problem in the group of 2193", "[tree_action]") {
  const auto s = group_spec_from_automaton(automaton_from_number(AutomatonId(2193)));
  for (const char* r : {"a^4", "b^4", "c^4", "[b,c]", "(c*b^-1)^2"}) {
    INFO(r);
    CHECK(is_identity(s.group, s.word(r)) == Decision::yes);
    CHECK(oracle_trivial_to(s.group, s.word(r), 10));
  }
  CHECK(is_identity(s.group, s.word("[[a,b],[a,c]]")) == Decision::no);
  CHECK(is_identity(s.group, s.word("a^2")) == Decision::no);
  CHECK(equal(s.group, s.word("a*b"), s.word("a*b")) == Decision::yes);
}

TEST_CASE("word problem in the group of 2372", "[tree_action]") {
  const auto f = load_fixture("g2372.txt");
  CHECK(is_identity(f.group, f.word("t^x*t^-3")) == Decision::yes);
  CHECK(equal(f.group, f.word("v^2"), Word{}) == Decision::yes);
  CHECK(equal(f.group, f.word("t^v"), f.word("t^-1")) == Decision::yes);
  CHECK(equal(f.group, f.word("x^v"), f.word("x")) == Decision::yes);
  CHECK(equal(f.group, f.word("t^x"), f.word("t^2")) == Decision::no);
}

TEST_CASE("identity decisions agree with the table oracle", "[tree_action][property]") {
  std::mt19937 rng(7);
  for (int id : {2193, 2372, 846, 930, 891}) {
    const auto g = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(id)));
    for (int trial = 0; trial < 60; ++trial) {
      const Word w = random_word(rng, 3, 2 + trial % 7);
      const Decision d = is_identity(g, w);
      REQUIRE(d != Decision::exhausted);
      if (d == Decision::yes) CHECK(oracle_trivial_to(g, w, 10));
      if (!oracle_trivial_to(g, w, 10)) CHECK(d == Decision::no);
    }
  }
}

TEST_CASE("budgets are reported", "[tree_action]") {
  const auto f = load_fixture("g2372.txt");
  SelfSimilarGroup g = f.group;
  g.set_budget({3, 10000, 12});
  CHECK(is_identity(g, f.word("t^x*t^-3")) == Decision::exhausted);
  g.set_budget({200000, 10000, 4});
  CHECK_THROWS_AS(perm_on_level(g, f.word("t"), 5), BudgetExceeded);
}

TEST_CASE("level permutation groups", "[tree_action]") {
  const auto g = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(2193)));
  const auto o = level_group_order(g, 3);
  CHECK(o.order == 64);
  CHECK(o.derived_order == 8);

  std::vector<Table> gens;
  for (std::size_t i = 0; i < 3; ++i) gens.push_back(oracle_table(g, Word::generator(i), 3));
  const auto all = oracle_closure(gens, 8);
  std::vector<Table> commutators;
  for (const auto& p : all)
    for (const auto& q : all) commutators.push_back(then(then(inverse_table(p), inverse_table(q)), then(p, q)));
  CHECK(all.size() == 64);
  CHECK(oracle_closure(commutators, 8).size() == 8);

  const auto trivial = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(1)));
  for (std::size_t n : {1, 4, 7}) CHECK(level_group_order(trivial, n).order == 1);
  CHECK(perm_on_level(g, Word{}, 4) == identity_perm(16));
  CHECK(perm_on_level(g, Word::generator(0), 1) == PointPerm{1, 0});
}

TEST_CASE("level transitivity", "[tree_action]") {
  const auto f = load_fixture("g2372.txt");
  const auto t = level_transitive_element(f.group, f.word("t"), 200);
  CHECK(t.kind == Transitivity::Kind::all_levels);
  const auto g = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(2193)));
  const auto a = level_transitive_element(g, Word::generator(0), 50);
  CHECK(a.kind == Transitivity::Kind::intransitive_at);
  CHECK(a.level == 3);
  CHECK(oracle_closure({oracle_table(g, Word::generator(0), 3)}, 8).size() < 8);
  const auto id = level_transitive_element(g, Word{}, 50);
  CHECK(id.kind == Transitivity::Kind::intransitive_at);
  CHECK(id.level == 1);
}

TEST_CASE("element orders", "[tree_action]") {
  const auto g = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(2193)));
  const auto a = element_order(g, Word::generator(0));
  CHECK(a.kind == ElementOrder::Kind::finite);
  CHECK(a.order == 4);
  CHECK(element_order(g, Word{}).order == 1);
  const auto f = load_fixture("g2372.txt");
  CHECK(element_order(f.group, f.word("t")).kind == ElementOrder::Kind::infinite);
  CHECK(element_order(f.group, f.word("x")).kind == ElementOrder::Kind::infinite);
  CHECK(element_order(f.group, f.word("v")).order == 2);

  std::mt19937 rng(11);
  const auto klein = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(802)));
  for (int trial = 0; trial < 20; ++trial) {
    const Word w = random_word(rng, 3, 1 + trial % 6);
    const auto o = element_order(klein, w);
    REQUIRE(o.kind == ElementOrder::Kind::finite);
    CHECK(o.order == perm_order(oracle_table(klein, w, 10)));
  }
}

TEST_CASE("fixed point measure", "[tree_action]") {
  const auto g = SelfSimilarGroup::from_automaton(automaton_from_number(AutomatonId(2193)));
  CHECK(fixed_point_measure(g, Word{}) == 1);
  CHECK(fixed_point_measure(g, Word::generator(0)) == 0);
  CHECK(fixed_point_measure(g, Word::generator(1)) == 0);

  // fraction of fixed vertices is non-increasing in the level and bounds the
  // measure from above
  const Word c = Word::generator(2);
  const Rational mu = fixed_point_measure(g, c);
  CHECK(mu == 0);
  Rational previous = 1;
  for (std::size_t n = 1; n <= 12; ++n) {
    const Rational fraction(oracle_fixed(g, c, n), std::size_t{1} << n);
    CHECK(fraction <= previous);
    CHECK(mu <= fraction);
    previous = fraction;
  }
  CHECK(previous <= Rational(1, 8));

  const auto half = parse_group_spec("g=(e,s), s=(s,s)(0,1), e=(e,e)");
  const Word gw = half.word("g");
  CHECK(fixed_point_measure(half.group, gw) == Rational(1, 2));
  CHECK(oracle_fixed(half.group, gw, 1) == 2);
  for (std::size_t n = 2; n <= 8; ++n) CHECK(oracle_fixed(half.group, gw, n) == (std::size_t{1} << (n - 1)));

  // an element fixing exactly the rays through 00 and 01 below depth two
  const auto quarter = parse_group_spec("g=(h,s), h=(e,s), s=(s,s)(0,1), e=(e,e)");
  CHECK(fixed_point_measure(quarter.group, quarter.word("g")) == Rational(1, 4));
  CHECK(oracle_fixed(quarter.group, quarter.word("g"), 9) == 128);
}

TEST_CASE("spherically homogeneous profiles and depths", "[tree_action]") {
  const auto f = load_fixture("g2193.txt");
  const Word a2 = f.word("a^2");
  const auto p = sh_profile(f.group, a2, 20);
  REQUIRE_FALSE(p.refuted_at);
  REQUIRE(p.prefix.size() == 21);
  for (std::size_t n = 0; n < p.prefix.size(); ++n)
    CHECK(p.prefix[n] == (n % 2 == 1 ? Perm::swap : Perm::identity));
  // a^2 flips the last letter of either every vertex of level n+1 or none
  for (std::size_t n = 0; n < 10; ++n) {
    const auto t = oracle_table(f.group, a2, n + 1);
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < t.size(); ++i) flipped += (t[i] ^ i) & 1u;
    CHECK(flipped == (n % 2 == 1 ? t.size() : 0));
  }

  const auto xy = sh_profile(f.group, f.word("x*y"), 6);
  CHECK(format_profile(xy).substr(0, 15) == "[s,s,1,1,1,1,1]");
  const auto a = sh_profile(f.group, f.word("a"), 5);
  REQUIRE(a.refuted_at);
  CHECK(*a.refuted_at == 1);

  CHECK(finitary_depth(f.group, Word{}, 5).depth == std::size_t{0});
  CHECK(finitary_depth(f.group, f.word("y*x"), 5).depth == std::size_t{1});
  CHECK_FALSE(finitary_depth(f.group, a2, 20).depth);

  CHECK(antidepth(f.group, f.word("(a^2)^(y^5)"), 20).depth == std::size_t{10});
  CHECK_FALSE(antidepth(f.group, Word{}, 20).depth);
  const auto s = parse_group_spec("s=(s,s)(0,1)");
  CHECK(antidepth(s.group, s.word("s"), 3).depth == std::size_t{0});
}

TEST_CASE("sections of conjugates in the fixture group", "[tree_action]") {
  const auto f = load_fixture("g2193.txt");
  const auto& g = f.group;
  CHECK(equal(g, section(g, f.word("(a^2)^(y^5)"), parse_vertex("0000")), f.word("q")) == Decision::yes);
  const Vertex deep = parse_vertex("000000");
  for (const char* tail : {"y^3", "y^2*x^-1", "y*x^-1*y", "y*x^-2", "x^-1*y^2", "x^-1*y*x^-1", "x^-2*y", "x^-3"}) {
    INFO(tail);
    CHECK(equal(g, section(g, f.word(std::string("y^-3*q*") + tail), deep), f.word("w")) == Decision::yes);
    CHECK(equal(g, section(g, f.word(std::string("y^-3*w*") + tail), deep), f.word("q")) == Decision::yes);
  }
}

TEST_CASE("recursion text errors", "[tree_action]") {
  CHECK_THROWS_AS(parse_group_spec("a=(b,a)(0,1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_spec("a=(a,a), a=(a,a)"), std::invalid_argument);
  const auto s = group_spec_from_automaton(automaton_from_number(AutomatonId(2193)));
  CHECK_THROWS_AS(s.word("a*d"), ParseError);
  CHECK_THROWS_AS(s.word("(a*b"), ParseError);
}
