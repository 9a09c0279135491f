// Command-line front end: enumeration, classes, per-automaton inspection,
// the classification census and word queries on the tree.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "essfree/classifier.hpp"
#include "essfree/free_group.hpp"
#include "essfree/report.hpp"
#include "essfree/text_format.hpp"
#include "essfree/tree_action.hpp"

namespace {

using namespace essfree;
using ordered_json = nlohmann::ordered_json;

enum Exit { ok = 0, usage = 1, internal = 2, budget = 3 };

struct Config {
  std::string format = "text";
  std::string out;
  std::size_t node_cap = Budget{}.node_cap;
  std::size_t word_length_cap = Budget{}.word_length_cap;
  std::size_t max_level = Budget{}.max_level;
  long long family_bound = 20;
  std::size_t max_len = 5;
  std::size_t element_cap = 256;

  Budget budget() const { return {node_cap, word_length_cap, max_level}; }
  bool json() const { return format == "json"; }
};

class Output {
 public:
  explicit Output(const Config& cfg) {
    if (!cfg.out.empty()) {
      file_.open(cfg.out);
      if (!file_) throw std::runtime_error("cannot write " + cfg.out);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string perm_text(Perm p) { return p == Perm::swap ? "s" : "1"; }

// The dual acts on the state names; each of its two states is printed as
// input:output/next entries.
std::string format_dual(const MealyAutomaton& a) {
  const auto d = dual_automaton(a);
  std::string out;
  for (State x = 0; x < d.state_count(); ++x) {
    if (x) out += ", ";
    out += std::to_string(x) + ":";
    for (std::size_t q = 0; q < d.alphabet_size(); ++q)
      out += " " + a.name(q) + ":" + a.name(d.out(x, q)) + "/" + std::to_string(d.next(x, q));
  }
  return out;
}

GroupSpec load_target(const std::string& target, const Budget& budget) {
  int id = 0;
  const auto [ptr, ec] = std::from_chars(target.data(), target.data() + target.size(), id);
  if (ec == std::errc{} && ptr == target.data() + target.size())
    return group_spec_from_automaton(automaton_from_number(AutomatonId(id)), budget);
  std::ifstream in(target);
  if (!in) throw std::runtime_error("cannot open recursion file " + target);
  std::stringstream text;
  text << in.rdbuf();
  return parse_group_spec(text.str(), budget);
}

int cmd_enumerate(const Config& cfg) {
  Output out(cfg);
  if (cfg.json()) {
    ordered_json j = ordered_json::object();
    for (int id = 1; id <= kAutomatonCount; ++id) j[std::to_string(id)] = format_automaton(automaton_from_number(AutomatonId(id)));
    out.stream() << j.dump(2) << "\n";
  } else {
    for (int id = 1; id <= kAutomatonCount; ++id)
      out.stream() << id << "\t" << format_automaton(automaton_from_number(AutomatonId(id))) << "\n";
  }
  return ok;
}

int cmd_classes(const Config& cfg) {
  Output out(cfg);
  const auto& classes = symmetry_classes();
  std::size_t listed = 0;
  for (const auto& c : classes)
    if (std::binary_search(known::class_list().begin(), known::class_list().end(), c.front())) ++listed;
  if (cfg.json()) {
    ordered_json j;
    j["classes"] = classes.size();
    j["listed"] = listed;
    ordered_json reps = ordered_json::object();
    for (const auto& c : classes) reps[std::to_string(c.front())] = c.size();
    j["representatives"] = reps;
    out.stream() << j.dump(2) << "\n";
  } else {
    out.stream() << "classes " << classes.size() << "\nlisted " << listed << "\n";
    for (const auto& c : classes) out.stream() << c.front() << "\t" << c.size() << "\n";
  }
  return ok;
}

int cmd_info(const Config& cfg, int id) {
  Output out(cfg);
  const auto a = automaton_from_number(AutomatonId(id));
  const auto m = minimize(a);
  const auto g = SelfSimilarGroup::from_automaton(a, cfg.budget());
  const auto level3 = level_group_order(g, 3);
  ordered_json j;
  j["id"] = id;
  j["recursion"] = format_automaton(a);
  j["minimized"] = format_automaton(m);
  j["minimized_states"] = m.state_count();
  j["dual"] = format_dual(a);
  j["bireversible"] = is_bireversible(a);
  j["representative"] = class_representative(id);
  j["class_size"] = class_size(id);
  j["level3_order"] = level3.order.str();
  j["level3_derived_order"] = level3.derived_order.str();
  if (cfg.json()) {
    out.stream() << j.dump(2) << "\n";
  } else {
    for (const auto& [k, v] : j.items()) out.stream() << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
  return ok;
}

int cmd_classify(const Config& cfg, bool all, int id, const std::string& hints_path, bool timing,
                 bool plain_mikhailova) {
  const Hints hints = hints_path.empty() ? Hints{} : load_hints(hints_path);
  ClassifyOptions opt;
  opt.max_len = cfg.max_len;
  opt.element_cap = cfg.element_cap;
  opt.family_bound = cfg.family_bound;
  opt.require_self_replicating = !plain_mikhailova;
  opt.budget = cfg.budget();
  ClassificationReport report;
  if (all)
    report = classify_all(hints, opt);
  else
    report.entries.push_back(classify_entry(id, hints, opt));
  Output out(cfg);
  if (cfg.json()) {
    out.stream() << report_json(report, timing).dump(2) << "\n";
    return ok;
  }
  for (const auto& e : report.entries) {
    const auto& c = e.certificate;
    out.stream() << e.id << "\t" << to_string(c.verdict) << "\t" << to_string(c.stage);
    if (c.verdict == Verdict::not_free) out.stream() << "\t" << c.element << " = (" << c.section0 << ", " << c.section1 << ")";
    if (c.stage == Stage::finite_group) out.stream() << "\torder " << c.order;
    if (c.stage == Stage::diagonal)
      out.stream() << "\t" << c.relators_checked << " relator checks"
                   << (c.truncated_family ? ", families verified up to " + std::to_string(c.family_bound) : "");
    if (c.stage == Stage::manual) out.stream() << "\tunverified: " << c.cite;
    if (timing) out.stream() << "\t" << e.ms << " ms";
    out.stream() << "\n";
    for (const auto& d : c.diagnostics) out.stream() << "\t# " << d << "\n";
  }
  if (all) {
    out.stream() << "summary";
    for (const auto& [k, v] : report.count_by_stage()) out.stream() << " " << k << "=" << v;
    out.stream() << " survivors=" << report.survivors().size() << "\n";
  }
  return ok;
}

int cmd_mikhailova(const Config& cfg, int id) {
  const FreeCover cover(automaton_from_number(AutomatonId(id)));
  const auto sys = mikhailova_system(cover);
  const auto& g = cover.group();
  ordered_json j;
  j["id"] = id;
  j["free_cover"] = format_automaton(cover.automaton());
  if (sys.stabilizer.transversal)
    j["transversal"] = {"1", g.recursion(*sys.stabilizer.transversal).name};
  else
    j["transversal"] = {"1"};
  ordered_json stab = ordered_json::array();
  for (const auto& s : sys.stabilizer.generators) {
    const auto p = wreath_decompose_free(cover, s);
    stab.push_back(cover.format(s) + " = (" + cover.format(p.first) + ", " + cover.format(p.second) + ")");
  }
  j["stabilizer"] = stab;
  ordered_json basis = ordered_json::array();
  for (std::size_t i : sys.reduction.basis) {
    const auto& t = sys.reduction.output[i];
    basis.push_back(cover.format(t.element) + " = (" + cover.format(t.first) + ", " + cover.format(t.second) + ")");
  }
  j["basis"] = basis;
  ordered_json kernel = ordered_json::array();
  for (std::size_t i : sys.reduction.kernel) {
    const auto& t = sys.reduction.output[i];
    kernel.push_back({{"element", cover.format(t.element)},
                      {"kernel", cover.format(t.second)},
                      {"identity_in_G", to_string(is_identity(g, t.second))}});
  }
  j["kernel"] = kernel;
  j["self_replicating_shape"] = first_coordinates_full(cover, sys);
  const auto w = mikhailova_witness(cover, sys);
  j["witness"] = w ? ordered_json(cover.format(w->element)) : ordered_json(nullptr);
  const auto phi = diagonal_type_map(cover, sys);
  if (phi) {
    ordered_json m = ordered_json::object();
    for (std::size_t gen : cover.free_generators()) m[g.recursion(gen).name] = cover.format(phi->images[gen]);
    j["diagonal_map"] = m;
  } else {
    j["diagonal_map"] = nullptr;
  }
  Output out(cfg);
  if (cfg.json()) {
    out.stream() << j.dump(2) << "\n";
    return ok;
  }
  out.stream() << "free cover: " << j["free_cover"].get<std::string>() << "\n";
  out.stream() << "stabilizer generators:\n";
  for (const auto& s : stab) out.stream() << "  " << s.get<std::string>() << "\n";
  out.stream() << "basis pairs:\n";
  for (const auto& s : basis) out.stream() << "  " << s.get<std::string>() << "\n";
  out.stream() << "kernel pairs:\n";
  for (const auto& k : kernel)
    out.stream() << "  " << k["element"].get<std::string>() << " = (1, " << k["kernel"].get<std::string>()
                 << ")  identity in G: " << k["identity_in_G"].get<std::string>() << "\n";
  out.stream() << "witness: " << (w ? cover.format(w->element) : "none") << "\n";
  out.stream() << "diagonal map:";
  if (phi)
    for (std::size_t gen : cover.free_generators())
      out.stream() << " " << g.recursion(gen).name << "->" << cover.format(phi->images[gen]);
  else
    out.stream() << " none";
  out.stream() << "\n";
  return ok;
}

int cmd_witness(const Config& cfg, int id) {
  const auto a = automaton_from_number(AutomatonId(id));
  const auto g = SelfSimilarGroup::from_automaton(a, cfg.budget());
  const auto w = brute_force_rist1(a, cfg.max_len);
  Output out(cfg);
  if (!w) {
    out.stream() << (cfg.json() ? ordered_json{{"id", id}, {"max_len", cfg.max_len}, {"witness", nullptr}}.dump(2) : "none")
                 << "\n";
    return ok;
  }
  const std::string element = format_word(w->element, g.names());
  const std::string moved = format_word(w->section, g.names());
  const std::string s0 = w->side == 0 ? moved : "1";
  const std::string s1 = w->side == 1 ? moved : "1";
  if (cfg.json()) {
    ordered_json j;
    j["id"] = id;
    j["max_len"] = cfg.max_len;
    j["witness"] = element;
    j["sections"] = {s0, s1};
    j["side"] = w->side;
    out.stream() << j.dump(2) << "\n";
  } else {
    out.stream() << element << " = (" << s0 << ", " << s1 << ")\n";
  }
  return ok;
}

int cmd_eval(const Config& cfg, const std::string& target, const std::string& text, const std::string& query,
             const std::string& arg) {
  const GroupSpec spec = load_target(target, cfg.budget());
  const auto& g = spec.group;
  const Word w = spec.word(text);
  const auto names = g.names();
  auto count_arg = [&](std::size_t fallback) -> std::size_t {
    if (arg.empty()) return fallback;
    return static_cast<std::size_t>(std::stoul(arg));
  };
  std::string result;
  if (query == "isone") {
    const Decision d = is_identity(g, w);
    if (d == Decision::exhausted) throw BudgetExceeded("node_cap", "word problem undecided within the closure budget");
    result = to_string(d);
  } else if (query == "order") {
    const auto o = element_order(g, w);
    if (o.kind == ElementOrder::Kind::finite)
      result = std::to_string(o.order);
    else if (o.kind == ElementOrder::Kind::infinite)
      result = "infinity";
    else
      throw BudgetExceeded("max_level", "order undecided: " + o.certificate);
  } else if (query == "measure") {
    result = fixed_point_measure(g, w).str();
  } else if (query == "section") {
    result = format_word(section(g, w, parse_vertex(arg)), names);
  } else if (query == "decompose") {
    const auto d = wreath_decompose(g, w);
    result = "(" + format_word(d.section0, names) + ", " + format_word(d.section1, names) + ")" + perm_text(d.root);
  } else if (query == "shprofile") {
    result = format_profile(sh_profile(g, w, count_arg(20)));
  } else if (query == "antidepth" || query == "finitary") {
    const auto r = query == "antidepth" ? antidepth(g, w, count_arg(64)) : finitary_depth(g, w, count_arg(64));
    if (!r.depth) throw BudgetExceeded("max_depth", query + " not reached within " + std::to_string(r.bound) + " levels");
    result = std::to_string(*r.depth);
  } else if (query == "transitive") {
    const auto t = level_transitive_element(g, w, count_arg(1000));
    switch (t.kind) {
      case Transitivity::Kind::all_levels: result = "all levels"; break;
      case Transitivity::Kind::up_to: result = "up to level " + std::to_string(t.level); break;
      case Transitivity::Kind::intransitive_at: result = "intransitive at level " + std::to_string(t.level); break;
    }
  } else {
    throw CLI::ValidationError("query", "unknown query " + query);
  }
  Output out(cfg);
  if (cfg.json()) {
    ordered_json j;
    j["word"] = text;
    j["query"] = query;
    if (!arg.empty()) j["argument"] = arg;
    j["result"] = result;
    out.stream() << j.dump(2) << "\n";
  } else {
    out.stream() << result << "\n";
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"essential freeness census for 3-state automata over a 2-letter alphabet"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", cfg.out, "write output to this file");
  app.add_option("--budget-node-cap", cfg.node_cap, "closure node cap")->check(CLI::PositiveNumber);
  app.add_option("--budget-word-length", cfg.word_length_cap, "section word length cap")->check(CLI::PositiveNumber);
  app.add_option("--budget-max-level", cfg.max_level, "deepest level for permutations")->check(CLI::PositiveNumber);
  app.add_option("--budget-family-bound", cfg.family_bound, "instances checked per relator family")
      ->check(CLI::PositiveNumber);
  app.add_option("--budget-element-cap", cfg.element_cap, "finite closure element cap")->check(CLI::PositiveNumber);

  auto* enumerate = app.add_subcommand("enumerate", "list all automata with their recursions");
  auto* classes = app.add_subcommand("classes", "partition by minimal symmetry");

  int id = 0;
  auto* info = app.add_subcommand("info", "describe one automaton");
  info->add_option("id", id, "automaton number")->required();

  bool all = false;
  bool timing = false;
  bool plain_mikhailova = false;
  std::string hints_path;
  auto* classify = app.add_subcommand("classify", "run the classification pipeline");
  auto* all_flag = classify->add_flag("--all", all, "all class representatives");
  auto* id_opt = classify->add_option("--id", id, "one automaton");
  all_flag->excludes(id_opt);
  classify->add_option("--hints", hints_path, "certificate hints file")->check(CLI::ExistingFile);
  classify->add_flag("--timing", timing, "include per-automaton milliseconds");
  classify->add_flag("--any-cover", plain_mikhailova,
                     "eliminate on any nontrivial Mikhailova kernel word, not only for the self-replicating shape");
  classify->add_option("--max-len", cfg.max_len, "brute-force word length")->check(CLI::PositiveNumber);

  auto* mikhailova = app.add_subcommand("mikhailova", "show the Mikhailova system");
  mikhailova->add_option("id", id, "automaton number")->required();

  auto* witness = app.add_subcommand("witness", "brute-force search for a rigid stabilizer element");
  witness->add_option("id", id, "automaton number")->required();
  witness->add_option("--max-len", cfg.max_len, "longest word")->check(CLI::PositiveNumber);

  std::string target, word, query, arg;
  auto* eval = app.add_subcommand("eval", "evaluate a word: isone, order, measure, section V, decompose, "
                                          "shprofile D, antidepth [N], finitary [N], transitive [N]");
  eval->add_option("target", target, "automaton number or recursion file")->required();
  eval->add_option("word", word, "word over the generators and aliases")->required();
  eval->add_option("query", query, "query")->required();
  eval->add_option("argument", arg, "vertex or depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : usage;
  }

  try {
    if (*enumerate) return cmd_enumerate(cfg);
    if (*classes) return cmd_classes(cfg);
    if (*info) return cmd_info(cfg, id);
    if (*classify) {
      if (!all && id_opt->count() == 0) throw CLI::ValidationError("classify", "give --all or --id N");
      return cmd_classify(cfg, all, id, hints_path, timing, plain_mikhailova);
    }
    if (*mikhailova) return cmd_mikhailova(cfg, id);
    if (*witness) return cmd_witness(cfg, id);
    if (*eval) return cmd_eval(cfg, target, word, query, arg);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget " << e.budget() << " exhausted: " << e.what() << "\n";
    return budget;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return internal;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
