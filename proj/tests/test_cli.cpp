#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ESSFREE_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string data(const std::string& rel) { return std::string(ESSFREE_DATA) + "/" + rel; }

bool contains(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("info", "[cli]") {
  const auto r = run("info 2193");
  CHECK(r.status == 0);
  CHECK(contains(r.out, "level3_order: 64"));
  CHECK(contains(r.out, "level3_derived_order: 8"));
  CHECK(contains(run("info 846").out, "bireversible: true"));
  CHECK(contains(run("info 1").out, "minimized_states: 1"));
  CHECK(run("info 9999").status == 1);
  CHECK(run("info").status == 1);
}

TEST_CASE("enumerate and classes", "[cli]") {
  const auto e = run("enumerate");
  CHECK(e.status == 0);
  CHECK(std::count(e.out.begin(), e.out.end(), '\n') == 5832);
  CHECK(contains(e.out, "2193\ta=(c,b)(0,1), b=(a,a)(0,1), c=(a,a)\n"));
  const auto c = run("--format json classes");
  const auto j = nlohmann::json::parse(c.out);
  CHECK(j["classes"] == 195);
  CHECK(j["listed"] == 194);
  CHECK(j["representatives"]["821"] == 192);
}

TEST_CASE("classify", "[cli]") {
  CHECK(contains(run("classify --id 741").out, "741\tNotFree\tmikhailova"));
  CHECK(contains(run("classify --id 1").out, "1\tFree\tfinite_group"));
  CHECK(run("classify").status == 1);
  CHECK(run("classify --all --id 3").status == 1);

  const std::string args = "--format json classify --id 924 --hints " + data("hints.json");
  const auto first = run(args);
  const auto second = run(args);
  CHECK(first.status == 0);
  CHECK(first.out == second.out);
  const auto j = nlohmann::json::parse(first.out);
  CHECK(j["per_automaton"]["924"]["verdict"] == "Free");
  CHECK(j["per_automaton"]["924"]["certificate"]["kind"] == "diagonal");

  const auto all = nlohmann::json::parse(run("--format json classify --all").out);
  CHECK(all["summary"]["automata"] == 194);
  CHECK(all["summary"]["survivors"] == 57);
}

TEST_CASE("classify writes report files", "[cli]") {
  const auto path = std::filesystem::temp_directory_path() / "essfree_cli_report.json";
  std::filesystem::remove(path);
  const auto r = run("--format json --out " + path.string() + " classify --id 739");
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["per_automaton"]["739"]["certificate"]["element"] == "b*c");
  std::filesystem::remove(path);
}

TEST_CASE("classify exit codes for bad hints", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bad = dir / "essfree_bad_hints.json";
  std::ofstream(bad) << R"({"730": {"kind": "witness", "element": "a"}})";
  CHECK(run("classify --id 730 --hints " + bad.string()).status == 2);
  const auto clash = dir / "essfree_clash_hints.json";
  std::ofstream(clash) << R"({"775": {"kind": "diagonal", "relators": []}})";
  CHECK(run("classify --id 775 --hints " + clash.string()).status == 2);
  const auto broken = dir / "essfree_broken_hints.json";
  std::ofstream(broken) << R"({"775": )";
  CHECK(run("classify --id 775 --hints " + broken.string()).status == 1);
  CHECK(run("classify --id 775 --hints /nonexistent.json").status == 1);
  for (const auto& p : {bad, clash, broken}) std::filesystem::remove(p);
}

TEST_CASE("mikhailova and witness", "[cli]") {
  const auto m = run("mikhailova 741");
  CHECK(m.status == 0);
  CHECK(contains(m.out, "witness: "));
  CHECK_FALSE(contains(m.out, "witness: none"));
  CHECK(contains(run("mikhailova 821").out, "diagonal map: a->b b->a"));
  CHECK(run("witness 739 --max-len 2").out == "b*c = (b*a, 1)\n");
  CHECK(run("witness 2862").out == "a*b = (a, 1)\n");
  CHECK(run("witness 821 --max-len 3").out == "none\n");
}

TEST_CASE("eval", "[cli]") {
  CHECK(run("eval 2372 \"a*c^-1\" order").out == "infinity\n");
  CHECK(run("eval 2193 c measure").out == "0\n");
  CHECK(run("eval 2193 a^4 isone").out == "true\n");
  CHECK(run("eval 2193 \"[[a,b],[a,c]]\" isone").out == "false\n");
  const std::string fix = data("fixtures/g2193.txt");
  CHECK(run("eval " + fix + " \"(a^2)^(y^5)\" antidepth").out == "10\n");
  CHECK(contains(run("eval " + fix + " a^2 shprofile 6").out, "[1,s,1,s,1,s,1]"));
  CHECK(run("eval " + fix + " y*x finitary").out == "1\n");
  CHECK(run("eval 2193 a section 01").out == "a\n");
  CHECK(run("eval 2193 a^2 decompose").out == "(c*b, b*c)1\n");
  CHECK(run("eval 2193 a transitive 20").out == "intransitive at level 3\n");
  const auto j = nlohmann::json::parse(run("--format json eval 2193 a order").out);
  CHECK(j["result"] == "4");
}

TEST_CASE("eval errors", "[cli]") {
  const std::string fix = data("fixtures/g2193.txt");
  CHECK(run("eval " + fix + " \"(a^2)^(y^5)\" antidepth 5").status == 3);
  CHECK(run("--budget-node-cap 3 eval " + data("fixtures/g2372.txt") + " \"t^x*t^-3\" isone").status == 3);
  CHECK(run("eval 2193 a^2 frobnicate").status == 1);
  CHECK(run("eval 2193 d isone").status == 1);
  CHECK(run("eval /nonexistent.txt a isone").status == 1);
  CHECK(run("eval 2193 a section 012").status == 1);
  CHECK(run("--format yaml eval 2193 a isone").status == 1);
}
