#pragma once

// JSON forms of certificate hints and classification reports.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "essfree/classifier.hpp"
#include "essfree/errors.hpp"

namespace essfree {

namespace detail {

inline Hint parse_hint(const std::string& key, const nlohmann::json& value) {
  Hint h;
  h.note = value.value("note", std::string{});
  const std::string kind = value.at("kind").get<std::string>();
  if (kind == "diagonal") {
    h.kind = Hint::Kind::diagonal;
    if (value.contains("phi")) h.phi = value["phi"].get<std::map<std::string, std::string>>();
    if (value.contains("preimages")) h.preimages = value["preimages"].get<std::map<std::string, std::string>>();
    h.relators = value.at("relators").get<std::vector<std::string>>();
    h.family_bound = value.value("family_bound", 0LL);
  } else if (kind == "manual") {
    h.kind = Hint::Kind::manual;
    h.cite = value.at("cite").get<std::string>();
  } else if (kind == "witness") {
    h.kind = Hint::Kind::witness;
    h.element = value.at("element").get<std::string>();
  } else {
    throw ParseError("unknown hint kind \"" + kind + "\" for " + key);
  }
  return h;
}

}  // namespace detail

inline Hints parse_hints(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("hints must be a JSON object keyed by automaton id");
  Hints hints;
  for (const auto& [key, value] : j.items()) {
    int id = 0;
    try {
      id = std::stoi(key);
    } catch (const std::exception&) {
      throw ParseError("hint key \"" + key + "\" is not an automaton id");
    }
    static_cast<void>(AutomatonId{id});  // range check
    try {
      hints.emplace(id, detail::parse_hint(key, value));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("hint " + key + ": " + e.what());
    }
  }
  return hints;
}

inline Hints load_hints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hints file " + path);
  try {
    return parse_hints(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("hints file " + path + ": " + e.what());
  }
}

inline nlohmann::ordered_json certificate_json(const Certificate& c) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(c.stage);
  j["verified"] = c.verified;
  switch (c.stage) {
    case Stage::mikhailova:
    case Stage::brute_force:
    case Stage::hint_witness:
      j["element"] = c.element;
      j["sections"] = {c.section0, c.section1};
      j["side"] = c.side;
      if (!c.kernel.empty()) j["kernel"] = c.kernel;
      break;
    case Stage::finite_group:
      j["order"] = c.order;
      j["elements_checked"] = c.elements_checked;
      break;
    case Stage::diagonal: {
      nlohmann::ordered_json phi = nlohmann::ordered_json::object();
      for (const auto& [k, v] : c.phi) phi[k] = v;
      j["phi"] = phi;
      j["relators_checked"] = c.relators_checked;
      j["family_bound"] = c.family_bound;
      j["families_verified_up_to"] = c.truncated_family ? nlohmann::ordered_json(c.family_bound) : nullptr;
      break;
    }
    case Stage::manual:
      j["cite"] = c.cite;
      break;
    default:
      break;
  }
  if (!c.note.empty()) j["note"] = c.note;
  if (!c.diagnostics.empty()) j["diagnostics"] = c.diagnostics;
  return j;
}

inline nlohmann::ordered_json entry_json(const ReportEntry& e, bool timing) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(e.certificate.verdict);
  j["representative"] = e.representative;
  j["certificate"] = certificate_json(e.certificate);
  if (e.certificate.verdict == Verdict::not_free)
    j["witness"] = e.certificate.element;
  else
    j["witness"] = nullptr;
  if (timing) j["ms"] = e.ms;
  return j;
}

// Without timing the output is byte-stable for fixed budgets.
inline nlohmann::ordered_json report_json(const ClassificationReport& r, bool timing = false) {
  nlohmann::ordered_json summary;
  summary["automata"] = r.entries.size();
  nlohmann::ordered_json verdicts = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.count_by_verdict()) verdicts[k] = v;
  summary["verdicts"] = verdicts;
  nlohmann::ordered_json stages = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.count_by_stage()) stages[k] = v;
  summary["stages"] = stages;
  summary["survivors"] = r.survivors().size();
  summary["manual_citations"] = r.ids_with(Stage::manual).size();
  summary["unresolved"] = r.ids_with(Stage::none).size();

  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& e : r.entries) per[std::to_string(e.id)] = entry_json(e, timing);
  nlohmann::ordered_json j;
  j["summary"] = summary;
  j["per_automaton"] = per;
  return j;
}

}  // namespace essfree
