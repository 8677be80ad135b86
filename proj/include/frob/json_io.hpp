#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "frob/core.hpp"
#include "frob/rewrite.hpp"

// Canonical JSON serialization (sorted keys, integers only) and
// validate-on-load file helpers.

namespace frob {

using nlohmann::json;

inline json diagram_to_json(const Diagram& d) {
  json j;
  j["presentation"] = presentation_id_name(d.pres->id);
  j["variables"] = d.pres->variables;
  j["input_arity"] = d.input_arity;
  json ls = json::array();
  for (const Level& l : d.levels) {
    json r;
    r["pad_left"] = l.pad_left;
    r["gen"] = d.pres->gen(l.gen).name;
    r["pad_right"] = l.pad_right;
    ls.push_back(r);
  }
  j["levels"] = ls;
  return j;
}

inline PresPtr presentation_from_json(const json& j) {
  PresPtr p = builtin_presentation(parse_presentation_id(j.at("presentation").get<std::string>()));
  if (j.contains("variables")) {
    auto vars = j.at("variables").get<std::vector<std::string>>();
    if (!vars.empty()) p = extend_with_variables(p, vars);
  }
  return p;
}

inline Diagram diagram_from_json(const json& j) {
  PresPtr p = presentation_from_json(j);
  Diagram d;
  d.pres = p;
  d.input_arity = j.at("input_arity").get<int>();
  for (const json& r : j.at("levels")) {
    Level l;
    l.pad_left = r.at("pad_left").get<int>();
    l.pad_right = r.at("pad_right").get<int>();
    l.gen = p->gen_index(r.at("gen").get<std::string>());
    d.levels.push_back(l);
  }
  d.typecheck();
  return d;
}

inline RuleRef rule_ref_from_name(const std::string& s) {
  if (s.rfind("unit_", 0) == 0) return RuleRef{RuleKind::UnitVar, s.substr(5)};
  if (s.rfind("counit_", 0) == 0) return RuleRef{RuleKind::CounitVar, s.substr(7)};
  static const std::pair<const char*, RuleKind> names[] = {
      {"alpha", RuleKind::Alpha},   {"lambda", RuleKind::Lambda},
      {"rho", RuleKind::Rho},       {"mu", RuleKind::Mu},
      {"nu", RuleKind::Nu},         {"pi", RuleKind::Pi},
      {"sigma1", RuleKind::Sigma1}, {"sigma2", RuleKind::Sigma2},
      {"R_m", RuleKind::Rm},        {"L_m", RuleKind::Lm},
      {"R_u", RuleKind::Ru},        {"L_u", RuleKind::Lu},
      {"R_f", RuleKind::Rf},        {"L_f", RuleKind::Lf},
      {"eta", RuleKind::Eta},       {"epsilon", RuleKind::Epsilon},
      {"phi", RuleKind::Phi},       {"psi", RuleKind::Psi},
      {"interchange", RuleKind::Interchange},
  };
  for (auto& [n, k] : names)
    if (s == n) return RuleRef{k, ""};
  throw Error("unknown rule name: " + s);
}

inline json trace_to_json(const Trace& t) {
  json j;
  j["source"] = diagram_to_json(t.source);
  json steps = json::array();
  for (const Step& s : t.steps) {
    json r;
    r["rule"] = s.rule.name();
    r["dir"] = s.forward ? "fwd" : "bwd";
    r["level"] = s.level;
    r["offset"] = s.offset;
    steps.push_back(r);
  }
  j["steps"] = steps;
  return j;
}

inline Trace trace_from_json(const json& j) {
  Trace t;
  t.source = diagram_from_json(j.at("source"));
  for (const json& r : j.at("steps")) {
    Step s;
    s.rule = rule_ref_from_name(r.at("rule").get<std::string>());
    s.forward = r.at("dir").get<std::string>() == "fwd";
    s.level = r.at("level").get<int>();
    s.offset = r.at("offset").get<int>();
    t.steps.push_back(s);
  }
  verify_trace(t);
  return t;
}

inline std::string canonical_dump(const json& j) { return j.dump() + "\n"; }

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_diagram(const Diagram& d, const std::string& path) {
  d.typecheck();
  write_file(path, canonical_dump(diagram_to_json(d)));
}

inline Diagram load_diagram(const std::string& path) {
  return diagram_from_json(json::parse(read_file(path)));
}

inline void save_trace(const Trace& t, const std::string& path) {
  verify_trace(t);
  write_file(path, canonical_dump(trace_to_json(t)));
}

inline Trace load_trace(const std::string& path) {
  return trace_from_json(json::parse(read_file(path)));
}

}  // namespace frob
