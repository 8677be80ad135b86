#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core data model: generator signatures, the built-in presentations, and
// typed diagrams as generic composites (one generator per level, padded by
// identity wires, read bottom-to-top).

namespace frob {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct TypeCheckError : Error {
  int level;
  int expected;
  int actual;
  TypeCheckError(int level_, int expected_, int actual_)
      : Error("arity mismatch at level " + std::to_string(level_) + ": expected " +
              std::to_string(expected_) + ", got " + std::to_string(actual_)),
        level(level_), expected(expected_), actual(actual_) {}
};

enum class GenKind { Structural, Variable };
enum class Display { Blue, Red, Black };

struct GeneratorSymbol {
  std::string name;
  int inputs = 0;
  int outputs = 0;
  GenKind kind = GenKind::Structural;
  Display display = Display::Blue;
};

// Generator indices are stable within one presentation.
using GenIndex = int;

struct Level {
  int pad_left = 0;
  GenIndex gen = 0;
  int pad_right = 0;

  friend bool operator==(const Level& a, const Level& b) {
    return a.pad_left == b.pad_left && a.gen == b.gen && a.pad_right == b.pad_right;
  }
  friend bool operator!=(const Level& a, const Level& b) { return !(a == b); }
};

// A rule pattern is a diagram fragment relative to its presentation.
struct Pattern {
  int input_arity = 0;
  std::vector<Level> levels;

  int output_arity(const std::vector<GeneratorSymbol>& gens) const {
    int a = input_arity;
    for (const Level& l : levels) a += gens[l.gen].outputs - gens[l.gen].inputs;
    return a;
  }
  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.input_arity == b.input_arity && a.levels == b.levels;
  }
};

enum class RuleKind {
  Alpha, Lambda, Rho,          // pseudomonoid
  Mu, Nu,                      // Frobenius
  Pi, Sigma1, Sigma2,          // extended signature
  Rm, Lm, Ru, Lu, Rf, Lf,      // rotations
  Eta, Epsilon, Phi, Psi,      // right adjoints
  UnitVar, CounitVar,          // variable arc pairs
  Interchange,                 // not stored in presentations; step-level only
};

inline const char* rule_kind_name(RuleKind k) {
  switch (k) {
    case RuleKind::Alpha: return "alpha";
    case RuleKind::Lambda: return "lambda";
    case RuleKind::Rho: return "rho";
    case RuleKind::Mu: return "mu";
    case RuleKind::Nu: return "nu";
    case RuleKind::Pi: return "pi";
    case RuleKind::Sigma1: return "sigma1";
    case RuleKind::Sigma2: return "sigma2";
    case RuleKind::Rm: return "R_m";
    case RuleKind::Lm: return "L_m";
    case RuleKind::Ru: return "R_u";
    case RuleKind::Lu: return "L_u";
    case RuleKind::Rf: return "R_f";
    case RuleKind::Lf: return "L_f";
    case RuleKind::Eta: return "eta";
    case RuleKind::Epsilon: return "epsilon";
    case RuleKind::Phi: return "phi";
    case RuleKind::Psi: return "psi";
    case RuleKind::UnitVar: return "unit";
    case RuleKind::CounitVar: return "counit";
    case RuleKind::Interchange: return "interchange";
  }
  return "?";
}

struct Rule {
  RuleKind kind;
  std::string var;  // nonempty only for UnitVar/CounitVar
  bool invertible = false;
  Pattern source;
  Pattern target;

  std::string name() const {
    if (kind == RuleKind::UnitVar) return "unit_" + var;
    if (kind == RuleKind::CounitVar) return "counit_" + var;
    return rule_kind_name(kind);
  }
};

enum class PresentationId { P, F, E, Fstar };

inline const char* presentation_id_name(PresentationId id) {
  switch (id) {
    case PresentationId::P: return "P";
    case PresentationId::F: return "F";
    case PresentationId::E: return "E";
    case PresentationId::Fstar: return "Fstar";
  }
  return "?";
}

inline PresentationId parse_presentation_id(const std::string& s) {
  if (s == "P") return PresentationId::P;
  if (s == "F") return PresentationId::F;
  if (s == "E") return PresentationId::E;
  if (s == "Fstar") return PresentationId::Fstar;
  throw Error("unknown presentation id: " + s);
}

class Presentation {
 public:
  PresentationId id = PresentationId::P;
  std::vector<GeneratorSymbol> generators;
  std::vector<Rule> rules;
  std::vector<std::string> variables;  // declared atomic variables, in order

  GenIndex gen_index(const std::string& name) const {
    for (size_t i = 0; i < generators.size(); ++i)
      if (generators[i].name == name) return static_cast<GenIndex>(i);
    throw Error("unknown generator: " + name);
  }
  bool has_gen(const std::string& name) const {
    for (const auto& g : generators)
      if (g.name == name) return true;
    return false;
  }
  const GeneratorSymbol& gen(GenIndex i) const { return generators[i]; }

  const Rule* find_rule(RuleKind kind, const std::string& var = "") const {
    for (const auto& r : rules)
      if (r.kind == kind && r.var == var) return &r;
    return nullptr;
  }
  const Rule& rule(RuleKind kind, const std::string& var = "") const {
    const Rule* r = find_rule(kind, var);
    if (!r) throw Error(std::string("rule not in presentation: ") + rule_kind_name(kind));
    return *r;
  }
};

using PresPtr = std::shared_ptr<const Presentation>;

// ---------------------------------------------------------------------------
// Diagram

class Diagram {
 public:
  PresPtr pres;
  int input_arity = 0;
  std::vector<Level> levels;

  Diagram() = default;
  Diagram(PresPtr p, int in, std::vector<Level> ls)
      : pres(std::move(p)), input_arity(in), levels(std::move(ls)) {}

  static Diagram identity(PresPtr p, int wires) { return Diagram(std::move(p), wires, {}); }

  const GeneratorSymbol& gen_at(int level) const { return pres->gen(levels[level].gen); }

  // Running arity just below `level` (level == levels.size() gives the output).
  int arity_at(int level) const {
    int a = input_arity;
    for (int k = 0; k < level; ++k) {
      const GeneratorSymbol& g = gen_at(k);
      a += g.outputs - g.inputs;
    }
    return a;
  }

  int output_arity() const { return arity_at(static_cast<int>(levels.size())); }

  // Checks the arity recurrence; returns (input, output) or throws.
  std::pair<int, int> typecheck() const {
    int a = input_arity;
    if (a < 0) throw TypeCheckError(-1, 0, a);
    for (size_t k = 0; k < levels.size(); ++k) {
      const Level& l = levels[k];
      const GeneratorSymbol& g = pres->gen(l.gen);
      if (l.pad_left < 0 || l.pad_right < 0)
        throw TypeCheckError(static_cast<int>(k), a, -1);
      int row = l.pad_left + g.inputs + l.pad_right;
      if (row != a) throw TypeCheckError(static_cast<int>(k), a, row);
      a = l.pad_left + g.outputs + l.pad_right;
    }
    return {input_arity, a};
  }

  bool typechecks() const {
    try {
      typecheck();
      return true;
    } catch (const TypeCheckError&) {
      return false;
    }
  }

  friend bool operator==(const Diagram& a, const Diagram& b) {
    return a.pres->id == b.pres->id && a.pres->variables == b.pres->variables &&
           a.input_arity == b.input_arity && a.levels == b.levels;
  }
  friend bool operator!=(const Diagram& a, const Diagram& b) { return !(a == b); }

  // Compact structural key, usable as a hash-map key.
  std::string key() const {
    std::string s = std::to_string(input_arity);
    for (const Level& l : levels) {
      s += '|';
      s += std::to_string(l.pad_left);
      s += ',';
      s += std::to_string(l.gen);
      s += ',';
      s += std::to_string(l.pad_right);
    }
    return s;
  }
};

inline void require_same_presentation(const Diagram& a, const Diagram& b) {
  if (a.pres->id != b.pres->id || a.pres->variables != b.pres->variables)
    throw Error("presentation mismatch");
}

inline Diagram compose_vertical(const Diagram& lower, const Diagram& upper) {
  require_same_presentation(lower, upper);
  int mid = lower.output_arity();
  if (mid != upper.input_arity)
    throw Error("boundary mismatch in vertical composition: " + std::to_string(mid) +
                " != " + std::to_string(upper.input_arity));
  std::vector<Level> ls = lower.levels;
  ls.insert(ls.end(), upper.levels.begin(), upper.levels.end());
  return Diagram(lower.pres, lower.input_arity, std::move(ls));
}

// Representative: all of `left` below all of `right`.
inline Diagram tensor_horizontal(const Diagram& left, const Diagram& right) {
  require_same_presentation(left, right);
  std::vector<Level> ls;
  ls.reserve(left.levels.size() + right.levels.size());
  for (Level l : left.levels) {
    l.pad_right += right.input_arity;
    ls.push_back(l);
  }
  int shift = left.output_arity();
  for (Level l : right.levels) {
    l.pad_left += shift;
    ls.push_back(l);
  }
  return Diagram(left.pres, left.input_arity + right.input_arity, std::move(ls));
}

// ---------------------------------------------------------------------------
// Built-in presentations

namespace detail {

inline GenIndex add_gen(Presentation& p, const std::string& name, int in, int out,
                        Display d, GenKind k = GenKind::Structural) {
  p.generators.push_back(GeneratorSymbol{name, in, out, k, d});
  return static_cast<GenIndex>(p.generators.size() - 1);
}

// Shorthand constructors for patterns (gen indices resolved by name).
inline Pattern pat(const Presentation& p, int in,
                   std::initializer_list<std::tuple<int, const char*, int>> rows) {
  Pattern q;
  q.input_arity = in;
  for (const auto& [a, g, b] : rows) q.levels.push_back(Level{a, p.gen_index(g), b});
  return q;
}

inline void add_rule(Presentation& p, RuleKind kind, bool invertible, Pattern src,
                     Pattern tgt, const std::string& var = "") {
  // Both patterns must typecheck with equal boundary within this presentation.
  auto check = [&](const Pattern& q) {
    int a = q.input_arity;
    for (size_t k = 0; k < q.levels.size(); ++k) {
      const auto& g = p.generators[q.levels[k].gen];
      if (q.levels[k].pad_left + g.inputs + q.levels[k].pad_right != a)
        throw Error(std::string("rule pattern ill-typed: ") + rule_kind_name(kind));
      a = q.levels[k].pad_left + g.outputs + q.levels[k].pad_right;
    }
    return a;
  };
  int so = check(src), to = check(tgt);
  if (src.input_arity != tgt.input_arity || so != to)
    throw Error(std::string("rule boundary mismatch: ") + rule_kind_name(kind));
  p.rules.push_back(Rule{kind, var, invertible, std::move(src), std::move(tgt)});
}

inline void build_p(Presentation& p) {
  add_gen(p, "m", 2, 1, Display::Blue);
  add_gen(p, "u", 0, 1, Display::Blue);
  // alpha: m(m(x,y),z) => m(x,m(y,z))
  add_rule(p, RuleKind::Alpha, true,
           pat(p, 3, {{0, "m", 1}, {0, "m", 0}}),
           pat(p, 3, {{1, "m", 0}, {0, "m", 0}}));
  // lambda: m(u,x) => x ; rho: m(x,u) => x
  add_rule(p, RuleKind::Lambda, true, pat(p, 1, {{0, "u", 1}, {0, "m", 0}}), pat(p, 1, {}));
  add_rule(p, RuleKind::Rho, true, pat(p, 1, {{1, "u", 0}, {0, "m", 0}}), pat(p, 1, {}));
}

inline void build_f(Presentation& p) {
  build_p(p);
  add_gen(p, "cup", 0, 2, Display::Blue);
  add_gen(p, "f", 1, 0, Display::Blue);
  // mu: (f tensor id) . (m tensor id) . (id tensor cup) => id
  add_rule(p, RuleKind::Mu, true,
           pat(p, 1, {{1, "cup", 0}, {0, "m", 1}, {0, "f", 1}}), pat(p, 1, {}));
  // nu: mirror image
  add_rule(p, RuleKind::Nu, true,
           pat(p, 1, {{0, "cup", 1}, {1, "m", 0}, {1, "f", 0}}), pat(p, 1, {}));
}

inline void build_e(Presentation& p) {
  build_f(p);
  add_gen(p, "cap", 2, 0, Display::Blue);
  // pi: cap => f . m
  add_rule(p, RuleKind::Pi, true, pat(p, 2, {{0, "cap", 0}}),
           pat(p, 2, {{0, "m", 0}, {0, "f", 0}}));
  // snakeorators: sigma1 contracts the right-bent snake, sigma2 the left-bent one
  add_rule(p, RuleKind::Sigma1, true,
           pat(p, 1, {{1, "cup", 0}, {0, "cap", 1}}), pat(p, 1, {}));
  add_rule(p, RuleKind::Sigma2, true,
           pat(p, 1, {{0, "cup", 1}, {1, "cap", 0}}), pat(p, 1, {}));
  // rotations; each preserves the boundary and shifts the vertex twist by -1 (R) / +1 (L)
  add_rule(p, RuleKind::Rm, true, pat(p, 2, {{0, "m", 0}}),
           pat(p, 2, {{2, "cup", 0}, {1, "m", 1}, {0, "cap", 1}}));
  add_rule(p, RuleKind::Lm, true, pat(p, 2, {{0, "m", 0}}),
           pat(p, 2, {{0, "cup", 2}, {1, "m", 1}, {1, "cap", 0}}));
  add_rule(p, RuleKind::Ru, true, pat(p, 0, {{0, "u", 0}}),
           pat(p, 0, {{0, "cup", 0}, {0, "f", 1}}));
  add_rule(p, RuleKind::Lu, true, pat(p, 0, {{0, "u", 0}}),
           pat(p, 0, {{0, "cup", 0}, {1, "f", 0}}));
  add_rule(p, RuleKind::Rf, true, pat(p, 1, {{0, "f", 0}}),
           pat(p, 1, {{1, "u", 0}, {0, "cap", 0}}));
  add_rule(p, RuleKind::Lf, true, pat(p, 1, {{0, "f", 0}}),
           pat(p, 1, {{0, "u", 1}, {0, "cap", 0}}));
}

inline void build_fstar(Presentation& p) {
  build_f(p);
  add_gen(p, "mstar", 1, 2, Display::Red);
  add_gen(p, "ustar", 1, 0, Display::Red);
  // m -| mstar and u -| ustar; units/counits are not invertible, the zig-zag
  // relations are equations between traces.
  add_rule(p, RuleKind::Eta, false, pat(p, 2, {}),
           pat(p, 2, {{0, "m", 0}, {0, "mstar", 0}}));
  add_rule(p, RuleKind::Epsilon, false,
           pat(p, 1, {{0, "mstar", 0}, {0, "m", 0}}), pat(p, 1, {}));
  add_rule(p, RuleKind::Phi, false, pat(p, 0, {}),
           pat(p, 0, {{0, "u", 0}, {0, "ustar", 0}}));
  add_rule(p, RuleKind::Psi, false,
           pat(p, 1, {{0, "ustar", 0}, {0, "u", 0}}), pat(p, 1, {}));
}

}  // namespace detail

inline PresPtr builtin_presentation(PresentationId id) {
  auto p = std::make_shared<Presentation>();
  p->id = id;
  switch (id) {
    case PresentationId::P: detail::build_p(*p); break;
    case PresentationId::F: detail::build_f(*p); break;
    case PresentationId::E: detail::build_e(*p); break;
    case PresentationId::Fstar: detail::build_fstar(*p); break;
  }
  return p;
}

// Adds per-variable black dot generators V_l/V_r and the arc-pair rules.
// unit_V: empty => [cup; V_l tensor V_r]; counit_V re-pairs two cups across
// an opposing (V_r, V_l) dot pair (F* has no cap, so annihilation re-plumbs).
inline PresPtr extend_with_variables(const PresPtr& base, const std::vector<std::string>& names) {
  if (names.empty()) throw Error("variable list is empty");
  auto p = std::make_shared<Presentation>(*base);
  for (const auto& v : names) {
    if (v.empty()) throw Error("empty variable name");
    if (std::count(names.begin(), names.end(), v) > 1) throw Error("duplicate variable: " + v);
    if (std::count(p->variables.begin(), p->variables.end(), v) > 0)
      throw Error("duplicate variable: " + v);
    std::string ln = v + "_l", rn = v + "_r";
    if (p->has_gen(v) || p->has_gen(ln) || p->has_gen(rn)) throw Error("name collision: " + v);
    p->variables.push_back(v);
    detail::add_gen(*p, ln, 1, 0, Display::Black, GenKind::Variable);
    detail::add_gen(*p, rn, 1, 0, Display::Black, GenKind::Variable);
    detail::add_rule(*p, RuleKind::UnitVar, false, detail::pat(*p, 0, {}),
                     detail::pat(*p, 0, {{0, "cup", 0}, {0, ln.c_str(), 1}, {0, rn.c_str(), 0}}),
                     v);
    detail::add_rule(*p, RuleKind::CounitVar, false,
                     detail::pat(*p, 0, {{0, "cup", 0},
                                         {2, "cup", 0},
                                         {1, rn.c_str(), 2},
                                         {1, ln.c_str(), 1}}),
                     detail::pat(*p, 0, {{0, "cup", 0}}), v);
  }
  return p;
}

// Convenience: a one-level diagram for a named generator, padded into `wires`
// at `at` (arity = wires).
inline Diagram single(const PresPtr& p, const std::string& gen, int wires = -1, int at = 0) {
  GenIndex gi = p->gen_index(gen);
  const GeneratorSymbol& g = p->gen(gi);
  if (wires < 0) wires = g.inputs;
  return Diagram(p, wires, {Level{at, gi, wires - at - g.inputs}});
}

}  // namespace frob
