#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frob/core.hpp"

// Rule pattern matching, single-step application, interchangers, and trace
// verification. A Step is one rewrite anchored at (level, offset); a Trace is
// a source diagram plus an ordered step sequence.

namespace frob {

struct RuleRef {
  RuleKind kind = RuleKind::Interchange;
  std::string var;  // for unit_V / counit_V

  friend bool operator==(const RuleRef& a, const RuleRef& b) {
    return a.kind == b.kind && a.var == b.var;
  }
  std::string name() const {
    if (kind == RuleKind::UnitVar) return "unit_" + var;
    if (kind == RuleKind::CounitVar) return "counit_" + var;
    return rule_kind_name(kind);
  }
};

struct Step {
  RuleRef rule;
  bool forward = true;
  int level = 0;
  int offset = 0;
};

struct MatchError : Error {
  int level;
  explicit MatchError(const std::string& what, int level_) : Error(what), level(level_) {}
};

struct Match {
  int level = 0;
  int offset = 0;
  int residual = 0;           // extra right pad common to all pattern rows
  int rows = 0;               // rows consumed in the host
  const Rule* rule = nullptr;
  bool forward = true;
};

// The (source if forward, target if backward) pattern must appear as the
// consecutive block starting at `level`, every row shifted right by `offset`
// and right-padded by a common residual.
inline std::optional<Match> try_match_rule(const Diagram& d, const RuleRef& ref, int level,
                                           int offset, bool forward, std::string* why = nullptr) {
  const Rule* rule = d.pres->find_rule(ref.kind, ref.var);
  if (!rule) {
    if (why) *why = "rule not available in presentation: " + ref.name();
    return std::nullopt;
  }
  if (!forward && !rule->invertible && ref.kind != RuleKind::Interchange) {
    if (why) *why = "rule is not invertible: " + ref.name();
    return std::nullopt;
  }
  const Pattern& pat = forward ? rule->source : rule->target;
  if (level < 0 || level + pat.levels.size() > d.levels.size()) {
    if (why) *why = "pattern block out of range";
    return std::nullopt;
  }
  int arity = d.arity_at(level);
  int residual = arity - offset - pat.input_arity;
  if (offset < 0 || residual < 0) {
    if (why) *why = "offset out of range";
    return std::nullopt;
  }
  for (size_t i = 0; i < pat.levels.size(); ++i) {
    const Level& want = pat.levels[i];
    const Level& got = d.levels[level + static_cast<int>(i)];
    if (got.gen != want.gen || got.pad_left != want.pad_left + offset ||
        got.pad_right != want.pad_right + residual) {
      if (why)
        *why = "first mismatch at level " + std::to_string(level + static_cast<int>(i));
      return std::nullopt;
    }
  }
  Match m;
  m.level = level;
  m.offset = offset;
  m.residual = residual;
  m.rows = static_cast<int>(pat.levels.size());
  m.rule = rule;
  m.forward = forward;
  return m;
}

inline Match match_rule(const Diagram& d, const RuleRef& ref, int level, int offset,
                        bool forward) {
  std::string why;
  auto m = try_match_rule(d, ref, level, offset, forward, &why);
  if (!m) throw MatchError("no match for " + ref.name() + ": " + why, level);
  return *m;
}

inline Diagram apply_match(const Diagram& d, const Match& m) {
  const Pattern& repl = m.forward ? m.rule->target : m.rule->source;
  std::vector<Level> ls;
  ls.reserve(d.levels.size() - m.rows + repl.levels.size());
  ls.insert(ls.end(), d.levels.begin(), d.levels.begin() + m.level);
  for (const Level& r : repl.levels)
    ls.push_back(Level{r.pad_left + m.offset, r.gen, r.pad_right + m.residual});
  ls.insert(ls.end(), d.levels.begin() + m.level + m.rows, d.levels.end());
  return Diagram(d.pres, d.input_arity, std::move(ls));
}

// ---------------------------------------------------------------------------
// Interchangers

// Horizontal support of the lower generator's outputs and the upper
// generator's inputs, on the intermediate wire row between levels k and k+1.
// Transposable iff one support lies entirely to one side of the other; empty
// supports are positions and must not fall strictly inside the other span.
inline bool can_transpose(const Diagram& d, int k) {
  if (k < 0 || k + 1 >= static_cast<int>(d.levels.size())) return false;
  const Level& lo = d.levels[k];
  const Level& hi = d.levels[k + 1];
  const GeneratorSymbol& glo = d.pres->gen(lo.gen);
  const GeneratorSymbol& ghi = d.pres->gen(hi.gen);
  int a = lo.pad_left, ae = lo.pad_left + glo.outputs;
  int b = hi.pad_left, be = hi.pad_left + ghi.inputs;
  if (glo.outputs == 0 && ghi.inputs == 0) return true;
  if (glo.outputs == 0) return a <= b || a >= be;
  if (ghi.inputs == 0) return b <= a || b >= ae;
  return be <= a || ae <= b;
}

inline std::vector<int> interchange_candidates(const Diagram& d) {
  std::vector<int> ks;
  for (int k = 0; k + 1 < static_cast<int>(d.levels.size()); ++k)
    if (can_transpose(d, k)) ks.push_back(k);
  return ks;
}

inline Diagram transpose(const Diagram& d, int k) {
  if (!can_transpose(d, k)) throw MatchError("levels not interchangeable", k);
  const Level lo = d.levels[k];
  const Level hi = d.levels[k + 1];
  const GeneratorSymbol& glo = d.pres->gen(lo.gen);
  const GeneratorSymbol& ghi = d.pres->gen(hi.gen);
  int dlo = glo.outputs - glo.inputs;
  int dhi = ghi.outputs - ghi.inputs;
  Level nlo, nhi;  // hi moves below lo
  bool hi_left;
  if (ghi.inputs == 0 && glo.outputs == 0)
    hi_left = hi.pad_left <= lo.pad_left;
  else if (ghi.inputs == 0)
    hi_left = hi.pad_left <= lo.pad_left;
  else if (glo.outputs == 0)
    hi_left = hi.pad_left + ghi.inputs <= lo.pad_left;
  else
    hi_left = hi.pad_left + ghi.inputs <= lo.pad_left;
  if (hi_left) {
    nlo = Level{hi.pad_left, hi.gen, hi.pad_right - dlo};
    nhi = Level{lo.pad_left + dhi, lo.gen, lo.pad_right};
  } else {
    nlo = Level{hi.pad_left - dlo, hi.gen, hi.pad_right};
    nhi = Level{lo.pad_left, lo.gen, lo.pad_right + dhi};
  }
  std::vector<Level> ls = d.levels;
  ls[k] = nlo;
  ls[k + 1] = nhi;
  Diagram out(d.pres, d.input_arity, std::move(ls));
  return out;
}

// ---------------------------------------------------------------------------
// Steps and traces

inline Diagram apply_step(const Diagram& d, const Step& s) {
  if (s.rule.kind == RuleKind::Interchange) return transpose(d, s.level);
  Match m = match_rule(d, s.rule, s.level, s.offset, s.forward);
  return apply_match(d, m);
}

inline bool step_applies(const Diagram& d, const Step& s) {
  if (s.rule.kind == RuleKind::Interchange) return can_transpose(d, s.level);
  return try_match_rule(d, s.rule, s.level, s.offset, s.forward).has_value();
}

struct Trace {
  Diagram source;
  std::vector<Step> steps;
};

struct TraceError : Error {
  int step;
  TraceError(const std::string& what, int step_)
      : Error("step " + std::to_string(step_) + " failed: " + what), step(step_) {}
};

inline Diagram verify_trace(const Trace& t) {
  t.source.typecheck();
  auto boundary = std::make_pair(t.source.input_arity, t.source.output_arity());
  Diagram d = t.source;
  for (size_t i = 0; i < t.steps.size(); ++i) {
    try {
      d = apply_step(d, t.steps[i]);
      d.typecheck();
    } catch (const Error& e) {
      throw TraceError(e.what(), static_cast<int>(i));
    }
    if (std::make_pair(d.input_arity, d.output_arity()) != boundary)
      throw TraceError("boundary changed", static_cast<int>(i));
  }
  return d;
}

inline Step reversed_step(const Step& s) {
  Step r = s;
  if (s.rule.kind != RuleKind::Interchange) r.forward = !s.forward;
  return r;
}

// Reverse of a trace from `target` back to the source. Only valid when every
// step is an interchange or an invertible rule.
inline Trace reversed_trace(const Trace& t, const Diagram& target) {
  Trace r;
  r.source = target;
  for (auto it = t.steps.rbegin(); it != t.steps.rend(); ++it)
    r.steps.push_back(reversed_step(*it));
  return r;
}

inline Trace concat_traces(const Trace& a, const Trace& b) {
  Trace t = a;
  t.steps.insert(t.steps.end(), b.steps.begin(), b.steps.end());
  return t;
}

inline bool is_adjunction_rule(RuleKind k) {
  switch (k) {
    case RuleKind::Eta:
    case RuleKind::Epsilon:
    case RuleKind::Phi:
    case RuleKind::Psi:
    case RuleKind::UnitVar:
    case RuleKind::CounitVar:
      return true;
    default:
      return false;
  }
}

inline int count_adjunction_steps(const Trace& t) {
  int n = 0;
  for (const Step& s : t.steps)
    if (is_adjunction_rule(s.rule.kind)) ++n;
  return n;
}

namespace detail {

// Whether steps i and j form a zig-zag pair: deleting both must leave a trace
// that replays to the same target. The surviving steps may need their anchors
// shifted (the cancelled rows are absent), and interchanges that only moved
// cancelled rows must be dropped; a small branching replay decides this.
struct CancelSearch {
  const Trace& t;
  size_t i, j;
  const Diagram& target;
  int budget = 20000;

  bool run(size_t k, const Diagram& shadow, std::vector<Step>& acc) {
    if (budget-- <= 0) return false;
    if (k == t.steps.size()) return shadow == target;
    if (k == i || k == j) return run(k + 1, shadow, acc);
    const Step& s = t.steps[k];
    bool in_window = k > i && k < j;
    // Interchanges inside the window usually only moved the cancelled rows;
    // try dropping them first.
    if (in_window && s.rule.kind == RuleKind::Interchange && run(k + 1, shadow, acc))
      return true;
    for (int dl = 0; dl <= 6; ++dl) {
      for (int sign = 0; sign < (dl == 0 ? 1 : 2); ++sign) {
        Step cand = s;
        cand.level = s.level + (sign == 0 ? -dl : dl);
        if (cand.level < 0) continue;
        if (!step_applies(shadow, cand)) continue;
        acc.push_back(cand);
        if (run(k + 1, apply_step(shadow, cand), acc)) return true;
        acc.pop_back();
      }
    }
    if (!in_window && s.rule.kind == RuleKind::Interchange && run(k + 1, shadow, acc))
      return true;
    return false;
  }
};

inline std::optional<Trace> try_cancel_pair(const Trace& t, size_t i, size_t j,
                                            const Diagram& target) {
  CancelSearch cs{t, i, j, target};
  std::vector<Step> acc;
  if (!cs.run(0, t.source, acc)) return std::nullopt;
  Trace out;
  out.source = t.source;
  out.steps = std::move(acc);
  try {
    if (!(verify_trace(out) == target)) return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
  return out;
}

inline bool zigzag_partners(RuleKind a, RuleKind b) {
  return (a == RuleKind::UnitVar && b == RuleKind::CounitVar) ||
         (a == RuleKind::Eta && b == RuleKind::Epsilon) ||
         (a == RuleKind::Phi && b == RuleKind::Psi);
}

}  // namespace detail

// Repeatedly deletes step pairs forming a zig-zag relation instance
// (unit;counit, eta;epsilon, phi;psi, possibly separated by interchanges that
// commute past) until none remain. Endpoints are unchanged.
inline Trace reduce_adjunction_pairs(const Trace& t) {
  Diagram target = verify_trace(t);
  Trace cur = t;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < cur.steps.size() && !changed; ++i) {
      const Step& a = cur.steps[i];
      if (!is_adjunction_rule(a.rule.kind)) continue;
      for (size_t j = i + 1; j < cur.steps.size() && !changed; ++j) {
        const Step& b = cur.steps[j];
        if (!is_adjunction_rule(b.rule.kind)) continue;
        if (!detail::zigzag_partners(a.rule.kind, b.rule.kind) || a.rule.var != b.rule.var)
          continue;
        auto reduced = detail::try_cancel_pair(cur, i, j, target);
        if (reduced) {
          cur = *reduced;
          changed = true;
        }
      }
    }
  }
  return cur;
}

}  // namespace frob
