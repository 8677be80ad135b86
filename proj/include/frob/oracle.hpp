#pragma once

#include <cstdlib>
#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "frob/core.hpp"
#include "frob/rewrite.hpp"

// Breadth-first reachability over the apply_step closure (invertible rules in
// both directions plus interchanges). Expands from both endpoints; valid
// because every explored step is reversible, so the step graph is undirected.

namespace frob {

struct OracleResult {
  bool found = false;
  Trace trace;           // verified a -> b when found
  long long explored = 0;
  bool node_cap_hit = false;
};

namespace detail {

inline long long oracle_node_cap() {
  if (const char* s = std::getenv("FROB_MAX_ORACLE_NODES")) {
    long long v = std::atoll(s);
    if (v > 0) return v;
  }
  return 1000000;
}

struct Visit {
  Diagram diagram;
  std::string parent;  // key of predecessor; empty for roots
  Step step;           // step applied to the predecessor
  int depth = 0;
};

inline void oracle_successors(const Diagram& d, int max_levels,
                              const std::function<void(const Step&, Diagram&&)>& sink) {
  int len = static_cast<int>(d.levels.size());
  for (int k = 0; k + 1 < len; ++k) {
    if (!can_transpose(d, k)) continue;
    Step s{RuleRef{RuleKind::Interchange, ""}, true, k, 0};
    sink(s, transpose(d, k));
  }
  for (const Rule& r : d.pres->rules) {
    if (!r.invertible) continue;
    for (int dir = 0; dir < 2; ++dir) {
      bool fwd = dir == 0;
      const Pattern& pat = fwd ? r.source : r.target;
      const Pattern& repl = fwd ? r.target : r.source;
      int delta = static_cast<int>(repl.levels.size()) - static_cast<int>(pat.levels.size());
      if (len + delta > max_levels) continue;
      int max_level = len - static_cast<int>(pat.levels.size());
      for (int lvl = 0; lvl <= max_level; ++lvl) {
        int arity = d.arity_at(lvl);
        for (int off = 0; off + pat.input_arity <= arity; ++off) {
          RuleRef ref{r.kind, r.var};
          auto m = try_match_rule(d, ref, lvl, off, fwd);
          if (!m) continue;
          Step s{ref, fwd, lvl, off};
          sink(s, apply_match(d, *m));
        }
      }
    }
  }
}

}  // namespace detail

inline OracleResult brute_force_reachable(const Diagram& a, const Diagram& b, int max_depth,
                                          int max_levels) {
  require_same_presentation(a, b);
  a.typecheck();
  b.typecheck();
  OracleResult res;
  if (a.input_arity != b.input_arity || a.output_arity() != b.output_arity()) return res;

  using detail::Visit;
  std::unordered_map<std::string, Visit> seen[2];
  std::deque<std::string> frontier[2];
  int depth[2] = {0, 0};
  std::string ka = a.key(), kb = b.key();
  seen[0][ka] = Visit{a, "", Step{}, 0};
  seen[1][kb] = Visit{b, "", Step{}, 0};
  frontier[0].push_back(ka);
  frontier[1].push_back(kb);
  long long cap = detail::oracle_node_cap();

  auto reconstruct = [&](const std::string& meet) {
    std::vector<Step> fwd;
    for (std::string k = meet; !seen[0][k].parent.empty(); k = seen[0][k].parent)
      fwd.push_back(seen[0][k].step);
    std::reverse(fwd.begin(), fwd.end());
    std::vector<Step> bwd;  // path b -> meet, to be reversed into meet -> b
    for (std::string k = meet; !seen[1][k].parent.empty(); k = seen[1][k].parent)
      bwd.push_back(seen[1][k].step);
    Trace t;
    t.source = a;
    t.steps = fwd;
    // The side-1 edges point from b toward the meet; reversed steps walk back.
    for (const Step& s : bwd) t.steps.push_back(reversed_step(s));
    verify_trace(t);
    res.found = true;
    res.trace = std::move(t);
  };

  if (ka == kb) {
    reconstruct(ka);
    return res;
  }

  while (depth[0] + depth[1] < max_depth && (!frontier[0].empty() || !frontier[1].empty())) {
    int side = (frontier[0].size() <= frontier[1].size() && !frontier[0].empty()) ? 0 : 1;
    if (frontier[side].empty()) side = 1 - side;
    if (depth[0] + depth[1] + 1 > max_depth) break;
    ++depth[side];
    std::deque<std::string> next;
    for (const std::string& key : frontier[side]) {
      Diagram cur = seen[side][key].diagram;
      bool stop = false;
      detail::oracle_successors(cur, max_levels, [&](const Step& s, Diagram&& nd) {
        if (stop) return;
        std::string nk = nd.key();
        if (seen[side].count(nk)) return;
        ++res.explored;
        if (res.explored > cap) {
          res.node_cap_hit = true;
          stop = true;
          return;
        }
        seen[side][nk] = Visit{nd, key, s, depth[side]};
        if (seen[1 - side].count(nk)) {
          reconstruct(nk);
          stop = true;
          return;
        }
        next.push_back(nk);
      });
      if (res.found || res.node_cap_hit) return res;
    }
    frontier[side] = std::move(next);
  }
  return res;
}

}  // namespace frob
