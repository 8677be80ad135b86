#pragma once

#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "frob/core.hpp"
#include "frob/graph.hpp"
#include "frob/rewrite.hpp"

// The constructive normalization pipeline: snake removal, untwisting,
// left-pseudomonoid form, canonical form, and the coherence-based
// equivalence decision with witness traces.

namespace frob {

struct NormalizationResult {
  Diagram normal;
  Trace witness;  // witness.source == input, verify_trace(witness) == normal
};

struct NormalizeOptions {
  // When set, candidate orders are shuffled (used to exercise confluence).
  std::optional<unsigned> shuffle_seed;
  int max_steps = 200000;
};

namespace detail {

// Wire ids per level: which ids each level consumes / produces.
struct WireSim {
  std::vector<std::vector<int>> consumed, produced;
  std::vector<int> final_wires;
  int next_id = 0;

  explicit WireSim(const Diagram& d) {
    std::vector<int> live;
    for (int i = 0; i < d.input_arity; ++i) live.push_back(next_id++);
    consumed.resize(d.levels.size());
    produced.resize(d.levels.size());
    for (size_t k = 0; k < d.levels.size(); ++k) {
      const Level& l = d.levels[k];
      const GeneratorSymbol& g = d.gen_at(static_cast<int>(k));
      for (int i = 0; i < g.inputs; ++i) consumed[k].push_back(live[l.pad_left + i]);
      live.erase(live.begin() + l.pad_left, live.begin() + l.pad_left + g.inputs);
      std::vector<int> born;
      for (int i = 0; i < g.outputs; ++i) {
        produced[k].push_back(next_id);
        born.push_back(next_id++);
      }
      live.insert(live.begin() + l.pad_left, born.begin(), born.end());
    }
    final_wires = live;
  }
};

template <typename T>
inline void maybe_shuffle(std::vector<T>& v, const NormalizeOptions& opt) {
  if (!opt.shuffle_seed) return;
  std::mt19937 rng(*opt.shuffle_seed + static_cast<unsigned>(v.size()) * 7919u);
  std::shuffle(v.begin(), v.end(), rng);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Snake removal

// Executes the snake removal scheme for one eliminable pair: gather the
// obstructing levels between the cup and cap, interchange them out of the
// band, then contract with the matching snakeorator.
inline NormalizationResult remove_snake(const Diagram& d0, const EliminablePair& pair) {
  auto pairs = eliminable_pairs(d0);
  bool ok = false;
  for (const auto& p : pairs)
    if (p.cup_level == pair.cup_level && p.cap_level == pair.cap_level) ok = true;
  if (!ok) throw Error("pair is not eliminable");

  Trace t;
  t.source = d0;
  Diagram d = d0;
  int i = pair.cup_level, j = pair.cap_level;

  auto emit_transpose = [&](int k) {
    t.steps.push_back(Step{RuleRef{RuleKind::Interchange, ""}, true, k, 0});
    d = transpose(d, k);
  };

  // Levels in the band connected (within the band) to the cap's outer wire
  // must exit downward; everything else exits upward.
  auto down_set = [&]() -> std::set<int> {
    detail::WireSim sim(d);
    // Central wire: consumed by cap at j and produced by cup at i.
    int central = -1;
    for (int w : sim.consumed[j])
      for (int v : sim.produced[i])
        if (w == v) central = w;
    std::set<int> down;
    if (central < 0) return down;
    int outer = sim.consumed[j][0] == central ? sim.consumed[j][1] : sim.consumed[j][0];
    // Closure of band levels over shared wires, seeded by the outer wire.
    std::set<int> wires = {outer};
    bool grew = true;
    while (grew) {
      grew = false;
      for (int k = i + 1; k < j; ++k) {
        if (down.count(k)) continue;
        bool touches = false;
        for (int w : sim.consumed[k])
          if (wires.count(w)) touches = true;
        for (int w : sim.produced[k])
          if (wires.count(w)) touches = true;
        if (!touches) continue;
        down.insert(k);
        for (int w : sim.consumed[k]) wires.insert(w);
        for (int w : sim.produced[k]) wires.insert(w);
        grew = true;
      }
    }
    return down;
  };

  int guard = 0;
  while (j > i + 1) {
    if (++guard > 10000) throw Error("snake removal failed to converge");
    if (can_transpose(d, j - 1)) {  // move the obstructor just below the cap above it
      emit_transpose(j - 1);
      --j;
      continue;
    }
    if (can_transpose(d, i)) {  // move the obstructor just above the cup below it
      emit_transpose(i);
      ++i;
      continue;
    }
    std::set<int> down = down_set();
    bool moved = false;
    for (int k = i + 1; k + 1 < j && !moved; ++k) {
      if (!down.count(k) && down.count(k + 1) && can_transpose(d, k)) {
        emit_transpose(k);
        moved = true;
      }
    }
    if (!moved) throw Error("snake removal stuck");
  }

  const Level& cup = d.levels[i];
  const Level& cap = d.levels[j];
  Step sigma;
  sigma.forward = true;
  sigma.level = i;
  if (cap.pad_left == cup.pad_left - 1) {
    sigma.rule = RuleRef{RuleKind::Sigma1, ""};
    sigma.offset = cap.pad_left;
  } else if (cap.pad_left == cup.pad_left + 1) {
    sigma.rule = RuleRef{RuleKind::Sigma2, ""};
    sigma.offset = cup.pad_left;
  } else {
    throw Error("cleared pair is not a snakeorator redex");
  }
  d = apply_step(d, sigma);
  t.steps.push_back(sigma);
  return NormalizationResult{d, t};
}

// ---------------------------------------------------------------------------
// Straighten (the rotational 2-morphism Omega)

namespace detail {

inline bool is_pseudomonoid_form(const Diagram& d) {
  for (int k = 0; k < static_cast<int>(d.levels.size()); ++k) {
    const auto& g = d.gen_at(k);
    if (g.name != "m" && g.name != "u") return false;
  }
  return classify(d).simple;
}

}  // namespace detail

inline NormalizationResult straighten(const Diagram& d0,
                                      const NormalizeOptions& opt = {}) {
  if (!classify(d0).simple) throw Error("straighten requires a simple diagram");
  if (!d0.pres->find_rule(RuleKind::Rm)) throw Error("rotations not available in presentation");

  Trace t;
  t.source = d0;
  Diagram d = d0;
  auto emit = [&](const Step& s) {
    d = apply_step(d, s);
    t.steps.push_back(s);
    if (static_cast<int>(t.steps.size()) > opt.max_steps)
      throw Error("straighten exceeded step limit");
  };

  // Loop A: rotate twisted vertices until untwisted.
  int guard = 0;
  while (true) {
    if (++guard > opt.max_steps) throw Error("straighten loop A failed to converge");
    TwistReport rep = twistedness(d);
    if (rep.untwisted) break;
    std::vector<std::pair<int, int>> cands;  // (level, tw)
    int best = 0;
    for (auto [lvl, tw] : rep.twist) best = std::max(best, std::abs(tw));
    for (auto [lvl, tw] : rep.twist)
      if (std::abs(tw) == best && tw != 0) cands.push_back({lvl, tw});
    detail::maybe_shuffle(cands, opt);
    auto [lvl, tw] = cands.front();
    const GeneratorSymbol& g = d.gen_at(lvl);
    RuleKind rk;
    if (g.name == "m") rk = tw > 0 ? RuleKind::Rm : RuleKind::Lm;
    else if (g.name == "u") rk = tw > 0 ? RuleKind::Ru : RuleKind::Lu;
    else rk = tw > 0 ? RuleKind::Rf : RuleKind::Lf;
    emit(Step{RuleRef{rk, ""}, true, lvl, d.levels[lvl].pad_left});
  }

  // Loop B: remove every eliminable pair.
  while (true) {
    auto pairs = eliminable_pairs(d);
    if (pairs.empty()) break;
    detail::maybe_shuffle(pairs, opt);
    NormalizationResult r = remove_snake(d, pairs.front());
    for (const Step& s : r.witness.steps) t.steps.push_back(s);
    d = r.normal;
    if (static_cast<int>(t.steps.size()) > opt.max_steps)
      throw Error("straighten loop B exceeded step limit");
  }

  if (!detail::is_pseudomonoid_form(d)) throw Error("straighten did not reach pseudomonoid form");
  return NormalizationResult{d, t};
}

// ---------------------------------------------------------------------------
// Left-pseudomonoid form (the interchanger 2-morphism Theta)

namespace detail {

// Recursively reorders levels so each m's left subtree sits entirely above
// its right subtree. Operates on the index range [lo, hi) whose last level is
// the block root.
inline void left_normalize_block(Diagram& d, Trace& t, int lo, int hi) {
  if (hi - lo <= 1) return;
  int root = hi - 1;
  const GeneratorSymbol& g = d.gen_at(root);
  if (g.name != "m") throw Error("left form: non-m block root with levels below");
  WireSim sim(d);
  int left_wire = sim.consumed[root][0];
  int right_wire = sim.consumed[root][1];
  // Tag levels by which root input they feed.
  std::vector<int> tag(hi, -1);  // 0 = right subtree (goes below), 1 = left
  std::set<int> lw = {left_wire}, rw = {right_wire};
  for (int k = root - 1; k >= lo; --k) {
    bool inl = false, inr = false;
    for (int w : sim.produced[k]) {
      if (lw.count(w)) inl = true;
      if (rw.count(w)) inr = true;
    }
    if (inl == inr) throw Error("left form: level feeds neither or both subtrees");
    tag[k] = inl ? 1 : 0;
    for (int w : sim.consumed[k]) (inl ? lw : rw).insert(w);
  }
  // Stable partition by adjacent transposes: right-subtree levels first.
  bool moved = true;
  while (moved) {
    moved = false;
    for (int k = lo; k + 1 < root; ++k) {
      if (tag[k] == 1 && tag[k + 1] == 0) {
        t.steps.push_back(Step{RuleRef{RuleKind::Interchange, ""}, true, k, 0});
        d = transpose(d, k);
        std::swap(tag[k], tag[k + 1]);
        moved = true;
      }
    }
  }
  int nr = 0;
  for (int k = lo; k < root; ++k)
    if (tag[k] == 0) ++nr;
  left_normalize_block(d, t, lo, lo + nr);          // right subtree
  left_normalize_block(d, t, lo + nr, root);        // left subtree
}

}  // namespace detail

inline bool in_left_pseudomonoid_form(const Diagram& d);

inline NormalizationResult left_normalize(const Diagram& d0) {
  if (!detail::is_pseudomonoid_form(d0)) throw Error("left_normalize requires pseudomonoid form");
  Trace t;
  t.source = d0;
  Diagram d = d0;
  detail::left_normalize_block(d, t, 0, static_cast<int>(d.levels.size()));
  return NormalizationResult{d, t};
}

// Recursive predicate for left-pseudomonoid form (input leaves permitted).
inline bool in_left_pseudomonoid_form(const Diagram& d) {
  if (!detail::is_pseudomonoid_form(d)) return false;
  std::function<bool(const Diagram&, int, int)> check = [&](const Diagram& dd, int lo,
                                                            int hi) -> bool {
    if (hi - lo <= 0) return true;   // bare input leaf
    if (hi - lo == 1) return true;   // single u or m over leaves
    int root = hi - 1;
    if (dd.gen_at(root).name != "m") return false;
    detail::WireSim sim(dd);
    std::set<int> lw = {sim.consumed[root][0]}, rw = {sim.consumed[root][1]};
    std::vector<int> tag(hi, -1);
    for (int k = root - 1; k >= lo; --k) {
      bool inl = false, inr = false;
      for (int w : sim.produced[k]) {
        if (lw.count(w)) inl = true;
        if (rw.count(w)) inr = true;
      }
      if (inl == inr) return false;
      tag[k] = inl ? 1 : 0;
      for (int w : sim.consumed[k]) (inl ? lw : rw).insert(w);
    }
    int split = lo;
    while (split < root && tag[split] == 0) ++split;
    for (int k = split; k < root; ++k)
      if (tag[k] == 0) return false;  // right-subtree level above a left one
    return check(dd, lo, split) && check(dd, split, root);
  };
  return check(d, 0, static_cast<int>(d.levels.size()));
}

// ---------------------------------------------------------------------------
// Canonical form

namespace detail {

// Bubble level `from` upward until it sits directly below `to` (exclusive);
// all intervening levels must be support-disjoint.
inline int bubble_up_to(Diagram& d, Trace& t, int from, int to) {
  int k = from;
  while (k + 1 < to) {
    if (!can_transpose(d, k)) throw Error("bubble blocked");
    t.steps.push_back(Step{RuleRef{RuleKind::Interchange, ""}, true, k, 0});
    d = transpose(d, k);
    ++k;
  }
  return k;
}

}  // namespace detail

// Straighten, eliminate units via lambda/rho, reassociate to a left comb via
// alpha, then sort with left_normalize. The result is determined by the
// boundary: the left comb of n-1 m's (n >= 1) or the single u (n == 0).
inline NormalizationResult canonical_form(const Diagram& d0,
                                          const NormalizeOptions& opt = {}) {
  NormalizationResult st = straighten(d0, opt);
  Diagram d = st.normal;
  Trace t = st.witness;
  int n = d.input_arity;

  auto count_us = [&]() {
    int c = 0;
    for (int k = 0; k < static_cast<int>(d.levels.size()); ++k)
      if (d.gen_at(k).name == "u") ++c;
    return c;
  };

  int target_us = n == 0 ? 1 : 0;
  int guard = 0;
  while (count_us() > target_us) {
    if (++guard > opt.max_steps) throw Error("unit elimination failed to converge");
    detail::WireSim sim(d);
    std::vector<int> us;
    for (int k = 0; k < static_cast<int>(d.levels.size()); ++k)
      if (d.gen_at(k).name == "u") us.push_back(k);
    detail::maybe_shuffle(us, opt);
    bool done = false;
    for (int uk : us) {
      int w = sim.produced[uk][0];
      int consumer = -1, which = -1;
      for (int k = uk + 1; k < static_cast<int>(d.levels.size()); ++k) {
        for (size_t i = 0; i < sim.consumed[k].size(); ++i)
          if (sim.consumed[k][i] == w) {
            consumer = k;
            which = static_cast<int>(i);
          }
        if (consumer >= 0) break;
      }
      if (consumer < 0 || d.gen_at(consumer).name != "m") continue;
      int at = detail::bubble_up_to(d, t, uk, consumer);
      // With the u directly below its m: lambda if it feeds the left leg.
      Step s;
      s.forward = true;
      s.level = at;
      const Level& mrow = d.levels[at + 1];
      if (which == 0) {
        s.rule = RuleRef{RuleKind::Lambda, ""};
        s.offset = mrow.pad_left;
      } else {
        s.rule = RuleRef{RuleKind::Rho, ""};
        s.offset = mrow.pad_left;
      }
      d = apply_step(d, s);
      t.steps.push_back(s);
      done = true;
      break;
    }
    if (!done) throw Error("unit elimination found no reducible unit");
  }

  // Reassociate to a left comb: while some m's right input comes from
  // another m, bring that child adjacent and apply alpha backward.
  guard = 0;
  while (true) {
    if (++guard > opt.max_steps) throw Error("reassociation failed to converge");
    detail::WireSim sim(d);
    std::vector<std::pair<int, int>> redexes;  // (child m level, parent m level)
    for (int k = 0; k < static_cast<int>(d.levels.size()); ++k) {
      if (d.gen_at(k).name != "m") continue;
      int w = sim.produced[k][0];
      for (int p = k + 1; p < static_cast<int>(d.levels.size()); ++p) {
        if (d.gen_at(p).name != "m") continue;
        if (sim.consumed[p].size() == 2 && sim.consumed[p][1] == w)
          redexes.push_back({k, p});
      }
    }
    if (redexes.empty()) break;
    detail::maybe_shuffle(redexes, opt);
    auto [child, parent] = redexes.front();
    int at = detail::bubble_up_to(d, t, child, parent);
    Step s;
    s.rule = RuleRef{RuleKind::Alpha, ""};
    s.forward = false;
    s.level = at;
    s.offset = d.levels[at + 1].pad_left;
    d = apply_step(d, s);
    t.steps.push_back(s);
  }

  NormalizationResult ln = left_normalize(d);
  for (const Step& s : ln.witness.steps) t.steps.push_back(s);
  d = ln.normal;

  // Shape check: the boundary-determined comb.
  if (n == 0) {
    if (!(d.levels.size() == 1 && d.gen_at(0).name == "u"))
      throw Error("canonical form: expected the single u");
  } else {
    if (static_cast<int>(d.levels.size()) != n - 1)
      throw Error("canonical form: expected a left comb");
    for (int k = 0; k < static_cast<int>(d.levels.size()); ++k)
      if (d.gen_at(k).name != "m" || d.levels[k].pad_left != 0)
        throw Error("canonical form: expected a left comb");
  }
  return NormalizationResult{d, t};
}

// ---------------------------------------------------------------------------
// Equivalence decision

struct EquivalenceVerdict {
  enum Status { Equal, NotComparable, Unknown } status = Unknown;
  std::optional<Trace> witness;  // present iff Equal
  std::string reason;
};

// Bends outputs down (right to left, with caps) until exactly one remains;
// a diagram with no outputs first gets its rightmost input bent up with a cup.
inline Diagram bend_to_single_output(const Diagram& d0) {
  Diagram d = d0;
  if (d.output_arity() == 0) {
    if (d.input_arity == 0) throw Error("cannot bend an empty-boundary diagram");
    std::vector<Level> ls;
    ls.push_back(Level{d.input_arity - 1, d.pres->gen_index("cup"), 0});
    for (Level l : d.levels) {
      l.pad_right += 1;
      ls.push_back(l);
    }
    d = Diagram(d.pres, d.input_arity - 1, std::move(ls));
  }
  while (d.output_arity() > 1) {
    int b = d.output_arity();
    std::vector<Level> ls;
    for (Level l : d.levels) {
      l.pad_right += 1;
      ls.push_back(l);
    }
    ls.push_back(Level{b - 1, d.pres->gen_index("cap"), 0});
    d = Diagram(d.pres, d.input_arity + 1, std::move(ls));
  }
  return d;
}

inline EquivalenceVerdict decide_equivalent(const Diagram& a, const Diagram& b,
                                            const NormalizeOptions& opt = {}) {
  EquivalenceVerdict v;
  if (a.pres->id != b.pres->id || a.pres->variables != b.pres->variables) {
    v.status = EquivalenceVerdict::NotComparable;
    v.reason = "presentation mismatch";
    return v;
  }
  for (const Diagram* d : {&a, &b})
    for (int k = 0; k < static_cast<int>(d->levels.size()); ++k) {
      const auto& g = d->gen_at(k);
      if (g.name == "mstar" || g.name == "ustar" || g.kind == GenKind::Variable) {
        v.status = EquivalenceVerdict::Unknown;
        v.reason = "coherence theorem does not cover " + g.name + " vertices";
        return v;
      }
    }
  if (a.input_arity != b.input_arity || a.output_arity() != b.output_arity()) {
    v.status = EquivalenceVerdict::NotComparable;
    v.reason = "boundary mismatch";
    return v;
  }
  if (a.input_arity + a.output_arity() == 0) {
    v.status = EquivalenceVerdict::NotComparable;
    v.reason = "empty boundary";
    return v;
  }
  for (const Diagram* d : {&a, &b}) {
    Classification c = classify(*d);
    if (!c.connected || !c.acyclic) {
      v.status = EquivalenceVerdict::NotComparable;
      v.reason = c.connected ? "cyclic diagram" : "disconnected diagram";
      return v;
    }
  }
  bool bent = a.output_arity() != 1;
  Diagram a1 = bend_to_single_output(a);
  Diagram b1 = bend_to_single_output(b);
  NormalizationResult ca = canonical_form(a1, opt);
  NormalizationResult cb = canonical_form(b1, opt);
  if (!(ca.normal == cb.normal)) {
    v.status = EquivalenceVerdict::Unknown;
    v.reason = "canonical forms disagree";
    return v;
  }
  Trace w = concat_traces(ca.witness, reversed_trace(cb.witness, ca.normal));
  v.status = EquivalenceVerdict::Equal;
  v.witness = std::move(w);
  v.reason = bent ? "equal after bending outputs to a single wire" : "equal canonical forms";
  return v;
}

}  // namespace frob
