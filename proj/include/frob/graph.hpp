#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frob/core.hpp"

// Graph-theoretic and geometric analysis of diagrams. Vertices are generator
// occurrences other than cup/cap, plus boundary ports; cups and caps are
// turning points inside edges, so an edge is a maximal wire path.

namespace frob {

struct LegId {
  bool bottom = true;  // bottom legs attach wires from below, top legs from above
  int index = 0;       // left-to-right among legs on that side
  friend bool operator==(const LegId& a, const LegId& b) {
    return a.bottom == b.bottom && a.index == b.index;
  }
};

struct NodeId {
  enum Kind { Vertex, InputPort, OutputPort } kind = Vertex;
  int index = 0;  // level for Vertex; wire position for ports
  friend bool operator==(const NodeId& a, const NodeId& b) {
    return a.kind == b.kind && a.index == b.index;
  }
  friend bool operator<(const NodeId& a, const NodeId& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.index < b.index;
  }
};

struct TurnPoint {
  int level = 0;     // the cup/cap occurrence
  bool is_cup = true;
  int sign_fwd = 0;  // +1 right / -1 left when the edge is traversed a -> b
};

struct GraphEdge {
  // Closed loops have no endpoints (closed == true).
  NodeId a, b;
  LegId leg_a, leg_b;
  bool closed = false;
  std::vector<TurnPoint> turns;  // ordered a -> b
};

struct DiagramGraph {
  std::vector<NodeId> nodes;  // vertices then input ports then output ports
  std::vector<GraphEdge> edges;
  int closed_loops = 0;
  std::vector<std::vector<std::pair<int, bool>>> incidence;  // node -> (edge, at_a)

  int node_pos(const NodeId& n) const {
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] == n) return static_cast<int>(i);
    throw Error("node not in graph");
  }
};

namespace detail {

struct StrandEnd {
  enum Kind { Port, VertexLeg, CupLeg, CapLeg } kind = Port;
  NodeId node;     // for Port / VertexLeg
  LegId leg;       // for VertexLeg
  int level = 0;   // for CupLeg / CapLeg
  int side = 0;    // 0 = left leg, 1 = right leg of the cup/cap
};

struct Strand {
  StrandEnd lower, upper;
};

}  // namespace detail

inline bool is_cup_gen(const GeneratorSymbol& g) { return g.name == "cup"; }
inline bool is_cap_gen(const GeneratorSymbol& g) { return g.name == "cap"; }

inline DiagramGraph graph_view(const Diagram& d) {
  d.typecheck();
  using detail::Strand;
  using detail::StrandEnd;

  std::vector<Strand> strands;
  std::vector<int> live;  // strand index per wire column
  for (int i = 0; i < d.input_arity; ++i) {
    Strand s;
    s.lower = StrandEnd{StrandEnd::Port, NodeId{NodeId::InputPort, i}, {}, 0, 0};
    live.push_back(static_cast<int>(strands.size()));
    strands.push_back(s);
  }
  for (int k = 0; k < static_cast<int>(d.levels.size()); ++k) {
    const Level& l = d.levels[k];
    const GeneratorSymbol& g = d.gen_at(k);
    bool cup = is_cup_gen(g), cap = is_cap_gen(g);
    for (int i = 0; i < g.inputs; ++i) {
      int s = live[l.pad_left + i];
      strands[s].upper = cap ? StrandEnd{StrandEnd::CapLeg, {}, {}, k, i}
                             : StrandEnd{StrandEnd::VertexLeg, NodeId{NodeId::Vertex, k},
                                         LegId{true, i}, 0, 0};
    }
    std::vector<int> born;
    for (int i = 0; i < g.outputs; ++i) {
      Strand s;
      s.lower = cup ? StrandEnd{StrandEnd::CupLeg, {}, {}, k, i}
                    : StrandEnd{StrandEnd::VertexLeg, NodeId{NodeId::Vertex, k},
                                LegId{false, i}, 0, 0};
      born.push_back(static_cast<int>(strands.size()));
      strands.push_back(s);
    }
    live.erase(live.begin() + l.pad_left, live.begin() + l.pad_left + g.inputs);
    live.insert(live.begin() + l.pad_left, born.begin(), born.end());
  }
  for (size_t i = 0; i < live.size(); ++i)
    strands[live[i]].upper =
        StrandEnd{StrandEnd::Port, NodeId{NodeId::OutputPort, static_cast<int>(i)}, {}, 0, 0};

  // Per cup/cap occurrence, the two strands it joins.
  std::map<int, std::pair<int, int>> cup_join, cap_join;
  for (size_t si = 0; si < strands.size(); ++si) {
    const Strand& s = strands[si];
    if (s.lower.kind == StrandEnd::CupLeg) {
      auto& j = cup_join[s.lower.level];
      (s.lower.side == 0 ? j.first : j.second) = static_cast<int>(si);
    }
    if (s.upper.kind == StrandEnd::CapLeg) {
      auto& j = cap_join[s.upper.level];
      (s.upper.side == 0 ? j.first : j.second) = static_cast<int>(si);
    }
  }

  DiagramGraph gr;
  for (int k = 0; k < static_cast<int>(d.levels.size()); ++k) {
    const GeneratorSymbol& g = d.gen_at(k);
    if (!is_cup_gen(g) && !is_cap_gen(g)) gr.nodes.push_back(NodeId{NodeId::Vertex, k});
  }
  for (int i = 0; i < d.input_arity; ++i) gr.nodes.push_back(NodeId{NodeId::InputPort, i});
  int out = d.output_arity();
  for (int i = 0; i < out; ++i) gr.nodes.push_back(NodeId{NodeId::OutputPort, i});

  // Walk chains of strands joined at cups/caps.
  std::vector<bool> used(strands.size(), false);
  auto other_at_join = [&](const StrandEnd& e, int self) -> std::optional<std::pair<int, int>> {
    // Returns (next strand, sign of the turn when traversed into this end).
    if (e.kind == StrandEnd::CupLeg) {
      auto j = cup_join.at(e.level);
      int nxt = e.side == 0 ? j.second : j.first;
      // Arriving downward at a cup: right leg -> right turn, left leg -> left.
      int sign = e.side == 1 ? +1 : -1;
      (void)self;
      return std::make_pair(nxt, sign);
    }
    if (e.kind == StrandEnd::CapLeg) {
      auto j = cap_join.at(e.level);
      int nxt = e.side == 0 ? j.second : j.first;
      // Arriving upward at a cap: left leg -> right turn, right leg -> left.
      int sign = e.side == 0 ? +1 : -1;
      return std::make_pair(nxt, sign);
    }
    return std::nullopt;
  };

  auto end_node = [&](const StrandEnd& e, NodeId& n, LegId& leg) {
    if (e.kind == StrandEnd::Port) {
      n = e.node;
      leg = LegId{};
      return true;
    }
    if (e.kind == StrandEnd::VertexLeg) {
      n = e.node;
      leg = e.leg;
      return true;
    }
    return false;
  };

  auto walk = [&](int start, bool from_lower) {
    GraphEdge e;
    NodeId n;
    LegId leg;
    const StrandEnd& se = from_lower ? strands[start].lower : strands[start].upper;
    end_node(se, n, leg);
    e.a = n;
    e.leg_a = leg;
    int cur = start;
    bool heading_up = from_lower;  // traversing toward the other end
    while (true) {
      used[cur] = true;
      const StrandEnd& nxt_end = heading_up ? strands[cur].upper : strands[cur].lower;
      NodeId n2;
      LegId leg2;
      if (end_node(nxt_end, n2, leg2)) {
        e.b = n2;
        e.leg_b = leg2;
        break;
      }
      auto j = other_at_join(nxt_end, cur);
      e.turns.push_back(TurnPoint{nxt_end.level, nxt_end.kind == StrandEnd::CupLeg, j->second});
      cur = j->first;
      // After a cup we continue upward along the sibling leg; after a cap, downward.
      heading_up = nxt_end.kind == StrandEnd::CupLeg;
    }
    gr.edges.push_back(std::move(e));
  };

  for (size_t si = 0; si < strands.size(); ++si) {
    if (used[si]) continue;
    if (strands[si].lower.kind == StrandEnd::Port ||
        strands[si].lower.kind == StrandEnd::VertexLeg)
      walk(static_cast<int>(si), true);
    else if (strands[si].upper.kind == StrandEnd::Port ||
             strands[si].upper.kind == StrandEnd::VertexLeg)
      walk(static_cast<int>(si), false);
  }
  // Remaining strands belong to closed loops.
  for (size_t si = 0; si < strands.size(); ++si) {
    if (used[si]) continue;
    GraphEdge e;
    e.closed = true;
    int cur = static_cast<int>(si);
    bool heading_up = true;
    while (!used[cur]) {
      used[cur] = true;
      const StrandEnd& nxt_end = heading_up ? strands[cur].upper : strands[cur].lower;
      auto j = other_at_join(nxt_end, cur);
      e.turns.push_back(TurnPoint{nxt_end.level, nxt_end.kind == StrandEnd::CupLeg, j->second});
      heading_up = nxt_end.kind == StrandEnd::CupLeg;
      cur = j->first;
    }
    ++gr.closed_loops;
    gr.edges.push_back(std::move(e));
  }

  gr.incidence.assign(gr.nodes.size(), {});
  for (size_t ei = 0; ei < gr.edges.size(); ++ei) {
    const GraphEdge& e = gr.edges[ei];
    if (e.closed) continue;
    gr.incidence[gr.node_pos(e.a)].push_back({static_cast<int>(ei), true});
    gr.incidence[gr.node_pos(e.b)].push_back({static_cast<int>(ei), false});
  }
  return gr;
}

struct Classification {
  bool connected = false;
  bool acyclic = false;
  int boundary_count = 0;
  bool simple = false;
};

inline Classification classify(const Diagram& d) {
  DiagramGraph g = graph_view(d);
  Classification c;
  c.boundary_count = d.input_arity + d.output_arity();

  std::vector<int> parent(g.nodes.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  bool cycle = g.closed_loops > 0;
  for (const GraphEdge& e : g.edges) {
    if (e.closed) continue;
    int ra = find(g.node_pos(e.a)), rb = find(g.node_pos(e.b));
    if (ra == rb)
      cycle = true;
    else
      parent[ra] = rb;
  }
  int comps = g.closed_loops;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    if (find(static_cast<int>(i)) == static_cast<int>(i)) ++comps;
  c.connected = comps <= 1;
  c.acyclic = !cycle;
  c.simple = c.connected && c.acyclic && d.output_arity() == 1;
  return c;
}

// ---------------------------------------------------------------------------
// Twistedness

struct TwistReport {
  std::map<int, int> twist;  // level of each m/u/f occurrence -> Tw
  bool untwisted = true;
};

namespace detail {

// Unique path (edge indices with direction) from `from` to `to` in a tree.
inline std::optional<std::vector<std::pair<int, bool>>> tree_path(const DiagramGraph& g,
                                                                  const NodeId& from,
                                                                  const NodeId& to) {
  int src = g.node_pos(from), dst = g.node_pos(to);
  std::vector<int> prev_edge(g.nodes.size(), -1), prev_node(g.nodes.size(), -1);
  std::vector<bool> seen(g.nodes.size(), false);
  std::vector<int> stack = {src};
  seen[src] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v == dst) break;
    for (auto [ei, at_a] : g.incidence[v]) {
      const GraphEdge& e = g.edges[ei];
      int w = g.node_pos(at_a ? e.b : e.a);
      if (seen[w]) continue;
      seen[w] = true;
      prev_edge[w] = ei;
      prev_node[w] = v;
      stack.push_back(w);
    }
  }
  if (!seen[dst]) return std::nullopt;
  std::vector<std::pair<int, bool>> path;
  for (int v = dst; v != src; v = prev_node[v]) {
    int ei = prev_edge[v];
    bool fwd = g.node_pos(g.edges[ei].b) == v;  // traversed a -> b
    path.push_back({ei, fwd});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

inline int edge_turn_sum(const GraphEdge& e, bool fwd) {
  int s = 0;
  for (const TurnPoint& t : e.turns) s += t.sign_fwd;
  return fwd ? s : -s;
}

// Turn contribution at an intermediate vertex: entering via `in`, leaving via
// `out`. Same-side leg pairs count once, pass-throughs do not count.
inline int passage_turn(const LegId& in, const LegId& out) {
  if (in.bottom != out.bottom) return 0;
  if (in.bottom) return in.index < out.index ? +1 : -1;  // over the top
  return in.index > out.index ? +1 : -1;                 // under the bottom
}

}  // namespace detail

inline TwistReport twistedness(const Diagram& d) {
  Classification c = classify(d);
  if (!c.simple) throw Error("twistedness requires a simple diagram");
  DiagramGraph g = graph_view(d);
  NodeId out{NodeId::OutputPort, 0};
  TwistReport rep;
  for (int k = 0; k < static_cast<int>(d.levels.size()); ++k) {
    const GeneratorSymbol& gen = d.gen_at(k);
    if (gen.name != "m" && gen.name != "u" && gen.name != "f") continue;
    auto path = detail::tree_path(g, NodeId{NodeId::Vertex, k}, out);
    if (!path) throw Error("no path to output");
    int tw = 0;
    for (size_t i = 0; i < path->size(); ++i) {
      auto [ei, fwd] = (*path)[i];
      tw += detail::edge_turn_sum(g.edges[ei], fwd);
      if (i + 1 < path->size()) {
        const GraphEdge& e1 = g.edges[ei];
        const LegId in_leg = fwd ? e1.leg_b : e1.leg_a;
        auto [ej, fwd2] = (*path)[i + 1];
        const GraphEdge& e2 = g.edges[ej];
        const LegId out_leg = fwd2 ? e2.leg_a : e2.leg_b;
        tw += detail::passage_turn(in_leg, out_leg);
      }
    }
    rep.twist[k] = tw;
    if (tw != 0) rep.untwisted = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Eliminable pairs

struct EliminablePair {
  int cup_level = 0;
  int cap_level = 0;
};

inline std::vector<EliminablePair> eliminable_pairs(const Diagram& d) {
  DiagramGraph g = graph_view(d);
  std::vector<EliminablePair> out;
  for (const GraphEdge& e : g.edges) {
    size_t n = e.turns.size();
    if (e.closed && n >= 2) {
      for (size_t i = 0; i < n; ++i) {
        const TurnPoint& t1 = e.turns[i];
        const TurnPoint& t2 = e.turns[(i + 1) % n];
        if (t1.is_cup != t2.is_cup && t1.sign_fwd == -t2.sign_fwd) {
          int cup = t1.is_cup ? t1.level : t2.level;
          int cap = t1.is_cup ? t2.level : t1.level;
          out.push_back(EliminablePair{cup, cap});
        }
      }
      continue;
    }
    for (size_t i = 0; i + 1 < n; ++i) {
      const TurnPoint& t1 = e.turns[i];
      const TurnPoint& t2 = e.turns[i + 1];
      if (t1.is_cup != t2.is_cup && t1.sign_fwd == -t2.sign_fwd) {
        int cup = t1.is_cup ? t1.level : t2.level;
        int cap = t1.is_cup ? t2.level : t1.level;
        out.push_back(EliminablePair{cup, cap});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const EliminablePair& a, const EliminablePair& b) {
    return a.cup_level != b.cup_level ? a.cup_level < b.cup_level : a.cap_level < b.cap_level;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const EliminablePair& a, const EliminablePair& b) {
                          return a.cup_level == b.cup_level && a.cap_level == b.cap_level;
                        }),
            out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Structure trees

// Leaves are closed vertices (u or f occurrences; rotations exchange the two,
// so they share one tag) or open boundary inputs.
struct StructureTree {
  enum Kind { Branch, Leaf, Input } kind = Leaf;
  std::vector<StructureTree> children;

  std::string encode() const {
    switch (kind) {
      case Branch: return "(" + children[0].encode() + " " + children[1].encode() + ")";
      case Leaf: return "o";
      case Input: return "i";
    }
    return "?";
  }
  friend bool operator==(const StructureTree& a, const StructureTree& b) {
    return a.encode() == b.encode();
  }
};

namespace detail {

inline StructureTree structure_walk(const Diagram& d, const DiagramGraph& g, int edge,
                                    bool from_a, int depth) {
  if (depth > 4096) throw Error("structure tree too deep");
  const GraphEdge& e = g.edges[edge];
  NodeId n = from_a ? e.b : e.a;
  LegId arrive = from_a ? e.leg_b : e.leg_a;
  if (n.kind == NodeId::InputPort) return StructureTree{StructureTree::Input, {}};
  if (n.kind == NodeId::OutputPort) throw Error("unexpected output port in walk");
  const GeneratorSymbol& gen = d.gen_at(n.index);
  if (gen.name == "u" || gen.name == "f") return StructureTree{StructureTree::Leaf, {}};
  if (gen.name != "m") throw Error("structure tree: unsupported vertex " + gen.name);

  // m legs in counterclockwise cyclic order: bottom-left, bottom-right, top.
  auto leg_code = [](const LegId& l) { return l.bottom ? l.index : 2; };
  int a = leg_code(arrive);
  int c1 = (a + 1) % 3, c2 = (a + 2) % 3;
  auto follow = [&](int code) -> StructureTree {
    LegId want = code == 2 ? LegId{false, 0} : LegId{true, code};
    for (auto [ei, at_a] : g.incidence[g.node_pos(n)]) {
      const GraphEdge& e2 = g.edges[ei];
      const LegId l = at_a ? e2.leg_a : e2.leg_b;
      if (l == want) return structure_walk(d, g, ei, at_a, depth + 1);
    }
    throw Error("structure tree: missing leg");
  };
  StructureTree t{StructureTree::Branch, {}};
  t.children.push_back(follow(c1));
  t.children.push_back(follow(c2));
  return t;
}

}  // namespace detail

inline StructureTree structure_tree(const Diagram& d) {
  Classification c = classify(d);
  if (!c.simple) throw Error("structure tree requires a simple diagram");
  DiagramGraph g = graph_view(d);
  NodeId out{NodeId::OutputPort, 0};
  int pos = g.node_pos(out);
  if (g.incidence[pos].size() != 1) throw Error("output port degree != 1");
  auto [ei, at_a] = g.incidence[pos][0];
  return detail::structure_walk(d, g, ei, at_a, 0);
}

}  // namespace frob
