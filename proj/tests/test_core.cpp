#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "frob/core.hpp"
#include "frob/graph.hpp"
#include "frob/rewrite.hpp"

using namespace frob;

namespace {

Diagram diag(const PresPtr& p, int in, std::vector<std::tuple<int, const char*, int>> rows) {
  std::vector<Level> ls;
  for (auto& [a, g, b] : rows) ls.push_back(Level{a, p->gen_index(g), b});
  return Diagram(p, in, std::move(ls));
}

}  // namespace

TEST_CASE("builtin presentations carry the expected generators and rules") {
  auto P = builtin_presentation(PresentationId::P);
  CHECK(P->gen(P->gen_index("m")).inputs == 2);
  CHECK(P->gen(P->gen_index("m")).outputs == 1);
  CHECK(P->gen(P->gen_index("u")).inputs == 0);
  CHECK(P->has_gen("m"));
  CHECK(P->has_gen("u"));
  CHECK_FALSE(P->has_gen("cup"));
  CHECK(P->find_rule(RuleKind::Alpha));
  CHECK(P->find_rule(RuleKind::Lambda));
  CHECK(P->find_rule(RuleKind::Rho));
  CHECK_FALSE(P->find_rule(RuleKind::Mu));

  auto F = builtin_presentation(PresentationId::F);
  for (const auto& g : P->generators) CHECK(F->has_gen(g.name));
  CHECK(F->has_gen("cup"));
  CHECK(F->has_gen("f"));
  CHECK(F->find_rule(RuleKind::Mu));
  CHECK(F->find_rule(RuleKind::Nu));

  auto E = builtin_presentation(PresentationId::E);
  for (const auto& g : F->generators) CHECK(E->has_gen(g.name));
  CHECK(E->has_gen("cap"));
  for (RuleKind k : {RuleKind::Pi, RuleKind::Sigma1, RuleKind::Sigma2, RuleKind::Rm,
                     RuleKind::Lm, RuleKind::Ru, RuleKind::Lu, RuleKind::Rf, RuleKind::Lf})
    CHECK(E->find_rule(k));

  // sigma1 contracts the snake to the identity wire.
  const Rule& s1 = E->rule(RuleKind::Sigma1);
  CHECK(s1.source.input_arity == 1);
  CHECK(s1.source.levels.size() == 2);
  CHECK(s1.target.levels.empty());

  auto Fs = builtin_presentation(PresentationId::Fstar);
  CHECK(Fs->has_gen("mstar"));
  CHECK(Fs->has_gen("ustar"));
  for (RuleKind k : {RuleKind::Eta, RuleKind::Epsilon, RuleKind::Phi, RuleKind::Psi})
    CHECK(Fs->find_rule(k));
  CHECK_FALSE(Fs->has_gen("cap"));
}

TEST_CASE("every builtin rule pattern typechecks with equal boundary") {
  for (auto id : {PresentationId::P, PresentationId::F, PresentationId::E,
                  PresentationId::Fstar}) {
    auto p = builtin_presentation(id);
    for (const Rule& r : p->rules) {
      Diagram src(p, r.source.input_arity, r.source.levels);
      Diagram tgt(p, r.target.input_arity, r.target.levels);
      auto bs = src.typecheck();
      auto bt = tgt.typecheck();
      CHECK(bs == bt);
    }
  }
}

TEST_CASE("variable extension") {
  auto Fs = builtin_presentation(PresentationId::Fstar);
  auto p1 = extend_with_variables(Fs, {"A"});
  CHECK(p1->has_gen("A_l"));
  CHECK(p1->has_gen("A_r"));
  auto p2 = extend_with_variables(Fs, {"A", "B"});
  CHECK(p2->generators.size() == Fs->generators.size() + 4);
  CHECK(p2->rules.size() == Fs->rules.size() + 4);
  CHECK_THROWS_AS(extend_with_variables(Fs, {"A", "A"}), Error);
  CHECK_THROWS_AS(extend_with_variables(Fs, {"m"}), Error);
  auto p3 = extend_with_variables(p1, {"B"});
  CHECK(p3->has_gen("A_l"));
  CHECK(p3->has_gen("B_l"));
  CHECK_THROWS_AS(extend_with_variables(p1, {"A"}), Error);
}

TEST_CASE("typecheck") {
  auto P = builtin_presentation(PresentationId::P);
  CHECK(Diagram::identity(P, 3).typecheck() == std::make_pair(3, 3));
  CHECK(diag(P, 2, {{0, "m", 0}}).typecheck() == std::make_pair(2, 1));
  CHECK_THROWS_AS(diag(P, 3, {{0, "m", 0}}).typecheck(), TypeCheckError);
  try {
    diag(P, 3, {{0, "m", 0}}).typecheck();
  } catch (const TypeCheckError& e) {
    CHECK(e.level == 0);
    CHECK(e.expected == 3);
    CHECK(e.actual == 2);
  }
}

TEST_CASE("compose and tensor") {
  auto F = builtin_presentation(PresentationId::F);
  Diagram m = single(F, "m");
  Diagram id2 = Diagram::identity(F, 2);
  CHECK(compose_vertical(id2, m) == m);
  CHECK_THROWS_AS(compose_vertical(m, m), Error);

  Diagram u = single(F, "u");
  Diagram uu = tensor_horizontal(u, u);
  CHECK(uu == diag(F, 0, {{0, "u", 0}, {1, "u", 0}}));
  CHECK(uu.typecheck() == std::make_pair(0, 2));
  CHECK(tensor_horizontal(Diagram::identity(F, 0), u) == u);

  Diagram m_id = tensor_horizontal(m, Diagram::identity(F, 1));
  CHECK(m_id == diag(F, 3, {{0, "m", 1}}));
  CHECK(m_id.typecheck() == std::make_pair(3, 2));

  // cup below cap: a closed circle, valid but cyclic (needs E for the cap).
  auto E = builtin_presentation(PresentationId::E);
  Diagram circle = compose_vertical(single(E, "cup", 0, 0), diag(E, 2, {{0, "cap", 0}}));
  CHECK(circle.typecheck() == std::make_pair(0, 0));
  auto c = classify(circle);
  CHECK_FALSE(c.acyclic);
  CHECK(c.boundary_count == 0);
}

TEST_CASE("graph view basics") {
  auto E = builtin_presentation(PresentationId::E);
  Diagram m = single(E, "m");
  DiagramGraph g = graph_view(m);
  int vertices = 0, ports = 0;
  for (const auto& n : g.nodes) (n.kind == NodeId::Vertex ? vertices : ports) += 1;
  CHECK(vertices == 1);
  CHECK(ports == 3);
  CHECK(g.edges.size() == 3);

  Diagram snake = diag(E, 1, {{1, "cup", 0}, {0, "cap", 1}});
  DiagramGraph gs = graph_view(snake);
  CHECK(gs.edges.size() == 1);
  CHECK(gs.edges[0].turns.size() == 2);
  CHECK(classify(snake).simple);

  auto cl = classify(tensor_horizontal(single(E, "u"), single(E, "u")));
  CHECK_FALSE(cl.connected);
}

TEST_CASE("classification examples") {
  auto E = builtin_presentation(PresentationId::E);
  CHECK(classify(single(E, "m")).simple);
  // m is connected, acyclic, with a unique output wire.
  auto c = classify(single(E, "m"));
  CHECK(c.connected);
  CHECK(c.acyclic);
  CHECK(c.boundary_count == 3);
}

TEST_CASE("match, apply, interchange") {
  auto E = builtin_presentation(PresentationId::E);
  Diagram snake = diag(E, 1, {{1, "cup", 0}, {0, "cap", 1}});
  Step s{RuleRef{RuleKind::Sigma1, ""}, true, 0, 0};
  Diagram id1 = apply_step(snake, s);
  CHECK(id1 == Diagram::identity(E, 1));
  // and back
  Step sb{RuleRef{RuleKind::Sigma1, ""}, false, 0, 0};
  CHECK(apply_step(id1, sb) == snake);

  CHECK_FALSE(step_applies(single(E, "m"), s));

  Diagram lam = diag(E, 1, {{0, "u", 1}, {0, "m", 0}});
  Step ls{RuleRef{RuleKind::Lambda, ""}, true, 0, 0};
  CHECK(apply_step(lam, ls) == Diagram::identity(E, 1));

  // interchange candidates: two u's side by side
  Diagram uu = diag(E, 0, {{0, "u", 0}, {1, "u", 0}});
  auto ks = interchange_candidates(uu);
  CHECK(ks == std::vector<int>{0});
  Diagram uu2 = transpose(uu, 0);
  CHECK(uu2.typecheck() == std::make_pair(0, 2));
  CHECK(transpose(uu2, 0) == uu);

  CHECK(interchange_candidates(single(E, "m")).empty());
  Diagram circle = diag(E, 0, {{0, "cup", 0}, {0, "cap", 0}});
  CHECK(interchange_candidates(circle).empty());
}

TEST_CASE("non-invertible rules reject backward steps") {
  auto Fs = builtin_presentation(PresentationId::Fstar);
  Diagram d = diag(Fs, 2, {{0, "m", 0}, {0, "mstar", 0}});
  Step bad{RuleRef{RuleKind::Eta, ""}, false, 0, 0};
  CHECK_THROWS_AS(apply_step(d, bad), MatchError);
}

TEST_CASE("verify_trace and the pentagon") {
  auto P = builtin_presentation(PresentationId::P);
  Diagram comb = diag(P, 4, {{0, "m", 2}, {0, "m", 1}, {0, "m", 0}});
  comb.typecheck();

  auto alpha = [](int level, int offset, bool fwd = true) {
    return Step{RuleRef{RuleKind::Alpha, ""}, fwd, level, offset};
  };
  auto inter = [](int level) { return Step{RuleRef{RuleKind::Interchange, ""}, true, level, 0}; };

  Trace a{comb, {alpha(0, 0), alpha(1, 0), alpha(0, 1)}};
  Trace b{comb, {alpha(1, 0), inter(0), alpha(1, 0)}};
  Diagram ta = verify_trace(a);
  Diagram tb = verify_trace(b);
  CHECK(ta == tb);
  CHECK(ta == diag(P, 4, {{2, "m", 0}, {1, "m", 0}, {0, "m", 0}}));

  // round trip is the identity on levels
  Trace rt{comb, {alpha(0, 0), alpha(0, 0, false)}};
  CHECK(verify_trace(rt) == comb);
}

TEST_CASE("trace errors carry the failing step") {
  auto P = builtin_presentation(PresentationId::P);
  Trace t{single(P, "m"), {Step{RuleRef{RuleKind::Lambda, ""}, true, 0, 0}}};
  CHECK_THROWS_AS(verify_trace(t), TraceError);
  try {
    verify_trace(t);
  } catch (const TraceError& e) {
    CHECK(e.step == 0);
  }
}

TEST_CASE("adjunction zig-zags: triangles verify") {
  auto Fs = builtin_presentation(PresentationId::Fstar);
  // m triangle: insert eta below m, cancel with epsilon above.
  Diagram m = single(Fs, "m");
  Trace t1{m,
           {Step{RuleRef{RuleKind::Eta, ""}, true, 0, 0},
            Step{RuleRef{RuleKind::Epsilon, ""}, true, 1, 0}}};
  CHECK(verify_trace(t1) == m);
  // mstar triangle
  Diagram ms = single(Fs, "mstar");
  Trace t2{ms,
           {Step{RuleRef{RuleKind::Eta, ""}, true, 1, 0},
            Step{RuleRef{RuleKind::Epsilon, ""}, true, 0, 0}}};
  CHECK(verify_trace(t2) == ms);
  // u and ustar triangles
  Diagram u = single(Fs, "u");
  Trace t3{u,
           {Step{RuleRef{RuleKind::Phi, ""}, true, 0, 0},
            Step{RuleRef{RuleKind::Psi, ""}, true, 1, 0}}};
  CHECK(verify_trace(t3) == u);
  Diagram us = single(Fs, "ustar");
  Trace t4{us,
           {Step{RuleRef{RuleKind::Phi, ""}, true, 1, 0},
            Step{RuleRef{RuleKind::Psi, ""}, true, 0, 0}}};
  CHECK(verify_trace(t4) == us);
}
