#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hml/formula_text.hpp"
#include "hml/model.hpp"

#include "test_util.hpp"

using namespace hml;
using testutil::Rng;

namespace {
const Signature& sig() {
  static Signature s = testutil::two_sorted();
  return s;
}

// w1, w2 of sort s; u1, u2 of sort t; V(p) = {w1}; f-edges w1->u1;
// nominals j->w1, k->w2, jt->u1, kt->u2; c0 -> w1, ct -> u1.
Model small_model() {
  Frame fr(sig());
  fr.add_world("s", "w1");
  fr.add_world("s", "w2");
  fr.add_world("t", "u1");
  fr.add_world("t", "u2");
  OperatorDecl f{"f", {"t"}, "s"};
  fr.add_tuple(f, {0, 0});  // w1 -f-> u1
  fr.designate("c0", "s", 0);
  fr.designate("ct", "t", 0);
  Model m(std::move(fr));
  m.set_prop("p", "s", {0});
  m.set_prop("q", "s", {});
  m.set_prop("r", "t", {0});
  m.set_prop("r2", "t", {});
  m.set_nom("j", "s", 0);
  m.set_nom("k", "s", 1);
  m.set_nom("jt", "t", 0);
  m.set_nom("kt", "t", 1);
  return m;
}
}  // namespace

TEST_CASE("satisfaction base clauses") {
  Model m = small_model();
  Assignment g;
  CHECK(satisfies(m, g, {"s", 0}, f_prop(sig(), "p")));
  CHECK(!satisfies(m, g, {"s", 1}, f_prop(sig(), "p")));
  // nominals are true exactly at their world
  CHECK(satisfies(m, g, {"s", 0}, f_nom(sig(), "j")));
  CHECK(!satisfies(m, g, {"s", 1}, f_nom(sig(), "j")));
  // state variables via the assignment
  g.set("u", "s", 1);
  CHECK(satisfies(m, g, {"s", 1}, f_svar(sig(), "u")));
  CHECK(!satisfies(m, g, {"s", 0}, f_svar(sig(), "u")));
  // unbound state variable is an error
  Assignment empty;
  CHECK_THROWS_AS(satisfies(m, empty, {"s", 0}, f_svar(sig(), "u")), Error);
}

TEST_CASE("modal clause is existential over relation tuples") {
  Model m = small_model();
  Assignment g;
  Formula fr = f_modal(sig(), "f", {f_prop(sig(), "r")});
  CHECK(satisfies(m, g, {"s", 0}, fr));   // w1 -> u1 |= r
  CHECK(!satisfies(m, g, {"s", 1}, fr));  // w2 has no successor
  Formula fr2 = f_modal(sig(), "f", {f_prop(sig(), "r2")});
  CHECK(!satisfies(m, g, {"s", 0}, fr2));
}

TEST_CASE("@ jumps to the named world regardless of the current world") {
  Model m = small_model();
  Assignment g;
  Formula at = f_at(sig(), "jt", f_prop(sig(), "r"), "s");
  CHECK(satisfies(m, g, {"s", 0}, at));
  CHECK(satisfies(m, g, {"s", 1}, at));
  Formula at2 = f_at(sig(), "kt", f_prop(sig(), "r"), "s");
  CHECK(!satisfies(m, g, {"s", 0}, at2));
  // constant nominals evaluate through the designation
  Formula atc = f_at(sig(), "ct", f_prop(sig(), "r"), "s");
  CHECK(satisfies(m, g, {"s", 1}, atc));
}

TEST_CASE("forall quantifies over all variants at the variable's sort") {
  Model m = small_model();
  Assignment g;
  // forall u (u or not p): only true where ... evaluate both worlds
  Formula body = f_or(f_svar(sig(), "u"), f_neg(f_prop(sig(), "p")));
  Formula all = f_forall(sig(), "u", body);
  // at w1: u ranges over w1,w2; for u->w2 the disjunct u fails and p holds
  CHECK(!satisfies(m, g, {"s", 0}, all));
  CHECK(satisfies(m, g, {"s", 1}, all));
  // exists x x is valid
  Formula name = f_exists(sig(), "u", f_svar(sig(), "u"));
  CHECK(valid_in_model(m, name));
  // direct enumeration agrees with the clause
  for (int w = 0; w < 2; ++w) {
    bool direct = true;
    for (int ww = 0; ww < 2; ++ww) {
      Assignment h;
      h.set("u", "s", ww);
      direct = direct && satisfies(m, h, {"s", w}, body);
    }
    CHECK(direct == satisfies(m, g, {"s", w}, all));
  }
}

TEST_CASE("validity in a model quantifies worlds and assignments") {
  Model m = small_model();
  CHECK(valid_in_model(m, f_top(sig(), "s")));
  CHECK(!valid_in_model(m, f_prop(sig(), "p")));
  // SelfDual instance is valid in every model
  Formula phi = f_prop(sig(), "r");
  Formula sd = f_iff(f_at(sig(), "jt", phi, "s"),
                     f_neg(f_at(sig(), "jt", f_neg(phi), "s")));
  CHECK(valid_in_model(m, sd));
}

TEST_CASE("frame validity quantifies the occurring valuations") {
  Model m = small_model();
  const Frame& fr = m.frame();
  CHECK(!valid_in_frame(fr, f_bot(sig(), "s")));
  // (Ref) @_j j holds on every frame
  CHECK(valid_in_frame(fr, f_at(sig(), "j", f_nom(sig(), "j"), "s")));
  // a bare propositional variable is not frame-valid
  CHECK(!valid_in_frame(fr, f_prop(sig(), "p")));
  // a bare nominal fails on a two-world sort
  CHECK(!valid_in_frame(fr, f_nom(sig(), "j")));
}

TEST_CASE("is_named detects unnamed worlds") {
  Model m = small_model();
  CHECK(is_named(m));
  Frame fr(sig());
  fr.add_world("s", "w1");
  fr.add_world("s", "w2");
  fr.add_world("t", "u1");
  fr.designate("c0", "s", 0);
  fr.designate("ct", "t", 0);
  Model m2(std::move(fr));
  m2.set_nom("j", "s", 0);
  m2.set_nom("jt", "t", 0);
  CHECK(!is_named(m2));  // w2 carries no nominal
}

TEST_CASE("agreement lemma on random models") {
  Rng rng(23);
  for (int it = 0; it < 300; ++it) {
    Model m = testutil::random_model(sig(), rng, 3);
    Formula f = testutil::random_formula(sig(), rng, "s", 3);
    Assignment g = testutil::random_assignment(sig(), m, rng, f);
    // h agrees on the free variables of f, differs elsewhere
    Assignment h = g;
    for (const auto& d : sig().symbol_declarations()) {
      if (d.kind != SymbolKind::SVar) continue;
      bool free = false;
      for (const auto& [name, sort] : free_state_vars(f))
        if (name == d.name) free = true;
      if (!free) h.set(d.name, d.sort, rng.pick(m.frame().world_count(d.sort)));
    }
    int w = rng.pick(m.frame().world_count("s"));
    CHECK(satisfies(m, g, {"s", w}, f) == satisfies(m, h, {"s", w}, f));
  }
}

TEST_CASE("substitution lemma for variables and nominals") {
  Rng rng(29);
  int done = 0;
  for (int it = 0; it < 600 && done < 300; ++it) {
    Model m = testutil::random_model(sig(), rng, 3);
    Formula f = testutil::random_formula(sig(), rng, "s", 3);
    bool var_case = rng.flip();
    StateSymbol z = var_case ? StateSymbol{SymbolKind::SVar, "w", "s"}
                             : StateSymbol{SymbolKind::Nom, "j", "s"};
    if (!substitutable(z, "u", f)) continue;
    ++done;
    Formula fsub = substitute(sig(), f, "u", z);
    Assignment g = testutil::random_assignment(sig(), m, rng, fsub);
    g.set("w", "s", g.get("w", "s").value_or(rng.pick(m.frame().world_count("s"))));
    // g' is the u-variant sending u to g(w) resp. V(j)
    Assignment gp = g;
    int target = var_case ? *g.get("w", "s") : *m.nom_world("j", "s");
    gp.set("u", "s", target);
    // make sure the original formula's free variables are covered too
    for (const auto& [name, sort] : free_state_vars(f))
      if (!gp.get(name, sort))
        gp.set(name, sort, rng.pick(m.frame().world_count(sort)));
    for (const auto& [name, sort] : free_state_vars(fsub))
      if (!g.get(name, sort))
        g.set(name, sort, rng.pick(m.frame().world_count(sort)));
    int w = rng.pick(m.frame().world_count("s"));
    CHECK(satisfies(m, g, {"s", w}, fsub) == satisfies(m, gp, {"s", w}, f));
  }
  CHECK(done >= 300);
}

TEST_CASE("box duality holds by construction") {
  Rng rng(31);
  for (int it = 0; it < 100; ++it) {
    Model m = testutil::random_model(sig(), rng, 3);
    Formula a = testutil::random_formula(sig(), rng, "s", 2);
    Formula b = testutil::random_formula(sig(), rng, "t", 2);
    Formula box = f_box(sig(), "g", {a, b});
    Formula dia = f_modal(sig(), "g", {f_neg(a), f_neg(b)});
    Assignment g = testutil::random_assignment(sig(), m, rng, f_or(box, box));
    for (const auto& [name, sort] : free_state_vars(dia))
      if (!g.get(name, sort))
        g.set(name, sort, rng.pick(m.frame().world_count(sort)));
    int w = rng.pick(m.frame().world_count("s"));
    CHECK(satisfies(m, g, {"s", w}, box) == !satisfies(m, g, {"s", w}, dia));
  }
}

TEST_CASE("pure-named equivalence on hand models") {
  Model m = small_model();
  std::map<std::string, std::vector<std::string>> pool{{"s", {"j", "k"}},
                                                       {"t", {"jt", "kt"}}};
  // @_j j: frame-valid, and every pure instance holds
  auto rep = check_pure_named_equivalence(
      m, f_at(sig(), "j", f_nom(sig(), "j"), "s"), pool);
  CHECK(rep.frame_valid);
  CHECK(rep.instances_valid);
  CHECK(rep.agree);
  // bare nominal: both sides false on a two-world sort
  auto rep2 = check_pure_named_equivalence(m, f_nom(sig(), "j"), pool);
  CHECK(!rep2.frame_valid);
  CHECK(!rep2.instances_valid);
  CHECK(rep2.agree);
  // non-named model rejected
  Frame fr(sig());
  fr.add_world("s", "w1");
  fr.add_world("s", "w2");
  fr.add_world("t", "u1");
  fr.designate("c0", "s", 0);
  fr.designate("ct", "t", 0);
  Model unnamed(std::move(fr));
  unnamed.set_nom("j", "s", 0);
  unnamed.set_nom("jt", "t", 0);
  CHECK_THROWS_AS(
      check_pure_named_equivalence(unnamed, f_nom(sig(), "j"), pool), Error);
  // non-pure input rejected
  CHECK_THROWS_AS(check_pure_named_equivalence(m, f_prop(sig(), "p"), pool),
                  Error);
}

TEST_CASE("bounded countermodel search") {
  // empty hypotheses, goal p: a countermodel with V(p) empty
  auto cm = bounded_countermodel(sig(), {}, f_prop(sig(), "p"), 2);
  REQUIRE(cm.has_value());
  CHECK(!satisfies(cm->model, cm->assignment, cm->world, f_prop(sig(), "p")));
  // {p} |= p: exhausted
  CHECK(!bounded_countermodel(sig(), {f_prop(sig(), "p")}, f_prop(sig(), "p"), 2)
             .has_value());
  // an axiom instance is exhausted at small bounds
  Formula phi = f_prop(sig(), "r");
  Formula sd = f_iff(f_at(sig(), "jt", phi, "s"),
                     f_neg(f_at(sig(), "jt", f_neg(phi), "s")));
  CHECK(!bounded_countermodel(sig(), {}, sd, 2).has_value());
  // mixed sorts rejected
  CHECK_THROWS_AS(
      bounded_countermodel(sig(), {f_prop(sig(), "r")}, f_prop(sig(), "p"), 2),
      Error);
}

TEST_CASE("model files parse against a signature") {
  std::string text =
      "world w1 : s\nworld w2 : s\nworld u1 : t\nworld u2 : t\n"
      "rel f w1 u1\n"
      "val p = {w1}\nval q = {}\nval r = {u1}\nval r2 = {}\n"
      "val j = {w1}\nval k = {w2}\nval jt = {u1}\nval kt = {u2}\n"
      "desig c0 = w1\ndesig ct = u1\n";
  Model m = parse_model(sig(), text);
  Assignment g;
  CHECK(satisfies(m, g, {"s", 0}, f_prop(sig(), "p")));
  CHECK(satisfies(m, g, {"s", 0},
                  f_modal(sig(), "f", {f_prop(sig(), "r")})));
  m.validate({"s", "t"});
  // nominal valuations must be singletons
  CHECK_THROWS_AS(parse_model(sig(), "world w1 : s\nval j = {w1,w1}\n"), Error);
}
