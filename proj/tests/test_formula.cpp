#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hml/formula.hpp"
#include "hml/formula_text.hpp"
#include "hml/smc.hpp"

#include "test_util.hpp"

using namespace hml;
using testutil::Rng;

namespace {
const Signature& sig() {
  static Signature s = testutil::two_sorted();
  return s;
}
}  // namespace

TEST_CASE("sorts of atoms and applications") {
  Formula p = f_prop(sig(), "p");
  CHECK(sort_of(sig(), p) == "s");
  Formula fr = f_modal(sig(), "f", {f_prop(sig(), "r")});
  CHECK(sort_of(sig(), fr) == "s");
  // or requires equal sorts
  CHECK_THROWS_AS(f_or(f_prop(sig(), "p"), f_prop(sig(), "r")), Error);
  // @ jumps: host sort free, inner sort fixed by the nominal
  Formula at = f_at(sig(), "jt", f_prop(sig(), "r"), "s");
  CHECK(sort_of(sig(), at) == "s");
  CHECK_THROWS_AS(f_at(sig(), "jt", f_prop(sig(), "p"), "s"), Error);
}

TEST_CASE("fig3 configuration terms sort-check") {
  Signature fig3 = smc::fig3_signature();
  Formula nil = f_modal(fig3, "nil", {});
  Formula empty = f_modal(fig3, "empty", {});
  Formula cfg = f_modal(fig3, "cfg", {nil, empty});
  CHECK(sort_of(fig3, cfg) == "Config");
}

TEST_CASE("free state variables respect binders") {
  Formula x = f_svar(sig(), "u");
  Formula bound = f_forall(sig(), "u", x);
  CHECK(free_state_vars(bound).empty());
  Formula mixed = f_or(x, f_forall(sig(), "u", x));
  auto fv = free_state_vars(mixed);
  CHECK(fv.size() == 1);
  CHECK(fv.begin()->first == "u");
  // under @
  Formula at = f_at(sig(), "jt", f_svar(sig(), "wt"), "s");
  auto fv2 = free_state_vars(at);
  REQUIRE(fv2.size() == 1);
  CHECK(fv2.begin()->first == "wt");
}

TEST_CASE("substitutability follows the binder clauses") {
  StateSymbol w{SymbolKind::SVar, "w", "s"};
  // base: atoms always fine
  CHECK(substitutable(w, "u", f_prop(sig(), "p")));
  // forall w (svar u): u free below a binder named w -> blocked
  Formula trap = f_forall(sig(), "w", f_svar(sig(), "u"));
  CHECK(!substitutable(w, "u", trap));
  // nominals are always substitutable
  StateSymbol j{SymbolKind::Nom, "j", "s"};
  CHECK(substitutable(j, "u", trap));
}

TEST_CASE("substitute replaces free occurrences only") {
  StateSymbol j{SymbolKind::Nom, "j", "s"};
  Formula u = f_svar(sig(), "u");
  Formula body = f_or(u, f_prop(sig(), "p"));
  Formula out = substitute(sig(), body, "u", j);
  CHECK(out == f_or(f_nom(sig(), "j"), f_prop(sig(), "p")));
  // bound occurrence untouched
  Formula all = f_forall(sig(), "u", u);
  CHECK(substitute(sig(), all, "u", j) == all);
  // illegal substitution rejected, never renamed
  StateSymbol w{SymbolKind::SVar, "w", "s"};
  Formula trap = f_forall(sig(), "w", u);
  CHECK_THROWS_AS(substitute(sig(), trap, "u", w), Error);
}

TEST_CASE("substitution removes the variable from the free set") {
  Rng rng(7);
  StateSymbol j{SymbolKind::Nom, "j", "s"};
  StateSymbol w{SymbolKind::SVar, "w", "s"};
  int tried = 0;
  for (int it = 0; it < 400; ++it) {
    Formula f = testutil::random_formula(sig(), rng, "s", 3);
    for (const StateSymbol& z : {j, w}) {
      if (!substitutable(z, "u", f)) {
        CHECK_THROWS_AS(substitute(sig(), f, "u", z), Error);
        continue;
      }
      ++tried;
      Formula g = substitute(sig(), f, "u", z);
      for (const auto& [name, sort] : free_state_vars(g))
        CHECK(name != "u");
    }
  }
  CHECK(tried > 100);
}

TEST_CASE("derived forms elaborate and elaboration is idempotent") {
  Formula p = f_prop(sig(), "p"), q = f_prop(sig(), "q");
  Formula imp = f_implies(p, q);
  CHECK(imp == f_or(f_neg(p), q));
  auto v = view_implies(imp);
  REQUIRE(v.has_value());
  CHECK(v->first == p);
  // box through the view round-trips
  Formula box = f_box(sig(), "g", {p, f_prop(sig(), "r")});
  auto bv = view_box(box);
  REQUIRE(bv.has_value());
  CHECK(bv->first == "g");
  CHECK(bv->second[0] == p);
  // exists
  Formula ex = f_exists(sig(), "u", p);
  auto ev = view_exists(ex);
  REQUIRE(ev.has_value());
  CHECK(ev->var == "u");
  CHECK(ev->body == p);
}

TEST_CASE("purity classifiers") {
  Formula pure = f_at(sig(), "j", f_nom(sig(), "k"), "s");
  CHECK(is_pure(pure));
  CHECK(is_forall_exists_pure(pure));
  CHECK(!is_pure(f_or(f_nom(sig(), "j"), f_prop(sig(), "p"))));
  // forall u exists w g(u -> g(u,w)-ish shape, built with box for variety
  Formula body = f_or(f_neg(f_svar(sig(), "u")),
                      f_modal(sig(), "g", {f_svar(sig(), "w"),
                                           f_svar(sig(), "wt")}));
  Formula fe = f_forall(sig(), "u",
                        f_exists(sig(), "w", f_exists(sig(), "wt", body)));
  CHECK(is_forall_exists_pure(fe));
  // a propositional variable breaks it
  Formula bad = f_forall(sig(), "u", f_implies(f_prop(sig(), "p"),
                                               f_svar(sig(), "u")));
  CHECK(!is_forall_exists_pure(bad));
  // a state symbol outside the prefix breaks it
  Formula leak = f_forall(sig(), "u", f_or(f_svar(sig(), "u"),
                                           f_svar(sig(), "w")));
  CHECK(!is_forall_exists_pure(leak));
  CHECK(is_pure(f_bot(sig(), "s")) == false);
}

TEST_CASE("pure instances enumerate nominal substitutions") {
  Formula refj = f_at(sig(), "j", f_nom(sig(), "j"), "s");
  std::map<std::string, std::vector<std::string>> pool{{"s", {"j", "k"}}};
  auto insts = pure_instances(sig(), refj, pool);
  REQUIRE(insts.size() == 2);
  CHECK(insts[0] == refj);
  CHECK(insts[1] == f_at(sig(), "k", f_nom(sig(), "k"), "s"));
  // no nominals: the formula itself
  Formula c = f_cnom(sig(), "c0");
  CHECK(pure_instances(sig(), c, pool).size() == 1);
  // non-pure input rejected
  CHECK_THROWS_AS(pure_instances(sig(), f_prop(sig(), "p"), pool), Error);
}

TEST_CASE("formula text round-trips") {
  Rng rng(11);
  for (int it = 0; it < 300; ++it) {
    Formula f = testutil::random_formula(sig(), rng, rng.flip() ? "s" : "t", 4);
    std::string text = print_formula(f);
    Formula g = parse_formula(sig(), text);
    CHECK(g == f);
  }
}

TEST_CASE("formula text accepts sugar and bare atoms") {
  Formula f = parse_formula(sig(), "(implies (prop p) (or p (not q)))");
  CHECK(f == f_implies(f_prop(sig(), "p"),
                       f_or(f_prop(sig(), "p"), f_neg(f_prop(sig(), "q")))));
  Formula box = parse_formula(sig(), "(box h r)");
  CHECK(box == f_box(sig(), "h", {f_prop(sig(), "r")}));
  // host sort inference inside a context, annotation at top level
  CHECK_THROWS_AS(parse_formula(sig(), "(at j p)"), Error);
  Formula at = parse_formula(sig(), "(at j s p)");
  CHECK(at == f_at(sig(), "j", f_prop(sig(), "p"), "s"));
  Formula nested = parse_formula(sig(), "(or p (at j p))");
  CHECK(nested == f_or(f_prop(sig(), "p"),
                       f_at(sig(), "j", f_prop(sig(), "p"), "s")));
  // numerals in a Nat-sorted signature
  Signature fig3 = smc::fig3_signature();
  Formula add = parse_formula(fig3, "(op add 1 2)");
  CHECK(sort_of(fig3, add) == "Nat");
}

TEST_CASE("sort errors pinpoint the offending construction") {
  Signature fig3 = smc::fig3_signature();
  CHECK_THROWS_AS(parse_formula(fig3, "(op cfg (op nil) (op nil))"), Error);
  CHECK_THROWS_AS(parse_formula(fig3, "(op cfg (op nil))"), Error);
}
