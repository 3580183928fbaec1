#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hml/signature.hpp"
#include "hml/smc.hpp"

#include "test_util.hpp"

using namespace hml;

TEST_CASE("parse and render round-trip") {
  std::string src =
      "# a small signature\n"
      "sort s\n"
      "sort t\n"
      "op f : t -> s\n"
      "op g : s t -> s\n"
      "op c : -> t\n"
      "prop p : s\n"
      "prop r : t\n"
      "nom j : s\n"
      "cnom c0 : t\n"
      "svar x : s\n";
  Signature sig = parse_signature(src);
  CHECK(sig.sorts().size() == 2);
  CHECK(sig.operators().size() == 3);
  Signature again = parse_signature(render_signature(sig));
  CHECK(again == sig);
}

TEST_CASE("duplicate sorts and unknown sorts are rejected") {
  CHECK_THROWS_AS(parse_signature("sort s\nsort s\nprop p : s\n"), Error);
  try {
    parse_signature("sort s\nop f : u -> s\nprop p : s\n");

CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownSort);
  }
}

TEST_CASE("symbol kind clashes are rejected across sorts and kinds") {
  // the same name at two sorts
  try {
    parse_signature("sort s\nsort t\nprop p : s\nprop p : t\n");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SymbolKindClash);
  }
  // the same name at two kinds
  CHECK_THROWS_AS(parse_signature("sort s\nprop p : s\nnom p : s\n"), Error);
}

TEST_CASE("empty prop sets and empty sort lists are rejected") {
  try {
    parse_signature("sort s\nsort t\nprop p : s\n");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyPropSet);
  }
  CHECK_THROWS_AS(parse_signature(""), Error);
}

TEST_CASE("operator overloading works only across result sorts") {
  Signature sig;
  sig.add_sort("s");
  sig.add_sort("t");
  sig.add_operator("f", {"s"}, "s");
  sig.add_operator("f", {"s"}, "t");  // fine: distinct result sort
  CHECK_THROWS_AS(sig.add_operator("f", {"t"}, "s"), Error);
}

TEST_CASE("operators_with_result lists declarations in order") {
  Signature sig = smc::fig3_signature();
  auto ctrl = sig.operators_with_result("CtrlStack");
  REQUIRE(!ctrl.empty());
  bool has_test = false;
  for (const auto& op : ctrl)
    if (op.name == "test") {
      has_test = true;
      CHECK(op.arg_sorts == std::vector<std::string>{"Val"});
    }
  CHECK(has_test);
  auto cfg = sig.operators_with_result("Config");
  // the configuration pairing and the execution modality
  REQUIRE(cfg.size() == 2);
  CHECK(cfg[0].name == "cfg");
  CHECK(cfg[0].arg_sorts == std::vector<std::string>{"ValStack", "Mem"});
  CHECK_THROWS_AS(sig.operators_with_result("NoSuch"), Error);
}

TEST_CASE("numerals are built-in constant nominals of Nat") {
  Signature sig = smc::fig3_signature();
  auto info = sig.lookup_symbol("42");
  REQUIRE(info.has_value());
  CHECK(info->kind == SymbolKind::CNom);
  CHECK(info->sort == "Nat");
  CHECK(sig.is_numeral_cnom("7", "Nat"));
  // numerals cannot be re-declared
  Signature plain = testutil::two_sorted();
  CHECK_THROWS_AS(plain.add_symbol(SymbolKind::Nom, "3", "s"), Error);
}

TEST_CASE("fresh symbols extend the inventory without clashes") {
  Signature sig = testutil::two_sorted();
  std::string a = sig.fresh_symbol(SymbolKind::Nom, "s", "j");
  CHECK(a != "j");  // j exists
  CHECK(sig.has_symbol(SymbolKind::Nom, a, "s"));
  std::string b = sig.fresh_symbol(SymbolKind::Nom, "s", "j");
  CHECK(a != b);
}
