#pragma once

#include <map>
#include <optional>
#include <string>

#include "hml/formula.hpp"

namespace hml::arith {

// Validator for the domain facts a proof script may register with `fact`
// lines. The underlying domain axiomatization is deliberately left open;
// these shapes are the ones program proofs need, each decided exactly:
//
//  A. Nat equivalences  (iff t u) for Nat terms over add/sub/mul/div
//     (div by a positive numeral only): multivariate polynomial equality
//     over the rationals, `sub` read as ring subtraction.
//  B. Relational facts: implications/equivalences/boolean combinations of
//     atoms @_true(r) / @_false(r) with r = (le t u) | (eq t u), t and u
//     linear: decided by interval reasoning over the (shared, up to sign)
//     linear form of the atoms, exactly, over natural assignments.
//  C. Existential witnesses  (implies body[t/x] (exists x body)) with t a
//     Nat term of the arithmetic fragment, body quantifier free: the
//     substitution-lemma shape; validated structurally.
//
// Nat-sorted `sub` on naturals truncates at zero while the polynomial
// reading does not; every accepted fact of shapes A and B is additionally
// ground checked on a small grid under truncating semantics, which
// rejects the visibly truncation-sensitive candidates.
struct FactCheck {
  bool ok = false;
  std::string shape;  // "nat-iff", "rel", "witness"
  std::string why;    // rejection reason
};

FactCheck validate_fact(const Signature& sig, const Formula& f);

// Ground evaluation of a Nat term under truncating natural semantics
// (sub floors at zero, div is integer division); nullopt if the term
// leaves the arithmetic fragment or a variable is unassigned.
std::optional<long long> eval_nat(
    const Formula& t, const std::map<std::string, long long>& env);

// Ground truth of a shape A/B fact under the environment.
std::optional<bool> eval_fact_ground(
    const Formula& f, const std::map<std::string, long long>& env);

}  // namespace hml::arith
