#pragma once

#include <optional>
#include <string>

#include "hml/formula.hpp"

namespace hml {

// Formula text format, s-expressions:
//   (prop p) (nom j) (cnom c) (svar x)
//   (not f) (or f g) (op sigma f1 ... fn) (at j [host] f) (forall x f)
// derived sugar accepted on input:
//   (and f g) (implies f g) (iff f g) (box sigma f1 ... fn)
//   (exists x f) (top sort) (bot sort)
// Bare identifiers are resolved through the signature (numerals become
// Nat constant nominals). The host sort of (at j f) is inferred from the
// surrounding context when unambiguous; (at j <host> f) annotates it.
Formula parse_formula(const Signature& sig, const std::string& text,
                      const std::optional<std::string>& expected_sort =
                          std::nullopt);

// Canonical printer; reconstructs sugar (and/implies/iff/box/exists) so
// parse(print(f)) == f.
std::string print_formula(const Formula& f);

}  // namespace hml
