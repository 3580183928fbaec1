#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hml/error.hpp"

namespace hml {

// Kinds of atomic symbols a signature declares per sort.
enum class SymbolKind { Prop, Nom, CNom, SVar };

const char* symbol_kind_name(SymbolKind k);

struct OperatorDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
  std::string result_sort;

  bool operator==(const OperatorDecl&) const = default;
};

// A many-sorted signature with constant nominals: sorts, operator
// declarations, and per-sort inventories of propositional variables,
// nominals, constant nominals and state variables.
//
// Immutable after construction; all member functions are const.
// Symbol names are globally unique across kinds and sorts, which makes
// every identifier resolvable without annotations.
//
// A sort named "Nat" implicitly carries one constant nominal per numeral
// ("0", "1", ...), so ground arithmetic terms denote fixed worlds.
// All-digit names are reserved for numerals and cannot be declared.
class Signature {
 public:
  Signature() = default;

  // Mutators used by the parser / builders; they validate incrementally
  // and throw Error on violations.
  void add_sort(const std::string& name);
  void add_operator(const std::string& name,
                    std::vector<std::string> arg_sorts,
                    const std::string& result_sort);
  void add_symbol(SymbolKind kind, const std::string& name,
                  const std::string& sort);

  // Final validation: every sort has at least one propositional variable.
  void validate() const;

  bool has_sort(const std::string& name) const;
  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<OperatorDecl>& operators() const { return ops_; }

  // Declarations with the given result sort, in declaration order.
  std::vector<OperatorDecl> operators_with_result(const std::string& sort) const;

  // Declarations with the given name (overloads differ in result sort).
  std::vector<OperatorDecl> operators_named(const std::string& name) const;

  // Resolves an operator application: by name and argument sorts, with an
  // optional expected result sort to break ties.
  const OperatorDecl& resolve_operator(
      const std::string& name, const std::vector<std::string>& arg_sorts,
      const std::optional<std::string>& expected_result = std::nullopt) const;

  // Symbol lookup. Numerals resolve as constant nominals of Nat when that
  // sort exists.
  struct SymbolInfo {
    SymbolKind kind;
    std::string sort;
  };
  std::optional<SymbolInfo> lookup_symbol(const std::string& name) const;
  bool has_symbol(SymbolKind kind, const std::string& name,
                  const std::string& sort) const;

  // Per-sort inventory of one kind, in declaration order (numerals not
  // enumerated).
  std::vector<std::string> symbols_of(SymbolKind kind,
                                      const std::string& sort) const;

  struct SymbolDecl {
    SymbolKind kind;
    std::string name;
    std::string sort;
    bool operator==(const SymbolDecl&) const = default;
  };
  const std::vector<SymbolDecl>& symbol_declarations() const {
    return symbols_;
  }

  // First declared propositional variable of a sort; used as the canonical
  // atom in the bottom formula of that sort.
  const std::string& canonical_prop(const std::string& sort) const;

  // True when `name` is a numeral and `sort` is Nat.
  bool is_numeral_cnom(const std::string& name, const std::string& sort) const;

  // A fresh symbol of the given kind and sort, derived from `hint`; the
  // inventories are extensible on demand.
  std::string fresh_symbol(SymbolKind kind, const std::string& sort,
                           const std::string& hint);

  bool operator==(const Signature& other) const;

 private:
  std::vector<std::string> sorts_;
  std::vector<OperatorDecl> ops_;
  std::vector<SymbolDecl> symbols_;
  std::map<std::string, SymbolInfo> symbol_index_;
};

bool is_numeral(const std::string& name);

// Signature file format: line oriented; directives
//   sort <name>
//   op <name> : <s1> ... <sn> -> <s>
//   prop|nom|cnom|svar <name> : <s>
// and '#' comments.
Signature parse_signature(const std::string& text);
Signature load_signature_file(const std::string& path);
std::string render_signature(const Signature& sig);

}  // namespace hml
