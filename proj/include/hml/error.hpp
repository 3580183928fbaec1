#pragma once

#include <stdexcept>
#include <string>

namespace hml {

// Error kinds shared across the library. Parse and precondition failures
// throw Error; proof checking reports diagnostics instead of throwing.
enum class ErrorKind {
  DuplicateSort,
  UnknownSort,
  UnknownSymbol,
  SymbolKindClash,
  EmptyPropSet,
  DuplicateOperator,
  SortMismatch,
  ArityMismatch,
  AmbiguousOperator,
  AmbiguousHostSort,
  IllegalSubstitution,
  NotPure,
  NotNamed,
  UnknownWorld,
  UnboundStateVariable,
  MissingDesignation,
  TooManyAtoms,
  SyntaxError,
  BadGoal,
  Io,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hml
