#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hml/signature.hpp"

namespace hml {

// Core grammar. Derived connectives (and, implies, iff, box, exists,
// top, bot) elaborate into these nine node kinds at construction time.
enum class FKind { Prop, Nom, CNom, SVar, Neg, Or, Modal, At, Forall };

class Formula;

struct FNode {
  FKind kind;
  std::string sort;       // sort of the formula rooted here
  std::string name;       // atom / operator name; At: the nominal; Forall: the variable
  std::string inner_sort; // At: the nominal's sort; Forall: the variable's sort
  bool name_is_cnom = false;  // At: whether the nominal is a constant nominal
  std::vector<Formula> kids;
  size_t hash = 0;
};

// Immutable formula value with shared structure. Equality is syntactic
// on the core grammar.
class Formula {
 public:
  Formula() = default;
  explicit Formula(std::shared_ptr<const FNode> n) : node_(std::move(n)) {}

  bool empty() const { return !node_; }
  const FNode& node() const { return *node_; }
  FKind kind() const { return node_->kind; }
  const std::string& sort() const { return node_->sort; }
  const std::string& name() const { return node_->name; }
  const std::vector<Formula>& kids() const { return node_->kids; }
  const Formula& kid(size_t i) const { return node_->kids[i]; }
  size_t hash() const { return node_->hash; }

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

  std::shared_ptr<const FNode> ptr() const { return node_; }

 private:
  std::shared_ptr<const FNode> node_;
};

struct FormulaHash {
  size_t operator()(const Formula& f) const { return f.hash(); }
};

// ----- constructors (validating; throw Error on sort violations) -----

Formula f_prop(const Signature& sig, const std::string& name);
Formula f_nom(const Signature& sig, const std::string& name);
Formula f_cnom(const Signature& sig, const std::string& name);
Formula f_svar(const Signature& sig, const std::string& name);
// Resolves any declared symbol or numeral to its atom.
Formula f_atom(const Signature& sig, const std::string& name);
Formula f_numeral(const Signature& sig, unsigned long long n);

Formula f_neg(Formula a);
Formula f_or(Formula a, Formula b);
Formula f_modal(const Signature& sig, const std::string& op,
                std::vector<Formula> args,
                const std::optional<std::string>& expected_sort = std::nullopt);
// @_k^host phi; k must be a nominal or constant nominal of phi's sort.
Formula f_at(const Signature& sig, const std::string& k, Formula phi,
             const std::string& host_sort);
Formula f_forall(const Signature& sig, const std::string& x, Formula body);

// Derived forms.
Formula f_and(Formula a, Formula b);
Formula f_implies(Formula a, Formula b);
Formula f_iff(Formula a, Formula b);
Formula f_box(const Signature& sig, const std::string& op,
              std::vector<Formula> args,
              const std::optional<std::string>& expected_sort = std::nullopt);
Formula f_exists(const Signature& sig, const std::string& x, Formula body);
Formula f_top(const Signature& sig, const std::string& sort);
Formula f_bot(const Signature& sig, const std::string& sort);

// ----- shape views (recognize elaborated derived forms) -----

std::optional<std::pair<Formula, Formula>> view_implies(const Formula& f);
std::optional<std::pair<Formula, Formula>> view_and(const Formula& f);
std::optional<std::pair<Formula, Formula>> view_iff(const Formula& f);
// box: Neg(Modal(op, [Neg a1, ..., Neg an])) -> (op, [a1..an])
std::optional<std::pair<std::string, std::vector<Formula>>> view_box(
    const Formula& f);
// exists: Neg(Forall(x, Neg body)) -> (x, var_sort, body)
struct ExistsView {
  std::string var;
  std::string var_sort;
  Formula body;
};
std::optional<ExistsView> view_exists(const Formula& f);

// ----- operations -----

// Re-checks the whole tree against the signature; returns the sort.
std::string sort_of(const Signature& sig, const Formula& f);

// Free state variables, as (name, sort) pairs.
std::set<std::pair<std::string, std::string>> free_state_vars(const Formula& f);
bool occurs_free(const Formula& f, const std::string& var);
// Any occurrence of a nominal / constant nominal, including @ subscripts.
bool occurs_symbol(const Formula& f, const std::string& name);

// The state symbol z (a state variable, nominal, or constant nominal of
// x's sort) is substitutable for state variable x, per the six clauses.
// Nominals and constant nominals are always substitutable.
struct StateSymbol {
  SymbolKind kind;  // SVar, Nom or CNom
  std::string name;
  std::string sort;
};
bool substitutable(const StateSymbol& z, const std::string& x,
                   const Formula& f);

// phi[z/x] on free occurrences; throws IllegalSubstitution when the
// substitutability guard fails (never renames silently).
Formula substitute(const Signature& sig, const Formula& f,
                   const std::string& x, const StateSymbol& z);

bool is_pure(const Formula& f);
bool is_forall_exists_pure(const Formula& f);

// All uniform substitutions of f's nominals by pool nominals of the same
// sorts. pool maps sort -> nominal names. Requires is_pure(f).
std::vector<Formula> pure_instances(
    const Signature& sig, const Formula& f,
    const std::map<std::string, std::vector<std::string>>& pool);

// Replaces every occurrence of nominal `from` (atoms and @ subscripts)
// by nominal `to` of the same sort.
Formula rename_nominal(const Formula& f, const std::string& from,
                       const std::string& to);

// ----- raw constructors (no signature checks; used by the matcher) -----

Formula raw_atom(FKind kind, const std::string& name, const std::string& sort);
Formula raw_neg(Formula a);
Formula raw_or(Formula a, Formula b);
Formula raw_modal(const std::string& op, const std::string& sort,
                  std::vector<Formula> args);
Formula raw_at(const std::string& k, const std::string& k_sort, bool k_is_cnom,
               Formula phi, const std::string& host_sort);
Formula raw_forall(const std::string& x, const std::string& x_sort,
                   Formula body);

}  // namespace hml
