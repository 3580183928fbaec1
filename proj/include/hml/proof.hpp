#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hml/formula.hpp"
#include "hml/signature.hpp"

namespace hml {

// Axiom schemas of the three deductive systems. The first three form the
// base modal system; the rest extend it with satisfaction operators and
// the universal binder.
enum class SchemaId {
  Taut,
  Ksigma,
  Dualsigma,
  KAt,
  Agree,
  SelfDual,
  Intro,
  Back,
  Ref,
  Q1,
  Q2,
  Name,
  Barcan,
  BarcanAt,
  NomX,
};

const char* schema_name(SchemaId id);
std::optional<SchemaId> schema_by_name(const std::string& name);

enum class LogicProfile { KSigma, HAt, HAtForall };

const char* profile_name(LogicProfile p);
std::optional<LogicProfile> profile_by_name(const std::string& name);

// True iff the profile admits the schema as an axiom.
bool profile_admits(LogicProfile p, SchemaId id);

// True iff f is an instance of the schema, side conditions included.
bool match_axiom(const Signature& sig, SchemaId id, const Formula& f);

// Truth-table tautology on the propositional skeleton (maximal
// non-Boolean subformulas abstracted as atoms). Throws TooManyAtoms
// beyond 20 distinct atoms.
bool is_tautology(const Formula& f);

// ----- lambda extensions -----

// How a registered formula may be instantiated by an Extension step:
//  - Schematic: propositional variables and free state variables act as
//    metavariables for formulas of their sorts; nominals rename
//    uniformly. This is the reading of operational-semantics axiom sets,
//    whose stated side conditions become guards.
//  - Theorem: a checked lemma's conclusion; propositional variables map
//    to formulas, free state variables only to substitutable state
//    symbols, nominals rename uniformly. These instances stay sound for
//    any theorem.
//  - Exact: cited verbatim (oracle-validated facts).
enum class InstantiationMode { Schematic, Theorem, Exact };

struct Guard {
  enum class Kind { Numeral, Distinct, Absent };
  Kind kind;
  std::string a;
  std::string b;  // Distinct: second symbol; Absent: the prop metavariable
};

struct ExtensionEntry {
  std::string label;
  Formula formula;
  InstantiationMode mode = InstantiationMode::Schematic;
  std::vector<Guard> guards;
  bool pure = false;
  bool forall_exists_pure = false;
  std::string provenance;  // lemma file, oracle shape, or axiom set name
};

class ExtensionRegistry {
 public:
  // Duplicate labels are rejected, never overwritten.
  void add(ExtensionEntry entry);
  const ExtensionEntry* find(const std::string& label) const;
  const std::vector<ExtensionEntry>& entries() const { return entries_; }
  bool remove(const std::string& label);

 private:
  std::vector<ExtensionEntry> entries_;
};

// Registers phi under the label with purity metadata computed; throws on
// duplicate labels.
void register_extension(ExtensionRegistry& reg, const Signature& sig,
                        const Formula& phi, const std::string& label,
                        InstantiationMode mode = InstantiationMode::Schematic,
                        std::vector<Guard> guards = {},
                        const std::string& provenance = "");

// Instance check for one entry; on failure *why names the obstacle.
bool match_extension(const Signature& sig, const ExtensionEntry& entry,
                     const Formula& instance, std::string* why = nullptr);

// ----- proof scripts -----

struct Justification {
  enum class Rule {
    Axiom,
    Extension,
    Hyp,
    GlobalHyp,
    MP,
    UG,
    GenAt,
    BroadcastS,
    NameAt,
    Paste,
    Gen,
  };
  Rule rule;
  SchemaId schema = SchemaId::Taut;  // Axiom
  std::string label;                 // Extension
  int index1 = -1;                   // premise / hypothesis index (0-based)
  int index2 = -1;                   // MP: implication premise
  std::string op;                    // UG operator
  int arg_pos = -1;                  // UG argument position (0-based)
  std::string name;   // GenAt/GlobalHyp: nominal; Gen: variable; BroadcastS: sort
};

struct Step {
  Formula formula;
  Justification just;
};

struct ProofScript {
  Signature sig;
  LogicProfile profile = LogicProfile::HAtForall;
  ExtensionRegistry extensions;
  std::vector<Formula> hypotheses;                         // Gamma_s
  std::vector<std::pair<std::string, Formula>> global_hyps;  // (sort, gamma)
  std::vector<Step> steps;
  Formula conclusion;  // defaults to the last step's formula
};

struct Diagnostic {
  int step = -1;  // 0-based; -1 for script-level problems
  std::string code;
  std::string detail;
};

struct CheckReport {
  bool ok = false;
  std::vector<Diagnostic> diagnostics;
};

// Checks every step against the profile's axioms and rules.
//
// Steps justified by Hyp or GlobalHyp are marked hypothesis-dependent;
// MP propagates the mark. The generalization-flavored rules (UG, Gen,
// Gen@, Broadcast, Name@, Paste) require hypothesis-free premises: local
// deduction is provability of an implication theorem, and generalizing
// over undischarged hypotheses would leave that reading.
CheckReport check_proof(const ProofScript& script);

}  // namespace hml
