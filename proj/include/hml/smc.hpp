#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hml/formula.hpp"
#include "hml/proof.hpp"
#include "hml/signature.hpp"

namespace hml::smc {

// ----- abstract syntax -----

struct AExp;
struct Stmt;
using AExpPtr = std::shared_ptr<const AExp>;
using StmtPtr = std::shared_ptr<const Stmt>;

struct AExp {
  enum class K { Num, Var, Add, Inc };
  K k;
  unsigned long long num = 0;
  std::string var;
  AExpPtr a, b;
};

struct BExp {  // lhs <= rhs
  AExpPtr lhs, rhs;
};
using BExpPtr = std::shared_ptr<const BExp>;

struct Stmt {
  enum class K { Assign, If, While, Skip, Seq };
  K k;
  std::string var;
  AExpPtr a;
  BExpPtr b;
  StmtPtr s1, s2;
};

AExpPtr mk_num(unsigned long long n);
AExpPtr mk_var(std::string x);
AExpPtr mk_add(AExpPtr a, AExpPtr b);
AExpPtr mk_inc(std::string x);
BExpPtr mk_leq(AExpPtr a, AExpPtr b);
StmtPtr mk_assign(std::string x, AExpPtr a);
StmtPtr mk_if(BExpPtr b, StmtPtr s1, StmtPtr s2);
StmtPtr mk_while(BExpPtr b, StmtPtr s);
StmtPtr mk_skip();
StmtPtr mk_seq(StmtPtr a, StmtPtr b);

// Concrete syntax: `x := a`, `if b then s else s`, `while b do s`,
// `skip`, `s ; s` (right associated), `++x`, `+`, `<=`; parentheses group
// both statements and expressions. if/while bodies are single statements;
// parenthesize sequences. Throws SyntaxError with line:column.
StmtPtr parse_program(const std::string& text);
std::string print_program(const Stmt& s);
StmtPtr load_program_file(const std::string& path);

// Program variables, in order of first occurrence.
std::vector<std::string> program_vars(const Stmt& s);

// ----- values, memory, machine -----

struct Value {
  bool is_bool = false;
  unsigned long long nat = 0;
  bool b = false;

  static Value of_nat(unsigned long long n) { return {false, n, false}; }
  static Value of_bool(bool v) { return {true, 0, v}; }
  bool operator==(const Value&) const = default;
};

std::string value_to_string(const Value& v);

// Canonical association form of a Mem term: variable to natural, sorted
// by name, last write wins.
class Memory {
 public:
  void write(const std::string& x, unsigned long long n) { map_[x] = n; }
  std::optional<unsigned long long> read(const std::string& x) const;
  const std::map<std::string, unsigned long long>& entries() const {
    return map_;
  }
  bool operator==(const Memory&) const = default;

 private:
  std::map<std::string, unsigned long long> map_;
};

// Parses "x=3,n=5"; empty string gives the empty memory.
Memory parse_memory(const std::string& text);

struct CtrlItem {
  enum class K { CA, CB, CS, Asgn, Plus, Leq, Test, Branch, Loop };
  K k;
  AExpPtr a;        // CA
  BExpPtr b;        // CB, Loop condition
  StmtPtr s;        // CS, Branch then, Loop body
  StmtPtr s2;       // Branch else
  std::string var;  // Asgn
  Value test;       // Test
};

// Control stack with the next item at the back.
using CtrlStack = std::vector<CtrlItem>;

// Control stack for a whole statement / expression, per the definitional
// axioms read left to right.
CtrlStack compile(const StmtPtr& s);
CtrlStack compile_aexp(const AExpPtr& a);
CtrlStack compile_bexp(const BExpPtr& b);

struct MachineState {
  CtrlStack ctrl;
  std::vector<Value> vs;  // top at front
  Memory mem;
};

// What a step certifies: the axiom instance realized by a primitive
// item, or the definitional axioms a derived item expands under.
struct StepCert {
  bool primitive = false;
  std::vector<std::string> axioms;
  Formula instance;  // primitive steps only
};

struct StepResult {
  enum class Status { Ok, Halted, Stuck };
  Status status = Status::Ok;
  MachineState next;
  StepCert cert;
  std::string stuck_reason;  // UnboundVariable, StackUnderflow, TypeClash,
                             // TestFailed
};

// One deterministic transition. The signature supplies the vocabulary
// for the emitted axiom instance; program variables must be declared as
// Var constant nominals (see ensure_program_vars).
StepResult step(const Signature& sig, const MachineState& st);

struct RunResult {
  enum class Status { Finished, OutOfFuel, Stuck };
  Status status = Status::Finished;
  Memory mem;
  std::vector<Value> vs;
  long steps_taken = 0;
  std::string stuck_reason;
};

RunResult run(const Signature& sig, const StmtPtr& program, const Memory& mem0,
              long fuel);

// ----- terms and axiom instances -----

// The language signature: grammar sorts and productions as operators,
// true/false as Bool constant nominals, numerals built in at Nat, and
// the symbols the axiom set and program proofs use.
Signature fig3_signature();

// Adds any missing Var constant nominals for the program's variables.
void ensure_program_vars(Signature& sig, const std::vector<std::string>& vars);

Formula term_of_value(const Signature& sig, const Value& v);
Formula term_of_stack(const Signature& sig, const std::vector<Value>& vs);
Formula term_of_mem(const Signature& sig, const Memory& m);
Formula term_of_aexp(const Signature& sig, const AExp& a);
Formula term_of_bexp(const Signature& sig, const BExp& b);
Formula term_of_stmt(const Signature& sig, const Stmt& s);
Formula term_of_ctrl_item(const Signature& sig, const CtrlItem& item);
Formula config_of(const Signature& sig, const Formula& stack,
                  const Formula& mem);
// [pi]gamma over the execution modality.
Formula box_exec(const Signature& sig, const Formula& pi, const Formula& gamma);

// Mem terms <-> canonical association form.
Memory memory_of_term(const Formula& t);
Formula canonicalize_mem(const Signature& sig, const Formula& t);

// The axiom set of the language: definitional, machine, PDL-style,
// memory-consistency and domain axioms, with their side-condition guards.
void register_language_axioms(ExtensionRegistry& reg, const Signature& sig);

// The nominal-conjunction lemma family for k in {true,false}: per
// operator argument position the conjunct-pushing equivalences, plus the
// box variant and the existential commutation over the execution
// modality for the given variables.
void register_nominal_conjunction(ExtensionRegistry& reg, const Signature& sig,
                                  const std::vector<std::string>& exists_vars);

}  // namespace hml::smc
