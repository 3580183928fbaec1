#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "hml/proof.hpp"

namespace hml {

// Assembles proof scripts step by step. Primitive emitters append one
// kernel step; derived emitters append short stock derivations (monotonicity,
// propositional chaining, @ distribution). Every emitted step goes through
// the kernel unchanged when the finished script is checked; the builder
// never extends the kernel's authority.
//
// Steps are deduplicated by formula: re-deriving an already present
// formula returns the existing index.
class ProofBuilder {
 public:
  ProofBuilder(const Signature& sig, LogicProfile profile);

  const Signature& sig() const { return sig_; }
  ExtensionRegistry& extensions() { return extensions_; }

  const Formula& formula(int step) const { return steps_[step].formula; }
  int size() const { return static_cast<int>(steps_.size()); }

  // ----- primitive steps -----

  int axiom(SchemaId id, const Formula& f);
  int taut(const Formula& f);
  int ext(const std::string& label, const Formula& instance);
  int mp(int minor, int major);
  // target must be box(op, args) with args[pos] == formula(premise)
  int ug(const Formula& target, int pos, int premise);
  int gen(const std::string& x, int premise);
  int gen_at(const std::string& j, const std::string& host, int premise);

  // Registers an oracle fact (Exact mode) and cites it.
  int fact(const std::string& label, const Formula& f);

  // ----- derived steps -----

  // Propositional consequence of the given steps: emits one Taut tower
  // plus modus ponens. Throws logic_error if the tower is not a
  // tautology (a tactic bug, not a user input error).
  int pl(const Formula& target, const std::vector<int>& deps);

  // From |- a -> b: box(op, ..., a at pos, ...) -> box(op, ..., b, ...).
  // frames are the other arguments, in order, with the varied position
  // left out.
  int box_mono(const std::string& op, const std::vector<Formula>& frames,
               int pos, int imp);
  // Same for the diamond.
  int dia_mono(const std::string& op, const std::vector<Formula>& frames,
               int pos, int imp);
  // From |- a <-> b: congruence under the diamond / box.
  int dia_iff(const std::string& op, const std::vector<Formula>& frames,
              int pos, int iff);
  int box_iff(const std::string& op, const std::vector<Formula>& frames,
              int pos, int iff);

  int iff_forward(int iff);   // (a<->b) |- a->b
  int iff_backward(int iff);  // (a<->b) |- b->a
  int iff_of(int fwd, int bwd);

  // From |- a -> b: @_j a -> @_j b at the host sort.
  int at_mono(const std::string& j, const std::string& host, int imp);
  // From |- a <-> b: @_j a <-> @_j b.
  int at_iff(const std::string& j, const std::string& host, int iff);

  // |- exists x phi -> psi from |- phi -> psi, x not free in psi.
  int exists_elim(const std::string& x, int imp);
  // |- phi[z/x] -> exists x phi for a state symbol z.
  int exists_intro(const Formula& phi, const std::string& x,
                   const StateSymbol& z);
  // |- exists x a -> exists x b from |- a -> b.
  int exists_mono(const std::string& x, int imp);

  // ----- assembly -----

  ProofScript finish(const Formula& conclusion) const;

 private:
  int append(const Formula& f, Justification j);
  Formula box_of(const std::string& op, const std::vector<Formula>& frames,
                 int pos, const Formula& at_pos) const;
  Formula dia_of(const std::string& op, const std::vector<Formula>& frames,
                 int pos, const Formula& at_pos) const;

  const Signature& sig_;
  LogicProfile profile_;
  ExtensionRegistry extensions_;
  std::vector<Step> steps_;
  std::unordered_map<Formula, int, FormulaHash> memo_;
  int fact_counter_ = 0;
};

}  // namespace hml
