#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hml/formula.hpp"
#include "hml/signature.hpp"

namespace hml {

// World identifier: sort plus index into that sort's world list.
struct World {
  std::string sort;
  int index = -1;
  bool operator==(const World&) const = default;
  auto operator<=>(const World&) const = default;
};

// Finite many-sorted frame with constant-nominal designations. Relations
// are stored per operator declaration as sorted tuple lists; tuple[0] is
// the world of the result sort.
class Frame {
 public:
  explicit Frame(const Signature& sig) : sig_(&sig) {}

  const Signature& sig() const { return *sig_; }

  int add_world(const std::string& sort, const std::string& name);
  void add_tuple(const OperatorDecl& op, const std::vector<int>& tuple);
  void designate(const std::string& cnom, const std::string& sort, int world);

  int world_count(const std::string& sort) const;
  const std::vector<std::string>& world_names(const std::string& sort) const;
  int world_index(const std::string& sort, const std::string& name) const;

  struct OpKey {
    std::string name;
    std::string result_sort;
    auto operator<=>(const OpKey&) const = default;
  };
  const std::vector<std::vector<int>>& tuples(const OperatorDecl& op) const;

  // Designation of a constant nominal; throws MissingDesignation when the
  // model never placed it (declared constant nominals are checked eagerly
  // by validate(); numeral designations exist only when supplied).
  int designation(const std::string& cnom, const std::string& sort) const;
  bool has_designation(const std::string& cnom, const std::string& sort) const;
  const std::map<std::pair<std::string, std::string>, int>& designations()
      const {
    return desig_;
  }

  // Every declared sort nonempty (for sorts that carry worlds at all this
  // frame mentions), every declared constant nominal designated, every
  // tuple sort-correct. Sorts with no worlds are permitted only when
  // unused: `sorts_required` lists the sorts that must be nonempty.
  void validate(const std::set<std::string>& sorts_required) const;

 private:
  const Signature* sig_;
  std::map<std::string, std::vector<std::string>> worlds_;
  std::map<OpKey, std::vector<std::vector<int>>> rels_;
  std::map<std::pair<std::string, std::string>, int> desig_;
  static const std::vector<std::string> kNoWorlds;
  static const std::vector<std::vector<int>> kNoTuples;
};

// Frame plus valuation. V maps propositional variables to world sets and
// nominals to singletons.
class Model {
 public:
  explicit Model(Frame frame) : frame_(std::move(frame)) {}

  const Frame& frame() const { return frame_; }
  Frame& frame() { return frame_; }
  const Signature& sig() const { return frame_.sig(); }

  void set_prop(const std::string& p, const std::string& sort,
                std::set<int> worlds);
  void set_nom(const std::string& j, const std::string& sort, int world);

  const std::set<int>& prop_worlds(const std::string& p,
                                   const std::string& sort) const;
  std::optional<int> nom_world(const std::string& j,
                               const std::string& sort) const;

  // V^N: nominal or constant nominal to its unique world.
  int state_symbol_world(const std::string& name, const std::string& sort,
                         bool is_cnom) const;

  void validate(const std::set<std::string>& sorts_required) const;

 private:
  Frame frame_;
  std::map<std::pair<std::string, std::string>, std::set<int>> props_;
  std::map<std::pair<std::string, std::string>, int> noms_;
  static const std::set<int> kNoWorlds;
};

// Sort-respecting partial map from state variables to worlds; totalized
// on demand over the variables of the formula under evaluation.
class Assignment {
 public:
  void set(const std::string& var, const std::string& sort, int world);
  std::optional<int> get(const std::string& var, const std::string& sort) const;
  const std::map<std::pair<std::string, std::string>, int>& entries() const {
    return map_;
  }

 private:
  std::map<std::pair<std::string, std::string>, int> map_;
};

// M,g,w |= phi with the finite-model clauses; throws UnknownWorld /
// UnboundStateVariable / MissingDesignation on precondition violations.
bool satisfies(const Model& m, const Assignment& g, const World& w,
               const Formula& f);

// Valid in the model: all worlds of phi's sort, all assignments over
// phi's free state variables.
bool valid_in_model(const Model& m, const Formula& f);

// Valid in the frame: valid_in_model for every valuation of the
// propositional variables (all subsets) and nominals (all singletons)
// occurring in phi.
bool valid_in_frame(const Frame& fr, const Formula& f);

// Every world of every inhabited sort is the denotation of some nominal
// or constant nominal.
bool is_named(const Model& m);

struct EquivalenceReport {
  bool frame_valid = false;
  bool instances_valid = false;  // or model_valid for the forall/exists form
  bool agree = false;
  int instance_count = 0;
};

// Proposition "pure formulas in H(@)": on a named model, frame validity
// of a pure formula coincides with model validity of all its pure
// instances over the pool.
EquivalenceReport check_pure_named_equivalence(
    const Model& m, const Formula& f,
    const std::map<std::string, std::vector<std::string>>& pool);

// The forall/exists analogue: on a named model, frame validity of a
// forall..exists.. pure-prefix formula coincides with its model validity.
EquivalenceReport check_forall_exists_pure_named(const Model& m,
                                                 const Formula& f);

struct Countermodel {
  Model model;
  World world;
  Assignment assignment;
};

// Searches all frames and valuations over the sorts/operators/symbols
// occurring in gamma and phi, up to the world bound, for a model of
// gamma + not(phi). Deterministic enumeration order: worlds per sort
// lexicographic, then relation bitmasks, then valuations.
std::optional<Countermodel> bounded_countermodel(const Signature& sig,
                                                 const std::vector<Formula>& gamma,
                                                 const Formula& phi,
                                                 int max_worlds_per_sort);

// Model file format:
//   world <name> : <sort>
//   rel <op> <w> <w1> ... <wn>
//   val <p> = {w,...}        (propositional variable)
//   val <j> = {w}            (nominal; singleton)
//   desig <c> = <w>
Model parse_model(const Signature& sig, const std::string& text);
Model load_model_file(const Signature& sig, const std::string& path);

}  // namespace hml
