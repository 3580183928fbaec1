#include <unordered_map>
#include <vector>

#include "hml/proof.hpp"

namespace hml {

namespace {

constexpr int kMaxAtoms = 20;

struct Skeleton {
  // nodes: kind 0 = atom(a), 1 = neg(a), 2 = or(a,b)
  struct Node {
    int kind;
    int a;
    int b;
  };
  std::vector<Node> nodes;
  int atom_count = 0;

  int build(const Formula& f,
            std::unordered_map<Formula, int, FormulaHash>& atoms) {
    if (f.kind() == FKind::Neg) {
      int a = build(f.kid(0), atoms);
      nodes.push_back({1, a, -1});
      return static_cast<int>(nodes.size()) - 1;
    }
    if (f.kind() == FKind::Or) {
      int a = build(f.kid(0), atoms);
      int b = build(f.kid(1), atoms);
      nodes.push_back({2, a, b});
      return static_cast<int>(nodes.size()) - 1;
    }
    auto it = atoms.find(f);
    int id;
    if (it != atoms.end()) {
      id = it->second;
    } else {
      id = atom_count++;
      if (atom_count > kMaxAtoms)
        throw Error(ErrorKind::TooManyAtoms,
                    "propositional skeleton exceeds " +
                        std::to_string(kMaxAtoms) + " atoms");
      atoms.emplace(f, id);
    }
    nodes.push_back({0, id, -1});
    return static_cast<int>(nodes.size()) - 1;
  }

  bool eval(int root, unsigned mask) const {
    // nodes are in postorder: children precede parents
    std::vector<char> val(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
      const Node& n = nodes[i];
      switch (n.kind) {
        case 0: val[i] = (mask >> n.a) & 1u; break;
        case 1: val[i] = !val[n.a]; break;
        default: val[i] = val[n.a] || val[n.b];
      }
    }
    return val[root];
  }
};

}  // namespace

bool is_tautology(const Formula& f) {
  Skeleton sk;
  std::unordered_map<Formula, int, FormulaHash> atoms;
  int root = sk.build(f, atoms);
  unsigned long long count = 1ull << sk.atom_count;
  for (unsigned long long mask = 0; mask < count; ++mask)
    if (!sk.eval(root, static_cast<unsigned>(mask))) return false;
  return true;
}

}  // namespace hml
