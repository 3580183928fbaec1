#pragma once

#include <random>
#include <string>
#include <vector>

#include "hml/formula.hpp"
#include "hml/model.hpp"
#include "hml/signature.hpp"

namespace testutil {

using namespace hml;

// Two-sorted test signature with a unary cross-sort operator, a binary
// operator, and a small symbol inventory per sort.
inline Signature two_sorted() {
  Signature sig;
  sig.add_sort("s");
  sig.add_sort("t");
  sig.add_operator("f", {"t"}, "s");
  sig.add_operator("g", {"s", "t"}, "s");
  sig.add_operator("h", {"t"}, "t");
  for (const char* name : {"p", "q"}) sig.add_symbol(SymbolKind::Prop, name, "s");
  for (const char* name : {"r", "r2"}) sig.add_symbol(SymbolKind::Prop, name, "t");
  for (const char* name : {"j", "k"}) sig.add_symbol(SymbolKind::Nom, name, "s");
  for (const char* name : {"jt", "kt"}) sig.add_symbol(SymbolKind::Nom, name, "t");
  sig.add_symbol(SymbolKind::CNom, "c0", "s");
  sig.add_symbol(SymbolKind::CNom, "ct", "t");
  for (const char* name : {"u", "w"}) sig.add_symbol(SymbolKind::SVar, name, "s");
  for (const char* name : {"ut", "wt"}) sig.add_symbol(SymbolKind::SVar, name, "t");
  sig.validate();
  return sig;
}

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(unsigned long long seed) : eng(seed) {}
  int pick(int n) { return static_cast<int>(eng() % static_cast<unsigned long long>(n)); }
  bool flip() { return pick(2) == 0; }
};

// Random model over the signature: every sort 1..max_worlds worlds,
// random relations (each tuple kept with probability ~1/2), all constant
// nominals designated, all nominals and propositional variables valued.
inline Model random_model(const Signature& sig, Rng& rng, int max_worlds) {
  Frame fr(sig);
  for (const auto& s : sig.sorts()) {
    int n = 1 + rng.pick(max_worlds);
    for (int i = 0; i < n; ++i) fr.add_world(s, "w" + std::to_string(i));
  }
  for (const auto& op : sig.operators()) {
    std::vector<int> dims;
    dims.push_back(fr.world_count(op.result_sort));
    for (const auto& s : op.arg_sorts) dims.push_back(fr.world_count(s));
    std::vector<int> cur(dims.size(), 0);
    while (true) {
      if (rng.pick(100) < 45) fr.add_tuple(op, cur);
      size_t i = dims.size();
      bool carry = true;
      while (i-- > 0) {
        if (++cur[i] < dims[i]) {
          carry = false;
          break;
        }
        cur[i] = 0;
      }
      if (carry) break;
    }
  }
  for (const auto& d : sig.symbol_declarations())
    if (d.kind == SymbolKind::CNom)
      fr.designate(d.name, d.sort, rng.pick(fr.world_count(d.sort)));
  Model m(std::move(fr));
  for (const auto& d : sig.symbol_declarations()) {
    if (d.kind == SymbolKind::Prop) {
      std::set<int> ws;
      for (int w = 0; w < m.frame().world_count(d.sort); ++w)
        if (rng.flip()) ws.insert(w);
      m.set_prop(d.name, d.sort, std::move(ws));
    } else if (d.kind == SymbolKind::Nom) {
      m.set_nom(d.name, d.sort, rng.pick(m.frame().world_count(d.sort)));
    }
  }
  return m;
}

// Random formula of the requested sort. Depth-bounded; atoms drawn from
// the signature's inventories, with propositional atoms excluded when
// pure_only is set.
inline Formula random_formula(const Signature& sig, Rng& rng,
                              const std::string& sort, int depth,
                              bool pure_only = false,
                              bool allow_svars = true) {
  auto atoms_of = [&](const std::string& s) {
    std::vector<Formula> out;
    if (!pure_only)
      for (const auto& p : sig.symbols_of(SymbolKind::Prop, s))
        out.push_back(f_prop(sig, p));
    for (const auto& j : sig.symbols_of(SymbolKind::Nom, s))
      out.push_back(f_nom(sig, j));
    for (const auto& c : sig.symbols_of(SymbolKind::CNom, s))
      out.push_back(f_cnom(sig, c));
    if (allow_svars)
      for (const auto& x : sig.symbols_of(SymbolKind::SVar, s))
        out.push_back(f_svar(sig, x));
    return out;
  };
  if (depth <= 0) {
    auto atoms = atoms_of(sort);
    return atoms[rng.pick(static_cast<int>(atoms.size()))];
  }
  int choice = rng.pick(10);
  if (choice < 2) {
    auto atoms = atoms_of(sort);
    return atoms[rng.pick(static_cast<int>(atoms.size()))];
  }
  if (choice < 4)
    return f_neg(random_formula(sig, rng, sort, depth - 1, pure_only, allow_svars));
  if (choice < 6)
    return f_or(random_formula(sig, rng, sort, depth - 1, pure_only, allow_svars),
                random_formula(sig, rng, sort, depth - 1, pure_only, allow_svars));
  if (choice < 8) {
    auto ops = sig.operators_with_result(sort);
    if (!ops.empty()) {
      const auto& op = ops[rng.pick(static_cast<int>(ops.size()))];
      std::vector<Formula> args;
      for (const auto& s : op.arg_sorts)
        args.push_back(
            random_formula(sig, rng, s, depth - 1, pure_only, allow_svars));
      return f_modal(sig, op.name, std::move(args), sort);
    }
  }
  if (choice < 9) {
    // @_k phi at this host sort, over a random nominal
    std::vector<std::pair<std::string, std::string>> noms;
    for (const auto& d : sig.symbol_declarations())
      if (d.kind == SymbolKind::Nom || d.kind == SymbolKind::CNom)
        noms.push_back({d.name, d.sort});
    if (!noms.empty()) {
      auto [nm, nsort] = noms[rng.pick(static_cast<int>(noms.size()))];
      return f_at(sig, nm,
                  random_formula(sig, rng, nsort, depth - 1, pure_only,
                                 allow_svars),
                  sort);
    }
  }
  if (allow_svars) {
    std::vector<std::pair<std::string, std::string>> svars;
    for (const auto& d : sig.symbol_declarations())
      if (d.kind == SymbolKind::SVar) svars.push_back({d.name, d.sort});
    if (!svars.empty()) {
      auto [x, xs] = svars[rng.pick(static_cast<int>(svars.size()))];
      return f_forall(
          sig, x,
          random_formula(sig, rng, sort, depth - 1, pure_only, allow_svars));
    }
  }
  return f_neg(random_formula(sig, rng, sort, depth - 1, pure_only, allow_svars));
}

// An assignment covering the free variables of f.
inline Assignment random_assignment(const Signature& sig, const Model& m,
                                    Rng& rng, const Formula& f) {
  Assignment g;
  for (const auto& [name, sort] : free_state_vars(f))
    g.set(name, sort, rng.pick(m.frame().world_count(sort)));
  (void)sig;
  return g;
}

}  // namespace testutil
