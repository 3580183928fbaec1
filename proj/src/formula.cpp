#include "hml/formula.hpp"

#include <algorithm>
#include <functional>

namespace hml {

namespace {

size_t combine(size_t h, size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

size_t node_hash(const FNode& n) {
  size_t h = static_cast<size_t>(n.kind);
  h = combine(h, std::hash<std::string>{}(n.sort));
  h = combine(h, std::hash<std::string>{}(n.name));
  h = combine(h, std::hash<std::string>{}(n.inner_sort));
  h = combine(h, n.name_is_cnom ? 1 : 2);
  for (const auto& k : n.kids) h = combine(h, k.hash());
  return h;
}

Formula mk(FNode n) {
  n.hash = node_hash(n);
  return Formula(std::make_shared<const FNode>(std::move(n)));
}

}  // namespace

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  const FNode& a = *node_;
  const FNode& b = *other.node_;
  if (a.hash != b.hash || a.kind != b.kind || a.name != b.name ||
      a.sort != b.sort || a.inner_sort != b.inner_sort ||
      a.name_is_cnom != b.name_is_cnom || a.kids.size() != b.kids.size())
    return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!(a.kids[i] == b.kids[i])) return false;
  return true;
}

// ----- raw constructors -----

Formula raw_atom(FKind kind, const std::string& name, const std::string& sort) {
  FNode n;
  n.kind = kind;
  n.sort = sort;
  n.name = name;
  return mk(std::move(n));
}

Formula raw_neg(Formula a) {
  FNode n;
  n.kind = FKind::Neg;
  n.sort = a.sort();
  n.kids = {std::move(a)};
  return mk(std::move(n));
}

Formula raw_or(Formula a, Formula b) {
  FNode n;
  n.kind = FKind::Or;
  n.sort = a.sort();
  n.kids = {std::move(a), std::move(b)};
  return mk(std::move(n));
}

Formula raw_modal(const std::string& op, const std::string& sort,
                  std::vector<Formula> args) {
  FNode n;
  n.kind = FKind::Modal;
  n.sort = sort;
  n.name = op;
  n.kids = std::move(args);
  return mk(std::move(n));
}

Formula raw_at(const std::string& k, const std::string& k_sort, bool k_is_cnom,
               Formula phi, const std::string& host_sort) {
  FNode n;
  n.kind = FKind::At;
  n.sort = host_sort;
  n.name = k;
  n.inner_sort = k_sort;
  n.name_is_cnom = k_is_cnom;
  n.kids = {std::move(phi)};
  return mk(std::move(n));
}

Formula raw_forall(const std::string& x, const std::string& x_sort,
                   Formula body) {
  FNode n;
  n.kind = FKind::Forall;
  n.sort = body.sort();
  n.name = x;
  n.inner_sort = x_sort;
  n.kids = {std::move(body)};
  return mk(std::move(n));
}

// ----- validating constructors -----

namespace {

Formula atom_of_kind(const Signature& sig, SymbolKind want, FKind fk,
                     const std::string& name) {
  auto info = sig.lookup_symbol(name);
  if (!info) throw Error(ErrorKind::UnknownSymbol, name);
  if (info->kind != want)
    throw Error(ErrorKind::SymbolKindClash,
                name + " is a " + symbol_kind_name(info->kind));
  return raw_atom(fk, name, info->sort);
}

}  // namespace

Formula f_prop(const Signature& sig, const std::string& name) {
  return atom_of_kind(sig, SymbolKind::Prop, FKind::Prop, name);
}
Formula f_nom(const Signature& sig, const std::string& name) {
  return atom_of_kind(sig, SymbolKind::Nom, FKind::Nom, name);
}
Formula f_cnom(const Signature& sig, const std::string& name) {
  return atom_of_kind(sig, SymbolKind::CNom, FKind::CNom, name);
}
Formula f_svar(const Signature& sig, const std::string& name) {
  return atom_of_kind(sig, SymbolKind::SVar, FKind::SVar, name);
}

Formula f_atom(const Signature& sig, const std::string& name) {
  auto info = sig.lookup_symbol(name);
  if (!info) throw Error(ErrorKind::UnknownSymbol, name);
  switch (info->kind) {
    case SymbolKind::Prop: return raw_atom(FKind::Prop, name, info->sort);
    case SymbolKind::Nom: return raw_atom(FKind::Nom, name, info->sort);
    case SymbolKind::CNom: return raw_atom(FKind::CNom, name, info->sort);
    case SymbolKind::SVar: return raw_atom(FKind::SVar, name, info->sort);
  }
  throw Error(ErrorKind::UnknownSymbol, name);
}

Formula f_numeral(const Signature& sig, unsigned long long n) {
  if (!sig.has_sort("Nat"))
    throw Error(ErrorKind::UnknownSort, "Nat (needed for numerals)");
  return raw_atom(FKind::CNom, std::to_string(n), "Nat");
}

Formula f_neg(Formula a) { return raw_neg(std::move(a)); }

Formula f_or(Formula a, Formula b) {
  if (a.sort() != b.sort())
    throw Error(ErrorKind::SortMismatch,
                "or: " + a.sort() + " vs " + b.sort());
  return raw_or(std::move(a), std::move(b));
}

Formula f_modal(const Signature& sig, const std::string& op,
                std::vector<Formula> args,
                const std::optional<std::string>& expected_sort) {
  std::vector<std::string> arg_sorts;
  arg_sorts.reserve(args.size());
  for (const auto& a : args) arg_sorts.push_back(a.sort());
  const OperatorDecl& d = sig.resolve_operator(op, arg_sorts, expected_sort);
  return raw_modal(op, d.result_sort, std::move(args));
}

Formula f_at(const Signature& sig, const std::string& k, Formula phi,
             const std::string& host_sort) {
  if (!sig.has_sort(host_sort)) throw Error(ErrorKind::UnknownSort, host_sort);
  auto info = sig.lookup_symbol(k);
  if (!info) throw Error(ErrorKind::UnknownSymbol, k);
  if (info->kind != SymbolKind::Nom && info->kind != SymbolKind::CNom)
    throw Error(ErrorKind::SymbolKindClash,
                "@ subscript must be a nominal or constant nominal, got " +
                    std::string(symbol_kind_name(info->kind)) + " " + k);
  if (info->sort != phi.sort())
    throw Error(ErrorKind::SortMismatch,
                "@_" + k + ": nominal sort " + info->sort +
                    " vs formula sort " + phi.sort());
  return raw_at(k, info->sort, info->kind == SymbolKind::CNom, std::move(phi),
                host_sort);
}

Formula f_forall(const Signature& sig, const std::string& x, Formula body) {
  auto info = sig.lookup_symbol(x);
  if (!info) throw Error(ErrorKind::UnknownSymbol, x);
  if (info->kind != SymbolKind::SVar)
    throw Error(ErrorKind::SymbolKindClash, x + " is not a state variable");
  return raw_forall(x, info->sort, std::move(body));
}

Formula f_and(Formula a, Formula b) {
  return raw_neg(f_or(raw_neg(std::move(a)), raw_neg(std::move(b))));
}

Formula f_implies(Formula a, Formula b) {
  return f_or(raw_neg(std::move(a)), std::move(b));
}

Formula f_iff(Formula a, Formula b) {
  return f_and(f_implies(a, b), f_implies(b, a));
}

Formula f_box(const Signature& sig, const std::string& op,
              std::vector<Formula> args,
              const std::optional<std::string>& expected_sort) {
  for (auto& a : args) a = raw_neg(std::move(a));
  return raw_neg(f_modal(sig, op, std::move(args), expected_sort));
}

Formula f_exists(const Signature& sig, const std::string& x, Formula body) {
  return raw_neg(f_forall(sig, x, raw_neg(std::move(body))));
}

Formula f_bot(const Signature& sig, const std::string& sort) {
  Formula p = raw_atom(FKind::Prop, sig.canonical_prop(sort), sort);
  return raw_neg(raw_or(p, raw_neg(p)));
}

Formula f_top(const Signature& sig, const std::string& sort) {
  return raw_neg(f_bot(sig, sort));
}

// ----- views -----

std::optional<std::pair<Formula, Formula>> view_implies(const Formula& f) {
  if (f.kind() != FKind::Or || f.kid(0).kind() != FKind::Neg) return std::nullopt;
  return std::make_pair(f.kid(0).kid(0), f.kid(1));
}

std::optional<std::pair<Formula, Formula>> view_and(const Formula& f) {
  // Neg(Or(Neg a, Neg b))
  if (f.kind() != FKind::Neg || f.kid(0).kind() != FKind::Or) return std::nullopt;
  const Formula& o = f.kid(0);
  if (o.kid(0).kind() != FKind::Neg || o.kid(1).kind() != FKind::Neg)
    return std::nullopt;
  return std::make_pair(o.kid(0).kid(0), o.kid(1).kid(0));
}

std::optional<std::pair<Formula, Formula>> view_iff(const Formula& f) {
  auto conj = view_and(f);
  if (!conj) return std::nullopt;
  auto fwd = view_implies(conj->first);
  auto bwd = view_implies(conj->second);
  if (!fwd || !bwd) return std::nullopt;
  if (!(fwd->first == bwd->second) || !(fwd->second == bwd->first))
    return std::nullopt;
  return std::make_pair(fwd->first, fwd->second);
}

std::optional<std::pair<std::string, std::vector<Formula>>> view_box(
    const Formula& f) {
  if (f.kind() != FKind::Neg || f.kid(0).kind() != FKind::Modal)
    return std::nullopt;
  const Formula& m = f.kid(0);
  std::vector<Formula> args;
  args.reserve(m.kids().size());
  for (const auto& k : m.kids()) {
    if (k.kind() != FKind::Neg) return std::nullopt;
    args.push_back(k.kid(0));
  }
  return std::make_pair(m.name(), std::move(args));
}

std::optional<ExistsView> view_exists(const Formula& f) {
  if (f.kind() != FKind::Neg || f.kid(0).kind() != FKind::Forall)
    return std::nullopt;
  const Formula& q = f.kid(0);
  if (q.kid(0).kind() != FKind::Neg) return std::nullopt;
  return ExistsView{q.name(), q.node().inner_sort, q.kid(0).kid(0)};
}

// ----- sort checking -----

std::string sort_of(const Signature& sig, const Formula& f) {
  const FNode& n = f.node();
  switch (n.kind) {
    case FKind::Prop:
    case FKind::Nom:
    case FKind::CNom:
    case FKind::SVar: {
      auto info = sig.lookup_symbol(n.name);
      if (!info) throw Error(ErrorKind::UnknownSymbol, n.name);
      SymbolKind want = n.kind == FKind::Prop  ? SymbolKind::Prop
                        : n.kind == FKind::Nom ? SymbolKind::Nom
                        : n.kind == FKind::CNom ? SymbolKind::CNom
                                                : SymbolKind::SVar;
      if (info->kind != want)
        throw Error(ErrorKind::SymbolKindClash, n.name);
      if (info->sort != n.sort)
        throw Error(ErrorKind::SortMismatch,
                    n.name + ": annotated " + n.sort + ", declared " +
                        info->sort);
      return n.sort;
    }
    case FKind::Neg: {
      std::string s = sort_of(sig, n.kids[0]);
      if (s != n.sort) throw Error(ErrorKind::SortMismatch, "not");
      return s;
    }
    case FKind::Or: {
      std::string a = sort_of(sig, n.kids[0]);
      std::string b = sort_of(sig, n.kids[1]);
      if (a != b)
        throw Error(ErrorKind::SortMismatch,
                    "or: disjuncts of sorts " + a + " and " + b);
      if (a != n.sort) throw Error(ErrorKind::SortMismatch, "or");
      return a;
    }
    case FKind::Modal: {
      std::vector<std::string> arg_sorts;
      for (const auto& k : n.kids) arg_sorts.push_back(sort_of(sig, k));
      const OperatorDecl& d = sig.resolve_operator(n.name, arg_sorts, n.sort);
      if (d.result_sort != n.sort) throw Error(ErrorKind::SortMismatch, n.name);
      return n.sort;
    }
    case FKind::At: {
      std::string t = sort_of(sig, n.kids[0]);
      if (t != n.inner_sort)
        throw Error(ErrorKind::SortMismatch,
                    "@_" + n.name + ": formula sort " + t);
      auto info = sig.lookup_symbol(n.name);
      if (!info || (info->kind != SymbolKind::Nom &&
                    info->kind != SymbolKind::CNom))
        throw Error(ErrorKind::SymbolKindClash,
                    "@ subscript " + n.name +
                        " must be a nominal or constant nominal");
      if (info->sort != t)
        throw Error(ErrorKind::SortMismatch,
                    "@_" + n.name + ": nominal of sort " + info->sort +
                        " applied to formula of sort " + t);
      if ((info->kind == SymbolKind::CNom) != n.name_is_cnom)
        throw Error(ErrorKind::SymbolKindClash, "@_" + n.name);
      if (!sig.has_sort(n.sort)) throw Error(ErrorKind::UnknownSort, n.sort);
      return n.sort;
    }
    case FKind::Forall: {
      auto info = sig.lookup_symbol(n.name);
      if (!info || info->kind != SymbolKind::SVar)
        throw Error(ErrorKind::SymbolKindClash,
                    "forall binds " + n.name + " which is not a state variable");
      if (info->sort != n.inner_sort)
        throw Error(ErrorKind::SortMismatch, "forall " + n.name);
      std::string s = sort_of(sig, n.kids[0]);
      if (s != n.sort) throw Error(ErrorKind::SortMismatch, "forall");
      return s;
    }
  }
  throw Error(ErrorKind::SortMismatch, "malformed formula");
}

// ----- variables and occurrences -----

namespace {

void free_vars_rec(const Formula& f,
                   std::set<std::pair<std::string, std::string>>& out,
                   std::vector<std::string>& bound) {
  const FNode& n = f.node();
  switch (n.kind) {
    case FKind::SVar:
      if (std::find(bound.begin(), bound.end(), n.name) == bound.end())
        out.insert({n.name, n.sort});
      return;
    case FKind::Forall:
      bound.push_back(n.name);
      free_vars_rec(n.kids[0], out, bound);
      bound.pop_back();
      return;
    default:
      for (const auto& k : n.kids) free_vars_rec(k, out, bound);
  }
}

}  // namespace

std::set<std::pair<std::string, std::string>> free_state_vars(
    const Formula& f) {
  std::set<std::pair<std::string, std::string>> out;
  std::vector<std::string> bound;
  free_vars_rec(f, out, bound);
  return out;
}

bool occurs_free(const Formula& f, const std::string& var) {
  for (const auto& [name, sort] : free_state_vars(f))
    if (name == var) return true;
  return false;
}

bool occurs_symbol(const Formula& f, const std::string& name) {
  const FNode& n = f.node();
  if ((n.kind == FKind::Nom || n.kind == FKind::CNom ||
       n.kind == FKind::SVar || n.kind == FKind::Prop) &&
      n.name == name)
    return true;
  if (n.kind == FKind::At && n.name == name) return true;
  if (n.kind == FKind::Forall && n.name == name) return true;
  for (const auto& k : n.kids)
    if (occurs_symbol(k, name)) return true;
  return false;
}

// ----- substitution -----

bool substitutable(const StateSymbol& z, const std::string& x,
                   const Formula& f) {
  const FNode& n = f.node();
  switch (n.kind) {
    case FKind::Prop:
    case FKind::Nom:
    case FKind::CNom:
    case FKind::SVar:
      return true;
    case FKind::Neg:
    case FKind::At:
      return substitutable(z, x, n.kids[0]);
    case FKind::Or:
    case FKind::Modal:
      for (const auto& k : n.kids)
        if (!substitutable(z, x, k)) return false;
      return true;
    case FKind::Forall: {
      if (n.name == x) return true;  // x bound here; no free occurrence below
      if (!occurs_free(n.kids[0], x)) return true;
      // binder y must differ from z, and z substitutable underneath
      if (z.kind == SymbolKind::SVar && n.name == z.name) return false;
      return substitutable(z, x, n.kids[0]);
    }
  }
  return false;
}

namespace {

Formula subst_rec(const Formula& f, const std::string& x, const Formula& rep) {
  const FNode& n = f.node();
  switch (n.kind) {
    case FKind::SVar:
      return n.name == x ? rep : f;
    case FKind::Prop:
    case FKind::Nom:
    case FKind::CNom:
      return f;
    case FKind::Neg:
      return raw_neg(subst_rec(n.kids[0], x, rep));
    case FKind::Or:
      return raw_or(subst_rec(n.kids[0], x, rep), subst_rec(n.kids[1], x, rep));
    case FKind::Modal: {
      std::vector<Formula> kids;
      kids.reserve(n.kids.size());
      for (const auto& k : n.kids) kids.push_back(subst_rec(k, x, rep));
      return raw_modal(n.name, n.sort, std::move(kids));
    }
    case FKind::At:
      return raw_at(n.name, n.inner_sort, n.name_is_cnom,
                    subst_rec(n.kids[0], x, rep), n.sort);
    case FKind::Forall:
      if (n.name == x) return f;
      return raw_forall(n.name, n.inner_sort, subst_rec(n.kids[0], x, rep));
  }
  return f;
}

}  // namespace

Formula substitute(const Signature& sig, const Formula& f, const std::string& x,
                   const StateSymbol& z) {
  auto xinfo = sig.lookup_symbol(x);
  if (!xinfo || xinfo->kind != SymbolKind::SVar)
    throw Error(ErrorKind::UnknownSymbol, x + " is not a state variable");
  if (z.sort != xinfo->sort)
    throw Error(ErrorKind::SortMismatch,
                z.name + " : " + z.sort + " for " + x + " : " + xinfo->sort);
  if (!substitutable(z, x, f))
    throw Error(ErrorKind::IllegalSubstitution, z.name + " for " + x);
  FKind fk = z.kind == SymbolKind::SVar  ? FKind::SVar
             : z.kind == SymbolKind::Nom ? FKind::Nom
                                         : FKind::CNom;
  return subst_rec(f, x, raw_atom(fk, z.name, z.sort));
}

// ----- purity -----

bool is_pure(const Formula& f) {
  if (f.kind() == FKind::Prop) return false;
  for (const auto& k : f.kids())
    if (!is_pure(k)) return false;
  return true;
}

namespace {

bool no_props(const Formula& f) {
  if (f.kind() == FKind::Prop) return false;
  for (const auto& k : f.kids())
    if (!no_props(k)) return false;
  return true;
}

// Collects all state symbols (nominals, constant nominals, free or bound
// state variables) occurring in f.
void state_symbols(const Formula& f, std::set<std::string>& out) {
  const FNode& n = f.node();
  if (n.kind == FKind::Nom || n.kind == FKind::CNom || n.kind == FKind::SVar)
    out.insert(n.name);
  if (n.kind == FKind::At) out.insert(n.name);
  for (const auto& k : n.kids) state_symbols(k, out);
}

}  // namespace

bool is_forall_exists_pure(const Formula& f) {
  if (is_pure(f)) return true;
  // forall x1..xn exists y1..ym psi, psi without propositional variables
  // and with state symbols only among the bound variables
  std::set<std::string> bound;
  Formula cur = f;
  bool any_forall = false;
  while (cur.kind() == FKind::Forall) {
    any_forall = true;
    bound.insert(cur.name());
    cur = cur.kid(0);
  }
  if (!any_forall) return false;
  while (auto ex = view_exists(cur)) {
    bound.insert(ex->var);
    cur = ex->body;
  }
  if (cur.kind() == FKind::Forall) return false;  // mixed prefix
  if (!no_props(cur)) return false;
  std::set<std::string> syms;
  state_symbols(cur, syms);
  return std::all_of(syms.begin(), syms.end(),
                     [&](const std::string& s) { return bound.count(s) > 0; });
}

// ----- pure instances -----

namespace {

void collect_nominals(const Formula& f,
                      std::map<std::string, std::string>& noms) {
  const FNode& n = f.node();
  if (n.kind == FKind::Nom) noms[n.name] = n.sort;
  if (n.kind == FKind::At && !n.name_is_cnom) noms[n.name] = n.inner_sort;
  for (const auto& k : n.kids) collect_nominals(k, noms);
}

Formula rename_many(const Formula& f,
                    const std::map<std::string, std::string>& map) {
  const FNode& n = f.node();
  switch (n.kind) {
    case FKind::Nom: {
      auto it = map.find(n.name);
      return it == map.end() ? f : raw_atom(FKind::Nom, it->second, n.sort);
    }
    case FKind::Prop:
    case FKind::CNom:
    case FKind::SVar:
      return f;
    case FKind::Neg:
      return raw_neg(rename_many(n.kids[0], map));
    case FKind::Or:
      return raw_or(rename_many(n.kids[0], map), rename_many(n.kids[1], map));
    case FKind::Modal: {
      std::vector<Formula> kids;
      for (const auto& k : n.kids) kids.push_back(rename_many(k, map));
      return raw_modal(n.name, n.sort, std::move(kids));
    }
    case FKind::At: {
      std::string nm = n.name;
      if (!n.name_is_cnom) {
        auto it = map.find(n.name);
        if (it != map.end()) nm = it->second;
      }
      return raw_at(nm, n.inner_sort, n.name_is_cnom,
                    rename_many(n.kids[0], map), n.sort);
    }
    case FKind::Forall:
      return raw_forall(n.name, n.inner_sort, rename_many(n.kids[0], map));
  }
  return f;
}

}  // namespace

std::vector<Formula> pure_instances(
    const Signature& sig, const Formula& f,
    const std::map<std::string, std::vector<std::string>>& pool) {
  if (!is_pure(f)) throw Error(ErrorKind::NotPure, "pure_instances");
  std::map<std::string, std::string> noms;  // name -> sort
  collect_nominals(f, noms);
  std::vector<std::pair<std::string, std::vector<std::string>>> choices;
  for (const auto& [name, sort] : noms) {
    auto it = pool.find(sort);
    std::vector<std::string> cands;
    if (it != pool.end()) cands = it->second;
    if (cands.empty()) cands = {name};  // no candidates: keep as is
    choices.push_back({name, std::move(cands)});
  }
  std::vector<Formula> out;
  std::map<std::string, std::string> map;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == choices.size()) {
      out.push_back(rename_many(f, map));
      return;
    }
    for (const auto& cand : choices[i].second) {
      map[choices[i].first] = cand;
      rec(i + 1);
    }
  };
  rec(0);
  (void)sig;
  return out;
}

Formula rename_nominal(const Formula& f, const std::string& from,
                       const std::string& to) {
  return rename_many(f, {{from, to}});
}

}  // namespace hml
