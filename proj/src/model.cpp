#include "hml/model.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace hml {

const std::vector<std::string> Frame::kNoWorlds;
const std::vector<std::vector<int>> Frame::kNoTuples;
const std::set<int> Model::kNoWorlds;

int Frame::add_world(const std::string& sort, const std::string& name) {
  if (!sig_->has_sort(sort)) throw Error(ErrorKind::UnknownSort, sort);
  auto& ws = worlds_[sort];
  if (std::find(ws.begin(), ws.end(), name) != ws.end())
    throw Error(ErrorKind::DuplicateSort, "world " + name + " : " + sort);
  ws.push_back(name);
  return static_cast<int>(ws.size()) - 1;
}

void Frame::add_tuple(const OperatorDecl& op, const std::vector<int>& tuple) {
  if (tuple.size() != op.arg_sorts.size() + 1)
    throw Error(ErrorKind::ArityMismatch, "rel " + op.name);
  auto check = [&](const std::string& sort, int w) {
    if (w < 0 || w >= world_count(sort))
      throw Error(ErrorKind::UnknownWorld,
                  op.name + " tuple references world " + std::to_string(w) +
                      " of sort " + sort);
  };
  check(op.result_sort, tuple[0]);
  for (size_t i = 0; i < op.arg_sorts.size(); ++i)
    check(op.arg_sorts[i], tuple[i + 1]);
  auto& ts = rels_[{op.name, op.result_sort}];
  if (std::find(ts.begin(), ts.end(), tuple) == ts.end()) ts.push_back(tuple);
}

void Frame::designate(const std::string& cnom, const std::string& sort,
                      int world) {
  if (world < 0 || world >= world_count(sort))
    throw Error(ErrorKind::UnknownWorld, "desig " + cnom);
  desig_[{cnom, sort}] = world;
}

int Frame::world_count(const std::string& sort) const {
  auto it = worlds_.find(sort);
  return it == worlds_.end() ? 0 : static_cast<int>(it->second.size());
}

const std::vector<std::string>& Frame::world_names(
    const std::string& sort) const {
  auto it = worlds_.find(sort);
  return it == worlds_.end() ? kNoWorlds : it->second;
}

int Frame::world_index(const std::string& sort, const std::string& name) const {
  const auto& ws = world_names(sort);
  auto it = std::find(ws.begin(), ws.end(), name);
  if (it == ws.end())
    throw Error(ErrorKind::UnknownWorld, name + " : " + sort);
  return static_cast<int>(it - ws.begin());
}

const std::vector<std::vector<int>>& Frame::tuples(
    const OperatorDecl& op) const {
  auto it = rels_.find({op.name, op.result_sort});
  return it == rels_.end() ? kNoTuples : it->second;
}

int Frame::designation(const std::string& cnom, const std::string& sort) const {
  auto it = desig_.find({cnom, sort});
  if (it == desig_.end())
    throw Error(ErrorKind::MissingDesignation, cnom + " : " + sort);
  return it->second;
}

bool Frame::has_designation(const std::string& cnom,
                            const std::string& sort) const {
  return desig_.count({cnom, sort}) > 0;
}

void Frame::validate(const std::set<std::string>& sorts_required) const {
  for (const auto& s : sorts_required) {
    if (!sig_->has_sort(s)) throw Error(ErrorKind::UnknownSort, s);
    if (world_count(s) == 0)
      throw Error(ErrorKind::UnknownWorld, "sort " + s + " has no worlds");
  }
  // Declared constant nominals of inhabited sorts must be designated.
  for (const auto& d : sig_->symbol_declarations()) {
    if (d.kind != SymbolKind::CNom) continue;
    if (!sorts_required.count(d.sort)) continue;
    if (!has_designation(d.name, d.sort))
      throw Error(ErrorKind::MissingDesignation, d.name + " : " + d.sort);
  }
}

void Model::set_prop(const std::string& p, const std::string& sort,
                     std::set<int> worlds) {
  for (int w : worlds)
    if (w < 0 || w >= frame_.world_count(sort))
      throw Error(ErrorKind::UnknownWorld, "val " + p);
  props_[{p, sort}] = std::move(worlds);
}

void Model::set_nom(const std::string& j, const std::string& sort, int world) {
  if (world < 0 || world >= frame_.world_count(sort))
    throw Error(ErrorKind::UnknownWorld, "val " + j);
  noms_[{j, sort}] = world;
}

const std::set<int>& Model::prop_worlds(const std::string& p,
                                        const std::string& sort) const {
  auto it = props_.find({p, sort});
  return it == props_.end() ? kNoWorlds : it->second;
}

std::optional<int> Model::nom_world(const std::string& j,
                                    const std::string& sort) const {
  auto it = noms_.find({j, sort});
  if (it == noms_.end()) return std::nullopt;
  return it->second;
}

int Model::state_symbol_world(const std::string& name, const std::string& sort,
                              bool is_cnom) const {
  if (is_cnom) return frame_.designation(name, sort);
  auto w = nom_world(name, sort);
  if (!w)
    throw Error(ErrorKind::UnknownWorld, "nominal " + name + " unvalued");
  return *w;
}

void Model::validate(const std::set<std::string>& sorts_required) const {
  frame_.validate(sorts_required);
}

void Assignment::set(const std::string& var, const std::string& sort,
                     int world) {
  map_[{var, sort}] = world;
}

std::optional<int> Assignment::get(const std::string& var,
                                   const std::string& sort) const {
  auto it = map_.find({var, sort});
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

// ----- satisfaction -----

namespace {

struct Eval {
  explicit Eval(const Model& model) : m(model) {}
  const Model& m;

  // Per-call memo: (node pointer, world, packed assignment restricted to
  // the node's free variables). Keeps model validity polynomial even when
  // quantifiers iterate many variant assignments.
  struct Key {
    const FNode* node;
    int world;
    std::string gproj;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      size_t h = std::hash<const void*>{}(k.node);
      h ^= std::hash<int>{}(k.world) + 0x9e3779b9 + (h << 6) + (h >> 2);
      h ^= std::hash<std::string>{}(k.gproj) + (h << 6);
      return h;
    }
  };
  std::unordered_map<Key, bool, KeyHash> memo;
  std::unordered_map<const FNode*,
                     std::set<std::pair<std::string, std::string>>>
      freevars;

  const std::set<std::pair<std::string, std::string>>& fv(const Formula& f) {
    auto it = freevars.find(&f.node());
    if (it != freevars.end()) return it->second;
    return freevars.emplace(&f.node(), free_state_vars(f)).first->second;
  }

  bool eval(const Formula& f, const Assignment& g, const World& w) {
    Key key{&f.node(), w.index, {}};
    for (const auto& [name, sort] : fv(f)) {
      auto v = g.get(name, sort);
      if (!v)
        throw Error(ErrorKind::UnboundStateVariable, name + " : " + sort);
      key.gproj += name;
      key.gproj += '=';
      key.gproj += std::to_string(*v);
      key.gproj += ';';
    }
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool r = eval_raw(f, g, w);
    memo.emplace(std::move(key), r);
    return r;
  }

  bool eval_raw(const Formula& f, const Assignment& g, const World& w) {
    const FNode& n = f.node();
    switch (n.kind) {
      case FKind::Prop:
        return m.prop_worlds(n.name, n.sort).count(w.index) > 0;
      case FKind::Nom:
      case FKind::CNom:
        return m.state_symbol_world(n.name, n.sort, n.kind == FKind::CNom) ==
               w.index;
      case FKind::SVar: {
        auto v = g.get(n.name, n.sort);
        if (!v) throw Error(ErrorKind::UnboundStateVariable, n.name);
        return *v == w.index;
      }
      case FKind::Neg:
        return !eval(n.kids[0], g, w);
      case FKind::Or:
        return eval(n.kids[0], g, w) || eval(n.kids[1], g, w);
      case FKind::Modal: {
        const OperatorDecl& d = m.sig().resolve_operator(
            n.name,
            [&] {
              std::vector<std::string> ss;
              for (const auto& k : n.kids) ss.push_back(k.sort());
              return ss;
            }(),
            n.sort);
        for (const auto& t : m.frame().tuples(d)) {
          if (t[0] != w.index) continue;
          bool all = true;
          for (size_t i = 0; i < n.kids.size(); ++i) {
            if (!eval(n.kids[i], g, World{d.arg_sorts[i], t[i + 1]})) {
              all = false;
              break;
            }
          }
          if (all) return true;
        }
        return false;
      }
      case FKind::At: {
        int u = m.state_symbol_world(n.name, n.inner_sort, n.name_is_cnom);
        return eval(n.kids[0], g, World{n.inner_sort, u});
      }
      case FKind::Forall: {
        int count = m.frame().world_count(n.inner_sort);
        if (count == 0)
          throw Error(ErrorKind::UnknownWorld,
                      "sort " + n.inner_sort + " has no worlds");
        for (int i = 0; i < count; ++i) {
          Assignment g2 = g;
          g2.set(n.name, n.inner_sort, i);
          if (!eval(n.kids[0], g2, w)) return false;
        }
        return true;
      }
    }
    return false;
  }
};

}  // namespace

bool satisfies(const Model& m, const Assignment& g, const World& w,
               const Formula& f) {
  if (w.sort != f.sort())
    throw Error(ErrorKind::SortMismatch,
                "world of sort " + w.sort + " vs formula of sort " + f.sort());
  if (w.index < 0 || w.index >= m.frame().world_count(w.sort))
    throw Error(ErrorKind::UnknownWorld, w.sort);
  Eval ev{m};
  return ev.eval(f, g, w);
}

bool valid_in_model(const Model& m, const Formula& f) {
  auto fvs = free_state_vars(f);
  std::vector<std::pair<std::string, std::string>> vars(fvs.begin(), fvs.end());
  Eval ev{m};
  int nw = m.frame().world_count(f.sort());
  if (nw == 0)
    throw Error(ErrorKind::UnknownWorld, "sort " + f.sort() + " has no worlds");

  std::function<bool(size_t, Assignment&)> assignments =
      [&](size_t i, Assignment& g) -> bool {
    if (i == vars.size()) {
      for (int w = 0; w < nw; ++w)
        if (!ev.eval(f, g, World{f.sort(), w})) return false;
      return true;
    }
    const auto& [name, sort] = vars[i];
    int count = m.frame().world_count(sort);
    if (count == 0)
      throw Error(ErrorKind::UnknownWorld, "sort " + sort + " has no worlds");
    for (int w = 0; w < count; ++w) {
      g.set(name, sort, w);
      if (!assignments(i + 1, g)) return false;
    }
    return true;
  };
  Assignment g;
  return assignments(0, g);
}

namespace {

// Symbols of f whose valuation matters: propositional variables and
// nominals (constant nominals are frame level).
struct ValuationSymbols {
  std::vector<std::pair<std::string, std::string>> props;  // name, sort
  std::vector<std::pair<std::string, std::string>> noms;
};

ValuationSymbols valuation_symbols(const Formula& f) {
  ValuationSymbols out;
  std::set<std::pair<std::string, std::string>> ps, ns;
  std::function<void(const Formula&)> rec = [&](const Formula& g) {
    const FNode& n = g.node();
    if (n.kind == FKind::Prop) ps.insert({n.name, n.sort});
    if (n.kind == FKind::Nom) ns.insert({n.name, n.sort});
    if (n.kind == FKind::At && !n.name_is_cnom)
      ns.insert({n.name, n.inner_sort});
    for (const auto& k : n.kids) rec(k);
  };
  rec(f);
  out.props.assign(ps.begin(), ps.end());
  out.noms.assign(ns.begin(), ns.end());
  return out;
}

}  // namespace

bool valid_in_frame(const Frame& fr, const Formula& f) {
  ValuationSymbols syms = valuation_symbols(f);
  Model m(fr);

  std::function<bool(size_t)> nom_loop = [&](size_t i) -> bool {
    if (i == syms.noms.size()) return valid_in_model(m, f);
    const auto& [name, sort] = syms.noms[i];
    int count = fr.world_count(sort);
    if (count == 0)
      throw Error(ErrorKind::UnknownWorld, "sort " + sort + " has no worlds");
    for (int w = 0; w < count; ++w) {
      m.set_nom(name, sort, w);
      if (!nom_loop(i + 1)) return false;
    }
    return true;
  };

  std::function<bool(size_t)> prop_loop = [&](size_t i) -> bool {
    if (i == syms.props.size()) return nom_loop(0);
    const auto& [name, sort] = syms.props[i];
    int count = fr.world_count(sort);
    for (unsigned mask = 0; mask < (1u << count); ++mask) {
      std::set<int> ws;
      for (int w = 0; w < count; ++w)
        if (mask & (1u << w)) ws.insert(w);
      m.set_prop(name, sort, std::move(ws));
      if (!prop_loop(i + 1)) return false;
    }
    return true;
  };

  return prop_loop(0);
}

bool is_named(const Model& m) {
  const Frame& fr = m.frame();
  const Signature& sig = m.sig();
  for (const auto& sort : sig.sorts()) {
    int count = fr.world_count(sort);
    for (int w = 0; w < count; ++w) {
      bool named = false;
      for (const auto& j : sig.symbols_of(SymbolKind::Nom, sort)) {
        auto v = m.nom_world(j, sort);
        if (v && *v == w) {
          named = true;
          break;
        }
      }
      if (!named) {
        for (const auto& [key, val] : fr.designations()) {
          if (key.second == sort && val == w) {
            named = true;
            break;
          }
        }
      }
      if (!named) return false;
    }
  }
  return true;
}

EquivalenceReport check_pure_named_equivalence(
    const Model& m, const Formula& f,
    const std::map<std::string, std::vector<std::string>>& pool) {
  if (!is_pure(f)) throw Error(ErrorKind::NotPure, "formula has propositional variables");
  if (!is_named(m)) throw Error(ErrorKind::NotNamed, "model is not named");
  EquivalenceReport rep;
  rep.frame_valid = valid_in_frame(m.frame(), f);
  rep.instances_valid = true;
  auto insts = pure_instances(m.sig(), f, pool);
  rep.instance_count = static_cast<int>(insts.size());
  for (const auto& inst : insts) {
    if (!valid_in_model(m, inst)) {
      rep.instances_valid = false;
      break;
    }
  }
  rep.agree = rep.frame_valid == rep.instances_valid;
  return rep;
}

EquivalenceReport check_forall_exists_pure_named(const Model& m,
                                                 const Formula& f) {
  if (!is_forall_exists_pure(f))
    throw Error(ErrorKind::NotPure, "not a forall/exists-pure formula");
  if (!is_named(m)) throw Error(ErrorKind::NotNamed, "model is not named");
  EquivalenceReport rep;
  rep.frame_valid = valid_in_frame(m.frame(), f);
  rep.instances_valid = valid_in_model(m, f);
  rep.instance_count = 1;
  rep.agree = rep.frame_valid == rep.instances_valid;
  return rep;
}

// ----- bounded countermodel search -----

namespace {

struct SearchSpace {
  std::vector<std::string> sorts;  // sorts to inhabit, sorted
  std::vector<OperatorDecl> ops;   // operators to vary
  std::vector<std::pair<std::string, std::string>> props;
  std::vector<std::pair<std::string, std::string>> noms;
  std::vector<std::pair<std::string, std::string>> cnoms;
  std::vector<std::pair<std::string, std::string>> svars;
};

void collect_space(const Signature& sig, const Formula& f, SearchSpace& sp,
                   std::set<std::string>& sort_set,
                   std::set<std::pair<std::string, std::string>>& seen_ops,
                   std::set<std::pair<std::string, std::string>>& seen_syms) {
  std::function<void(const Formula&)> rec = [&](const Formula& g) {
    const FNode& n = g.node();
    sort_set.insert(n.sort);
    switch (n.kind) {
      case FKind::Prop:
        if (seen_syms.insert({n.name, "p"}).second)
          sp.props.push_back({n.name, n.sort});
        break;
      case FKind::Nom:
        if (seen_syms.insert({n.name, "n"}).second)
          sp.noms.push_back({n.name, n.sort});
        break;
      case FKind::CNom:
        if (seen_syms.insert({n.name, "c"}).second)
          sp.cnoms.push_back({n.name, n.sort});
        break;
      case FKind::SVar:
        if (seen_syms.insert({n.name, "v"}).second)
          sp.svars.push_back({n.name, n.sort});
        break;
      case FKind::At:
        sort_set.insert(n.inner_sort);
        if (n.name_is_cnom) {
          if (seen_syms.insert({n.name, "c"}).second)
            sp.cnoms.push_back({n.name, n.inner_sort});
        } else {
          if (seen_syms.insert({n.name, "n"}).second)
            sp.noms.push_back({n.name, n.inner_sort});
        }
        break;
      case FKind::Forall:
        sort_set.insert(n.inner_sort);
        break;
      case FKind::Modal: {
        std::vector<std::string> ss;
        for (const auto& k : n.kids) ss.push_back(k.sort());
        const OperatorDecl& d = sig.resolve_operator(n.name, ss, n.sort);
        for (const auto& s : d.arg_sorts) sort_set.insert(s);
        if (seen_ops.insert({d.name, d.result_sort}).second) sp.ops.push_back(d);
        break;
      }
      default:
        break;
    }
    for (const auto& k : n.kids) rec(k);
  };
  rec(f);
}

}  // namespace

std::optional<Countermodel> bounded_countermodel(
    const Signature& sig, const std::vector<Formula>& gamma, const Formula& phi,
    int max_worlds_per_sort) {
  if (max_worlds_per_sort < 1)
    throw Error(ErrorKind::UnknownWorld, "bound must be >= 1");
  for (const auto& g : gamma)
    if (g.sort() != phi.sort())
      throw Error(ErrorKind::SortMismatch,
                  "hypotheses and goal must share one sort");

  SearchSpace sp;
  std::set<std::string> sort_set;
  std::set<std::pair<std::string, std::string>> seen_ops, seen_syms;
  collect_space(sig, phi, sp, sort_set, seen_ops, seen_syms);
  for (const auto& g : gamma) collect_space(sig, g, sp, sort_set, seen_ops, seen_syms);
  sp.sorts.assign(sort_set.begin(), sort_set.end());

  // Target: all of gamma and not(phi) at some world under some assignment.
  std::vector<Formula> targets = gamma;
  targets.push_back(raw_neg(phi));

  // Iterate world counts lexicographically (1..bound per sort).
  std::vector<int> counts(sp.sorts.size(), 1);
  auto bump = [&]() -> bool {
    for (size_t i = counts.size(); i-- > 0;) {
      if (counts[i] < max_worlds_per_sort) {
        ++counts[i];
        for (size_t j = i + 1; j < counts.size(); ++j) counts[j] = 1;
        return true;
      }
    }
    return false;
  };

  while (true) {
    Frame base(sig);
    for (size_t i = 0; i < sp.sorts.size(); ++i)
      for (int w = 0; w < counts[i]; ++w)
        base.add_world(sp.sorts[i], "w" + std::to_string(w));

    // Relation spaces: enumerate subsets of the full tuple space per op.
    std::vector<std::vector<std::vector<int>>> tuple_spaces;
    for (const auto& op : sp.ops) {
      std::vector<std::vector<int>> tuples;
      std::vector<int> dims;
      dims.push_back(base.world_count(op.result_sort));
      for (const auto& s : op.arg_sorts) dims.push_back(base.world_count(s));
      std::vector<int> cur(dims.size(), 0);
      while (true) {
        tuples.push_back(cur);
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
      tuple_spaces.push_back(std::move(tuples));
    }

    // Total relation configuration count; cap the masks at 64 bits per op.
    std::function<std::optional<Countermodel>(size_t, Frame&)> rel_loop =
        [&](size_t opi, Frame& fr) -> std::optional<Countermodel> {
      if (opi == sp.ops.size()) {
        // Designations for constant nominals, in order.
        std::function<std::optional<Countermodel>(size_t, Frame&)> desig_loop =
            [&](size_t ci, Frame& fr2) -> std::optional<Countermodel> {
          if (ci == sp.cnoms.size()) {
            Model m(fr2);
            // Valuations: nominals (singletons), then props (subsets).
            std::function<std::optional<Countermodel>(size_t)> nom_loop =
                [&](size_t ni) -> std::optional<Countermodel> {
              if (ni == sp.noms.size()) {
                std::function<std::optional<Countermodel>(size_t)> prop_loop =
                    [&](size_t pi) -> std::optional<Countermodel> {
                  if (pi == sp.props.size()) {
                    // assignments over the free state variables
                    std::function<std::optional<Countermodel>(size_t,
                                                              Assignment&)>
                        assign_loop =
                            [&](size_t vi, Assignment& g)
                        -> std::optional<Countermodel> {
                      if (vi == sp.svars.size()) {
                        int nw = m.frame().world_count(phi.sort());
                        for (int w = 0; w < nw; ++w) {
                          World world{phi.sort(), w};
                          bool all = true;
                          for (const auto& t : targets) {
                            if (!satisfies(m, g, world, t)) {
                              all = false;
                              break;
                            }
                          }
                          if (all) return Countermodel{m, world, g};
                        }
                        return std::nullopt;
                      }
                      const auto& [vname, vsort] = sp.svars[vi];
                      for (int w = 0; w < m.frame().world_count(vsort); ++w) {
                        g.set(vname, vsort, w);
                        if (auto r = assign_loop(vi + 1, g)) return r;
                      }
                      return std::nullopt;
                    };
                    Assignment g;
                    return assign_loop(0, g);
                  }
                  const auto& [pname, psort] = sp.props[pi];
                  int count = m.frame().world_count(psort);
                  for (unsigned mask = 0; mask < (1u << count); ++mask) {
                    std::set<int> ws;
                    for (int w = 0; w < count; ++w)
                      if (mask & (1u << w)) ws.insert(w);
                    m.set_prop(pname, psort, std::move(ws));
                    if (auto r = prop_loop(pi + 1)) return r;
                  }
                  return std::nullopt;
                };
                return prop_loop(0);
              }
              const auto& [nname, nsort] = sp.noms[ni];
              for (int w = 0; w < m.frame().world_count(nsort); ++w) {
                m.set_nom(nname, nsort, w);
                if (auto r = nom_loop(ni + 1)) return r;
              }
              return std::nullopt;
            };
            return nom_loop(0);
          }
          const auto& [cname, csort] = sp.cnoms[ci];
          for (int w = 0; w < fr2.world_count(csort); ++w) {
            Frame fr3 = fr2;
            fr3.designate(cname, csort, w);
            if (auto r = desig_loop(ci + 1, fr3)) return r;
          }
          return std::nullopt;
        };
        return desig_loop(0, fr);
      }
      const auto& tuples = tuple_spaces[opi];
      if (tuples.size() > 20)
        throw Error(ErrorKind::TooManyAtoms,
                    "relation space too large for exhaustive search: " +
                        sp.ops[opi].name);
      for (unsigned long long mask = 0; mask < (1ull << tuples.size());
           ++mask) {
        Frame fr2 = fr;
        for (size_t t = 0; t < tuples.size(); ++t)
          if (mask & (1ull << t)) fr2.add_tuple(sp.ops[opi], tuples[t]);
        if (auto r = rel_loop(opi + 1, fr2)) return r;
      }
      return std::nullopt;
    };

    if (auto r = rel_loop(0, base)) return r;
    if (!bump()) return std::nullopt;
  }
}

// ----- model files -----

Model parse_model(const Signature& sig, const std::string& text) {
  Frame fr(sig);
  struct PendingVal {
    std::string name;
    std::vector<std::string> worlds;
    int lineno;
  };
  std::vector<PendingVal> vals;
  struct PendingRel {
    std::string op;
    std::vector<std::string> worlds;
    int lineno;
  };
  std::vector<PendingRel> rels;
  struct PendingDesig {
    std::string cnom;
    std::string world;
    int lineno;
  };
  std::vector<PendingDesig> desigs;

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](int ln, const std::string& msg) -> void {
    throw Error(ErrorKind::SyntaxError,
                "model line " + std::to_string(ln) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    // strip comments
    auto hashpos = line.find('#');
    if (hashpos != std::string::npos) line.resize(hashpos);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks[0] == "world") {
      if (toks.size() != 4 || toks[2] != ":") fail(lineno, "world <name> : <sort>");
      fr.add_world(toks[3], toks[1]);
    } else if (toks[0] == "rel") {
      if (toks.size() < 3) fail(lineno, "rel <op> <w> <w1> ...");
      rels.push_back({toks[1], {toks.begin() + 2, toks.end()}, lineno});
    } else if (toks[0] == "val") {
      // val <sym> = {w,...}
      if (toks.size() < 4 || toks[2] != "=") fail(lineno, "val <sym> = {w,...}");
      std::string rest;
      for (size_t i = 3; i < toks.size(); ++i) rest += toks[i];
      if (rest.size() < 2 || rest.front() != '{' || rest.back() != '}')
        fail(lineno, "world set must be {w,...}");
      rest = rest.substr(1, rest.size() - 2);
      std::vector<std::string> ws;
      std::string cur;
      for (char c : rest) {
        if (c == ',') {
          if (!cur.empty()) ws.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (!cur.empty()) ws.push_back(cur);
      vals.push_back({toks[1], std::move(ws), lineno});
    } else if (toks[0] == "desig") {
      if (toks.size() != 4 || toks[2] != "=") fail(lineno, "desig <c> = <w>");
      desigs.push_back({toks[1], toks[3], lineno});
    } else {
      fail(lineno, "unknown directive '" + toks[0] + "'");
    }
  }

  for (const auto& r : rels) {
    auto decls = sig.operators_named(r.op);
    const OperatorDecl* match = nullptr;
    for (const auto& d : decls)
      if (d.arg_sorts.size() + 1 == r.worlds.size()) match = &d;
    if (!match) fail(r.lineno, "no operator " + r.op + " of this arity");
    std::vector<int> tuple;
    tuple.push_back(fr.world_index(match->result_sort, r.worlds[0]));
    for (size_t i = 0; i < match->arg_sorts.size(); ++i)
      tuple.push_back(fr.world_index(match->arg_sorts[i], r.worlds[i + 1]));
    fr.add_tuple(*match, tuple);
  }
  for (const auto& d : desigs) {
    auto info = sig.lookup_symbol(d.cnom);
    if (!info || info->kind != SymbolKind::CNom)
      fail(d.lineno, d.cnom + " is not a constant nominal");
    fr.designate(d.cnom, info->sort, fr.world_index(info->sort, d.world));
  }

  Model m(std::move(fr));
  for (const auto& v : vals) {
    auto info = sig.lookup_symbol(v.name);
    if (!info) fail(v.lineno, "unknown symbol " + v.name);
    if (info->kind == SymbolKind::Prop) {
      std::set<int> ws;
      for (const auto& w : v.worlds)
        ws.insert(m.frame().world_index(info->sort, w));
      m.set_prop(v.name, info->sort, std::move(ws));
    } else if (info->kind == SymbolKind::Nom) {
      if (v.worlds.size() != 1)
        fail(v.lineno, "nominal valuation must be a singleton");
      m.set_nom(v.name, info->sort,
                m.frame().world_index(info->sort, v.worlds[0]));
    } else {
      fail(v.lineno, "val expects a propositional variable or nominal");
    }
  }
  return m;
}

Model load_model_file(const Signature& sig, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_model(sig, os.str());
}

}  // namespace hml
