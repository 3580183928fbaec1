#include "hml/proof.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace hml {

const char* schema_name(SchemaId id) {
  switch (id) {
    case SchemaId::Taut: return "Taut";
    case SchemaId::Ksigma: return "K";
    case SchemaId::Dualsigma: return "Dual";
    case SchemaId::KAt: return "K@";
    case SchemaId::Agree: return "Agree";
    case SchemaId::SelfDual: return "SelfDual";
    case SchemaId::Intro: return "Intro";
    case SchemaId::Back: return "Back";
    case SchemaId::Ref: return "Ref";
    case SchemaId::Q1: return "Q1";
    case SchemaId::Q2: return "Q2";
    case SchemaId::Name: return "Name";
    case SchemaId::Barcan: return "Barcan";
    case SchemaId::BarcanAt: return "Barcan@";
    case SchemaId::NomX: return "Nomx";
  }
  return "?";
}

std::optional<SchemaId> schema_by_name(const std::string& name) {
  for (SchemaId id :
       {SchemaId::Taut, SchemaId::Ksigma, SchemaId::Dualsigma, SchemaId::KAt,
        SchemaId::Agree, SchemaId::SelfDual, SchemaId::Intro, SchemaId::Back,
        SchemaId::Ref, SchemaId::Q1, SchemaId::Q2, SchemaId::Name,
        SchemaId::Barcan, SchemaId::BarcanAt, SchemaId::NomX})
    if (name == schema_name(id)) return id;
  return std::nullopt;
}

const char* profile_name(LogicProfile p) {
  switch (p) {
    case LogicProfile::KSigma: return "KS";
    case LogicProfile::HAt: return "H@";
    case LogicProfile::HAtForall: return "H@A";
  }
  return "?";
}

std::optional<LogicProfile> profile_by_name(const std::string& name) {
  if (name == "KS") return LogicProfile::KSigma;
  if (name == "H@") return LogicProfile::HAt;
  if (name == "H@A") return LogicProfile::HAtForall;
  return std::nullopt;
}

bool profile_admits(LogicProfile p, SchemaId id) {
  switch (id) {
    case SchemaId::Taut:
    case SchemaId::Ksigma:
    case SchemaId::Dualsigma:
      return true;
    case SchemaId::KAt:
    case SchemaId::Agree:
    case SchemaId::SelfDual:
    case SchemaId::Intro:
    case SchemaId::Back:
    case SchemaId::Ref:
      return p != LogicProfile::KSigma;
    default:
      return p == LogicProfile::HAtForall;
  }
}

// ----- schema matching -----

namespace {

bool is_nominal_atom(const Formula& f) {
  return f.kind() == FKind::Nom || f.kind() == FKind::CNom;
}

// Shared (j, sort, cnom-flag) identity of an @ subscript.
bool same_subscript(const FNode& a, const FNode& b) {
  return a.name == b.name && a.inner_sort == b.inner_sort &&
         a.name_is_cnom == b.name_is_cnom;
}

bool match_ksigma(const Formula& f) {
  auto top = view_implies(f);
  if (!top) return false;
  auto rest = view_implies(top->second);
  if (!rest) return false;
  auto A = view_box(top->first);
  auto B = view_box(rest->first);
  auto C = view_box(rest->second);
  if (!A || !B || !C) return false;
  if (A->first != B->first || A->first != C->first) return false;
  size_t n = A->second.size();
  if (B->second.size() != n || C->second.size() != n) return false;
  for (size_t i = 0; i < n; ++i) {
    auto imp = view_implies(A->second[i]);
    if (!imp) continue;
    if (!(B->second[i] == imp->first) || !(C->second[i] == imp->second))
      continue;
    bool rest_ok = true;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (!(A->second[j] == B->second[j]) || !(A->second[j] == C->second[j])) {
        rest_ok = false;
        break;
      }
    }
    if (rest_ok) return true;
  }
  return false;
}

bool match_dualsigma(const Formula& f) {
  auto iff = view_iff(f);
  if (!iff) return false;
  const Formula& L = iff->first;
  const Formula& R = iff->second;
  if (L.kind() != FKind::Modal) return false;
  // R must be not(box(op, not a1, ..., not an))
  if (R.kind() != FKind::Neg) return false;
  auto box = view_box(R.kid(0));
  if (!box) return false;
  if (box->first != L.name()) return false;
  if (box->second.size() != L.kids().size()) return false;
  for (size_t i = 0; i < L.kids().size(); ++i)
    if (!(box->second[i] == raw_neg(L.kid(i)))) return false;
  return true;
}

bool match_kat(const Formula& f) {
  auto top = view_implies(f);
  if (!top) return false;
  auto rest = view_implies(top->second);
  if (!rest) return false;
  const Formula& A = top->first;
  const Formula& B = rest->first;
  const Formula& C = rest->second;
  if (A.kind() != FKind::At || B.kind() != FKind::At || C.kind() != FKind::At)
    return false;
  if (!same_subscript(A.node(), B.node()) || !same_subscript(A.node(), C.node()))
    return false;
  if (A.sort() != B.sort() || A.sort() != C.sort()) return false;
  auto inner = view_implies(A.kid(0));
  if (!inner) return false;
  return inner->first == B.kid(0) && inner->second == C.kid(0);
}

bool match_agree(const Formula& f) {
  auto iff = view_iff(f);
  if (!iff) return false;
  const Formula& L = iff->first;
  const Formula& R = iff->second;
  if (L.kind() != FKind::At || R.kind() != FKind::At) return false;
  const Formula& inner = L.kid(0);
  if (inner.kind() != FKind::At) return false;
  return same_subscript(inner.node(), R.node()) && inner.kid(0) == R.kid(0) &&
         L.sort() == R.sort();
}

bool match_selfdual(const Formula& f) {
  auto iff = view_iff(f);
  if (!iff) return false;
  const Formula& L = iff->first;
  Formula R = iff->second;
  if (L.kind() != FKind::At) return false;
  if (R.kind() != FKind::Neg || R.kid(0).kind() != FKind::At) return false;
  const Formula& Rat = R.kid(0);
  if (!same_subscript(L.node(), Rat.node()) || L.sort() != Rat.sort())
    return false;
  return Rat.kid(0) == raw_neg(L.kid(0));
}

bool match_intro(const Formula& f) {
  auto imp = view_implies(f);
  if (!imp) return false;
  const Formula& j = imp->first;
  if (!is_nominal_atom(j)) return false;
  auto iff = view_iff(imp->second);
  if (!iff) return false;
  const Formula& phi = iff->first;
  const Formula& at = iff->second;
  if (at.kind() != FKind::At) return false;
  if (at.name() != j.name() || at.node().inner_sort != j.sort()) return false;
  if (at.node().name_is_cnom != (j.kind() == FKind::CNom)) return false;
  // j, phi, and the host all live at one sort
  return at.kid(0) == phi && phi.sort() == j.sort() && at.sort() == j.sort();
}

bool match_back(const Formula& f) {
  auto imp = view_implies(f);
  if (!imp) return false;
  const Formula& L = imp->first;
  const Formula& R = imp->second;
  if (L.kind() != FKind::Modal || R.kind() != FKind::At) return false;
  if (R.sort() != L.sort()) return false;
  for (const auto& arg : L.kids()) {
    if (arg.kind() != FKind::At) continue;
    if (same_subscript(arg.node(), R.node()) && arg.kid(0) == R.kid(0))
      return true;
  }
  return false;
}

bool match_ref(const Formula& f) {
  if (f.kind() != FKind::At) return false;
  const Formula& inner = f.kid(0);
  if (!is_nominal_atom(inner)) return false;
  return inner.name() == f.name() && inner.sort() == f.node().inner_sort &&
         (inner.kind() == FKind::CNom) == f.node().name_is_cnom;
}

bool match_q1(const Formula& f) {
  auto imp = view_implies(f);
  if (!imp) return false;
  const Formula& L = imp->first;
  if (L.kind() != FKind::Forall) return false;
  auto body = view_implies(L.kid(0));
  if (!body) return false;
  auto rhs = view_implies(imp->second);
  if (!rhs) return false;
  const Formula& R2 = rhs->second;
  if (R2.kind() != FKind::Forall) return false;
  if (R2.name() != L.name() || R2.node().inner_sort != L.node().inner_sort)
    return false;
  if (!(rhs->first == body->first) || !(R2.kid(0) == body->second))
    return false;
  return !occurs_free(body->first, L.name());
}

// Finds the unique replacement atom for Q2: walks phi and psi in
// parallel; free occurrences of x in phi must all map to the same state
// symbol atom in psi, everything else must be identical.
bool q2_witness(const Formula& phi, const Formula& psi, const std::string& x,
                bool x_bound, std::optional<Formula>& cand) {
  const FNode& a = phi.node();
  const FNode& b = psi.node();
  if (!x_bound && a.kind == FKind::SVar && a.name == x) {
    if (b.kind != FKind::SVar && b.kind != FKind::Nom && b.kind != FKind::CNom)
      return false;
    if (psi.sort() != phi.sort()) return false;
    if (cand && !(*cand == psi)) return false;
    cand = psi;
    return true;
  }
  if (a.kind != b.kind || a.name != b.name || a.sort != b.sort ||
      a.inner_sort != b.inner_sort || a.name_is_cnom != b.name_is_cnom ||
      a.kids.size() != b.kids.size())
    return false;
  bool bound_below = x_bound || (a.kind == FKind::Forall && a.name == x);
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!q2_witness(a.kids[i], b.kids[i], x, bound_below, cand)) return false;
  return true;
}

bool match_q2(const Signature& sig, const Formula& f) {
  auto imp = view_implies(f);
  if (!imp) return false;
  const Formula& L = imp->first;
  if (L.kind() != FKind::Forall) return false;
  const std::string& x = L.name();
  const Formula& phi = L.kid(0);
  const Formula& psi = imp->second;
  std::optional<Formula> cand;
  if (!q2_witness(phi, psi, x, false, cand)) return false;
  if (!cand) return phi == psi;  // no free occurrence of x
  StateSymbol z{cand->kind() == FKind::SVar  ? SymbolKind::SVar
                : cand->kind() == FKind::Nom ? SymbolKind::Nom
                                             : SymbolKind::CNom,
                cand->name(), cand->sort()};
  if (!substitutable(z, x, phi)) return false;
  try {
    return substitute(sig, phi, x, z) == psi;
  } catch (const Error&) {
    return false;
  }
}

bool match_name(const Formula& f) {
  auto ex = view_exists(f);
  if (!ex) return false;
  const Formula& body = ex->body;
  return body.kind() == FKind::SVar && body.name() == ex->var;
}

bool match_barcan(const Formula& f) {
  auto imp = view_implies(f);
  if (!imp) return false;
  const Formula& L = imp->first;
  if (L.kind() != FKind::Forall) return false;
  const std::string& x = L.name();
  const std::string& xsort = L.node().inner_sort;
  auto A = view_box(L.kid(0));
  auto B = view_box(imp->second);
  if (!A || !B) return false;
  if (A->first != B->first || A->second.size() != B->second.size())
    return false;
  size_t n = A->second.size();
  for (size_t i = 0; i < n; ++i) {
    const Formula& bi = B->second[i];
    if (bi.kind() != FKind::Forall || bi.name() != x ||
        bi.node().inner_sort != xsort)
      continue;
    if (!(bi.kid(0) == A->second[i])) continue;
    bool rest_ok = true;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      // The other arguments must agree and must not mention x freely:
      // moving the binder inward past an argument that reads x would not
      // be truth preserving.
      if (!(A->second[j] == B->second[j]) || occurs_free(A->second[j], x)) {
        rest_ok = false;
        break;
      }
    }
    if (rest_ok) return true;
  }
  return false;
}

bool match_barcan_at(const Formula& f) {
  auto imp = view_implies(f);
  if (!imp) return false;
  const Formula& L = imp->first;
  const Formula& R = imp->second;
  if (L.kind() != FKind::Forall || R.kind() != FKind::At) return false;
  const Formula& Lat = L.kid(0);
  if (Lat.kind() != FKind::At) return false;
  if (!same_subscript(Lat.node(), R.node()) || Lat.sort() != R.sort())
    return false;
  const Formula& Rq = R.kid(0);
  if (Rq.kind() != FKind::Forall || Rq.name() != L.name() ||
      Rq.node().inner_sort != L.node().inner_sort)
    return false;
  return Rq.kid(0) == Lat.kid(0);
}

bool match_nomx(const Formula& f) {
  auto imp = view_implies(f);
  if (!imp) return false;
  auto conj = view_and(imp->first);
  if (!conj) return false;
  const Formula& A = conj->first;   // @_k x
  const Formula& B = conj->second;  // @_j x
  const Formula& C = imp->second;   // @_k j
  if (A.kind() != FKind::At || B.kind() != FKind::At || C.kind() != FKind::At)
    return false;
  if (A.sort() != B.sort() || A.sort() != C.sort()) return false;
  const Formula& xa = A.kid(0);
  if (xa.kind() != FKind::SVar) return false;
  if (!(B.kid(0) == xa)) return false;
  if (!same_subscript(A.node(), C.node())) return false;
  const Formula& j = C.kid(0);
  if (!is_nominal_atom(j)) return false;
  return j.name() == B.name() && j.sort() == B.node().inner_sort &&
         (j.kind() == FKind::CNom) == B.node().name_is_cnom;
}

}  // namespace

bool match_axiom(const Signature& sig, SchemaId id, const Formula& f) {
  switch (id) {
    case SchemaId::Taut: return is_tautology(f);
    case SchemaId::Ksigma: return match_ksigma(f);
    case SchemaId::Dualsigma: return match_dualsigma(f);
    case SchemaId::KAt: return match_kat(f);
    case SchemaId::Agree: return match_agree(f);
    case SchemaId::SelfDual: return match_selfdual(f);
    case SchemaId::Intro: return match_intro(f);
    case SchemaId::Back: return match_back(f);
    case SchemaId::Ref: return match_ref(f);
    case SchemaId::Q1: return match_q1(f);
    case SchemaId::Q2: return match_q2(sig, f);
    case SchemaId::Name: return match_name(f);
    case SchemaId::Barcan: return match_barcan(f);
    case SchemaId::BarcanAt: return match_barcan_at(f);
    case SchemaId::NomX: return match_nomx(f);
  }
  return false;
}

// ----- extensions -----

void ExtensionRegistry::add(ExtensionEntry entry) {
  if (find(entry.label))
    throw Error(ErrorKind::DuplicateOperator,
                "extension label '" + entry.label + "' already registered");
  entries_.push_back(std::move(entry));
}

const ExtensionEntry* ExtensionRegistry::find(const std::string& label) const {
  for (const auto& e : entries_)
    if (e.label == label) return &e;
  return nullptr;
}

bool ExtensionRegistry::remove(const std::string& label) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const ExtensionEntry& e) { return e.label == label; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

void register_extension(ExtensionRegistry& reg, const Signature& sig,
                        const Formula& phi, const std::string& label,
                        InstantiationMode mode, std::vector<Guard> guards,
                        const std::string& provenance) {
  sort_of(sig, phi);
  ExtensionEntry e;
  e.label = label;
  e.formula = phi;
  e.mode = mode;
  e.guards = std::move(guards);
  e.pure = is_pure(phi);
  e.forall_exists_pure = is_forall_exists_pure(phi);
  e.provenance = provenance;
  reg.add(std::move(e));
}

namespace {

struct ExtMatcher {
  const Signature& sig;
  const ExtensionEntry& entry;
  std::map<std::string, Formula> prop_binding;  // prop metavariable -> formula
  std::map<std::string, Formula> svar_binding;  // free svar -> formula
  std::map<std::string, std::string> nom_binding;  // nominal renaming
  std::string why;

  bool fail(const std::string& msg) {
    why = msg;
    return false;
  }

  bool walk(const Formula& pat, const Formula& cand,
            std::vector<std::string>& bound) {
    const FNode& p = pat.node();
    const FNode& c = cand.node();
    switch (p.kind) {
      case FKind::Prop: {
        if (entry.mode == InstantiationMode::Exact)
          return p.kind == c.kind && p.name == c.name && p.sort == c.sort;
        if (cand.sort() != p.sort)
          return fail("metavariable " + p.name + " bound at wrong sort");
        auto it = prop_binding.find(p.name);
        if (it != prop_binding.end()) return it->second == cand ? true : fail(
            "metavariable " + p.name + " bound to two different formulas");
        prop_binding.emplace(p.name, cand);
        return true;
      }
      case FKind::SVar: {
        bool is_bound =
            std::find(bound.begin(), bound.end(), p.name) != bound.end();
        if (is_bound || entry.mode == InstantiationMode::Exact)
          return c.kind == FKind::SVar && c.name == p.name && c.sort == p.sort;
        if (cand.sort() != p.sort)
          return fail("state metavariable " + p.name + " bound at wrong sort");
        if (entry.mode == InstantiationMode::Theorem) {
          if (c.kind != FKind::SVar && c.kind != FKind::Nom &&
              c.kind != FKind::CNom)
            return fail("theorem instance must map " + p.name +
                        " to a state symbol");
        }
        auto it = svar_binding.find(p.name);
        if (it != svar_binding.end()) return it->second == cand ? true : fail(
            "state metavariable " + p.name + " bound twice inconsistently");
        svar_binding.emplace(p.name, cand);
        return true;
      }
      case FKind::Nom: {
        if (entry.mode == InstantiationMode::Exact)
          return c.kind == FKind::Nom && c.name == p.name && c.sort == p.sort;
        if (c.kind != FKind::Nom && c.kind != FKind::CNom)
          return fail("nominal " + p.name + " must map to a nominal");
        if (c.sort != p.sort) return fail("nominal " + p.name + " wrong sort");
        auto it = nom_binding.find(p.name);
        if (it != nom_binding.end())
          return it->second == c.name ? true
                                      : fail("nominal " + p.name +
                                             " renamed inconsistently");
        nom_binding.emplace(p.name, c.name);
        return true;
      }
      case FKind::CNom:
        return c.kind == FKind::CNom && c.name == p.name && c.sort == p.sort;
      case FKind::Neg:
      case FKind::Or:
        if (c.kind != p.kind) return fail("shape mismatch");
        for (size_t i = 0; i < p.kids.size(); ++i)
          if (!walk(p.kids[i], c.kids[i], bound)) return false;
        return true;
      case FKind::Modal:
        if (c.kind != FKind::Modal || c.name != p.name || c.sort != p.sort ||
            c.kids.size() != p.kids.size())
          return fail("operator mismatch under " + p.name);
        for (size_t i = 0; i < p.kids.size(); ++i)
          if (!walk(p.kids[i], c.kids[i], bound)) return false;
        return true;
      case FKind::At: {
        if (c.kind != FKind::At || c.sort != p.sort ||
            c.inner_sort != p.inner_sort)
          return fail("@ mismatch");
        // Subscript: constant nominals exact, nominals rename uniformly.
        if (p.name_is_cnom) {
          if (!c.name_is_cnom || c.name != p.name) return fail("@ subscript");
        } else if (entry.mode == InstantiationMode::Exact) {
          if (c.name_is_cnom || c.name != p.name) return fail("@ subscript");
        } else {
          auto it = nom_binding.find(p.name);
          if (it != nom_binding.end()) {
            if (it->second != c.name) return fail("@ subscript renaming");
          } else {
            nom_binding.emplace(p.name, c.name);
          }
        }
        return walk(p.kids[0], c.kids[0], bound);
      }
      case FKind::Forall: {
        if (c.kind != FKind::Forall || c.name != p.name ||
            c.inner_sort != p.inner_sort)
          return fail("binder mismatch");
        bound.push_back(p.name);
        bool ok = walk(p.kids[0], c.kids[0], bound);
        bound.pop_back();
        return ok;
      }
    }
    return fail("malformed pattern");
  }

  bool check_guards() {
    for (const auto& g : entry.guards) {
      switch (g.kind) {
        case Guard::Kind::Numeral: {
          auto it = svar_binding.find(g.a);
          if (it == svar_binding.end())
            return fail("guard: " + g.a + " unbound");
          const Formula& v = it->second;
          if (v.kind() != FKind::CNom || !is_numeral(v.name()))
            return fail("guard: " + g.a + " must be a numeral");
          break;
        }
        case Guard::Kind::Distinct: {
          auto ia = svar_binding.find(g.a);
          auto ib = svar_binding.find(g.b);
          if (ia == svar_binding.end() || ib == svar_binding.end())
            return fail("guard: distinct symbols unbound");
          if (ia->second == ib->second)
            return fail("guard: " + g.a + " and " + g.b + " must differ");
          break;
        }
        case Guard::Kind::Absent: {
          // g.a: a state variable of the scheme; g.b: a metavariable whose
          // instance must not contain g.a freely.
          Formula inst;
          if (auto it = prop_binding.find(g.b); it != prop_binding.end())
            inst = it->second;
          else if (auto it2 = svar_binding.find(g.b); it2 != svar_binding.end())
            inst = it2->second;
          else
            return fail("guard: " + g.b + " unbound");
          if (occurs_free(inst, g.a))
            return fail("guard: " + g.a + " occurs in the instance of " + g.b);
          break;
        }
      }
    }
    return true;
  }

  bool check_theorem_substitutability() {
    if (entry.mode != InstantiationMode::Theorem) return true;
    for (const auto& [x, v] : svar_binding) {
      StateSymbol z{v.kind() == FKind::SVar  ? SymbolKind::SVar
                    : v.kind() == FKind::Nom ? SymbolKind::Nom
                                             : SymbolKind::CNom,
                    v.name(), v.sort()};
      if (!substitutable(z, x, entry.formula))
        return fail("instance substitutes " + v.name() + " for " + x +
                    " where it is not substitutable");
    }
    return true;
  }
};

}  // namespace

bool match_extension(const Signature& sig, const ExtensionEntry& entry,
                     const Formula& instance, std::string* why) {
  if (entry.mode == InstantiationMode::Exact) {
    if (entry.formula == instance) return true;
    if (why) *why = "exact-citation entry differs from the step formula";
    return false;
  }
  ExtMatcher m{sig, entry, {}, {}, {}, {}};
  std::vector<std::string> bound;
  bool ok = m.walk(entry.formula, instance, bound) && m.check_guards() &&
            m.check_theorem_substitutability();
  if (!ok && why) *why = m.why;
  return ok;
}

// ----- step checking -----

namespace {

struct ProfileLanguage {
  static bool allowed(LogicProfile p, const Formula& f, std::string* bad) {
    const FNode& n = f.node();
    switch (n.kind) {
      case FKind::Nom:
      case FKind::CNom:
      case FKind::At:
        if (p == LogicProfile::KSigma) {
          if (bad) *bad = "nominals and @ are not in the base modal language";
          return false;
        }
        break;
      case FKind::SVar:
      case FKind::Forall:
        if (p != LogicProfile::HAtForall) {
          if (bad) *bad = "state variables and quantifiers need profile H@A";
          return false;
        }
        break;
      default:
        break;
    }
    for (const auto& k : n.kids)
      if (!allowed(p, k, bad)) return false;
    return true;
  }
};

struct Checker {
  const ProofScript& script;
  CheckReport report;
  std::vector<bool> hyp_dep;  // per checked step

  void diag(int step, const std::string& code, const std::string& detail) {
    report.diagnostics.push_back({step, code, detail});
  }

  bool premise(int step, int idx, const char* what) {
    if (idx < 0 || idx >= step) {
      diag(step, "BadIndex",
           std::string(what) + " reference " + std::to_string(idx + 1) +
               " is not an earlier step");
      return false;
    }
    return true;
  }

  bool require_theorem_premise(int step, int idx, const char* rule) {
    if (hyp_dep[idx]) {
      diag(step, "SideConditionViolated",
           std::string(rule) +
               " requires a hypothesis-free premise (step " +
               std::to_string(idx + 1) + " depends on hypotheses)");
      return false;
    }
    return true;
  }

  void run() {
    hyp_dep.assign(script.steps.size(), false);

    // Script-level checks.
    if (!script.hypotheses.empty()) {
      const std::string& s0 = script.hypotheses.front().sort();
      for (const auto& h : script.hypotheses)
        if (h.sort() != s0)
          diag(-1, "SortError", "local hypotheses must share one sort");
      if (!script.conclusion.empty() && script.conclusion.sort() != s0)
        diag(-1, "SortError",
             "conclusion sort differs from the hypothesis sort");
    }
    for (const auto& h : script.hypotheses) check_formula(-1, h);
    for (const auto& [s, g] : script.global_hyps) {
      if (g.sort() != s)
        diag(-1, "SortError", "global hypothesis annotated with wrong sort");
      check_formula(-1, g);
    }

    for (int i = 0; i < static_cast<int>(script.steps.size()); ++i)
      check_step(i);

    if (script.steps.empty()) {
      diag(-1, "SchemaMismatch", "script has no steps");
    } else if (!script.conclusion.empty() &&
               !(script.steps.back().formula == script.conclusion)) {
      diag(-1, "SchemaMismatch",
           "last step does not establish the stated conclusion");
    }
    report.ok = report.diagnostics.empty();
  }

  bool check_formula(int step, const Formula& f) {
    try {
      sort_of(script.sig, f);
    } catch (const Error& e) {
      diag(step, "SortError", e.what());
      return false;
    }
    std::string bad;
    if (!ProfileLanguage::allowed(script.profile, f, &bad)) {
      diag(step, "ProfileViolation", bad);
      return false;
    }
    return true;
  }

  void check_step(int i) {
    const Step& st = script.steps[i];
    const Formula& f = st.formula;
    const Justification& j = st.just;
    if (!check_formula(i, f)) return;

    using Rule = Justification::Rule;
    switch (j.rule) {
      case Rule::Axiom: {
        if (!profile_admits(script.profile, j.schema)) {
          diag(i, "ProfileViolation",
               std::string(schema_name(j.schema)) + " is not available in " +
                   profile_name(script.profile));
          return;
        }
        bool ok = false;
        try {
          ok = match_axiom(script.sig, j.schema, f);
        } catch (const Error& e) {
          diag(i, "SchemaMismatch", e.what());
          return;
        }
        if (!ok)
          diag(i, "SchemaMismatch",
               std::string("not an instance of (") + schema_name(j.schema) +
                   ")");
        return;
      }
      case Rule::Extension: {
        const ExtensionEntry* e = script.extensions.find(j.label);
        if (!e) {
          diag(i, "UnknownExtension", j.label);
          return;
        }
        std::string why;
        if (!match_extension(script.sig, *e, f, &why))
          diag(i, "SchemaMismatch",
               "not an instance of extension " + j.label +
                   (why.empty() ? "" : " (" + why + ")"));
        return;
      }
      case Rule::Hyp: {
        if (j.index1 < 0 ||
            j.index1 >= static_cast<int>(script.hypotheses.size())) {
          diag(i, "BadIndex", "hypothesis index out of range");
          return;
        }
        if (!(f == script.hypotheses[j.index1])) {
          diag(i, "SchemaMismatch", "step formula is not that hypothesis");
          return;
        }
        hyp_dep[i] = true;
        return;
      }
      case Rule::GlobalHyp: {
        if (j.index1 < 0 ||
            j.index1 >= static_cast<int>(script.global_hyps.size())) {
          diag(i, "BadIndex", "global hypothesis index out of range");
          return;
        }
        const auto& [gsort, gamma] = script.global_hyps[j.index1];
        // Import form: @_j gamma at any host sort.
        if (f.kind() != FKind::At || f.name() != j.name ||
            f.node().inner_sort != gsort || !(f.kid(0) == gamma)) {
          diag(i, "SchemaMismatch",
               "global hypothesis import must be @_" + j.name +
                   " applied to the registered formula");
          return;
        }
        auto info = script.sig.lookup_symbol(j.name);
        if (!info || (info->kind != SymbolKind::Nom &&
                      info->kind != SymbolKind::CNom) ||
            info->sort != gsort) {
          diag(i, "SideConditionViolated",
               j.name + " is not a nominal of sort " + gsort);
          return;
        }
        hyp_dep[i] = true;
        return;
      }
      case Rule::MP: {
        if (!premise(i, j.index1, "MP minor") || !premise(i, j.index2, "MP major"))
          return;
        const Formula& minor = script.steps[j.index1].formula;
        const Formula& major = script.steps[j.index2].formula;
        auto imp = view_implies(major);
        if (!imp) {
          diag(i, "SchemaMismatch", "MP major premise is not an implication");
          return;
        }
        if (!(imp->first == minor)) {
          diag(i, "SchemaMismatch",
               "MP premises do not fit: antecedent differs from the minor");
          return;
        }
        if (!(imp->second == f)) {
          diag(i, "SchemaMismatch", "MP conclusion differs from the consequent");
          return;
        }
        hyp_dep[i] = hyp_dep[j.index1] || hyp_dep[j.index2];
        return;
      }
      case Rule::UG: {
        if (!premise(i, j.index1, "UG") ||
            !require_theorem_premise(i, j.index1, "UG"))
          return;
        auto box = view_box(f);
        if (!box || box->first != j.op) {
          diag(i, "SchemaMismatch",
               "UG conclusion must be a box of operator " + j.op);
          return;
        }
        if (j.arg_pos < 0 || j.arg_pos >= static_cast<int>(box->second.size())) {
          diag(i, "BadIndex", "UG argument position out of range");
          return;
        }
        if (!(box->second[j.arg_pos] == script.steps[j.index1].formula)) {
          diag(i, "SchemaMismatch",
               "UG premise does not sit at the stated argument position");
          return;
        }
        return;
      }
      case Rule::GenAt: {
        if (!premise(i, j.index1, "Gen@") ||
            !require_theorem_premise(i, j.index1, "Gen@"))
          return;
        if (f.kind() != FKind::At || f.name() != j.name) {
          diag(i, "SchemaMismatch", "Gen@ conclusion must be @_" + j.name);
          return;
        }
        if (!(f.kid(0) == script.steps[j.index1].formula)) {
          diag(i, "SchemaMismatch", "Gen@ body differs from the premise");
          return;
        }
        return;
      }
      case Rule::BroadcastS: {
        if (!premise(i, j.index1, "Broadcast") ||
            !require_theorem_premise(i, j.index1, "Broadcast"))
          return;
        const Formula& prem = script.steps[j.index1].formula;
        if (prem.kind() != FKind::At || f.kind() != FKind::At) {
          diag(i, "SchemaMismatch", "Broadcast applies to @ formulas");
          return;
        }
        if (!same_subscript(prem.node(), f.node()) ||
            !(prem.kid(0) == f.kid(0))) {
          diag(i, "SchemaMismatch",
               "Broadcast must keep the subscript and body");
          return;
        }
        if (f.sort() != j.name) {
          diag(i, "SchemaMismatch",
               "Broadcast target sort annotation mismatch");
          return;
        }
        return;
      }
      case Rule::NameAt: {
        if (!premise(i, j.index1, "Name@") ||
            !require_theorem_premise(i, j.index1, "Name@"))
          return;
        const Formula& prem = script.steps[j.index1].formula;
        if (prem.kind() != FKind::At) {
          diag(i, "SchemaMismatch", "Name@ premise must be an @ formula");
          return;
        }
        if (!(prem.kid(0) == f)) {
          diag(i, "SchemaMismatch", "Name@ conclusion must be the @ body");
          return;
        }
        if (occurs_symbol(f, prem.name())) {
          diag(i, "SideConditionViolated",
               "Name@: nominal " + prem.name() + " occurs in the body");
          return;
        }
        return;
      }
      case Rule::Paste: {
        if (!premise(i, j.index1, "Paste") ||
            !require_theorem_premise(i, j.index1, "Paste"))
          return;
        if (!check_paste(i, script.steps[j.index1].formula, f))
          return;
        return;
      }
      case Rule::Gen: {
        if (!premise(i, j.index1, "Gen") ||
            !require_theorem_premise(i, j.index1, "Gen"))
          return;
        if (script.profile != LogicProfile::HAtForall) {
          diag(i, "ProfileViolation", "Gen needs profile H@A");
          return;
        }
        if (f.kind() != FKind::Forall || f.name() != j.name) {
          diag(i, "SchemaMismatch", "Gen conclusion must bind " + j.name);
          return;
        }
        if (!(f.kid(0) == script.steps[j.index1].formula)) {
          diag(i, "SchemaMismatch", "Gen body differs from the premise");
          return;
        }
        return;
      }
    }
    diag(i, "SchemaMismatch", "unknown rule");
  }

  // premise: @_j sigma(..., k, ...) and @_k phi -> psi
  // current: @_j sigma(..., phi, ...) -> psi
  // with k a nominal distinct from j, absent from phi and psi.
  bool check_paste(int i, const Formula& prem, const Formula& cur) {
    auto pimp = view_implies(prem);
    auto cimp = view_implies(cur);
    if (!pimp || !cimp) {
      diag(i, "SchemaMismatch", "Paste premise and conclusion are implications");
      return false;
    }
    if (!(pimp->second == cimp->second)) {
      diag(i, "SchemaMismatch", "Paste must keep the consequent");
      return false;
    }
    const Formula& psi = pimp->second;
    auto conj = view_and(pimp->first);
    if (!conj) {
      diag(i, "SchemaMismatch",
           "Paste premise antecedent must be a conjunction");
      return false;
    }
    const Formula& atsigma = conj->first;  // @_j sigma(...,k,...)
    const Formula& atphi = conj->second;   // @_k phi
    const Formula& catsigma = cimp->first; // @_j sigma(...,phi,...)
    if (atsigma.kind() != FKind::At || atphi.kind() != FKind::At ||
        catsigma.kind() != FKind::At) {
      diag(i, "SchemaMismatch", "Paste expects @ formulas");
      return false;
    }
    if (!same_subscript(atsigma.node(), catsigma.node()) ||
        atsigma.sort() != catsigma.sort()) {
      diag(i, "SchemaMismatch", "Paste must keep @_j");
      return false;
    }
    const Formula& sig_prem = atsigma.kid(0);
    const Formula& sig_cur = catsigma.kid(0);
    if (sig_prem.kind() != FKind::Modal || sig_cur.kind() != FKind::Modal ||
        sig_prem.name() != sig_cur.name() ||
        sig_prem.kids().size() != sig_cur.kids().size()) {
      diag(i, "SchemaMismatch", "Paste expects matching operator applications");
      return false;
    }
    const std::string& k = atphi.name();
    const Formula& phi = atphi.kid(0);
    // find the position where the premise has the nominal k and the
    // conclusion has phi; all other positions equal
    bool found = false;
    for (size_t pos = 0; pos < sig_prem.kids().size(); ++pos) {
      const Formula& a = sig_prem.kid(pos);
      const Formula& b = sig_cur.kid(pos);
      if (is_nominal_atom(a) && a.name() == k &&
          (a.kind() == FKind::CNom) == atphi.node().name_is_cnom &&
          b == phi) {
        bool rest = true;
        for (size_t q = 0; q < sig_prem.kids().size(); ++q) {
          if (q == pos) continue;
          if (!(sig_prem.kid(q) == sig_cur.kid(q))) {
            rest = false;
            break;
          }
        }
        if (rest) {
          found = true;
          break;
        }
      }
    }
    if (!found) {
      diag(i, "SchemaMismatch",
           "Paste: no argument position carries the pasted nominal");
      return false;
    }
    if (k == atsigma.name()) {
      diag(i, "SideConditionViolated", "Paste: k must be distinct from j");
      return false;
    }
    if (occurs_symbol(phi, k) || occurs_symbol(psi, k)) {
      diag(i, "SideConditionViolated",
           "Paste: " + k + " must not occur in the pasted formula or the goal");
      return false;
    }
    return true;
  }
};

}  // namespace

CheckReport check_proof(const ProofScript& script) {
  Checker c{script, {}, {}};
  c.run();
  return c.report;
}

}  // namespace hml
