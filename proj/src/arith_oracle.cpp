#include "hml/arith_oracle.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

namespace hml::arith {

namespace {

// ----- exact rationals (small values only) -----

struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n) : num(n) {}
  Rat(long long n, long long d) : num(n), den(d) { norm(); }

  void norm() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(std::abs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  Rat operator+(const Rat& o) const { return Rat(num * o.den + o.num * den, den * o.den); }
  Rat operator-(const Rat& o) const { return Rat(num * o.den - o.num * den, den * o.den); }
  Rat operator*(const Rat& o) const { return Rat(num * o.num, den * o.den); }
  Rat operator/(const Rat& o) const { return Rat(num * o.den, den * o.num); }
  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool is_zero() const { return num == 0; }
};

// ----- multivariate polynomials over Rat -----

using Monomial = std::map<std::string, int>;  // var -> exponent

struct Poly {
  std::map<Monomial, Rat> terms;

  static Poly constant(Rat c) {
    Poly p;
    if (!c.is_zero()) p.terms[{}] = c;
    return p;
  }
  static Poly var(const std::string& v) {
    Poly p;
    p.terms[{{v, 1}}] = Rat(1);
    return p;
  }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [m, c] : o.terms) {
      Rat s = (r.terms.count(m) ? r.terms[m] : Rat(0)) + c;
      if (s.is_zero())
        r.terms.erase(m);
      else
        r.terms[m] = s;
    }
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + o * Rat(-1); }
  Poly operator*(Rat c) const {
    Poly r;
    if (c.is_zero()) return r;
    for (const auto& [m, k] : terms) r.terms[m] = k * c;
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (const auto& [m1, c1] : terms)
      for (const auto& [m2, c2] : o.terms) {
        Monomial m = m1;
        for (const auto& [v, e] : m2) m[v] += e;
        Rat s = (r.terms.count(m) ? r.terms[m] : Rat(0)) + c1 * c2;
        if (s.is_zero())
          r.terms.erase(m);
        else
          r.terms[m] = s;
      }
    return r;
  }
  bool operator==(const Poly& o) const { return terms == o.terms; }
  bool is_linear() const {
    for (const auto& [m, c] : terms) {
      int deg = 0;
      for (const auto& [v, e] : m) deg += e;
      if (deg > 1) return false;
    }
    return true;
  }
};

bool is_arith_op(const std::string& name) {
  return name == "add" || name == "sub" || name == "mul" || name == "div";
}

// Nat term -> polynomial; nullopt outside the fragment.
std::optional<Poly> poly_of(const Formula& t) {
  const FNode& n = t.node();
  if (n.sort != "Nat") return std::nullopt;
  switch (n.kind) {
    case FKind::CNom:
      if (!is_numeral(n.name)) return std::nullopt;
      return Poly::constant(Rat(std::stoll(n.name)));
    case FKind::SVar:
      return Poly::var(n.name);
    case FKind::Modal: {
      if (!is_arith_op(n.name) || n.kids.size() != 2) return std::nullopt;
      auto a = poly_of(n.kids[0]);
      auto b = poly_of(n.kids[1]);
      if (!a || !b) return std::nullopt;
      if (n.name == "add") return *a + *b;
      if (n.name == "sub") return *a - *b;
      if (n.name == "mul") return *a * *b;
      // div: by a positive numeral only
      const FNode& d = n.kids[1].node();
      if (d.kind != FKind::CNom || !is_numeral(d.name)) return std::nullopt;
      long long dv = std::stoll(d.name);
      if (dv <= 0) return std::nullopt;
      return *a * Rat(1, dv);
    }
    default:
      return std::nullopt;
  }
}

// ----- relational atoms -----

struct RelAtom {
  // constraint on p := rhs - lhs (le) or rhs - lhs (eq): ge0 or eq0,
  // possibly negated (from @_false)
  Poly p;
  bool equality = false;
  bool negated = false;
};

std::optional<RelAtom> rel_atom_of(const Formula& f) {
  if (f.kind() != FKind::At) return std::nullopt;
  const FNode& n = f.node();
  if (!n.name_is_cnom || (n.name != "true" && n.name != "false"))
    return std::nullopt;
  if (n.inner_sort != "Bool") return std::nullopt;
  const Formula& rel = f.kid(0);
  if (rel.kind() != FKind::Modal || rel.kids().size() != 2) return std::nullopt;
  if (rel.name() != "le" && rel.name() != "eq") return std::nullopt;
  auto a = poly_of(rel.kid(0));
  auto b = poly_of(rel.kid(1));
  if (!a || !b) return std::nullopt;
  RelAtom atom;
  atom.p = *b - *a;  // le: rhs - lhs >= 0
  atom.equality = rel.name() == "eq";
  atom.negated = n.name == "false";
  return atom;
}

// Propositional combination over relational atoms.
struct RelTree {
  enum class K { Atom, Neg, Or } k;
  int atom = -1;
  int a = -1, b = -1;
};

struct RelFormula {
  std::vector<RelAtom> atoms;
  std::vector<RelTree> nodes;

  std::optional<int> build(const Formula& f) {
    if (auto atom = rel_atom_of(f)) {
      atoms.push_back(*atom);
      nodes.push_back({RelTree::K::Atom, static_cast<int>(atoms.size()) - 1, -1, -1});
      return static_cast<int>(nodes.size()) - 1;
    }
    if (f.kind() == FKind::Neg) {
      auto a = build(f.kid(0));
      if (!a) return std::nullopt;
      nodes.push_back({RelTree::K::Neg, -1, *a, -1});
      return static_cast<int>(nodes.size()) - 1;
    }
    if (f.kind() == FKind::Or) {
      auto a = build(f.kid(0));
      if (!a) return std::nullopt;
      auto b = build(f.kid(1));
      if (!b) return std::nullopt;
      nodes.push_back({RelTree::K::Or, -1, *a, *b});
      return static_cast<int>(nodes.size()) - 1;
    }
    return std::nullopt;
  }

  bool eval(int root, const std::vector<bool>& atom_vals) const {
    const RelTree& n = nodes[root];
    switch (n.k) {
      case RelTree::K::Atom: return atom_vals[n.atom];
      case RelTree::K::Neg: return !eval(n.a, atom_vals);
      default: return eval(n.a, atom_vals) || eval(n.b, atom_vals);
    }
  }
};

// Linear poly decomposition: coefficient vector + constant.
struct LinForm {
  std::map<std::string, Rat> coeffs;
  Rat c0;
};

std::optional<LinForm> lin_of(const Poly& p) {
  if (!p.is_linear()) return std::nullopt;
  LinForm lf;
  for (const auto& [m, c] : p.terms) {
    if (m.empty())
      lf.c0 = c;
    else
      lf.coeffs[m.begin()->first] = c;
  }
  return lf;
}

// Scales a set of linear forms to integers; returns the positive factor.
long long common_scale(const std::vector<LinForm>& lfs) {
  long long l = 1;
  for (const auto& lf : lfs) {
    l = std::lcm(l, lf.c0.den);
    for (const auto& [v, c] : lf.coeffs) l = std::lcm(l, c.den);
  }
  return l;
}

// ----- shape B decision -----

// Decides validity of a boolean combination of atoms s_i*d + k_i >= 0 /
// == 0 over d ranging in D, where all atoms share one primitive linear
// form up to sign. Returns nullopt when the shape is out of scope.
std::optional<bool> decide_rel(const RelFormula& rf, int root) {
  // Integer-scaled linear forms.
  std::vector<LinForm> lfs;
  for (const auto& a : rf.atoms) {
    auto lf = lin_of(a.p);
    if (!lf) return std::nullopt;
    lfs.push_back(*lf);
  }
  long long scale = common_scale(lfs);
  struct IAtom {
    std::map<std::string, long long> coeffs;
    long long c0;
  };
  std::vector<IAtom> iatoms;
  for (const auto& lf : lfs) {
    IAtom ia;
    ia.c0 = lf.c0.num * (scale / lf.c0.den);
    for (const auto& [v, c] : lf.coeffs)
      if (c.num != 0) ia.coeffs[v] = c.num * (scale / c.den);
    iatoms.push_back(ia);
  }

  // Common primitive direction vector.
  std::map<std::string, long long> dir;
  std::vector<int> sign(iatoms.size(), 0);  // 0: constant atom
  for (size_t i = 0; i < iatoms.size(); ++i) {
    if (iatoms[i].coeffs.empty()) continue;
    if (dir.empty()) {
      dir = iatoms[i].coeffs;
      long long g = 0;
      for (const auto& [v, c] : dir) g = std::gcd(g, std::abs(c));
      for (auto& [v, c] : dir) c /= g;
      // canonical orientation: first nonzero positive
      if (dir.begin()->second < 0)
        for (auto& [v, c] : dir) c = -c;
    }
    // proportional to dir with integer factor +-f?
    // require coeffs == f * dir for a rational f; we only accept f = ±g.
    const auto& cs = iatoms[i].coeffs;
    if (cs.size() != dir.size()) return std::nullopt;
    std::optional<Rat> factor;
    for (const auto& [v, c] : cs) {
      auto it = dir.find(v);
      if (it == dir.end()) return std::nullopt;
      Rat f = Rat(c, it->second);
      if (!factor)
        factor = f;
      else if (!(*factor == f))
        return std::nullopt;
    }
    if (factor->den != 1) return std::nullopt;
    sign[i] = factor->num > 0 ? 1 : -1;
    // normalize atom to |factor| = multiple: p = f*(dir.x) + c0;
    // fold |f| into the breakpoint by keeping f in the atom:
    // d' := dir.x; atom: f*d' + c0 >= 0.
    iatoms[i].coeffs.clear();
    iatoms[i].coeffs["__d"] = factor->num;
  }

  // Range of d = dir.x over naturals.
  bool any_pos = false, any_neg = false;
  for (const auto& [v, c] : dir) {
    if (c > 0) any_pos = true;
    if (c < 0) any_neg = true;
  }
  // d ranges over: all of Z (mixed signs, primitive), N0 multiples
  // (single positive direction with a unit entry), etc. Accept the cases
  // decided exactly.
  long long dmin_kind;  // 0: all Z, 1: d >= 0, -1: d <= 0
  if (dir.empty()) {
    dmin_kind = 2;  // no variables at all
  } else if (any_pos && any_neg) {
    dmin_kind = 0;
  } else {
    bool has_unit = false;
    for (const auto& [v, c] : dir)
      if (std::abs(c) == 1) has_unit = true;
    if (!has_unit && dir.size() > 1) return std::nullopt;
    if (!has_unit) {
      // single variable with coefficient g: d in g*N0; rescale
      long long g = std::abs(dir.begin()->second);
      for (auto& ia : iatoms)
        if (ia.coeffs.count("__d")) ia.coeffs["__d"] *= g;
      dmin_kind = any_pos ? 1 : -1;
    } else {
      dmin_kind = any_pos ? 1 : -1;
    }
  }

  auto atom_val = [&](size_t i, long long d) {
    const IAtom& ia = iatoms[i];
    long long lhs = ia.c0;
    auto it = ia.coeffs.find("__d");
    if (it != ia.coeffs.end()) lhs += it->second * d;
    bool base = rf.atoms[i].equality ? lhs == 0 : lhs >= 0;
    return rf.atoms[i].negated ? !base : base;
  };

  if (dmin_kind == 2) {
    std::vector<bool> vals(iatoms.size());
    for (size_t i = 0; i < iatoms.size(); ++i) vals[i] = atom_val(i, 0);
    return rf.eval(root, vals);
  }

  // Sample points: around each breakpoint and far sentinels.
  std::set<long long> samples;
  long long lo = -1, hi = 1;
  for (size_t i = 0; i < iatoms.size(); ++i) {
    auto it = iatoms[i].coeffs.find("__d");
    if (it == iatoms[i].coeffs.end()) continue;
    // breakpoint at f*d + c0 == 0 -> d near -c0/f
    long long f = it->second;
    long long bp = -iatoms[i].c0 / f;
    for (long long delta = -2; delta <= 2; ++delta) samples.insert(bp + delta);
    lo = std::min(lo, bp - 3);
    hi = std::max(hi, bp + 3);
  }
  samples.insert(lo - 7);
  samples.insert(hi + 7);
  samples.insert(0);

  for (long long d : samples) {
    if (dmin_kind == 1 && d < 0) continue;
    if (dmin_kind == -1 && d > 0) continue;
    std::vector<bool> vals(iatoms.size());
    for (size_t i = 0; i < iatoms.size(); ++i) vals[i] = atom_val(i, d);
    if (!rf.eval(root, vals)) return false;
  }
  return true;
}

// ----- grid checking under truncating semantics -----

void collect_vars(const Formula& f, std::set<std::string>& vars) {
  if (f.kind() == FKind::SVar) vars.insert(f.name());
  for (const auto& k : f.kids()) collect_vars(k, vars);
}

bool grid_check(const Formula& f) {
  std::set<std::string> vars;
  collect_vars(f, vars);
  if (vars.size() > 3) return true;  // too many to grid; poly check stands
  std::vector<std::string> vs(vars.begin(), vars.end());
  std::map<std::string, long long> env;
  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == vs.size()) {
      auto r = eval_fact_ground(f, env);
      return !r || *r;  // out-of-fragment positions do not veto
    }
    for (long long v = 0; v <= 6; ++v) {
      env[vs[i]] = v;
      if (!rec(i + 1)) return false;
    }
    return true;
  };
  return rec(0);
}

// ----- shape C: existential witness -----

bool arith_term_ok(const Formula& t) {
  const FNode& n = t.node();
  if (n.sort != "Nat") return false;
  switch (n.kind) {
    case FKind::CNom: return is_numeral(n.name);
    case FKind::SVar: return true;
    case FKind::Modal:
      if (!is_arith_op(n.name) || n.kids.size() != 2) return false;
      return arith_term_ok(n.kids[0]) && arith_term_ok(n.kids[1]);
    default:
      return false;
  }
}

bool quantifier_free(const Formula& f) {
  if (f.kind() == FKind::Forall) return false;
  for (const auto& k : f.kids())
    if (!quantifier_free(k)) return false;
  return true;
}

// body with t substituted for free x must equal inst.
bool witness_match(const Formula& body, const Formula& inst,
                   const std::string& x, std::optional<Formula>& t) {
  const FNode& b = body.node();
  const FNode& i = inst.node();
  if (b.kind == FKind::SVar && b.name == x) {
    if (inst.sort() != body.sort()) return false;
    if (t && !(*t == inst)) return false;
    t = inst;
    return true;
  }
  if (b.kind != i.kind || b.name != i.name || b.sort != i.sort ||
      b.inner_sort != i.inner_sort || b.name_is_cnom != i.name_is_cnom ||
      b.kids.size() != i.kids.size())
    return false;
  for (size_t k = 0; k < b.kids.size(); ++k)
    if (!witness_match(b.kids[k], i.kids[k], x, t)) return false;
  return true;
}

FactCheck check_witness(const Formula& f) {
  FactCheck out;
  out.shape = "witness";
  auto imp = view_implies(f);
  if (!imp) {
    out.why = "not an implication";
    return out;
  }
  auto ex = view_exists(imp->second);
  if (!ex) {
    out.why = "consequent is not an existential";
    return out;
  }
  if (ex->var_sort != "Nat") {
    out.why = "witnessed variable must have sort Nat";
    return out;
  }
  if (!quantifier_free(ex->body)) {
    out.why = "existential body must be quantifier free";
    return out;
  }
  std::optional<Formula> t;
  if (!witness_match(ex->body, imp->first, ex->var, t)) {
    out.why = "antecedent is not body[t/x]";
    return out;
  }
  if (t && !arith_term_ok(*t)) {
    out.why = "witness term leaves the arithmetic fragment";
    return out;
  }
  out.ok = true;
  return out;
}

}  // namespace

std::optional<long long> eval_nat(const Formula& t,
                                  const std::map<std::string, long long>& env) {
  const FNode& n = t.node();
  if (n.sort != "Nat") return std::nullopt;
  switch (n.kind) {
    case FKind::CNom:
      if (!is_numeral(n.name)) return std::nullopt;
      return std::stoll(n.name);
    case FKind::SVar: {
      auto it = env.find(n.name);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case FKind::Modal: {
      if (!is_arith_op(n.name) || n.kids.size() != 2) return std::nullopt;
      auto a = eval_nat(n.kids[0], env);
      auto b = eval_nat(n.kids[1], env);
      if (!a || !b) return std::nullopt;
      if (n.name == "add") return *a + *b;
      if (n.name == "sub") return *a >= *b ? *a - *b : 0;  // truncating
      if (n.name == "mul") return *a * *b;
      if (*b == 0) return std::nullopt;
      return *a / *b;
    }
    default:
      return std::nullopt;
  }
}

std::optional<bool> eval_fact_ground(
    const Formula& f, const std::map<std::string, long long>& env) {
  // relational atom?
  if (f.kind() == FKind::At) {
    const FNode& n = f.node();
    if (!n.name_is_cnom || (n.name != "true" && n.name != "false"))
      return std::nullopt;
    const Formula& rel = f.kid(0);
    if (rel.kind() != FKind::Modal || rel.kids().size() != 2)
      return std::nullopt;
    if (rel.name() != "le" && rel.name() != "eq") return std::nullopt;
    auto a = eval_nat(rel.kid(0), env);
    auto b = eval_nat(rel.kid(1), env);
    if (!a || !b) return std::nullopt;
    bool val = rel.name() == "le" ? *a <= *b : *a == *b;
    return n.name == "true" ? val : !val;
  }
  if (f.kind() == FKind::Neg) {
    auto a = eval_fact_ground(f.kid(0), env);
    if (!a) return std::nullopt;
    return !*a;
  }
  if (f.kind() == FKind::Or) {
    // Nat-sorted iff bottoms out at term comparison
    auto a = eval_fact_ground(f.kid(0), env);
    auto b = eval_fact_ground(f.kid(1), env);
    if (!a || !b) return std::nullopt;
    return *a || *b;
  }
  // bare Nat term (inside a nat-iff): treat as equality operand
  if (f.sort() == "Nat") {
    // handled by the caller through view_iff; standalone terms have no
    // truth value
    return std::nullopt;
  }
  return std::nullopt;
}

FactCheck validate_fact(const Signature& sig, const Formula& f) {
  (void)sig;
  FactCheck out;

  // Shape A: (iff t u) at sort Nat
  if (f.sort() == "Nat") {
    auto iff = view_iff(f);
    if (!iff) {
      out.why = "Nat-sorted fact must be an equivalence of terms";
      return out;
    }
    auto pa = poly_of(iff->first);
    auto pb = poly_of(iff->second);
    if (!pa || !pb) {
      out.why = "terms leave the arithmetic fragment";
      return out;
    }
    if (!(*pa == *pb)) {
      out.shape = "nat-iff";
      out.why = "polynomials differ";
      return out;
    }
    // truncation safety net
    auto lhs = iff->first;
    auto rhs = iff->second;
    Formula probe = f_iff(lhs, rhs);
    std::set<std::string> vars;
    collect_vars(probe, vars);
    std::vector<std::string> vs(vars.begin(), vars.end());
    if (vs.size() <= 3) {
      std::map<std::string, long long> env;
      std::function<bool(size_t)> rec = [&](size_t i) -> bool {
        if (i == vs.size()) {
          auto a = eval_nat(lhs, env);
          auto b = eval_nat(rhs, env);
          return !a || !b || *a == *b;
        }
        for (long long v = 0; v <= 6; ++v) {
          env[vs[i]] = v;
          if (!rec(i + 1)) return false;
        }
        return true;
      };
      if (!rec(0)) {
        out.shape = "nat-iff";
        out.why = "fails under truncating natural subtraction";
        return out;
      }
    }
    out.ok = true;
    out.shape = "nat-iff";
    return out;
  }

  // Shape C before shape B: witnesses are implications into existentials.
  if (auto imp = view_implies(f); imp && view_exists(imp->second)) {
    return check_witness(f);
  }

  // Shape B: boolean combination of @-wrapped linear relations.
  {
    RelFormula rf;
    auto root = rf.build(f);
    if (root) {
      auto decided = decide_rel(rf, *root);
      if (!decided) {
        out.shape = "rel";
        out.why = "atoms do not share one linear direction";
        return out;
      }
      if (!*decided) {
        out.shape = "rel";
        out.why = "combination is falsifiable";
        return out;
      }
      if (!grid_check(f)) {
        out.shape = "rel";
        out.why = "fails under truncating natural subtraction";
        return out;
      }
      out.ok = true;
      out.shape = "rel";
      return out;
    }
  }

  out.why = "no accepted fact shape matches";
  return out;
}

}  // namespace hml::arith
