#include "hml/formula_text.hpp"

#include <cctype>
#include <memory>
#include <sstream>
#include <vector>

namespace hml {

namespace {

// ----- s-expression reader -----

struct SExpr {
  std::string atom;  // empty iff list
  std::vector<SExpr> items;
  bool is_atom() const { return items.empty() && !atom.empty(); }
};

struct Reader {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[pos]))) {
        ++pos;
      } else if (s[pos] == ';' || s[pos] == '#') {
        while (pos < s.size() && s[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrorKind::SyntaxError,
                msg + " at offset " + std::to_string(pos));
  }

  SExpr read() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    if (s[pos] == '(') {
      ++pos;
      SExpr e;
      while (true) {
        skip_ws();
        if (pos >= s.size()) fail("unbalanced '('");
        if (s[pos] == ')') {
          ++pos;
          break;
        }
        e.items.push_back(read());
      }
      if (e.items.empty()) fail("empty list");
      return e;
    }
    if (s[pos] == ')') fail("unexpected ')'");
    size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
           s[pos] != '(' && s[pos] != ')')
      ++pos;
    SExpr e;
    e.atom = s.substr(start, pos - start);
    return e;
  }
};

// ----- elaboration with expected-sort propagation -----

struct Elab {
  const Signature& sig;

  Formula atom(const std::string& name,
               const std::optional<std::string>& expect) {
    Formula f = f_atom(sig, name);
    if (expect && f.sort() != *expect)
      throw Error(ErrorKind::SortMismatch,
                  name + " has sort " + f.sort() + ", expected " + *expect);
    return f;
  }

  Formula go(const SExpr& e, const std::optional<std::string>& expect) {
    if (e.is_atom()) return atom(e.atom, expect);
    const SExpr& head = e.items[0];
    if (!head.is_atom())
      throw Error(ErrorKind::SyntaxError, "list head must be an atom");
    const std::string& h = head.atom;
    size_t n = e.items.size();
    auto arity = [&](size_t want) {
      if (n != want + 1)
        throw Error(ErrorKind::SyntaxError,
                    "(" + h + " ...) expects " + std::to_string(want) +
                        " arguments");
    };

    if (h == "prop" || h == "nom" || h == "cnom" || h == "svar") {
      arity(1);
      if (!e.items[1].is_atom())
        throw Error(ErrorKind::SyntaxError, "(" + h + " <name>)");
      const std::string& name = e.items[1].atom;
      Formula f = h == "prop"   ? f_prop(sig, name)
                  : h == "nom"  ? f_nom(sig, name)
                  : h == "cnom" ? f_cnom(sig, name)
                                : f_svar(sig, name);
      if (expect && f.sort() != *expect)
        throw Error(ErrorKind::SortMismatch, name);
      return f;
    }
    if (h == "not") {
      arity(1);
      return f_neg(go(e.items[1], expect));
    }
    if (h == "or" || h == "and") {
      if (n < 3) throw Error(ErrorKind::SyntaxError, "(" + h + " f g ...)");
      // n-ary input folds to the right
      std::vector<Formula> fs;
      for (size_t i = 1; i < n; ++i) fs.push_back(go(e.items[i], expect));
      Formula acc = fs.back();
      for (size_t i = fs.size() - 1; i-- > 0;)
        acc = h == "or" ? f_or(fs[i], acc) : f_and(fs[i], acc);
      return acc;
    }
    if (h == "implies") {
      arity(2);
      return f_implies(go(e.items[1], expect), go(e.items[2], expect));
    }
    if (h == "iff") {
      arity(2);
      return f_iff(go(e.items[1], expect), go(e.items[2], expect));
    }
    if (h == "op" || h == "box") {
      if (n < 2 || !e.items[1].is_atom())
        throw Error(ErrorKind::SyntaxError, "(" + h + " <operator> args...)");
      const std::string& opname = e.items[1].atom;
      auto decls = sig.operators_named(opname);
      if (decls.empty()) throw Error(ErrorKind::UnknownSymbol, opname);
      // Filter overloads by arity and, when known, the expected sort.
      std::vector<OperatorDecl> cands;
      for (const auto& d : decls) {
        if (d.arg_sorts.size() != n - 2) continue;
        if (expect && d.result_sort != *expect) continue;
        cands.push_back(d);
      }
      if (cands.empty())
        throw Error(ErrorKind::ArityMismatch,
                    opname + " with " + std::to_string(n - 2) + " arguments");
      // Elaborate against each viable overload; the first that fits wins.
      std::optional<Error> last;
      for (const auto& d : cands) {
        try {
          std::vector<Formula> args;
          for (size_t i = 2; i < n; ++i)
            args.push_back(go(e.items[i], d.arg_sorts[i - 2]));
          if (h == "op")
            return f_modal(sig, opname, std::move(args), d.result_sort);
          return f_box(sig, opname, std::move(args), d.result_sort);
        } catch (const Error& err) {
          last = err;
        }
      }
      throw *last;
    }
    if (h == "at") {
      // (at k f) | (at k host f)
      if (n != 3 && n != 4) throw Error(ErrorKind::SyntaxError, "(at k [host] f)");
      if (!e.items[1].is_atom())
        throw Error(ErrorKind::SyntaxError, "(at k ...) nominal");
      const std::string& k = e.items[1].atom;
      auto info = sig.lookup_symbol(k);
      if (!info) throw Error(ErrorKind::UnknownSymbol, k);
      std::string host;
      const SExpr* body;
      if (n == 4) {
        if (!e.items[2].is_atom() || !sig.has_sort(e.items[2].atom))
          throw Error(ErrorKind::SyntaxError,
                      "(at k <host> f): unknown host sort");
        host = e.items[2].atom;
        body = &e.items[3];
      } else {
        if (!expect)
          throw Error(ErrorKind::AmbiguousHostSort,
                      "@_" + k + " needs a host sort annotation here");
        host = *expect;
        body = &e.items[2];
      }
      if (expect && host != *expect)
        throw Error(ErrorKind::SortMismatch, "@_" + k + " host " + host);
      Formula phi = go(*body, info->sort);
      return f_at(sig, k, phi, host);
    }
    if (h == "forall" || h == "exists") {
      arity(2);
      if (!e.items[1].is_atom())
        throw Error(ErrorKind::SyntaxError, "(" + h + " <var> f)");
      Formula body = go(e.items[2], expect);
      return h == "forall" ? f_forall(sig, e.items[1].atom, body)
                           : f_exists(sig, e.items[1].atom, body);
    }
    if (h == "top" || h == "bot") {
      arity(1);
      if (!e.items[1].is_atom() || !sig.has_sort(e.items[1].atom))
        throw Error(ErrorKind::SyntaxError, "(" + h + " <sort>)");
      if (expect && e.items[1].atom != *expect)
        throw Error(ErrorKind::SortMismatch, h);
      return h == "top" ? f_top(sig, e.items[1].atom)
                        : f_bot(sig, e.items[1].atom);
    }
    throw Error(ErrorKind::SyntaxError, "unknown form '" + h + "'");
  }
};

void print_rec(const Formula& f, std::ostringstream& os) {
  // Sugar reconstruction keeps files readable; all views round-trip.
  if (auto iff = view_iff(f)) {
    os << "(iff ";
    print_rec(iff->first, os);
    os << ' ';
    print_rec(iff->second, os);
    os << ')';
    return;
  }
  if (auto conj = view_and(f)) {
    os << "(and ";
    print_rec(conj->first, os);
    os << ' ';
    print_rec(conj->second, os);
    os << ')';
    return;
  }
  if (auto box = view_box(f)) {
    os << "(box " << box->first;
    for (const auto& a : box->second) {
      os << ' ';
      print_rec(a, os);
    }
    os << ')';
    return;
  }
  if (auto ex = view_exists(f)) {
    os << "(exists " << ex->var << ' ';
    print_rec(ex->body, os);
    os << ')';
    return;
  }
  if (auto imp = view_implies(f)) {
    os << "(implies ";
    print_rec(imp->first, os);
    os << ' ';
    print_rec(imp->second, os);
    os << ')';
    return;
  }
  const FNode& n = f.node();
  switch (n.kind) {
    case FKind::Prop: os << "(prop " << n.name << ')'; return;
    case FKind::Nom: os << "(nom " << n.name << ')'; return;
    case FKind::CNom:
      if (is_numeral(n.name))
        os << n.name;
      else
        os << "(cnom " << n.name << ')';
      return;
    case FKind::SVar: os << "(svar " << n.name << ')'; return;
    case FKind::Neg:
      os << "(not ";
      print_rec(n.kids[0], os);
      os << ')';
      return;
    case FKind::Or:
      os << "(or ";
      print_rec(n.kids[0], os);
      os << ' ';
      print_rec(n.kids[1], os);
      os << ')';
      return;
    case FKind::Modal:
      os << "(op " << n.name;
      for (const auto& k : n.kids) {
        os << ' ';
        print_rec(k, os);
      }
      os << ')';
      return;
    case FKind::At:
      os << "(at " << n.name << ' ' << n.sort << ' ';
      print_rec(n.kids[0], os);
      os << ')';
      return;
    case FKind::Forall:
      os << "(forall " << n.name << ' ';
      print_rec(n.kids[0], os);
      os << ')';
      return;
  }
}

}  // namespace

Formula parse_formula(const Signature& sig, const std::string& text,
                      const std::optional<std::string>& expected_sort) {
  Reader r{text};
  SExpr e = r.read();
  r.skip_ws();
  if (r.pos != text.size())
    throw Error(ErrorKind::SyntaxError, "trailing input after formula");
  Elab el{sig};
  Formula f = el.go(e, expected_sort);
  sort_of(sig, f);  // full validation
  return f;
}

std::string print_formula(const Formula& f) {
  std::ostringstream os;
  print_rec(f, os);
  return os.str();
}

}  // namespace hml
