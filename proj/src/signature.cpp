#include "hml/signature.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hml {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::DuplicateSort: return "DuplicateSort";
    case ErrorKind::UnknownSort: return "UnknownSort";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::SymbolKindClash: return "SymbolKindClash";
    case ErrorKind::EmptyPropSet: return "EmptyPropSet";
    case ErrorKind::DuplicateOperator: return "DuplicateOperator";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::AmbiguousOperator: return "AmbiguousOperator";
    case ErrorKind::AmbiguousHostSort: return "AmbiguousHostSort";
    case ErrorKind::IllegalSubstitution: return "IllegalSubstitution";
    case ErrorKind::NotPure: return "NotPure";
    case ErrorKind::NotNamed: return "NotNamed";
    case ErrorKind::UnknownWorld: return "UnknownWorld";
    case ErrorKind::UnboundStateVariable: return "UnboundStateVariable";
    case ErrorKind::MissingDesignation: return "MissingDesignation";
    case ErrorKind::TooManyAtoms: return "TooManyAtoms";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::BadGoal: return "BadGoal";
    case ErrorKind::Io: return "Io";
  }
  return "Error";
}

const char* symbol_kind_name(SymbolKind k) {
  switch (k) {
    case SymbolKind::Prop: return "prop";
    case SymbolKind::Nom: return "nom";
    case SymbolKind::CNom: return "cnom";
    case SymbolKind::SVar: return "svar";
  }
  return "?";
}

bool is_numeral(const std::string& name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

void Signature::add_sort(const std::string& name) {
  if (has_sort(name)) throw Error(ErrorKind::DuplicateSort, name);
  sorts_.push_back(name);
}

void Signature::add_operator(const std::string& name,
                             std::vector<std::string> arg_sorts,
                             const std::string& result_sort) {
  if (!has_sort(result_sort)) throw Error(ErrorKind::UnknownSort, result_sort);
  for (const auto& s : arg_sorts)
    if (!has_sort(s)) throw Error(ErrorKind::UnknownSort, s);
  for (const auto& op : ops_)
    if (op.name == name && op.result_sort == result_sort)
      throw Error(ErrorKind::DuplicateOperator,
                  name + " overloaded at result sort " + result_sort);
  ops_.push_back({name, std::move(arg_sorts), result_sort});
}

void Signature::add_symbol(SymbolKind kind, const std::string& name,
                           const std::string& sort) {
  if (!has_sort(sort)) throw Error(ErrorKind::UnknownSort, sort);
  if (is_numeral(name))
    throw Error(ErrorKind::SymbolKindClash,
                "numeral '" + name + "' is reserved for sort Nat");
  if (auto prior = lookup_symbol(name))
    throw Error(ErrorKind::SymbolKindClash,
                name + " already declared as " +
                    symbol_kind_name(prior->kind) + " : " + prior->sort);
  symbols_.push_back({kind, name, sort});
  symbol_index_[name] = {kind, sort};
}

void Signature::validate() const {
  if (sorts_.empty()) throw Error(ErrorKind::UnknownSort, "no sorts declared");
  for (const auto& s : sorts_) {
    bool found = std::any_of(symbols_.begin(), symbols_.end(),
                             [&](const SymbolDecl& d) {
                               return d.kind == SymbolKind::Prop && d.sort == s;
                             });
    if (!found)
      throw Error(ErrorKind::EmptyPropSet,
                  "sort " + s + " has no propositional variables");
  }
}

bool Signature::has_sort(const std::string& name) const {
  return std::find(sorts_.begin(), sorts_.end(), name) != sorts_.end();
}

std::vector<OperatorDecl> Signature::operators_with_result(
    const std::string& sort) const {
  if (!has_sort(sort)) throw Error(ErrorKind::UnknownSort, sort);
  std::vector<OperatorDecl> out;
  for (const auto& op : ops_)
    if (op.result_sort == sort) out.push_back(op);
  return out;
}

std::vector<OperatorDecl> Signature::operators_named(
    const std::string& name) const {
  std::vector<OperatorDecl> out;
  for (const auto& op : ops_)
    if (op.name == name) out.push_back(op);
  return out;
}

const OperatorDecl& Signature::resolve_operator(
    const std::string& name, const std::vector<std::string>& arg_sorts,
    const std::optional<std::string>& expected_result) const {
  const OperatorDecl* hit = nullptr;
  int n = 0;
  for (const auto& op : ops_) {
    if (op.name != name || op.arg_sorts != arg_sorts) continue;
    if (expected_result && op.result_sort != *expected_result) continue;
    hit = &op;
    ++n;
  }
  if (n == 0) {
    if (operators_named(name).empty())
      throw Error(ErrorKind::UnknownSymbol, "operator " + name);
    std::ostringstream os;
    os << name << " : ";
    for (const auto& s : arg_sorts) os << s << ' ';
    os << "-> ?";
    throw Error(ErrorKind::ArityMismatch, os.str());
  }
  if (n > 1)
    throw Error(ErrorKind::AmbiguousOperator,
                name + " (annotate the expected sort)");
  return *hit;
}

std::optional<Signature::SymbolInfo> Signature::lookup_symbol(
    const std::string& name) const {
  if (is_numeral(name)) {
    if (has_sort("Nat")) return SymbolInfo{SymbolKind::CNom, "Nat"};
    return std::nullopt;
  }
  auto it = symbol_index_.find(name);
  if (it == symbol_index_.end()) return std::nullopt;
  return it->second;
}

bool Signature::has_symbol(SymbolKind kind, const std::string& name,
                           const std::string& sort) const {
  auto info = lookup_symbol(name);
  return info && info->kind == kind && info->sort == sort;
}

std::vector<std::string> Signature::symbols_of(SymbolKind kind,
                                               const std::string& sort) const {
  std::vector<std::string> out;
  for (const auto& d : symbols_)
    if (d.kind == kind && d.sort == sort) out.push_back(d.name);
  return out;
}

const std::string& Signature::canonical_prop(const std::string& sort) const {
  for (const auto& d : symbols_)
    if (d.kind == SymbolKind::Prop && d.sort == sort) return d.name;
  throw Error(ErrorKind::EmptyPropSet, sort);
}

bool Signature::is_numeral_cnom(const std::string& name,
                                const std::string& sort) const {
  return sort == "Nat" && has_sort("Nat") && is_numeral(name);
}

std::string Signature::fresh_symbol(SymbolKind kind, const std::string& sort,
                                    const std::string& hint) {
  std::string base = hint.empty() ? "u" : hint;
  for (int i = 0;; ++i) {
    std::string cand = i == 0 ? base : base + "_" + std::to_string(i);
    if (!lookup_symbol(cand) && !is_numeral(cand)) {
      add_symbol(kind, cand, sort);
      return cand;
    }
  }
}

bool Signature::operator==(const Signature& other) const {
  return sorts_ == other.sorts_ && ops_ == other.ops_ &&
         symbols_ == other.symbols_;
}

namespace {

std::vector<std::string> tokenize_line(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

}  // namespace

Signature parse_signature(const std::string& text) {
  Signature sig;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = tokenize_line(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    auto fail = [&](const std::string& msg) -> void {
      throw Error(ErrorKind::SyntaxError,
                  "signature line " + std::to_string(lineno) + ": " + msg);
    };
    if (kw == "sort") {
      if (toks.size() != 2) fail("expected: sort <name>");
      sig.add_sort(toks[1]);
    } else if (kw == "op") {
      // op <name> : <s1> ... <sn> -> <s>
      if (toks.size() < 5 || toks[2] != ":") fail("expected: op <name> : <args> -> <sort>");
      auto arrow = std::find(toks.begin(), toks.end(), "->");
      if (arrow == toks.end() || arrow + 2 != toks.end())
        fail("expected: op <name> : <args> -> <sort>");
      std::vector<std::string> args(toks.begin() + 3, arrow);
      sig.add_operator(toks[1], std::move(args), *(arrow + 1));
    } else if (kw == "prop" || kw == "nom" || kw == "cnom" || kw == "svar") {
      if (toks.size() != 4 || toks[2] != ":")
        fail("expected: " + kw + " <name> : <sort>");
      SymbolKind kind = kw == "prop"   ? SymbolKind::Prop
                        : kw == "nom"  ? SymbolKind::Nom
                        : kw == "cnom" ? SymbolKind::CNom
                                       : SymbolKind::SVar;
      sig.add_symbol(kind, toks[1], toks[3]);
    } else {
      fail("unknown directive '" + kw + "'");
    }
  }
  sig.validate();
  return sig;
}

Signature load_signature_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_signature(os.str());
}

std::string render_signature(const Signature& sig) {
  std::ostringstream os;
  for (const auto& s : sig.sorts()) os << "sort " << s << '\n';
  for (const auto& op : sig.operators()) {
    os << "op " << op.name << " :";
    for (const auto& a : op.arg_sorts) os << ' ' << a;
    os << " -> " << op.result_sort << '\n';
  }
  for (const auto& d : sig.symbol_declarations())
    os << symbol_kind_name(d.kind) << ' ' << d.name << " : " << d.sort << '\n';
  return os.str();
}

}  // namespace hml
