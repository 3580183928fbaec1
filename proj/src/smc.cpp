#include "hml/smc.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hml::smc {

// ----- AST builders -----

AExpPtr mk_num(unsigned long long n) {
  auto e = std::make_shared<AExp>();
  e->k = AExp::K::Num;
  e->num = n;
  return e;
}
AExpPtr mk_var(std::string x) {
  auto e = std::make_shared<AExp>();
  e->k = AExp::K::Var;
  e->var = std::move(x);
  return e;
}
AExpPtr mk_add(AExpPtr a, AExpPtr b) {
  auto e = std::make_shared<AExp>();
  e->k = AExp::K::Add;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
AExpPtr mk_inc(std::string x) {
  auto e = std::make_shared<AExp>();
  e->k = AExp::K::Inc;
  e->var = std::move(x);
  return e;
}
BExpPtr mk_leq(AExpPtr a, AExpPtr b) {
  auto e = std::make_shared<BExp>();
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}
StmtPtr mk_assign(std::string x, AExpPtr a) {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::Assign;
  s->var = std::move(x);
  s->a = std::move(a);
  return s;
}
StmtPtr mk_if(BExpPtr b, StmtPtr s1, StmtPtr s2) {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::If;
  s->b = std::move(b);
  s->s1 = std::move(s1);
  s->s2 = std::move(s2);
  return s;
}
StmtPtr mk_while(BExpPtr b, StmtPtr body) {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::While;
  s->b = std::move(b);
  s->s1 = std::move(body);
  return s;
}
StmtPtr mk_skip() {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::Skip;
  return s;
}
StmtPtr mk_seq(StmtPtr a, StmtPtr b) {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::Seq;
  s->s1 = std::move(a);
  s->s2 = std::move(b);
  return s;
}

// ----- parser -----

namespace {

struct Token {
  enum class K { Ident, Number, Assign, Semi, Plus, Inc, Leq, LParen, RParen, End };
  K k;
  std::string text;
  unsigned long long num = 0;
  int line = 1, col = 1;
};

struct Lexer {
  explicit Lexer(const std::string& s) : src(s) {}
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Token> tokens;

  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrorKind::SyntaxError, msg + " at " + std::to_string(line) +
                                            ":" + std::to_string(col));
  }

  void bump(size_t n = 1) {
    for (size_t i = 0; i < n && pos < src.size(); ++i) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void lex() {
    while (pos < src.size()) {
      char c = src[pos];
      if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
        continue;
      }
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') bump();
        continue;
      }
      Token t;
      t.line = line;
      t.col = col;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = pos;
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos])))
          bump();
        t.k = Token::K::Number;
        t.text = src.substr(start, pos - start);
        t.num = std::stoull(t.text);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_'))
          bump();
        t.k = Token::K::Ident;
        t.text = src.substr(start, pos - start);
      } else if (c == ':' && pos + 1 < src.size() && src[pos + 1] == '=') {
        t.k = Token::K::Assign;
        bump(2);
      } else if (c == ';') {
        t.k = Token::K::Semi;
        bump();
      } else if (c == '+' && pos + 1 < src.size() && src[pos + 1] == '+') {
        t.k = Token::K::Inc;
        bump(2);
      } else if (c == '+') {
        t.k = Token::K::Plus;
        bump();
      } else if (c == '<' && pos + 1 < src.size() && src[pos + 1] == '=') {
        t.k = Token::K::Leq;
        bump(2);
      } else if (c == '(') {
        t.k = Token::K::LParen;
        bump();
      } else if (c == ')') {
        t.k = Token::K::RParen;
        bump();
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
      tokens.push_back(t);
    }
    Token end;
    end.k = Token::K::End;
    end.line = line;
    end.col = col;
    tokens.push_back(end);
  }
};

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;

  const Token& peek() const { return toks[pos]; }
  Token take() { return toks[pos++]; }

  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = peek();
    throw Error(ErrorKind::SyntaxError,
                msg + " at " + std::to_string(t.line) + ":" +
                    std::to_string(t.col));
  }

  bool is_kw(const Token& t, const char* kw) const {
    return t.k == Token::K::Ident && t.text == kw;
  }

  void expect_kw(const char* kw) {
    if (!is_kw(peek(), kw)) fail(std::string("expected '") + kw + "'");
    take();
  }

  AExpPtr atom() {
    const Token& t = peek();
    if (t.k == Token::K::Number) return mk_num(take().num);
    if (t.k == Token::K::Inc) {
      take();
      if (peek().k != Token::K::Ident) fail("expected a variable after '++'");
      return mk_inc(take().text);
    }
    if (t.k == Token::K::LParen) {
      take();
      AExpPtr e = aexp();
      if (peek().k != Token::K::RParen) fail("expected ')'");
      take();
      return e;
    }
    if (t.k == Token::K::Ident) {
      if (is_kw(t, "if") || is_kw(t, "then") || is_kw(t, "else") ||
          is_kw(t, "while") || is_kw(t, "do") || is_kw(t, "skip"))
        fail("expected an expression");
      return mk_var(take().text);
    }
    fail("expected an expression");
  }

  AExpPtr aexp() {
    AExpPtr e = atom();
    while (peek().k == Token::K::Plus) {
      take();
      e = mk_add(e, atom());
    }
    return e;
  }

  BExpPtr bexp() {
    AExpPtr l = aexp();
    if (peek().k != Token::K::Leq) fail("expected '<='");
    take();
    return mk_leq(l, aexp());
  }

  StmtPtr basic() {
    const Token& t = peek();
    if (t.k == Token::K::LParen) {
      take();
      StmtPtr s = stmt();
      if (peek().k != Token::K::RParen) fail("expected ')'");
      take();
      return s;
    }
    if (is_kw(t, "skip")) {
      take();
      return mk_skip();
    }
    if (is_kw(t, "if")) {
      take();
      BExpPtr b = bexp();
      expect_kw("then");
      StmtPtr s1 = basic();
      expect_kw("else");
      StmtPtr s2 = basic();
      return mk_if(b, s1, s2);
    }
    if (is_kw(t, "while")) {
      take();
      BExpPtr b = bexp();
      expect_kw("do");
      return mk_while(b, basic());
    }
    if (t.k == Token::K::Ident) {
      std::string x = take().text;
      if (peek().k != Token::K::Assign) fail("expected ':='");
      take();
      return mk_assign(x, aexp());
    }
    fail("expected a statement");
  }

  StmtPtr stmt() {
    StmtPtr s = basic();
    if (peek().k == Token::K::Semi) {
      take();
      if (peek().k == Token::K::End) return s;  // tolerate trailing ';'
      return mk_seq(s, stmt());
    }
    return s;
  }
};

void print_aexp(const AExp& a, std::ostringstream& os) {
  switch (a.k) {
    case AExp::K::Num: os << a.num; return;
    case AExp::K::Var: os << a.var; return;
    case AExp::K::Inc: os << "++" << a.var; return;
    case AExp::K::Add: {
      auto sub = [&](const AExp& e) {
        if (e.k == AExp::K::Add) {
          os << '(';
          print_aexp(e, os);
          os << ')';
        } else {
          print_aexp(e, os);
        }
      };
      print_aexp(*a.a, os);
      os << " + ";
      sub(*a.b);
      return;
    }
  }
}

void print_stmt(const Stmt& s, std::ostringstream& os) {
  switch (s.k) {
    case Stmt::K::Skip: os << "skip"; return;
    case Stmt::K::Assign:
      os << s.var << " := ";
      print_aexp(*s.a, os);
      return;
    case Stmt::K::If:
      os << "if ";
      print_aexp(*s.b->lhs, os);
      os << " <= ";
      print_aexp(*s.b->rhs, os);
      os << " then ";
      if (s.s1->k == Stmt::K::Seq) {
        os << '(';
        print_stmt(*s.s1, os);
        os << ')';
      } else {
        print_stmt(*s.s1, os);
      }
      os << " else ";
      if (s.s2->k == Stmt::K::Seq) {
        os << '(';
        print_stmt(*s.s2, os);
        os << ')';
      } else {
        print_stmt(*s.s2, os);
      }
      return;
    case Stmt::K::While:
      os << "while ";
      print_aexp(*s.b->lhs, os);
      os << " <= ";
      print_aexp(*s.b->rhs, os);
      os << " do ";
      if (s.s1->k == Stmt::K::Seq) {
        os << '(';
        print_stmt(*s.s1, os);
        os << ')';
      } else {
        print_stmt(*s.s1, os);
      }
      return;
    case Stmt::K::Seq:
      print_stmt(*s.s1, os);
      os << "; ";
      print_stmt(*s.s2, os);
      return;
  }
}

}  // namespace

StmtPtr parse_program(const std::string& text) {
  Lexer lx{text};
  lx.lex();
  Parser p{std::move(lx.tokens)};
  StmtPtr s = p.stmt();
  if (p.peek().k != Token::K::End) p.fail("trailing input after program");
  return s;
}

std::string print_program(const Stmt& s) {
  std::ostringstream os;
  print_stmt(s, os);
  return os.str();
}

StmtPtr load_program_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_program(os.str());
}

namespace {

void vars_of_aexp(const AExp& a, std::vector<std::string>& out) {
  auto add = [&](const std::string& x) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  };
  switch (a.k) {
    case AExp::K::Var:
    case AExp::K::Inc: add(a.var); return;
    case AExp::K::Add:
      vars_of_aexp(*a.a, out);
      vars_of_aexp(*a.b, out);
      return;
    default:
      return;
  }
}

void vars_of_stmt(const Stmt& s, std::vector<std::string>& out) {
  auto add = [&](const std::string& x) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  };
  switch (s.k) {
    case Stmt::K::Assign:
      add(s.var);
      vars_of_aexp(*s.a, out);
      return;
    case Stmt::K::If:
      vars_of_aexp(*s.b->lhs, out);
      vars_of_aexp(*s.b->rhs, out);
      vars_of_stmt(*s.s1, out);
      vars_of_stmt(*s.s2, out);
      return;
    case Stmt::K::While:
      vars_of_aexp(*s.b->lhs, out);
      vars_of_aexp(*s.b->rhs, out);
      vars_of_stmt(*s.s1, out);
      return;
    case Stmt::K::Seq:
      vars_of_stmt(*s.s1, out);
      vars_of_stmt(*s.s2, out);
      return;
    case Stmt::K::Skip:
      return;
  }
}

}  // namespace

std::vector<std::string> program_vars(const Stmt& s) {
  std::vector<std::string> out;
  vars_of_stmt(s, out);
  return out;
}

// ----- memory -----

std::optional<unsigned long long> Memory::read(const std::string& x) const {
  auto it = map_.find(x);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

Memory parse_memory(const std::string& text) {
  Memory m;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    auto eq = cur.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= cur.size())
      throw Error(ErrorKind::SyntaxError, "memory entry '" + cur + "'");
    std::string var = cur.substr(0, eq);
    std::string val = cur.substr(eq + 1);
    if (!is_numeral(val))
      throw Error(ErrorKind::SyntaxError, "memory value '" + val + "'");
    m.write(var, std::stoull(val));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  flush();
  return m;
}

std::string value_to_string(const Value& v) {
  if (v.is_bool) return v.b ? "true" : "false";
  return std::to_string(v.nat);
}

// ----- compilation -----

CtrlStack compile_aexp(const AExpPtr& a) {
  CtrlStack out;
  switch (a->k) {
    case AExp::K::Num:
    case AExp::K::Var:
    case AExp::K::Inc:
      out.push_back({CtrlItem::K::CA, a, nullptr, nullptr, nullptr, "", {}});
      return out;
    case AExp::K::Add: {
      // c(a1 + a2) <-> c(a1) ; c(a2) ; plus
      CtrlStack l = compile_aexp(a->a);
      CtrlStack r = compile_aexp(a->b);
      out.push_back({CtrlItem::K::Plus, nullptr, nullptr, nullptr, nullptr, "", {}});
      out.insert(out.end(), r.begin(), r.end());
      out.insert(out.end(), l.begin(), l.end());
      return out;
    }
  }
  return out;
}

CtrlStack compile_bexp(const BExpPtr& b) {
  // c(a1 <= a2) <-> c(a2) ; c(a1) ; leq   (the operand swap)
  CtrlStack out;
  out.push_back({CtrlItem::K::Leq, nullptr, nullptr, nullptr, nullptr, "", {}});
  CtrlStack l = compile_aexp(b->lhs);
  out.insert(out.end(), l.begin(), l.end());
  CtrlStack r = compile_aexp(b->rhs);
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

CtrlStack compile(const StmtPtr& s) {
  CtrlStack out;
  switch (s->k) {
    case Stmt::K::Skip:
      out.push_back({CtrlItem::K::CS, nullptr, nullptr, s, nullptr, "", {}});
      return out;
    case Stmt::K::Assign: {
      // c(x := a) <-> c(a) ; asgn(x)
      out.push_back({CtrlItem::K::Asgn, nullptr, nullptr, nullptr, nullptr, s->var, {}});
      CtrlStack a = compile_aexp(s->a);
      out.insert(out.end(), a.begin(), a.end());
      return out;
    }
    case Stmt::K::If: {
      // c(if b then s1 else s2) -> c(b) ; branch(s1,s2)
      out.push_back(
          {CtrlItem::K::Branch, nullptr, nullptr, s->s1, s->s2, "", {}});
      CtrlStack b = compile_bexp(s->b);
      out.insert(out.end(), b.begin(), b.end());
      return out;
    }
    case Stmt::K::While: {
      // c(while b do s) -> c(b) ; loop(b,s)
      out.push_back({CtrlItem::K::Loop, nullptr, s->b, s->s1, nullptr, "", {}});
      CtrlStack b = compile_bexp(s->b);
      out.insert(out.end(), b.begin(), b.end());
      return out;
    }
    case Stmt::K::Seq: {
      // c(s1;s2) <-> c(s1) ; c(s2)
      CtrlStack l = compile(s->s1);
      CtrlStack r = compile(s->s2);
      out.insert(out.end(), r.begin(), r.end());
      out.insert(out.end(), l.begin(), l.end());
      return out;
    }
  }
  return out;
}

// ----- terms -----

Formula term_of_value(const Signature& sig, const Value& v) {
  if (v.is_bool)
    return f_modal(sig, "bool2Val", {f_cnom(sig, v.b ? "true" : "false")});
  return f_modal(sig, "nat2Val", {f_numeral(sig, v.nat)});
}

Formula term_of_stack(const Signature& sig, const std::vector<Value>& vs) {
  Formula t = f_modal(sig, "nil", {});
  for (auto it = vs.rbegin(); it != vs.rend(); ++it)
    t = f_modal(sig, "push", {term_of_value(sig, *it), t});
  return t;
}

Formula term_of_mem(const Signature& sig, const Memory& m) {
  // canonical: entries sorted by name, alphabetically innermost first
  Formula t = f_modal(sig, "empty", {});
  for (const auto& [x, n] : m.entries())
    t = f_modal(sig, "set", {t, f_cnom(sig, x), f_numeral(sig, n)});
  return t;
}

Formula term_of_aexp(const Signature& sig, const AExp& a) {
  switch (a.k) {
    case AExp::K::Num:
      return f_modal(sig, "nat2AExp", {f_numeral(sig, a.num)});
    case AExp::K::Var:
      return f_modal(sig, "var2AExp", {f_cnom(sig, a.var)});
    case AExp::K::Inc:
      return f_modal(sig, "inc", {f_cnom(sig, a.var)});
    case AExp::K::Add:
      return f_modal(sig, "aplus",
                     {term_of_aexp(sig, *a.a), term_of_aexp(sig, *a.b)});
  }
  throw Error(ErrorKind::SyntaxError, "malformed expression");
}

Formula term_of_bexp(const Signature& sig, const BExp& b) {
  return f_modal(sig, "aleq",
                 {term_of_aexp(sig, *b.lhs), term_of_aexp(sig, *b.rhs)});
}

Formula term_of_stmt(const Signature& sig, const Stmt& s) {
  switch (s.k) {
    case Stmt::K::Skip: return f_modal(sig, "skip", {});
    case Stmt::K::Assign:
      return f_modal(sig, "assign",
                     {f_cnom(sig, s.var), term_of_aexp(sig, *s.a)});
    case Stmt::K::If:
      return f_modal(sig, "ite",
                     {term_of_bexp(sig, *s.b), term_of_stmt(sig, *s.s1),
                      term_of_stmt(sig, *s.s2)});
    case Stmt::K::While:
      return f_modal(sig, "while",
                     {term_of_bexp(sig, *s.b), term_of_stmt(sig, *s.s1)});
    case Stmt::K::Seq:
      return f_modal(sig, "seq",
                     {term_of_stmt(sig, *s.s1), term_of_stmt(sig, *s.s2)});
  }
  throw Error(ErrorKind::SyntaxError, "malformed statement");
}

Formula term_of_ctrl_item(const Signature& sig, const CtrlItem& item) {
  switch (item.k) {
    case CtrlItem::K::CA:
      return f_modal(sig, "cexp", {term_of_aexp(sig, *item.a)});
    case CtrlItem::K::CB:
      return f_modal(sig, "cbexp", {term_of_bexp(sig, *item.b)});
    case CtrlItem::K::CS:
      return f_modal(sig, "cstmt", {term_of_stmt(sig, *item.s)});
    case CtrlItem::K::Asgn:
      return f_modal(sig, "asgn", {f_cnom(sig, item.var)});
    case CtrlItem::K::Plus: return f_modal(sig, "plus", {});
    case CtrlItem::K::Leq: return f_modal(sig, "leq", {});
    case CtrlItem::K::Test:
      return f_modal(sig, "test", {term_of_value(sig, item.test)});
    case CtrlItem::K::Branch:
      // derived item: stands for (true?;c(s1)) u (false?;c(s2))
      return f_or(
          f_modal(sig, "seqc",
                  {f_modal(sig, "test", {term_of_value(sig, Value::of_bool(true))}),
                   f_modal(sig, "cstmt", {term_of_stmt(sig, *item.s)})}),
          f_modal(sig, "seqc",
                  {f_modal(sig, "test", {term_of_value(sig, Value::of_bool(false))}),
                   f_modal(sig, "cstmt", {term_of_stmt(sig, *item.s2)})}));
    case CtrlItem::K::Loop: {
      // derived item: (true?;c(s);c(b))* ; false?
      Formula body = f_modal(
          sig, "seqc",
          {f_modal(sig, "test", {term_of_value(sig, Value::of_bool(true))}),
           f_modal(sig, "seqc",
                   {f_modal(sig, "cstmt", {term_of_stmt(sig, *item.s)}),
                    f_modal(sig, "cbexp", {term_of_bexp(sig, *item.b)})})});
      return f_modal(
          sig, "seqc",
          {f_modal(sig, "star", {body}),
           f_modal(sig, "test", {term_of_value(sig, Value::of_bool(false))})});
    }
  }
  throw Error(ErrorKind::SyntaxError, "malformed control item");
}

Formula config_of(const Signature& sig, const Formula& stack,
                  const Formula& mem) {
  return f_modal(sig, "cfg", {stack, mem});
}

Formula box_exec(const Signature& sig, const Formula& pi,
                 const Formula& gamma) {
  return f_box(sig, "exec", {pi, gamma});
}

Memory memory_of_term(const Formula& t) {
  // innermost-to-outermost replay, last write wins
  if (t.kind() == FKind::Modal && t.name() == "empty") return Memory{};
  if (t.kind() == FKind::Modal && t.name() == "set" && t.kids().size() == 3) {
    Memory m = memory_of_term(t.kid(0));
    const Formula& var = t.kid(1);
    const Formula& val = t.kid(2);
    if (var.kind() != FKind::CNom)
      throw Error(ErrorKind::SortMismatch,
                  "memory variable position must be a constant nominal");
    if (val.kind() != FKind::CNom || !is_numeral(val.name()))
      throw Error(ErrorKind::SortMismatch,
                  "memory value position must be a numeral");
    m.write(var.name(), std::stoull(val.name()));
    return m;
  }
  throw Error(ErrorKind::SortMismatch, "not a ground memory term");
}

Formula canonicalize_mem(const Signature& sig, const Formula& t) {
  return term_of_mem(sig, memory_of_term(t));
}

// ----- machine -----

namespace {

StepResult stuck(const std::string& reason) {
  StepResult r;
  r.status = StepResult::Status::Stuck;
  r.stuck_reason = reason;
  return r;
}

}  // namespace

StepResult step(const Signature& sig, const MachineState& st) {
  StepResult r;
  if (st.ctrl.empty()) {
    r.status = StepResult::Status::Halted;
    return r;
  }
  MachineState next = st;
  CtrlItem item = next.ctrl.back();
  next.ctrl.pop_back();

  Formula stack0 = term_of_stack(sig, st.vs);
  Formula mem0 = term_of_mem(sig, st.mem);
  auto primitive = [&](const std::string& axiom, const Formula& pre_stack,
                       const Formula& pre_mem, const Formula& post_stack,
                       const Formula& post_mem) {
    r.cert.primitive = true;
    r.cert.axioms = {axiom};
    r.cert.instance =
        f_implies(config_of(sig, pre_stack, pre_mem),
                  box_exec(sig, term_of_ctrl_item(sig, item),
                           config_of(sig, post_stack, post_mem)));
  };
  auto composite = [&](std::vector<std::string> axioms) {
    r.cert.primitive = false;
    r.cert.axioms = std::move(axioms);
  };

  switch (item.k) {
    case CtrlItem::K::CA: {
      const AExp& a = *item.a;
      if (a.k == AExp::K::Num) {
        next.vs.insert(next.vs.begin(), Value::of_nat(a.num));
        primitive("Aint", stack0, mem0, term_of_stack(sig, next.vs), mem0);
      } else if (a.k == AExp::K::Var) {
        auto v = st.mem.read(a.var);
        if (!v) return stuck("UnboundVariable");
        next.vs.insert(next.vs.begin(), Value::of_nat(*v));
        // (Aid) exposes the read variable as the outer write
        Memory rest = st.mem;
        Memory without = Memory{};
        for (const auto& [x, n] : rest.entries())
          if (x != a.var) without.write(x, n);
        Formula exposed =
            f_modal(sig, "set",
                    {term_of_mem(sig, without), f_cnom(sig, a.var),
                     f_numeral(sig, *v)});
        primitive("Aid", stack0, exposed, term_of_stack(sig, next.vs), exposed);
      } else if (a.k == AExp::K::Inc) {
        auto v = st.mem.read(a.var);
        if (!v) return stuck("UnboundVariable");
        next.mem.write(a.var, *v + 1);
        next.vs.insert(next.vs.begin(), Value::of_nat(*v + 1));
        Memory without = Memory{};
        for (const auto& [x, n] : st.mem.entries())
          if (x != a.var) without.write(x, n);
        Formula pre_mem =
            f_modal(sig, "set",
                    {term_of_mem(sig, without), f_cnom(sig, a.var),
                     f_numeral(sig, *v)});
        Formula inc_term =
            f_modal(sig, "add", {f_numeral(sig, *v), f_numeral(sig, 1)});
        Formula post_mem = f_modal(
            sig, "set", {term_of_mem(sig, without), f_cnom(sig, a.var), inc_term});
        Formula post_stack = f_modal(
            sig, "push",
            {f_modal(sig, "nat2Val", {inc_term}), term_of_stack(sig, st.vs)});
        primitive("A++", stack0, pre_mem, post_stack, post_mem);
      } else {
        // composite: c(a1 + a2) expands
        CtrlStack frag = compile_aexp(item.a);
        next.ctrl.insert(next.ctrl.end(), frag.begin(), frag.end());
        composite({"Dplus"});
      }
      break;
    }
    case CtrlItem::K::CB: {
      CtrlStack frag = compile_bexp(item.b);
      next.ctrl.insert(next.ctrl.end(), frag.begin(), frag.end());
      composite({"Dleq"});
      break;
    }
    case CtrlItem::K::CS: {
      const Stmt& s = *item.s;
      switch (s.k) {
        case Stmt::K::Skip:
          primitive("Askip", stack0, mem0, stack0, mem0);
          break;
        case Stmt::K::Seq: {
          CtrlStack frag = compile(item.s);
          next.ctrl.insert(next.ctrl.end(), frag.begin(), frag.end());
          composite({"CStmt"});
          break;
        }
        case Stmt::K::Assign: {
          CtrlStack frag = compile(item.s);
          next.ctrl.insert(next.ctrl.end(), frag.begin(), frag.end());
          composite({"Dasgn"});
          break;
        }
        case Stmt::K::If: {
          CtrlStack frag = compile(item.s);
          next.ctrl.insert(next.ctrl.end(), frag.begin(), frag.end());
          composite({"Dif"});
          break;
        }
        case Stmt::K::While: {
          CtrlStack frag = compile(item.s);
          next.ctrl.insert(next.ctrl.end(), frag.begin(), frag.end());
          composite({"Dwhile"});
          break;
        }
      }
      break;
    }
    case CtrlItem::K::Asgn: {
      if (st.vs.empty()) return stuck("StackUnderflow");
      Value v = st.vs.front();
      if (v.is_bool) return stuck("TypeClash");
      next.vs.erase(next.vs.begin());
      next.mem.write(item.var, v.nat);
      primitive("Aasgn", stack0, mem0, term_of_stack(sig, next.vs),
                f_modal(sig, "set",
                        {mem0, f_cnom(sig, item.var), f_numeral(sig, v.nat)}));
      break;
    }
    case CtrlItem::K::Plus: {
      if (st.vs.size() < 2) return stuck("StackUnderflow");
      Value b = st.vs[0], a = st.vs[1];
      if (a.is_bool || b.is_bool) return stuck("TypeClash");
      next.vs.erase(next.vs.begin(), next.vs.begin() + 2);
      next.vs.insert(next.vs.begin(), Value::of_nat(a.nat + b.nat));
      Formula sum =
          f_modal(sig, "add", {f_numeral(sig, a.nat), f_numeral(sig, b.nat)});
      Formula post_stack =
          f_modal(sig, "push",
                  {f_modal(sig, "nat2Val", {sum}),
                   term_of_stack(sig, std::vector<Value>(st.vs.begin() + 2,
                                                         st.vs.end()))});
      primitive("Aplus", stack0, mem0, post_stack, mem0);
      break;
    }
    case CtrlItem::K::Leq: {
      if (st.vs.size() < 2) return stuck("StackUnderflow");
      Value n1 = st.vs[0], n2 = st.vs[1];
      if (n1.is_bool || n2.is_bool) return stuck("TypeClash");
      next.vs.erase(next.vs.begin(), next.vs.begin() + 2);
      next.vs.insert(next.vs.begin(), Value::of_bool(n1.nat <= n2.nat));
      Formula cmp =
          f_modal(sig, "le", {f_numeral(sig, n1.nat), f_numeral(sig, n2.nat)});
      Formula post_stack =
          f_modal(sig, "push",
                  {f_modal(sig, "bool2Val", {cmp}),
                   term_of_stack(sig, std::vector<Value>(st.vs.begin() + 2,
                                                         st.vs.end()))});
      primitive("Aleq", stack0, mem0, post_stack, mem0);
      break;
    }
    case CtrlItem::K::Test: {
      if (st.vs.empty()) return stuck("StackUnderflow");
      if (!(st.vs.front() == item.test)) return stuck("TestFailed");
      next.vs.erase(next.vs.begin());
      primitive("A?", stack0, mem0, term_of_stack(sig, next.vs), mem0);
      break;
    }
    case CtrlItem::K::Branch: {
      if (st.vs.empty()) return stuck("StackUnderflow");
      Value v = st.vs.front();
      if (!v.is_bool) return stuck("TypeClash");
      next.vs.erase(next.vs.begin());
      CtrlStack frag = compile(v.b ? item.s : item.s2);
      next.ctrl.insert(next.ctrl.end(), frag.begin(), frag.end());
      composite({"Dif", "A?"});
      break;
    }
    case CtrlItem::K::Loop: {
      if (st.vs.empty()) return stuck("StackUnderflow");
      Value v = st.vs.front();
      if (!v.is_bool) return stuck("TypeClash");
      next.vs.erase(next.vs.begin());
      if (v.b) {
        // unfold: c(s) ; c(b) ; loop(b,s)
        next.ctrl.push_back(item);
        CtrlStack b = compile_bexp(item.b);
        next.ctrl.insert(next.ctrl.end(), b.begin(), b.end());
        CtrlStack s = compile(item.s);
        next.ctrl.insert(next.ctrl.end(), s.begin(), s.end());
      }
      composite({"Dwhile", "A?"});
      break;
    }
  }
  r.status = StepResult::Status::Ok;
  r.next = std::move(next);
  return r;
}

RunResult run(const Signature& sig, const StmtPtr& program, const Memory& mem0,
              long fuel) {
  MachineState st;
  st.ctrl = compile(program);
  st.mem = mem0;
  RunResult out;
  for (long i = 0; i <= fuel; ++i) {
    StepResult r = step(sig, st);
    if (r.status == StepResult::Status::Halted) {
      out.status = RunResult::Status::Finished;
      out.mem = st.mem;
      out.vs = st.vs;
      out.steps_taken = i;
      return out;
    }
    if (r.status == StepResult::Status::Stuck) {
      out.status = RunResult::Status::Stuck;
      out.stuck_reason = r.stuck_reason;
      out.mem = st.mem;
      out.vs = st.vs;
      out.steps_taken = i;
      return out;
    }
    if (i == fuel) break;
    st = std::move(r.next);
  }
  out.status = RunResult::Status::OutOfFuel;
  out.mem = st.mem;
  out.vs = st.vs;
  out.steps_taken = fuel;
  return out;
}

// ----- signature and axioms -----

Signature fig3_signature() {
  Signature sig;
  for (const char* s :
       {"Nat", "Bool", "Var", "AExp", "BExp", "Stmt", "Val", "ValStack",
        "Mem", "CtrlStack", "Config"})
    sig.add_sort(s);

  // domain operators
  sig.add_operator("add", {"Nat", "Nat"}, "Nat");
  sig.add_operator("sub", {"Nat", "Nat"}, "Nat");
  sig.add_operator("mul", {"Nat", "Nat"}, "Nat");
  sig.add_operator("div", {"Nat", "Nat"}, "Nat");
  sig.add_operator("eq", {"Nat", "Nat"}, "Bool");
  sig.add_operator("le", {"Nat", "Nat"}, "Bool");

  // syntax
  sig.add_operator("nat2AExp", {"Nat"}, "AExp");
  sig.add_operator("var2AExp", {"Var"}, "AExp");
  sig.add_operator("aplus", {"AExp", "AExp"}, "AExp");
  sig.add_operator("inc", {"Var"}, "AExp");
  sig.add_operator("aleq", {"AExp", "AExp"}, "BExp");
  sig.add_operator("assign", {"Var", "AExp"}, "Stmt");
  sig.add_operator("ite", {"BExp", "Stmt", "Stmt"}, "Stmt");
  sig.add_operator("while", {"BExp", "Stmt"}, "Stmt");
  sig.add_operator("skip", {}, "Stmt");
  sig.add_operator("seq", {"Stmt", "Stmt"}, "Stmt");

  // semantics
  sig.add_operator("nat2Val", {"Nat"}, "Val");
  sig.add_operator("bool2Val", {"Bool"}, "Val");
  sig.add_operator("nil", {}, "ValStack");
  sig.add_operator("push", {"Val", "ValStack"}, "ValStack");
  sig.add_operator("empty", {}, "Mem");
  sig.add_operator("set", {"Mem", "Var", "Nat"}, "Mem");
  sig.add_operator("cexp", {"AExp"}, "CtrlStack");
  sig.add_operator("cbexp", {"BExp"}, "CtrlStack");
  sig.add_operator("cstmt", {"Stmt"}, "CtrlStack");
  sig.add_operator("asgn", {"Var"}, "CtrlStack");
  sig.add_operator("plus", {}, "CtrlStack");
  sig.add_operator("leq", {}, "CtrlStack");
  sig.add_operator("test", {"Val"}, "CtrlStack");
  sig.add_operator("seqc", {"CtrlStack", "CtrlStack"}, "CtrlStack");
  sig.add_operator("star", {"CtrlStack"}, "CtrlStack");
  sig.add_operator("cfg", {"ValStack", "Mem"}, "Config");
  sig.add_operator("exec", {"CtrlStack", "Config"}, "Config");

  // canonical propositional variables, one per sort (first declared per
  // sort anchors the bottom formula), plus numbered metavariables for the
  // argument positions of the conjunct-pushing lemma family
  for (const char* s :
       {"Nat", "Bool", "Var", "AExp", "BExp", "Stmt", "Val", "ValStack",
        "Mem", "CtrlStack", "Config"}) {
    sig.add_symbol(SymbolKind::Prop, std::string("p") + s, s);
    for (int k = 1; k <= 3; ++k)
      sig.add_symbol(SymbolKind::Prop, "m" + std::to_string(k) + s, s);
  }

  // schematic metavariables for the axiom set
  sig.add_symbol(SymbolKind::Prop, "gamma", "Config");
  sig.add_symbol(SymbolKind::Prop, "pi", "CtrlStack");
  sig.add_symbol(SymbolKind::Prop, "pi2", "CtrlStack");
  sig.add_symbol(SymbolKind::Prop, "psiB", "Bool");

  sig.add_symbol(SymbolKind::CNom, "true", "Bool");
  sig.add_symbol(SymbolKind::CNom, "false", "Bool");

  // program variables of the running example
  sig.add_symbol(SymbolKind::CNom, "i", "Var");
  sig.add_symbol(SymbolKind::CNom, "s", "Var");
  sig.add_symbol(SymbolKind::CNom, "n", "Var");

  // state variables: axiom metavariables and proof variables
  sig.add_symbol(SymbolKind::SVar, "vs", "ValStack");
  sig.add_symbol(SymbolKind::SVar, "mem", "Mem");
  sig.add_symbol(SymbolKind::SVar, "x", "Var");
  sig.add_symbol(SymbolKind::SVar, "y", "Var");
  sig.add_symbol(SymbolKind::SVar, "n1", "Nat");
  sig.add_symbol(SymbolKind::SVar, "n2", "Nat");
  sig.add_symbol(SymbolKind::SVar, "v", "Val");
  sig.add_symbol(SymbolKind::SVar, "a1", "AExp");
  sig.add_symbol(SymbolKind::SVar, "a2", "AExp");
  sig.add_symbol(SymbolKind::SVar, "b1", "BExp");
  sig.add_symbol(SymbolKind::SVar, "st1", "Stmt");
  sig.add_symbol(SymbolKind::SVar, "st2", "Stmt");
  sig.add_symbol(SymbolKind::SVar, "vn", "Nat");
  sig.add_symbol(SymbolKind::SVar, "vi", "Nat");

  sig.validate();
  return sig;
}

void ensure_program_vars(Signature& sig, const std::vector<std::string>& vars) {
  for (const auto& v : vars) {
    auto info = sig.lookup_symbol(v);
    if (!info) {
      sig.add_symbol(SymbolKind::CNom, v, "Var");
    } else if (info->kind != SymbolKind::CNom || info->sort != "Var") {
      throw Error(ErrorKind::SymbolKindClash,
                  "program variable " + v + " clashes with a declared " +
                      symbol_kind_name(info->kind));
    }
  }
}

void register_language_axioms(ExtensionRegistry& reg, const Signature& sig) {
  auto sv = [&](const char* name) { return f_svar(sig, name); };
  auto cn = [&](const char* name) { return f_cnom(sig, name); };
  auto op = [&](const char* name, std::vector<Formula> args) {
    return f_modal(sig, name, std::move(args));
  };
  auto boxe = [&](const Formula& pi, const Formula& g) {
    return box_exec(sig, pi, g);
  };
  auto reg1 = [&](const char* label, const Formula& f,
                  std::vector<Guard> guards = {}) {
    register_extension(reg, sig, f, label, InstantiationMode::Schematic,
                       std::move(guards), "language axioms");
  };

  Formula vs = sv("vs"), mem = sv("mem"), x = sv("x"), y = sv("y");
  Formula n1 = sv("n1"), n2 = sv("n2"), v = sv("v");
  Formula a1 = sv("a1"), a2 = sv("a2"), b1 = sv("b1");
  Formula st1 = sv("st1"), st2 = sv("st2");
  Formula gamma = f_prop(sig, "gamma");
  Formula pi = f_prop(sig, "pi"), pi2 = f_prop(sig, "pi2");
  Formula tru = cn("true"), fls = cn("false");
  Formula one = f_numeral(sig, 1);
  auto cfgf = [&](const Formula& s, const Formula& m) {
    return op("cfg", {s, m});
  };
  auto pushf = [&](const Formula& val, const Formula& rest) {
    return op("push", {val, rest});
  };
  auto natv = [&](const Formula& t) { return op("nat2Val", {t}); };
  auto boolv = [&](const Formula& t) { return op("bool2Val", {t}); };
  auto setf = [&](const Formula& m, const Formula& var, const Formula& val) {
    return op("set", {m, var, val});
  };
  auto testf = [&](const Formula& val) { return op("test", {val}); };
  auto seqcf = [&](const Formula& c1, const Formula& c2) {
    return op("seqc", {c1, c2});
  };

  // definitional axioms
  reg1("CStmt", f_iff(op("cstmt", {op("seq", {st1, st2})}),
                      seqcf(op("cstmt", {st1}), op("cstmt", {st2}))));
  reg1("Dplus", f_iff(op("cexp", {op("aplus", {a1, a2})}),
                      seqcf(op("cexp", {a1}),
                            seqcf(op("cexp", {a2}), op("plus", {})))));
  reg1("Dleq", f_iff(op("cbexp", {op("aleq", {a1, a2})}),
                     seqcf(op("cexp", {a2}),
                           seqcf(op("cexp", {a1}), op("leq", {})))));
  reg1("Dasgn", f_iff(op("cstmt", {op("assign", {x, a1})}),
                      seqcf(op("cexp", {a1}), op("asgn", {x}))));
  reg1("Dif",
       f_iff(op("cstmt", {op("ite", {b1, st1, st2})}),
             seqcf(op("cbexp", {b1}),
                   f_or(seqcf(testf(boolv(tru)), op("cstmt", {st1})),
                        seqcf(testf(boolv(fls)), op("cstmt", {st2}))))));
  reg1("Dwhile",
       f_iff(op("cstmt", {op("while", {b1, st1})}),
             seqcf(op("cbexp", {b1}),
                   seqcf(op("star", {seqcf(testf(boolv(tru)),
                                           seqcf(op("cstmt", {st1}),
                                                 op("cbexp", {b1})))}),
                         testf(boolv(fls))))));

  // machine axioms
  reg1("Aint",
       f_implies(cfgf(vs, mem),
                 boxe(op("cexp", {op("nat2AExp", {n1})}),
                      cfgf(pushf(natv(n1), vs), mem))),
       {{Guard::Kind::Numeral, "n1", ""}});
  reg1("Aid", f_implies(cfgf(vs, setf(mem, x, n1)),
                        boxe(op("cexp", {op("var2AExp", {x})}),
                             cfgf(pushf(natv(n1), vs), setf(mem, x, n1)))));
  reg1("A++",
       f_implies(cfgf(vs, setf(mem, x, n1)),
                 boxe(op("cexp", {op("inc", {x})}),
                      cfgf(pushf(natv(op("add", {n1, one})), vs),
                           setf(mem, x, op("add", {n1, one}))))));
  reg1("Aplus", f_implies(cfgf(pushf(natv(n2), pushf(natv(n1), vs)), mem),
                          boxe(op("plus", {}),
                               cfgf(pushf(natv(op("add", {n1, n2})), vs), mem))));
  reg1("Aleq", f_implies(cfgf(pushf(natv(n1), pushf(natv(n2), vs)), mem),
                         boxe(op("leq", {}),
                              cfgf(pushf(boolv(op("le", {n1, n2})), vs), mem))));
  reg1("Askip",
       f_implies(gamma, boxe(op("cstmt", {op("skip", {})}), gamma)));
  reg1("Aasgn", f_implies(cfgf(pushf(natv(n1), vs), mem),
                          boxe(op("asgn", {x}), cfgf(vs, setf(mem, x, n1)))));

  // PDL-style axioms
  reg1("Aunion", f_iff(boxe(f_or(pi, pi2), gamma),
                       f_and(boxe(pi, gamma), boxe(pi2, gamma))));
  reg1("Aseq", f_iff(boxe(seqcf(pi, pi2), gamma), boxe(pi, boxe(pi2, gamma))));
  reg1("A?", f_implies(cfgf(pushf(v, vs), mem),
                       boxe(testf(v), cfgf(vs, mem))));
  // (A not-?), read schematically over the Val constant shapes: a failing
  // test has no transition, so every outcome follows
  reg1("AnotTF", f_implies(cfgf(pushf(boolv(tru), vs), mem),
                           boxe(testf(boolv(fls)), f_bot(sig, "Config"))));
  reg1("AnotFT", f_implies(cfgf(pushf(boolv(fls), vs), mem),
                           boxe(testf(boolv(tru)), f_bot(sig, "Config"))));
  reg1("AnotNat",
       f_implies(cfgf(pushf(natv(n1), vs), mem),
                 boxe(testf(natv(n2)), f_bot(sig, "Config"))),
       {{Guard::Kind::Numeral, "n1", ""},
        {Guard::Kind::Numeral, "n2", ""},
        {Guard::Kind::Distinct, "n1", "n2"}});
  reg1("A*", f_iff(boxe(op("star", {pi}), gamma),
                   f_and(gamma, boxe(pi, boxe(op("star", {pi}), gamma)))));
  reg1("AInd", f_implies(f_and(gamma, boxe(op("star", {pi}),
                                           f_implies(gamma, boxe(pi, gamma)))),
                         boxe(op("star", {pi}), gamma)));

  // memory consistency
  reg1("AMem1", f_iff(setf(setf(mem, x, n1), y, n2),
                      setf(setf(mem, y, n2), x, n1)),
       {{Guard::Kind::Distinct, "x", "y"}});
  reg1("AMem2", f_implies(setf(setf(mem, x, n1), x, n2), setf(mem, x, n2)));

  // domain axioms
  reg1("B1", f_iff(tru, f_neg(fls)));
  reg1("Btot", f_or(tru, fls));
  reg1("I1", f_implies(f_at(sig, "true", op("eq", {n1, n2}), "Nat"),
                       f_iff(n1, n2)));
}

void register_nominal_conjunction(ExtensionRegistry& reg, const Signature& sig,
                                  const std::vector<std::string>& exists_vars) {
  Formula psi = f_prop(sig, "psiB");
  auto metavar_for = [&](const std::string& sort, size_t pos) {
    return f_prop(sig, "m" + std::to_string(pos + 1) + sort);
  };

  for (const auto& decl : sig.operators()) {
    for (size_t pos = 0; pos < decl.arg_sorts.size(); ++pos) {
      for (const char* k : {"true", "false"}) {
        std::vector<Formula> args;
        for (size_t ai = 0; ai < decl.arg_sorts.size(); ++ai)
          args.push_back(metavar_for(decl.arg_sorts[ai], ai));
        Formula plain = f_modal(sig, decl.name, args, decl.result_sort);
        Formula at_outer = f_at(sig, k, psi, decl.result_sort);
        Formula at_inner = f_at(sig, k, psi, decl.arg_sorts[pos]);
        std::vector<Formula> args2 = args;
        args2[pos] = f_and(args[pos], at_inner);
        Formula pushed = f_modal(sig, decl.name, args2, decl.result_sort);
        register_extension(
            reg, sig, f_iff(f_and(plain, at_outer), pushed),
            "NC1_" + decl.name + "_" + std::to_string(pos + 1) + "_" + k,
            InstantiationMode::Schematic, {}, "nominal conjunction");
      }
    }
  }

  // box variant over the execution modality, conjunct pushed into the
  // configuration argument
  Formula gamma = f_prop(sig, "gamma");
  Formula pi = f_prop(sig, "pi");
  for (const char* k : {"true", "false"}) {
    Formula at_c = f_at(sig, k, psi, "Config");
    register_extension(
        reg, sig,
        f_iff(f_and(box_exec(sig, pi, gamma), at_c),
              f_and(box_exec(sig, pi, f_and(gamma, at_c)), at_c)),
        std::string("NC2_exec_2_") + k, InstantiationMode::Schematic, {},
        "nominal conjunction");
  }

  // existential commutation: exists x [pi]gamma -> [pi] exists x gamma,
  // x not occurring in pi
  for (const auto& var : exists_vars) {
    register_extension(
        reg, sig,
        f_implies(f_exists(sig, var, box_exec(sig, pi, gamma)),
                  box_exec(sig, pi, f_exists(sig, var, gamma))),
        "NC3_exec_2_" + var, InstantiationMode::Schematic,
        {{Guard::Kind::Absent, var, "pi"}}, "nominal conjunction");
  }
}

}  // namespace hml::smc
