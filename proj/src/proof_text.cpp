#include "hml/proof_text.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hml/arith_oracle.hpp"
#include "hml/formula_text.hpp"

#include "json.hpp"

namespace hml {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

// Splits "tok rest..." -> first token and remainder (trimmed).
std::pair<std::string, std::string> split_first(const std::string& line) {
  size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
    ++i;
  size_t j = i;
  while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
    ++j;
  size_t k = j;
  while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k])))
    ++k;
  return {line.substr(i, j - i), line.substr(k)};
}

std::string strip_comment(const std::string& line) {
  // '#' begins a comment outside of any token we use
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

Justification parse_justification(const std::string& text, int lineno) {
  std::istringstream is(text);
  std::string head;
  is >> head;
  auto fail = [&](const std::string& msg) -> Justification {
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(lineno) + ": " + msg);
  };
  Justification j;
  auto need_int = [&](int& out) {
    int v;
    if (!(is >> v) || v < 1) fail("expected a positive step reference");
    out = v - 1;
  };
  auto need_str = [&](std::string& out) {
    if (!(is >> out)) fail("expected an identifier");
  };
  if (head == "taut") {
    j.rule = Justification::Rule::Axiom;
    j.schema = SchemaId::Taut;
  } else if (head == "axiom") {
    std::string name;
    need_str(name);
    auto id = schema_by_name(name);
    if (!id) fail("unknown axiom schema '" + name + "'");
    j.rule = Justification::Rule::Axiom;
    j.schema = *id;
  } else if (head == "ext") {
    j.rule = Justification::Rule::Extension;
    need_str(j.label);
  } else if (head == "hyp") {
    j.rule = Justification::Rule::Hyp;
    need_int(j.index1);
  } else if (head == "globalhyp") {
    j.rule = Justification::Rule::GlobalHyp;
    need_int(j.index1);
    need_str(j.name);
  } else if (head == "mp") {
    j.rule = Justification::Rule::MP;
    need_int(j.index1);
    need_int(j.index2);
  } else if (head == "ug") {
    j.rule = Justification::Rule::UG;
    need_str(j.op);
    int pos;
    if (!(is >> pos) || pos < 1) fail("ug expects a 1-based argument position");
    j.arg_pos = pos - 1;
    need_int(j.index1);
  } else if (head == "genat") {
    j.rule = Justification::Rule::GenAt;
    need_str(j.name);
    need_int(j.index1);
  } else if (head == "broadcast") {
    j.rule = Justification::Rule::BroadcastS;
    need_str(j.name);
    need_int(j.index1);
  } else if (head == "nameat") {
    j.rule = Justification::Rule::NameAt;
    need_int(j.index1);
  } else if (head == "paste") {
    j.rule = Justification::Rule::Paste;
    need_int(j.index1);
  } else if (head == "gen") {
    j.rule = Justification::Rule::Gen;
    need_str(j.name);
    need_int(j.index1);
  } else {
    fail("unknown justification '" + head + "'");
  }
  std::string extra;
  if (is >> extra) fail("trailing tokens after justification");
  return j;
}

std::string render_justification(const Justification& j) {
  std::ostringstream os;
  using Rule = Justification::Rule;
  switch (j.rule) {
    case Rule::Axiom:
      if (j.schema == SchemaId::Taut)
        os << "taut";
      else
        os << "axiom " << schema_name(j.schema);
      break;
    case Rule::Extension: os << "ext " << j.label; break;
    case Rule::Hyp: os << "hyp " << j.index1 + 1; break;
    case Rule::GlobalHyp:
      os << "globalhyp " << j.index1 + 1 << ' ' << j.name;
      break;
    case Rule::MP: os << "mp " << j.index1 + 1 << ' ' << j.index2 + 1; break;
    case Rule::UG:
      os << "ug " << j.op << ' ' << j.arg_pos + 1 << ' ' << j.index1 + 1;
      break;
    case Rule::GenAt: os << "genat " << j.name << ' ' << j.index1 + 1; break;
    case Rule::BroadcastS:
      os << "broadcast " << j.name << ' ' << j.index1 + 1;
      break;
    case Rule::NameAt: os << "nameat " << j.index1 + 1; break;
    case Rule::Paste: os << "paste " << j.index1 + 1; break;
    case Rule::Gen: os << "gen " << j.name << ' ' << j.index1 + 1; break;
  }
  return os.str();
}

}  // namespace

void parse_axiomset(const std::string& text, const Signature& sig,
                    ExtensionRegistry& reg, const std::string& provenance) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  // guards may precede or follow their axiom line; collect, then attach
  std::vector<std::pair<std::string, Guard>> pending;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    auto [head, rest] = split_first(line);
    if (head == "axiom") {
      auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw Error(ErrorKind::SyntaxError,
                    "axiomset line " + std::to_string(lineno) +
                        ": expected 'axiom <label> : <formula>'");
      std::string label = trim(rest.substr(0, colon));
      Formula f = parse_formula(sig, trim(rest.substr(colon + 1)));
      register_extension(reg, sig, f, label, InstantiationMode::Schematic, {},
                         provenance);
    } else if (head == "guard") {
      std::istringstream gs(rest);
      std::string label, kind, a, b;
      gs >> label >> kind >> a;
      Guard g;
      if (kind == "numeral") {
        g = {Guard::Kind::Numeral, a, ""};
      } else if (kind == "distinct") {
        gs >> b;
        g = {Guard::Kind::Distinct, a, b};
      } else if (kind == "absent") {
        gs >> b;
        g = {Guard::Kind::Absent, a, b};
      } else {
        throw Error(ErrorKind::SyntaxError,
                    "axiomset line " + std::to_string(lineno) +
                        ": unknown guard kind '" + kind + "'");
      }
      pending.push_back({label, g});
    } else {
      throw Error(ErrorKind::SyntaxError,
                  "axiomset line " + std::to_string(lineno) +
                      ": unknown directive '" + head + "'");
    }
  }
  for (auto& [label, g] : pending) {
    const ExtensionEntry* e = reg.find(label);
    if (!e)
      throw Error(ErrorKind::UnknownSymbol,
                  "guard for unregistered axiom '" + label + "'");
    const_cast<ExtensionEntry*>(e)->guards.push_back(g);
  }
}

void load_axiomset(const std::string& path, const Signature& sig,
                   ExtensionRegistry& reg) {
  parse_axiomset(read_file(path), sig, reg, fs::path(path).filename().string());
}

std::string render_axiomset(const ExtensionRegistry& reg) {
  std::ostringstream os;
  for (const auto& e : reg.entries()) {
    if (e.mode != InstantiationMode::Schematic) continue;
    os << "axiom " << e.label << " : " << print_formula(e.formula) << '\n';
    for (const auto& g : e.guards) {
      os << "guard " << e.label << ' ';
      switch (g.kind) {
        case Guard::Kind::Numeral: os << "numeral " << g.a; break;
        case Guard::Kind::Distinct: os << "distinct " << g.a << ' ' << g.b; break;
        case Guard::Kind::Absent: os << "absent " << g.a << ' ' << g.b; break;
      }
      os << '\n';
    }
  }
  return os.str();
}

ProofScript parse_proof_script(const std::string& text,
                               const std::string& base_dir) {
  ProofScript script;
  bool have_sig = false;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::string conclusion_text;
  std::vector<std::pair<std::string, std::string>> step_texts;  // formula, just
  std::vector<std::pair<std::string, std::string>> hyp_like;    // kind, payload

  while (std::getline(is, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    auto [head, rest] = split_first(line);

    if (head == "logic") {
      auto p = profile_by_name(trim(rest));
      if (!p)
        throw Error(ErrorKind::SyntaxError,
                    "line " + std::to_string(lineno) + ": unknown logic '" +
                        rest + "'");
      script.profile = *p;
    } else if (head == "sig") {
      script.sig = load_signature_file(resolve(base_dir, trim(rest)));
      have_sig = true;
    } else if (head == "use") {
      if (!have_sig)
        throw Error(ErrorKind::SyntaxError, "'use' before 'sig'");
      std::string path = resolve(base_dir, trim(rest));
      ProofScript lemma = load_proof_script(path);
      if (!lemma.hypotheses.empty() || !lemma.global_hyps.empty())
        throw Error(ErrorKind::SyntaxError,
                    "imported lemma must be hypothesis-free: " + path);
      CheckReport rep = check_proof(lemma);
      if (!rep.ok)
        throw Error(ErrorKind::SyntaxError,
                    "imported lemma does not check: " + path);
      Formula conclusion =
          lemma.conclusion.empty() ? lemma.steps.back().formula
                                   : lemma.conclusion;
      std::string label = fs::path(path).stem().string();
      register_extension(script.extensions, script.sig, conclusion, label,
                         InstantiationMode::Theorem, {}, path);
    } else if (head == "axiomset") {
      if (!have_sig)
        throw Error(ErrorKind::SyntaxError, "'axiomset' before 'sig'");
      load_axiomset(resolve(base_dir, trim(rest)), script.sig,
                    script.extensions);
    } else if (head == "fact") {
      if (!have_sig) throw Error(ErrorKind::SyntaxError, "'fact' before 'sig'");
      auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw Error(ErrorKind::SyntaxError,
                    "line " + std::to_string(lineno) +
                        ": expected 'fact <label> : <formula>'");
      std::string label = trim(rest.substr(0, colon));
      Formula f = parse_formula(script.sig, trim(rest.substr(colon + 1)));
      auto check = arith::validate_fact(script.sig, f);
      if (!check.ok)
        throw Error(ErrorKind::SyntaxError,
                    "line " + std::to_string(lineno) + ": fact " + label +
                        " rejected (" + check.why + ")");
      register_extension(script.extensions, script.sig, f, label,
                         InstantiationMode::Exact, {},
                         "oracle:" + check.shape);
    } else if (head == "hyp" || head == "globalhyp" || head == "conclusion") {
      hyp_like.push_back({head, rest});
    } else if (!head.empty() && std::isdigit(static_cast<unsigned char>(head[0]))) {
      // "<n>. <formula> ; <justification>"
      auto semi = line.rfind(';');
      if (semi == std::string::npos)
        throw Error(ErrorKind::SyntaxError,
                    "line " + std::to_string(lineno) +
                        ": step needs '; <justification>'");
      std::string before = trim(line.substr(0, semi));
      std::string just = trim(line.substr(semi + 1));
      auto dot = before.find('.');
      if (dot == std::string::npos)
        throw Error(ErrorKind::SyntaxError,
                    "line " + std::to_string(lineno) + ": step needs 'n.'");
      std::string num = trim(before.substr(0, dot));
      int n = std::stoi(num);
      if (n != static_cast<int>(step_texts.size()) + 1)
        throw Error(ErrorKind::SyntaxError,
                    "line " + std::to_string(lineno) + ": step number " + num +
                        " out of order");
      step_texts.push_back({trim(before.substr(dot + 1)), just});
      // remember line for diagnostics
      (void)lineno;
    } else {
      throw Error(ErrorKind::SyntaxError,
                  "line " + std::to_string(lineno) + ": unknown directive '" +
                      head + "'");
    }
  }

  if (!have_sig)
    throw Error(ErrorKind::SyntaxError, "script has no 'sig' line");

  for (const auto& [kind, payload] : hyp_like) {
    if (kind == "hyp") {
      script.hypotheses.push_back(parse_formula(script.sig, payload));
    } else if (kind == "globalhyp") {
      auto [sort, rest2] = split_first(payload);
      if (!script.sig.has_sort(sort))
        throw Error(ErrorKind::UnknownSort, sort);
      script.global_hyps.push_back(
          {sort, parse_formula(script.sig, rest2, sort)});
    } else {
      conclusion_text = payload;
    }
  }

  int stepno = 0;
  for (const auto& [ftext, jtext] : step_texts) {
    ++stepno;
    Step st;
    st.formula = parse_formula(script.sig, ftext);
    st.just = parse_justification(jtext, stepno);
    script.steps.push_back(std::move(st));
  }
  if (!conclusion_text.empty())
    script.conclusion = parse_formula(script.sig, conclusion_text);
  else if (!script.steps.empty())
    script.conclusion = script.steps.back().formula;
  return script;
}

ProofScript load_proof_script(const std::string& path) {
  return parse_proof_script(read_file(path),
                            fs::path(path).parent_path().string());
}

std::string render_proof_script(
    const ProofScript& script, const std::string& sig_path,
    const std::vector<std::pair<std::string, std::string>>& uses,
    const std::string& axiomset_path) {
  std::ostringstream os;
  os << "logic " << profile_name(script.profile) << '\n';
  os << "sig " << sig_path << '\n';
  for (const auto& [label, path] : uses) {
    (void)label;
    os << "use " << path << '\n';
  }
  if (!axiomset_path.empty()) os << "axiomset " << axiomset_path << '\n';
  for (const auto& e : script.extensions.entries())
    if (e.mode == InstantiationMode::Exact)
      os << "fact " << e.label << " : " << print_formula(e.formula) << '\n';
  for (const auto& h : script.hypotheses)
    os << "hyp " << print_formula(h) << '\n';
  for (const auto& [sort, g] : script.global_hyps)
    os << "globalhyp " << sort << ' ' << print_formula(g) << '\n';
  if (!script.conclusion.empty())
    os << "conclusion " << print_formula(script.conclusion) << '\n';
  for (size_t i = 0; i < script.steps.size(); ++i) {
    os << i + 1 << ". " << print_formula(script.steps[i].formula) << " ; "
       << render_justification(script.steps[i].just) << '\n';
  }
  return os.str();
}

std::string render_check_report(const CheckReport& report, bool json) {
  if (json) {
    nlohmann::json j;
    j["ok"] = report.ok;
    j["diagnostics"] = nlohmann::json::array();
    for (const auto& d : report.diagnostics) {
      j["diagnostics"].push_back(
          {{"step", d.step + 1}, {"code", d.code}, {"detail", d.detail}});
    }
    return j.dump(2);
  }
  std::ostringstream os;
  if (report.ok) {
    os << "ok\n";
  } else {
    for (const auto& d : report.diagnostics) {
      if (d.step >= 0)
        os << "step " << d.step + 1 << ": ";
      else
        os << "script: ";
      os << d.code << ": " << d.detail << '\n';
    }
  }
  return os.str();
}

}  // namespace hml
