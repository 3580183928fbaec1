#include "hml/proof_builder.hpp"

#include <stdexcept>

#include "hml/arith_oracle.hpp"
#include "hml/formula_text.hpp"

namespace hml {

ProofBuilder::ProofBuilder(const Signature& sig, LogicProfile profile)
    : sig_(sig), profile_(profile) {}

int ProofBuilder::append(const Formula& f, Justification j) {
  auto it = memo_.find(f);
  if (it != memo_.end()) return it->second;
  steps_.push_back({f, std::move(j)});
  int idx = static_cast<int>(steps_.size()) - 1;
  memo_.emplace(f, idx);
  return idx;
}

int ProofBuilder::axiom(SchemaId id, const Formula& f) {
  if (!match_axiom(sig_, id, f))
    throw std::logic_error(std::string("builder produced a non-instance of (") +
                           schema_name(id) + "): " + print_formula(f));
  Justification j;
  j.rule = Justification::Rule::Axiom;
  j.schema = id;
  return append(f, j);
}

int ProofBuilder::taut(const Formula& f) { return axiom(SchemaId::Taut, f); }

int ProofBuilder::ext(const std::string& label, const Formula& instance) {
  const ExtensionEntry* e = extensions_.find(label);
  if (!e) throw std::logic_error("builder cites unknown extension " + label);
  std::string why;
  if (!match_extension(sig_, *e, instance, &why))
    throw std::logic_error("builder instance of " + label + " rejected (" +
                           why + "): " + print_formula(instance));
  Justification j;
  j.rule = Justification::Rule::Extension;
  j.label = label;
  return append(instance, j);
}

int ProofBuilder::mp(int minor, int major) {
  auto imp = view_implies(formula(major));
  if (!imp || !(imp->first == formula(minor)))
    throw std::logic_error("builder MP premises do not fit");
  Justification j;
  j.rule = Justification::Rule::MP;
  j.index1 = minor;
  j.index2 = major;
  return append(imp->second, j);
}

int ProofBuilder::ug(const Formula& target, int pos, int premise) {
  auto box = view_box(target);
  if (!box || pos < 0 || pos >= static_cast<int>(box->second.size()) ||
      !(box->second[pos] == formula(premise)))
    throw std::logic_error("builder UG target does not embed the premise");
  Justification j;
  j.rule = Justification::Rule::UG;
  j.op = box->first;
  j.arg_pos = pos;
  j.index1 = premise;
  return append(target, j);
}

int ProofBuilder::gen(const std::string& x, int premise) {
  Justification j;
  j.rule = Justification::Rule::Gen;
  j.name = x;
  j.index1 = premise;
  return append(f_forall(sig_, x, formula(premise)), j);
}

int ProofBuilder::gen_at(const std::string& j_name, const std::string& host,
                         int premise) {
  Justification j;
  j.rule = Justification::Rule::GenAt;
  j.name = j_name;
  j.index1 = premise;
  return append(f_at(sig_, j_name, formula(premise), host), j);
}

int ProofBuilder::fact(const std::string& label, const Formula& f) {
  std::string lab = label.empty()
                        ? "fact_" + std::to_string(++fact_counter_)
                        : label;
  if (const ExtensionEntry* e = extensions_.find(lab)) {
    if (!(e->formula == f))
      throw std::logic_error("fact label collision: " + lab);
  } else {
    auto check = arith::validate_fact(sig_, f);
    if (!check.ok)
      throw std::logic_error("oracle rejected fact " + lab + " (" + check.why +
                             "): " + print_formula(f));
    register_extension(extensions_, sig_, f, lab, InstantiationMode::Exact, {},
                       "oracle:" + check.shape);
  }
  return ext(lab, f);
}

int ProofBuilder::pl(const Formula& target, const std::vector<int>& deps) {
  auto it = memo_.find(target);
  if (it != memo_.end()) return it->second;
  Formula tower = target;
  for (size_t i = deps.size(); i-- > 0;)
    tower = f_implies(formula(deps[i]), tower);
  if (!is_tautology(tower))
    throw std::logic_error("builder PL step is not propositional: " +
                           print_formula(tower));
  int cur = taut(tower);
  for (int d : deps) cur = mp(d, cur);
  return cur;
}

Formula ProofBuilder::dia_of(const std::string& op,
                             const std::vector<Formula>& frames, int pos,
                             const Formula& at_pos) const {
  std::vector<Formula> args;
  int fi = 0;
  for (int i = 0; i <= static_cast<int>(frames.size()); ++i) {
    if (i == pos)
      args.push_back(at_pos);
    else
      args.push_back(frames[fi++]);
  }
  return f_modal(sig_, op, std::move(args));
}

Formula ProofBuilder::box_of(const std::string& op,
                             const std::vector<Formula>& frames, int pos,
                             const Formula& at_pos) const {
  std::vector<Formula> args;
  int fi = 0;
  for (int i = 0; i <= static_cast<int>(frames.size()); ++i) {
    if (i == pos)
      args.push_back(at_pos);
    else
      args.push_back(frames[fi++]);
  }
  return f_box(sig_, op, std::move(args));
}

int ProofBuilder::box_mono(const std::string& op,
                           const std::vector<Formula>& frames, int pos,
                           int imp) {
  auto ab = view_implies(formula(imp));
  if (!ab) throw std::logic_error("box_mono expects an implication premise");
  const Formula target =
      f_implies(box_of(op, frames, pos, ab->first),
                box_of(op, frames, pos, ab->second));
  auto it = memo_.find(target);
  if (it != memo_.end()) return it->second;
  int lifted = ug(box_of(op, frames, pos, formula(imp)), pos, imp);
  Formula k = f_implies(formula(lifted), target);
  int kstep = axiom(SchemaId::Ksigma, k);
  return mp(lifted, kstep);
}

int ProofBuilder::dia_mono(const std::string& op,
                           const std::vector<Formula>& frames, int pos,
                           int imp) {
  auto ab = view_implies(formula(imp));
  if (!ab) throw std::logic_error("dia_mono expects an implication premise");
  const Formula& a = ab->first;
  const Formula& b = ab->second;
  Formula da = dia_of(op, frames, pos, a);
  Formula db = dia_of(op, frames, pos, b);
  Formula target = f_implies(da, db);
  auto it = memo_.find(target);
  if (it != memo_.end()) return it->second;

  int contra = pl(f_implies(f_neg(b), f_neg(a)), {imp});
  std::vector<Formula> neg_frames;
  for (const auto& fr : frames) neg_frames.push_back(f_neg(fr));
  int boxed = box_mono(op, neg_frames, pos, contra);
  // Dual instances connecting the diamonds to the contraposed boxes.
  auto dual_of = [&](const Formula& dia) {
    std::vector<Formula> negargs;
    for (const auto& arg : dia.kids()) negargs.push_back(f_neg(arg));
    return f_iff(dia, f_neg(f_box(sig_, op, negargs)));
  };
  int duala = axiom(SchemaId::Dualsigma, dual_of(da));
  int dualb = axiom(SchemaId::Dualsigma, dual_of(db));
  return pl(target, {boxed, duala, dualb});
}

int ProofBuilder::iff_forward(int iff) {
  auto v = view_iff(formula(iff));
  if (!v) throw std::logic_error("iff_forward premise is not an iff");
  return pl(f_implies(v->first, v->second), {iff});
}

int ProofBuilder::iff_backward(int iff) {
  auto v = view_iff(formula(iff));
  if (!v) throw std::logic_error("iff_backward premise is not an iff");
  return pl(f_implies(v->second, v->first), {iff});
}

int ProofBuilder::iff_of(int fwd, int bwd) {
  auto a = view_implies(formula(fwd));
  auto b = view_implies(formula(bwd));
  if (!a || !b || !(a->first == b->second) || !(a->second == b->first))
    throw std::logic_error("iff_of premises do not fit");
  return pl(f_iff(a->first, a->second), {fwd, bwd});
}

int ProofBuilder::dia_iff(const std::string& op,
                          const std::vector<Formula>& frames, int pos,
                          int iff) {
  int fwd = dia_mono(op, frames, pos, iff_forward(iff));
  int bwd = dia_mono(op, frames, pos, iff_backward(iff));
  return iff_of(fwd, bwd);
}

int ProofBuilder::box_iff(const std::string& op,
                          const std::vector<Formula>& frames, int pos,
                          int iff) {
  int fwd = box_mono(op, frames, pos, iff_forward(iff));
  int bwd = box_mono(op, frames, pos, iff_backward(iff));
  return iff_of(fwd, bwd);
}

int ProofBuilder::at_mono(const std::string& j, const std::string& host,
                          int imp) {
  auto ab = view_implies(formula(imp));
  if (!ab) throw std::logic_error("at_mono expects an implication premise");
  int lifted = gen_at(j, host, imp);
  Formula k = f_implies(formula(lifted),
                        f_implies(f_at(sig_, j, ab->first, host),
                                  f_at(sig_, j, ab->second, host)));
  int kstep = axiom(SchemaId::KAt, k);
  return mp(lifted, kstep);
}

int ProofBuilder::at_iff(const std::string& j, const std::string& host,
                         int iff) {
  int fwd = at_mono(j, host, iff_forward(iff));
  int bwd = at_mono(j, host, iff_backward(iff));
  return iff_of(fwd, bwd);
}

int ProofBuilder::exists_elim(const std::string& x, int imp) {
  auto ab = view_implies(formula(imp));
  if (!ab) throw std::logic_error("exists_elim expects an implication");
  const Formula& phi = ab->first;
  const Formula& psi = ab->second;
  if (occurs_free(psi, x))
    throw std::logic_error("exists_elim: " + x + " occurs in the conclusion");
  Formula target = f_implies(f_exists(sig_, x, phi), psi);
  auto it = memo_.find(target);
  if (it != memo_.end()) return it->second;
  int contra = pl(f_implies(f_neg(psi), f_neg(phi)), {imp});
  int all = gen(x, contra);
  Formula q1 = f_implies(formula(all),
                         f_implies(f_neg(psi), f_forall(sig_, x, f_neg(phi))));
  int q1step = axiom(SchemaId::Q1, q1);
  int inner = mp(all, q1step);
  return pl(target, {inner});
}

int ProofBuilder::exists_intro(const Formula& phi, const std::string& x,
                               const StateSymbol& z) {
  Formula inst = substitute(sig_, phi, x, z);
  Formula target = f_implies(inst, f_exists(sig_, x, phi));
  auto it = memo_.find(target);
  if (it != memo_.end()) return it->second;
  // Q2 on the negation: forall x !phi -> !phi[z/x]
  Formula q2 = f_implies(f_forall(sig_, x, f_neg(phi)), f_neg(inst));
  int q2step = axiom(SchemaId::Q2, q2);
  return pl(target, {q2step});
}

int ProofBuilder::exists_mono(const std::string& x, int imp) {
  auto ab = view_implies(formula(imp));
  if (!ab) throw std::logic_error("exists_mono expects an implication");
  StateSymbol self{SymbolKind::SVar, x, ab->second.sort()};
  auto xinfo = sig_.lookup_symbol(x);
  if (!xinfo) throw std::logic_error("exists_mono: unknown variable " + x);
  self.sort = xinfo->sort;
  int intro = exists_intro(ab->second, x, self);  // b -> exists x b
  int chained = pl(f_implies(ab->first, f_exists(sig_, x, ab->second)),
                   {imp, intro});
  return exists_elim(x, chained);
}

ProofScript ProofBuilder::finish(const Formula& conclusion) const {
  ProofScript script;
  script.sig = sig_;
  script.profile = profile_;
  script.extensions = extensions_;
  script.steps = steps_;
  script.conclusion = conclusion;
  return script;
}

}  // namespace hml
