#pragma once

#include <string>

#include "hml/proof.hpp"

namespace hml {

// Proof script file format. Header lines, then numbered steps:
//
//   logic KS | H@ | H@A
//   sig <file>
//   use <script.prf>            imported lemma; checked, conclusion
//                               registered under the file's stem
//   axiomset <file>             labeled schematic axioms with guards
//   fact <label> : <formula>    oracle-validated domain fact
//   hyp <formula>
//   globalhyp <sort> <formula>
//   conclusion <formula>
//   1. <formula> ; <justification>
//
// Justifications: axiom <name> | taut | ext <label> | hyp <k> |
// globalhyp <k> <nominal> | mp <i> <j> | ug <op> <pos> <i> |
// genat <nominal> <i> | broadcast <sort> <i> | nameat <i> | paste <i> |
// gen <var> <i>. Indices are 1-based.
//
// Relative paths resolve against the script file's directory.
ProofScript parse_proof_script(const std::string& text,
                               const std::string& base_dir);
ProofScript load_proof_script(const std::string& path);

std::string render_proof_script(const ProofScript& script,
                                const std::string& sig_path,
                                const std::vector<std::pair<std::string, std::string>>& uses,
                                const std::string& axiomset_path);

// Axiom set file:
//   axiom <label> : <formula>
//   guard <label> numeral <v> | distinct <a> <b> | absent <x> <metavar>
void load_axiomset(const std::string& path, const Signature& sig,
                   ExtensionRegistry& reg);
void parse_axiomset(const std::string& text, const Signature& sig,
                    ExtensionRegistry& reg, const std::string& provenance);
std::string render_axiomset(const ExtensionRegistry& reg);

std::string render_check_report(const CheckReport& report, bool json);

}  // namespace hml
