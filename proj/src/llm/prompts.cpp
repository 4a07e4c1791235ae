#include <algorithm>
#include <stdexcept>

#include "obfus/llm/llm.hpp"
#include "obfus_prompt_templates.hpp"

namespace obfus::llm {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "?";
}

std::string_view to_string(StrategyHint h) {
  switch (h) {
    case StrategyHint::FanHeavy: return "fan_heavy";
    case StrategyHint::SymmetryBreaking: return "symmetry_breaking";
    case StrategyHint::Multiplexers: return "multiplexers";
    case StrategyHint::Randomness: return "randomness";
    case StrategyHint::CorruptionPlacement: return "corruption_placement";
  }
  return "?";
}

const PromptTemplate& convert_template() {
  static const PromptTemplate t{"convert.v1", generated::kConvertV1};
  return t;
}
const PromptTemplate& obfuscate_template() {
  static const PromptTemplate t{"obfuscate.v1", generated::kObfuscateV1};
  return t;
}
const PromptTemplate& repair_template() {
  static const PromptTemplate t{"repair.v1", generated::kRepairV1};
  return t;
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw std::invalid_argument("unterminated placeholder in template");
    out.append(tmpl.substr(pos, open - pos));
    std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = values.find(key);
    if (it == values.end()) throw std::invalid_argument("no value for template placeholder '" + key + "'");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

std::vector<StrategyHint> hints_for(const LockConfig& config) {
  const LockConfig c = config.resolved();
  std::vector<StrategyHint> h;
  if (c.selection == Selection::FanHeavy) h.push_back(StrategyHint::FanHeavy);
  if (c.keygate != KeyGatePolicy::MuxOnly) h.push_back(StrategyHint::SymmetryBreaking);
  if (c.keygate != KeyGatePolicy::XorOnly) h.push_back(StrategyHint::Multiplexers);
  h.push_back(StrategyHint::Randomness);
  if (c.selection == Selection::ConeSize || c.selection == Selection::Scoap) {
    h.push_back(StrategyHint::CorruptionPlacement);
  }
  return h;
}

std::vector<GateKind> keygate_kinds_for(const LockConfig& config) {
  switch (config.resolved().keygate) {
    case KeyGatePolicy::XorOnly: return {GateKind::Xor, GateKind::Xnor};
    case KeyGatePolicy::MuxOnly: return {GateKind::Mux};
    case KeyGatePolicy::Mixed: return {GateKind::Xor, GateKind::Xnor, GateKind::Mux};
  }
  return {};
}

namespace {

std::string_view hint_rule(StrategyHint h) {
  switch (h) {
    case StrategyHint::FanHeavy:
      return "- Prefer nets whose driving gate has many inputs and whose value feeds many gates.";
    case StrategyHint::SymmetryBreaking:
      return "- Mix XOR and XNOR key gates so the gate type does not give away the key bit.";
    case StrategyHint::Multiplexers:
      return "- Write multiplexer key gates as MUX(key, in0, in1), selecting in0 when the key is 0, "
             "with a dummy signal on the unused data input.";
    case StrategyHint::Randomness:
      return "- Pick key gate locations pseudo-randomly rather than in a regular pattern.";
    case StrategyHint::CorruptionPlacement:
      return "- Place key gates where a wrong key disturbs as many outputs as possible.";
  }
  return "";
}

std::string join_kinds(const std::vector<GateKind>& kinds) {
  std::string s;
  for (GateKind k : kinds) {
    if (!s.empty()) s += ", ";
    s += to_string(k);
  }
  return s;
}

}  // namespace

Transcript render_convert_prompt(std::string_view verilog) {
  return {{Role::User, render(convert_template().text, {{"verilog", std::string(verilog)}})}};
}

Transcript render_obfuscate_prompt(std::string_view bench, const ObfuscatePrompt& p) {
  std::string rules;
  for (StrategyHint h : p.hints) {
    rules += hint_rule(h);
    rules += '\n';
  }
  std::vector<GateKind> allowed{GateKind::And, GateKind::Nand, GateKind::Or,  GateKind::Nor,
                                GateKind::Xor, GateKind::Xnor, GateKind::Not, GateKind::Buff};
  if (std::find(p.keygate_kinds.begin(), p.keygate_kinds.end(), GateKind::Mux) != p.keygate_kinds.end()) {
    allowed.push_back(GateKind::Mux);
  }
  const std::size_t last = p.key_size == 0 ? 0 : p.key_size - 1;
  std::map<std::string, std::string> values{
      {"key_size", std::to_string(p.key_size)},
      {"key_prefix", p.key_prefix},
      {"last_key", std::to_string(last)},
      {"keygate_kinds", join_kinds(p.keygate_kinds)},
      {"allowed_kinds", join_kinds(allowed)},
      {"strategy_rules", rules},
      {"bench", std::string(bench)},
  };
  return {{Role::User, render(obfuscate_template().text, values)}};
}

Transcript render_repair_prompt(std::string_view error) {
  return {{Role::User, render(repair_template().text, {{"error", std::string(error)}})}};
}

}  // namespace obfus::llm
