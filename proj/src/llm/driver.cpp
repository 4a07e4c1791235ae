#include <functional>
#include <optional>

#include "obfus/error.hpp"
#include "obfus/llm/llm.hpp"
#include "obfus/verify.hpp"
#include "obfus/verilog.hpp"

namespace obfus::llm {

std::string_view to_string(FinalSource s) {
  switch (s) {
    case FinalSource::Llm: return "llm";
    case FinalSource::Fallback: return "fallback";
  }
  return "?";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// First `# key=<bits>` comment anywhere in the reply.
std::optional<Key> declared_key(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() != '#') continue;
    line = trim(line.substr(1));
    if (line.substr(0, 3) != "key") continue;
    line = trim(line.substr(3));
    if (line.empty() || line.front() != '=') continue;
    try {
      return Key::from_string(trim(line.substr(1)));
    } catch (const ParseError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

struct Failure {
  std::string stage;
  std::string message;
};

std::string describe(const Assignment& x) {
  std::string s;
  for (const auto& [name, v] : x) s += (s.empty() ? "" : " ") + name + "=" + (v ? "1" : "0");
  return s;
}

// Prompt, validate, and re-prompt with the error up to the repair cap.
// `accept` returns a failure description or nothing on success.
template <class Accept>
bool converse(Transport& transport, Transcript initial, const DriverConfig& config, LlmRunRecord& record,
              Accept&& accept) {
  record.model = config.model;
  record.params = config.params;
  record.transcript = std::move(initial);
  for (std::size_t attempt = 0; attempt <= config.max_repairs; ++attempt) {
    std::optional<Failure> failure;
    try {
      auto cr = run_with_continuation(transport, record.transcript, config.model, config.params, config.limits);
      record.continuation_count += cr.continuations;
      record.transport_retries += cr.transport_retries;
      failure = accept(strip_code_fences(cr.text));
    } catch (const TransportError& e) {
      record.validations.push_back({attempt, false, "transport", e.what()});
      return false;
    } catch (const TruncationError& e) {
      failure = Failure{"truncation", e.what()};
    }
    if (!failure) {
      record.validations.push_back({attempt, true, "accepted", ""});
      return true;
    }
    record.validations.push_back({attempt, false, failure->stage, failure->message});
    if (attempt < config.max_repairs) {
      auto repair = render_repair_prompt(failure->message);
      record.transcript.insert(record.transcript.end(), repair.begin(), repair.end());
    }
  }
  return false;
}

std::string last_failure(const LlmRunRecord& r) {
  if (r.validations.empty()) return "no reply";
  const auto& v = r.validations.back();
  return v.stage + ": " + v.message;
}

}  // namespace

ConvertResult llm_convert(Transport& transport, std::string_view verilog, const DriverConfig& config) {
  std::optional<Netlist> reference;
  try {
    reference = parse_verilog_subset(verilog);
  } catch (const Error&) {
    // Outside the local subset; the reply is only checked for validity.
  }

  ConvertResult result;
  result.record.template_id = std::string(convert_template().id);
  auto accept = [&](const std::string& text) -> std::optional<Failure> {
    BenchParseOptions po;
    if (reference) po.name = reference->name;
    Netlist candidate;
    try {
      candidate = parse_bench(text, po);
    } catch (const Error& e) {
      return Failure{"parse", e.what()};
    }
    if (reference) {
      try {
        check_same_interface(*reference, candidate);
      } catch (const InterfaceError& e) {
        return Failure{"structural", e.what()};
      }
      auto eq = equivalence_check(*reference, candidate);
      if (!eq.equivalent()) {
        return Failure{"functional", "the netlist differs from the Verilog source" +
                                         (eq.counterexample ? " on input " + describe(*eq.counterexample) : "")};
      }
    }
    result.netlist = std::move(candidate);
    return std::nullopt;
  };

  if (converse(transport, render_convert_prompt(verilog), config, result.record, accept)) return result;
  if (config.fallback && reference) {
    result.netlist = *reference;
    result.record.final_source = FinalSource::Fallback;
    return result;
  }
  throw LlmError("conversion failed after " + std::to_string(result.record.validations.size()) +
                 " attempts; last error: " + last_failure(result.record));
}

ObfuscateResult llm_obfuscate(Transport& transport, const Netlist& netlist, const LockConfig& config,
                              const DriverConfig& driver) {
  const LockConfig cfg = config.resolved();
  cfg.validate();

  ObfuscatePrompt prompt;
  prompt.key_size = cfg.key_size;
  prompt.keygate_kinds = keygate_kinds_for(cfg);
  prompt.hints = hints_for(cfg);
  prompt.key_prefix = cfg.key_prefix;

  ObfuscateResult result;
  result.record.template_id = std::string(obfuscate_template().id);

  auto accept = [&](const std::string& text) -> std::optional<Failure> {
    BenchParseOptions po;
    po.name = netlist.name;
    po.key_prefix = cfg.key_prefix;
    Netlist candidate;
    try {
      candidate = parse_bench(text, po);
    } catch (const Error& e) {
      return Failure{"parse", e.what()};
    }
    auto keys = key_inputs_of(candidate, cfg.key_prefix);
    if (keys.size() != cfg.key_size) {
      return Failure{"structural", "expected " + std::to_string(cfg.key_size) + " key inputs named " +
                                       cfg.key_prefix + "<i>, found " + std::to_string(keys.size())};
    }
    auto diags = structural_check(candidate, keys, netlist, cfg.key_prefix);
    if (!diags.empty()) {
      std::string msg;
      for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + d;
      return Failure{"structural", msg};
    }

    VerifyOptions vo;
    vo.key_prefix = cfg.key_prefix;
    if (cfg.key_size > 8) vo.mode = VerifyMode::Sat;
    auto works = [&](const Key& k) {
      return functional_verify(candidate, keys, netlist, k, vo).functional.kind ==
             FunctionalResult::Kind::Equivalent;
    };

    std::optional<Key> key = declared_key(text);
    if (key && key->size() != keys.size()) key.reset();
    if (key && !works(*key)) {
      if (cfg.key_size > 8) return Failure{"functional", "the declared key does not restore the original function"};
      key.reset();
    }
    if (!key && cfg.key_size <= 8) {
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << cfg.key_size) && !key; ++v) {
        Key k = Key::from_integer(v, cfg.key_size);
        if (works(k)) key = k;
      }
      if (!key) return Failure{"functional", "no key value restores the original function"};
    }
    if (!key) return Failure{"key", "missing '# key=<bits>' declaration"};

    result.locked.netlist = std::move(candidate);
    result.locked.key_inputs = std::move(keys);
    result.locked.correct_key = *key;
    result.locked.ledger.clear();
    return std::nullopt;
  };

  auto transcript = render_obfuscate_prompt(emit_bench(netlist), prompt);
  if (converse(transport, std::move(transcript), driver, result.record, accept)) return result;
  if (driver.fallback) {
    result.locked = lock(netlist, cfg);
    result.record.final_source = FinalSource::Fallback;
    return result;
  }
  throw LlmError("obfuscation failed after " + std::to_string(result.record.validations.size()) +
                 " attempts; last error: " + last_failure(result.record));
}

}  // namespace obfus::llm
