#include "obfus/report.hpp"

#include <ctime>

namespace obfus {

std::string_view tool_version() { return OBFUS_VERSION; }

namespace {

std::string bit_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s += b ? '1' : '0';
  return s;
}

template <class T>
Json or_null(const std::optional<T>& v) {
  return v ? to_json(*v) : Json(nullptr);
}

Json to_json(const SolverStats& s) {
  return Json{{"decisions", s.decisions},
              {"conflicts", s.conflicts},
              {"propagations", s.propagations},
              {"restarts", s.restarts},
              {"learnt_clauses", s.learnt_clauses}};
}

}  // namespace

Json to_json(const NetlistStats& s) {
  Json kinds = Json::object();
  for (const auto& [kind, n] : s.by_kind) kinds[std::string(to_string(kind))] = n;
  return Json{{"inputs", s.inputs}, {"outputs", s.outputs}, {"gates", s.gates}, {"by_kind", kinds}};
}

Json to_json(const LockConfig& c) {
  return Json{{"key_size", c.key_size},
              {"keygate", to_string(c.keygate)},
              {"xor_fraction", c.xor_fraction},
              {"selection", to_string(c.selection)},
              {"dummy", to_string(c.dummy)},
              {"preset", c.preset ? Json(to_string(*c.preset)) : Json(nullptr)},
              {"seed", c.seed},
              {"prng", kPrngName},
              {"key_prefix", c.key_prefix}};
}

Json to_json(const Assignment& a) {
  Json j = Json::object();
  for (const auto& [name, v] : a) j[name] = v ? 1 : 0;
  return j;
}

Json to_json(const Verdict& v) {
  return Json{{"structural", {{"ok", v.structural_ok}, {"diagnostics", v.diagnostics}}},
              {"functional",
               {{"result", to_string(v.functional.kind)},
                {"mode", to_string(v.mode_used)},
                {"vectors", v.vectors},
                {"counterexample", or_null(v.functional.counterexample)},
                {"reason", v.functional.reason.empty() ? Json(nullptr) : Json(v.functional.reason)}}}};
}

Json to_json(const AttackResult& r) {
  Json dips = Json::array();
  for (const auto& d : r.dips) dips.push_back({{"inputs", bit_string(d.inputs)}, {"outputs", bit_string(d.outputs)}});
  return Json{{"status", to_string(r.status)},
              {"recovered_key", r.recovered_key ? Json(r.recovered_key->to_string()) : Json(nullptr)},
              {"verified", r.verified},
              {"iterations", r.iterations},
              {"iteration_cap", r.iteration_cap},
              {"elapsed_ms", r.elapsed_ms},
              {"key_inputs", r.key_inputs},
              {"input_names", r.input_names},
              {"output_names", r.output_names},
              {"dips", dips},
              {"clause_counts", r.clause_counts},
              {"solver", to_json(r.solver_stats)}};
}

Json to_json(const CorruptionStats& s) {
  return Json{{"corruption_rate", s.corruption_rate},
              {"mean_output_hamming", s.mean_output_hamming},
              {"pairs", s.pairs}};
}

Json to_json(const llm::Transcript& t) {
  Json j = Json::array();
  for (const auto& m : t) j.push_back({{"role", llm::to_string(m.role)}, {"content", m.content}});
  return j;
}

Json to_json(const llm::LlmRunRecord& r) {
  Json validations = Json::array();
  for (const auto& v : r.validations) {
    validations.push_back({{"attempt", v.attempt}, {"ok", v.ok}, {"stage", v.stage}, {"message", v.message}});
  }
  return Json{{"template_id", r.template_id},
              {"model", r.model},
              {"params",
               {{"temperature", r.params.temperature},
                {"top_p", r.params.top_p},
                {"max_tokens", r.params.max_tokens}}},
              {"continuation_count", r.continuation_count},
              {"transport_retries", r.transport_retries},
              {"validations", validations},
              {"final_source", llm::to_string(r.final_source)},
              {"transcript", to_json(r.transcript)}};
}

Json to_json(const Report& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = {{"name", "obfus"}, {"version", tool_version()}};
  j["command"] = r.command;
  j["circuit"] = r.circuit;
  j["config"] = r.config;
  j["stats"] = {{"before", or_null(r.stats_before)}, {"after", or_null(r.stats_after)}};
  j["verification"] = or_null(r.verdict);
  j["attack"] = or_null(r.attack);
  j["corruption"] = or_null(r.corruption);
  if (r.llm.empty()) {
    j["llm"] = nullptr;
  } else {
    j["llm"] = Json::array();
    for (const auto& rec : r.llm) j["llm"].push_back(to_json(rec));
  }
  j["timestamps"] = {{"started", r.started_at}, {"finished", r.finished_at}};
  return j;
}

std::string dump_report(const Report& r) { return to_json(r).dump(2) + "\n"; }

Json comparable(Json report) {
  report.erase("timestamps");
  if (report.contains("attack") && report["attack"].is_object()) report["attack"].erase("elapsed_ms");
  return report;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace obfus
