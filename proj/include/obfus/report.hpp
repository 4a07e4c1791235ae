#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "obfus/attack.hpp"
#include "obfus/llm/llm.hpp"
#include "obfus/locking.hpp"
#include "obfus/netlist.hpp"
#include "obfus/verify.hpp"

namespace obfus {

using Json = nlohmann::ordered_json;

/// Bumped on any incompatible change to the report layout
/// (docs/report.schema.json).
inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kPrngName = "mt19937_64";

std::string_view tool_version();

Json to_json(const NetlistStats& s);
Json to_json(const LockConfig& c);
Json to_json(const Assignment& a);
Json to_json(const Verdict& v);
Json to_json(const AttackResult& r);
Json to_json(const CorruptionStats& s);
Json to_json(const llm::Transcript& t);
Json to_json(const llm::LlmRunRecord& r);

/// One run of one subcommand. Sections that did not run serialize as null.
struct Report {
  std::string command;
  std::string circuit;
  Json config = Json::object();
  std::optional<NetlistStats> stats_before;
  std::optional<NetlistStats> stats_after;
  std::optional<Verdict> verdict;
  std::optional<AttackResult> attack;
  std::optional<CorruptionStats> corruption;
  /// Model sessions in call order (conversion, then locking).
  std::vector<llm::LlmRunRecord> llm;
  std::string started_at;
  std::string finished_at;
};

Json to_json(const Report& r);
/// Two-space indented JSON with a trailing newline.
std::string dump_report(const Report& r);

/// The report without timestamps and wall-clock durations, for comparing
/// two runs of the same configuration.
Json comparable(Json report);

/// ISO 8601 UTC with second resolution, e.g. 2024-05-01T12:00:00Z.
std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now());

}  // namespace obfus
