#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "obfus/attack.hpp"
#include "obfus/llm/llm.hpp"
#include "obfus/locking.hpp"
#include "obfus/report.hpp"
#include "obfus/verify.hpp"

namespace obfus {

struct PipelineOptions {
  LockConfig lock;
  VerifyMode verify_mode = VerifyMode::Auto;
  bool attack = true;
  std::chrono::milliseconds attack_timeout{300'000};
  std::optional<std::uint64_t> iteration_cap;
  bool corruption = true;
  CorruptionSamples samples;
  /// Non-null routes Verilog conversion and locking through the model.
  llm::Transport* transport = nullptr;
  llm::DriverConfig driver;
  /// Extra config-echo entries (endpoint and the like).
  Json extra_config = Json::object();
};

struct PipelineRun {
  Netlist original;
  LockedNetlist locked;
  std::string locked_bench;
  std::string key_file;
  Report report;
  /// Locked circuit verified equivalent and, when run, the attack finished.
  bool ok = false;
};

/// Reads `source_text` as Verilog when `source_name` ends in ".v", bench
/// otherwise, then lock -> verify -> attack -> corruption.
PipelineRun run_pipeline(const std::string& source_text, const std::string& source_name,
                         const PipelineOptions& options);

/// Writes locked.bench, key.txt, report.json and, for model runs, the
/// transcripts into `<root>/<timestamp>_s<seed>` (suffixed on collision).
/// Returns the directory.
std::filesystem::path write_run_directory(const PipelineRun& run, const std::filesystem::path& root);

/// Whole-file helpers; throw InputError with the path on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace obfus
