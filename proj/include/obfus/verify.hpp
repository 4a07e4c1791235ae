#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obfus/attack.hpp"
#include "obfus/key.hpp"
#include "obfus/locking.hpp"
#include "obfus/netlist.hpp"

namespace obfus {

enum class VerifyMode { Auto, Exhaustive, Sat };
std::string_view to_string(VerifyMode m);

/// Auto mode enumerates up to this many primary inputs.
inline constexpr std::size_t kExhaustiveAutoLimit = 16;
/// Explicit exhaustive requests above this are refused.
inline constexpr std::size_t kExhaustiveHardLimit = 28;

/// Interface rule for a locked netlist against its original: inputs are
/// the original inputs plus the key inputs, every key input carries the
/// prefix, original input names survive, and the output name sets match.
std::vector<std::string> structural_check(const Netlist& locked, const std::vector<NetName>& key_inputs,
                                          const Netlist& original,
                                          std::string_view key_prefix = kDefaultKeyPrefix);
inline std::vector<std::string> structural_check(const LockedNetlist& locked, const Netlist& original,
                                                 std::string_view key_prefix = kDefaultKeyPrefix) {
  return structural_check(locked.netlist, locked.key_inputs, original, key_prefix);
}

struct FunctionalResult {
  enum class Kind { Equivalent, Mismatch, Skipped };
  Kind kind = Kind::Skipped;
  /// Original primary-input values on which outputs differ (Mismatch).
  std::optional<Assignment> counterexample;
  std::string reason;  // Skipped
};
std::string_view to_string(FunctionalResult::Kind k);

struct Verdict {
  bool structural_ok = false;
  std::vector<std::string> diagnostics;
  FunctionalResult functional;
  VerifyMode mode_used = VerifyMode::Exhaustive;
  /// Input vectors simulated (exhaustive mode).
  std::uint64_t vectors = 0;
};

struct VerifyOptions {
  VerifyMode mode = VerifyMode::Auto;
  std::string key_prefix = std::string(kDefaultKeyPrefix);
  EquivalenceOptions sat;
};

/// Structural check, then the locked circuit under `key` against the
/// original. Exhaustive mode simulates the locked netlist with the key
/// inputs held constant; SAT mode checks apply_key(locked, key) with a
/// miter. A failed structural check skips the functional step. Throws
/// VerifyError for a key width mismatch or a refused exhaustive request.
Verdict functional_verify(const Netlist& locked, const std::vector<NetName>& key_inputs,
                          const Netlist& original, const Key& key, const VerifyOptions& options = {});
inline Verdict functional_verify(const LockedNetlist& locked, const Netlist& original, const Key& key,
                                 const VerifyOptions& options = {}) {
  return functional_verify(locked.netlist, locked.key_inputs, original, key, options);
}

}  // namespace obfus
