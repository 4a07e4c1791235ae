#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "obfus/bench_io.hpp"
#include "obfus/cnf.hpp"
#include "obfus/key.hpp"
#include "obfus/netlist.hpp"
#include "obfus/sat.hpp"
#include "obfus/simulate.hpp"

namespace obfus {

/// Black-box access to the unlocked circuit, backed by simulation.
class Oracle {
 public:
  explicit Oracle(Netlist netlist);

  const Netlist& netlist() const noexcept { return netlist_; }
  /// Bits in the oracle's own port order.
  Bits query(const Bits& inputs) const;
  Assignment query(const Assignment& inputs) const;
  std::uint64_t queries() const noexcept { return queries_; }

 private:
  Netlist netlist_;
  mutable PackedSimulator sim_;
  mutable std::uint64_t queries_ = 0;
};

struct MiterOptions {
  std::string key_prefix = std::string(kDefaultKeyPrefix);
  /// Debug: build the miter even without key inputs.
  bool allow_no_keys = false;
  /// Guard the "some output differs" clause with an activation variable
  /// instead of asserting it outright.
  bool gate_difference = false;
};

/// Two copies of a locked circuit over shared primary inputs and separate
/// key variables, constrained to disagree on some output.
struct Miter {
  CnfFormula cnf;
  VarMap copy_a;
  VarMap copy_b;
  std::vector<NetName> inputs;      // non-key primary inputs
  std::vector<NetName> key_inputs;
  std::vector<Lit> input_vars;
  std::vector<Lit> key_a;
  std::vector<Lit> key_b;
  std::vector<Lit> diff;            // one per primary output
  Lit activation = 0;               // 0 unless gate_difference
};

/// Throws AttackError when the netlist has no key inputs (unless allowed).
Miter build_miter(const Netlist& locked, const MiterOptions& options = {});

enum class AttackStatus { KeyRecovered, AbortedTimeout, AbortedIterationCap };
std::string_view to_string(AttackStatus s);

struct AttackOptions {
  std::string key_prefix = std::string(kDefaultKeyPrefix);
  std::chrono::milliseconds timeout{300'000};
  /// Default 2^min(k, 20).
  std::optional<std::uint64_t> iteration_cap;
  /// Null selects the built-in incremental solver; any other backend is
  /// re-run on the accumulated formula every iteration.
  std::shared_ptr<SatBackend> backend;
};

struct Dip {
  Bits inputs;   // AttackResult::input_names order
  Bits outputs;  // AttackResult::output_names order
};

struct AttackResult {
  AttackStatus status = AttackStatus::AbortedTimeout;
  std::optional<Key> recovered_key;
  std::uint64_t iterations = 0;
  std::vector<Dip> dips;
  double elapsed_ms = 0;
  SolverStats solver_stats;
  std::vector<NetName> input_names;
  std::vector<NetName> output_names;
  std::vector<NetName> key_inputs;
  std::uint64_t iteration_cap = 0;
  /// Clause count after each DIP's constraints were added.
  std::vector<std::size_t> clause_counts;
  /// The recovered key passed the internal equivalence check.
  bool verified = false;
};

/// Oracle-guided distinguishing-input attack. On success the recovered key
/// is checked by equivalence_check before returning; a failing check or an
/// unsatisfiable key extraction throws AttackError. Interface mismatches
/// throw InterfaceError.
AttackResult sat_attack(const Netlist& locked, const Oracle& oracle, const AttackOptions& options = {});

struct EquivalenceOptions {
  std::shared_ptr<SatBackend> backend;
  SolveLimits limits;
};

struct EquivalenceResult {
  enum class Status { Equivalent, Different, Aborted };
  Status status = Status::Equivalent;
  /// Primary-input values of `a` on which the outputs differ (Different).
  std::optional<Assignment> counterexample;
  SolverStats stats;

  bool equivalent() const noexcept { return status == Status::Equivalent; }
};

/// SAT miter over ports matched by name. Throws InterfaceError listing the
/// missing and extra ports. Counterexamples are re-simulated; a spurious
/// one throws SolverError.
EquivalenceResult equivalence_check(const Netlist& a, const Netlist& b,
                                    const EquivalenceOptions& options = {});

/// Throws InterfaceError unless both netlists have the same input and
/// output name sets.
void check_same_interface(const Netlist& a, const Netlist& b);

struct CorruptionSamples {
  std::size_t wrong_keys = 100;
  std::size_t inputs = 100;
};

struct CorruptionStats {
  double corruption_rate = 0;
  double mean_output_hamming = 0;
  std::size_t pairs = 0;
};

/// Uniform wrong keys (rejection-sampled, with replacement) against uniform
/// inputs. Throws StatError for a zero-width key or empty sample sizes.
CorruptionStats corruption_stats(const Netlist& locked, const Oracle& oracle, const Key& correct_key,
                                 const CorruptionSamples& samples, std::uint64_t seed,
                                 std::string_view key_prefix = kDefaultKeyPrefix);

/// Same measurement with caller-chosen keys.
CorruptionStats corruption_stats_for_keys(const Netlist& locked, const Oracle& oracle,
                                          const std::vector<Key>& keys, std::size_t inputs,
                                          std::uint64_t seed,
                                          std::string_view key_prefix = kDefaultKeyPrefix);

}  // namespace obfus
