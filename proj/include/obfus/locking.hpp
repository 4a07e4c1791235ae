#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "obfus/bench_io.hpp"
#include "obfus/key.hpp"
#include "obfus/netlist.hpp"

namespace obfus {

enum class KeyGatePolicy { XorOnly, MuxOnly, Mixed };
enum class Selection { Random, ConeSize, Scoap, Sll, FanHeavy };
enum class DummyPolicy { Constant, PrimaryInput, OtherConeNet, RandomFunction };
enum class Preset { SatHard };

std::string_view to_string(KeyGatePolicy p);
std::string_view to_string(Selection s);
std::string_view to_string(DummyPolicy d);
std::string_view to_string(Preset p);

struct LockConfig {
  std::size_t key_size = 1;
  KeyGatePolicy keygate = KeyGatePolicy::XorOnly;
  /// Fraction of key bits realised as XOR/XNOR under the mixed policy.
  double xor_fraction = 0.5;
  Selection selection = Selection::Random;
  DummyPolicy dummy = DummyPolicy::Constant;
  std::uint64_t seed = 0;
  std::optional<Preset> preset;
  std::string key_prefix = std::string(kDefaultKeyPrefix);
  /// Debug: accept key_size 0 (identity transform).
  bool allow_empty_key = false;

  /// Throws ConfigError.
  void validate() const;
  /// Copy with the preset expanded: sat_hard = mixed(0.5), fan_heavy,
  /// other_cone_net.
  LockConfig resolved() const;
};

/// One inserted key gate.
struct LockRecord {
  std::size_t key_index = 0;
  NetName target;      // net whose loads now see the key gate output
  NetName original;    // net carrying the unlocked function after insertion
  GateKind gate = GateKind::Xor;
  std::optional<DummyPolicy> dummy;
  std::vector<NetName> dummy_sources;  // dummy net first, then any helper gates
  std::optional<bool> constant;        // constant dummies only
  int original_slot = -1;              // MUX data slot holding `original`
};

struct LockedNetlist {
  Netlist netlist;
  std::vector<NetName> key_inputs;
  Key correct_key;
  std::vector<LockRecord> ledger;
};

/// Candidate nets for key gates: primary inputs and gate outputs, excluding
/// existing key inputs. Netlist order.
std::vector<NetName> eligible_nets(const Netlist& netlist,
                                   std::string_view key_prefix = kDefaultKeyPrefix);

/// Distinct nets, length k. Scored strategies rank descending by score,
/// ties by name ascending:
///   cone_size  |tfi| + |tfo|
///   scoap      cc0 + cc1 + co (unobservable nets last)
///   fan_heavy  fanout_count x driver arity (0 for primary inputs)
/// sll walks cone_size order and skips nets on a path with a chosen net.
/// Throws SelectionError.
std::vector<NetName> select_nets(const Netlist& netlist, Selection strategy, std::size_t k,
                                 std::uint64_t seed,
                                 std::string_view key_prefix = kDefaultKeyPrefix);

/// Key bit b on net n: n's driver is renamed, and n = XOR(n', key) for b=0,
/// XNOR for b=1. Primary-input targets keep their name; their gate loads
/// are rewired to the key gate instead.
LockedNetlist insert_xor_keygates(const Netlist& netlist, const std::vector<NetName>& nets,
                                  const Key& key_bits,
                                  std::string_view key_prefix = kDefaultKeyPrefix);

/// n = MUX(key, in0, in1) with the original function on slot b and a dummy
/// on the other slot. Constant dummies are XOR(x, x) / XNOR(x, x) over a
/// primary input x; random functions are gate trees of depth <= 2 over 2-3
/// nets outside the target's cones, or outside its fan-out cone alone when
/// fewer than two such nets exist.
LockedNetlist insert_mux_keygates(const Netlist& netlist, const std::vector<NetName>& nets,
                                  const Key& key_bits, DummyPolicy dummy, std::uint64_t seed,
                                  std::string_view key_prefix = kDefaultKeyPrefix);

/// generate_key -> select_nets -> insertion. Byte-deterministic for a fixed
/// (netlist, config). Gate growth per key bit: exactly 1 for XOR; for MUX
/// 1 plus the dummy cost (constant 1, primary input 0, other-cone net 0,
/// random function <= 2), so at most 3.
LockedNetlist lock(const Netlist& netlist, const LockConfig& config);

inline constexpr std::size_t kMaxGatesPerKeyBit = 3;

/// Substitutes constants for the key inputs and simplifies (constant
/// propagation, folding of the buffers it creates, removal of logic that
/// only fed key gates). Throws LockError on width mismatch.
Netlist apply_key(const Netlist& locked, const std::vector<NetName>& key_inputs, const Key& key);
inline Netlist apply_key(const LockedNetlist& locked, const Key& key) {
  return apply_key(locked.netlist, locked.key_inputs, key);
}

/// Inputs carrying the prefix, in port order.
std::vector<NetName> key_inputs_of(const Netlist& netlist,
                                   std::string_view key_prefix = kDefaultKeyPrefix);

}  // namespace obfus
