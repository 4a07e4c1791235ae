#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace obfus {

using NetName = std::string;

enum class GateKind : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buff, Mux };

inline constexpr GateKind kAllGateKinds[] = {
    GateKind::And, GateKind::Nand, GateKind::Or,   GateKind::Nor, GateKind::Xor,
    GateKind::Xnor, GateKind::Not, GateKind::Buff, GateKind::Mux};

/// Upper-case bench spelling (`BUFF` for buffers).
std::string_view to_string(GateKind kind);

/// Case-insensitive; accepts `BUF` as an alias of `BUFF`.
std::optional<GateKind> parse_gate_kind(std::string_view text);

/// NOT/BUFF: 1, MUX: 3 (select, in0, in1), everything else: >= 2.
bool arity_ok(GateKind kind, std::size_t inputs);

/// Letters, digits and underscore, non-empty.
bool is_valid_net_name(std::string_view name);

struct Gate {
  NetName output;
  GateKind kind = GateKind::Buff;
  std::vector<NetName> inputs;

  bool operator==(const Gate&) const = default;
};

/// Combinational gate-level circuit. A plain value; every pass returns a
/// new netlist instead of mutating its argument.
struct Netlist {
  std::string name;
  std::vector<NetName> inputs;
  std::vector<NetName> outputs;
  std::vector<Gate> gates;

  bool operator==(const Netlist&) const = default;
};

/// Same name and port lists and the same gate set keyed by output net.
/// Gate list order is not significant.
bool structurally_equal(const Netlist& a, const Netlist& b);

struct Diagnostic {
  enum class Kind {
    InvalidName,
    MultiDriver,
    Undriven,
    BadArity,
    Cycle,
    UnknownOutput,
    DuplicatePort,
  };
  Kind kind;
  NetName net;
  std::string message;
};

std::string_view to_string(Diagnostic::Kind kind);

/// All invariant violations; an empty result means the netlist is valid.
std::vector<Diagnostic> validate(const Netlist& netlist);

using NetId = std::uint32_t;

/// Indexed, read-only view of a valid netlist. Nets are numbered primary
/// inputs first (port order), then gate outputs (gate order). Construction
/// throws StructuralError on any validate() diagnostic.
class NetGraph {
 public:
  explicit NetGraph(const Netlist& netlist);

  const Netlist& netlist() const noexcept { return netlist_; }
  std::size_t net_count() const noexcept { return names_.size(); }
  std::size_t input_count() const noexcept { return netlist_.inputs.size(); }

  std::optional<NetId> find(std::string_view name) const;
  /// Throws UnknownNet.
  NetId id(std::string_view name) const;
  const NetName& name(NetId net) const { return names_[net]; }

  bool is_input(NetId net) const { return net < input_count(); }
  /// Index into netlist().gates, or -1 for primary inputs.
  std::ptrdiff_t driver(NetId net) const;
  std::span<const NetId> fanins(NetId net) const;
  /// Driven nets reading `net`, one entry per input position.
  std::span<const NetId> loads(NetId net) const { return loads_[net]; }
  const std::vector<NetId>& output_ids() const noexcept { return outputs_; }
  bool is_output(NetId net) const { return po_slots_[net] > 0; }
  std::size_t output_slots(NetId net) const { return po_slots_[net]; }

  /// Gate indices, drivers before readers, ties by original gate index.
  const std::vector<std::size_t>& topo_gates() const noexcept { return topo_; }

  /// Transitive fan-in / fan-out of `net`, excluding `net`. Ascending ids.
  std::vector<NetId> tfi(NetId net) const;
  std::vector<NetId> tfo(NetId net) const;
  std::vector<bool> tfi_mask(NetId net) const;
  std::vector<bool> tfo_mask(NetId net) const;

 private:
  Netlist netlist_;
  std::vector<NetName> names_;
  std::unordered_map<std::string, NetId> index_;
  std::vector<std::vector<NetId>> fanins_;
  std::vector<std::vector<NetId>> loads_;
  std::vector<NetId> outputs_;
  std::vector<std::uint32_t> po_slots_;
  std::vector<std::size_t> topo_;
};

/// Throws StructuralError naming a net on a cycle (or any other violation).
std::vector<Gate> topo_order(const Netlist& netlist);

std::set<NetName> tfi(const Netlist& netlist, std::string_view net);
std::set<NetName> tfo(const Netlist& netlist, std::string_view net);

/// Gate-input positions plus primary-output slots reading `net`.
std::size_t fanout_count(const Netlist& netlist, std::string_view net);

struct NetlistStats {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::size_t gates = 0;
  std::map<GateKind, std::size_t> by_kind;

  bool operator==(const NetlistStats&) const = default;
};

NetlistStats stats(const Netlist& netlist);

/// Hands out `<base>_nl<counter>` names that collide with nothing already
/// reserved. One counter is shared by every base.
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(const Netlist& netlist);

  void reserve(const NetName& name) { taken_.insert(name); }
  bool taken(const NetName& name) const { return taken_.count(name) != 0; }
  NetName make(std::string_view base);

 private:
  std::set<NetName, std::less<>> taken_;
  std::uint64_t counter_ = 0;
};

}  // namespace obfus
