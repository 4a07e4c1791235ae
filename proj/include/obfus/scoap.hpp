#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "obfus/netlist.hpp"

namespace obfus {

/// Observability assigned to nets with no structural path to a primary
/// output. Additions saturate at this value.
inline constexpr std::uint64_t kUnobservable = std::numeric_limits<std::uint64_t>::max() / 4;

struct Testability {
  std::uint64_t cc0 = 0;
  std::uint64_t cc1 = 0;
  std::uint64_t co = kUnobservable;

  bool operator==(const Testability&) const = default;
};

/// SCOAP controllability/observability for every net, indexed like the
/// NetGraph the metrics were computed from.
///
/// Recurrences: AND cc1 = sum cc1 + 1, cc0 = min cc0 + 1; OR is the dual;
/// NAND/NOR compute the inner op and swap; NOT swaps, BUFF copies, both +1.
/// XOR/XNOR are evaluated as a balanced tree of 2-input XORs (each node +1,
/// XNOR swaps at the root); MUX as OR(AND(NOT s, a), AND(s, b)).
/// Observability of a gate input is co(out) + side-input sensitisation +
/// levels; a net's co is the minimum over its load positions, 0 on outputs.
class ScoapMetrics {
 public:
  ScoapMetrics() = default;
  ScoapMetrics(std::vector<NetName> nets, std::vector<Testability> values);

  std::size_t size() const noexcept { return values_.size(); }
  const NetName& net(std::size_t i) const { return nets_[i]; }
  const Testability& operator[](std::size_t i) const { return values_[i]; }
  /// Throws UnknownNet.
  const Testability& at(std::string_view net) const;

 private:
  std::vector<NetName> nets_;
  std::vector<Testability> values_;
};

ScoapMetrics scoap(const NetGraph& graph);
ScoapMetrics scoap(const Netlist& netlist);

}  // namespace obfus
