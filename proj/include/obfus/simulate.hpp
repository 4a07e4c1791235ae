#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "obfus/netlist.hpp"
#include "obfus/simd/kernels.hpp"

namespace obfus {

/// Net name -> bit, total over a port list.
using Assignment = std::map<NetName, bool>;

/// Single-pattern evaluation. `inputs` must cover exactly the primary
/// inputs; throws InputError naming the first missing (or unknown) net.
Assignment simulate(const Netlist& netlist, const Assignment& inputs);

/// Positional bits, one per primary input / output in port order.
using Bits = std::vector<bool>;

/// Reusable 64-patterns-per-word simulator over one netlist.
class PackedSimulator {
 public:
  explicit PackedSimulator(const Netlist& netlist, simd::Isa isa = simd::best_isa());

  const NetGraph& graph() const noexcept { return graph_; }
  simd::Isa isa() const noexcept { return isa_; }

  /// `inputs` is PI-major: input i occupies [i * words, (i + 1) * words).
  void run(std::span<const std::uint64_t> inputs, std::size_t words);

  std::size_t words() const noexcept { return words_; }
  std::span<const std::uint64_t> net(NetId id) const;
  std::span<const std::uint64_t> output(std::size_t po_index) const;

  /// One pattern, positional.
  Bits evaluate(const Bits& inputs);

 private:
  NetGraph graph_;
  simd::Program program_;
  simd::Isa isa_;
  std::vector<std::uint64_t> values_;
  std::size_t words_ = 0;
};

/// Writes PI-major words for patterns [first_word * 64, (first_word + words) * 64)
/// of the exhaustive enumeration, where pattern p assigns bit i of p to
/// input i.
void exhaustive_patterns(std::size_t input_count, std::uint64_t first_word, std::size_t words,
                         std::span<std::uint64_t> out);

}  // namespace obfus
